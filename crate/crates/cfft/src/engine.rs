//! End-to-end transforms: the quadratic evaluation oracle, the planned
//! fast path, and seeded randomized verification of both against each other.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::addnet::{build_addnet, direct_matvec, AdditionNetworkPlan};
use crate::gf2m::{FieldElement, FieldSpec};
use crate::planner::{build_block_form, CfftPlan};
use crate::{Error, Result};

/// Direct evaluation oracle: output j is the polynomial with coefficients
/// `f` evaluated at alpha^j by Horner's rule, alpha the deterministic
/// order-n root. Quadratically many multiplications, exact.
pub fn naive_dft(field: &FieldSpec, f: &[FieldElement]) -> Result<Vec<FieldElement>> {
    let n = f.len();
    let alpha = field.root_of_order(n)?;
    let mut out = Vec::with_capacity(n);
    let mut point = FieldElement::ONE;
    for _ in 0..n {
        let mut acc = FieldElement::ZERO;
        for &c in f.iter().rev() {
            acc = field.mul(acc, point) + c;
        }
        out.push(acc);
        point = field.mul(point, alpha);
    }
    Ok(out)
}

/// Per-stage operation counters of one transform.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StageTallies {
    pub conv_pre: u64,
    pub conv_mults: u64,
    pub conv_post: u64,
    pub av_pre: u64,
    pub av_mvp: u64,
    pub av_post: u64,
    /// Additions of the direct row-XOR path; zero when the network ran.
    pub av_direct: u64,
}

impl StageTallies {
    pub fn total_adds(&self) -> u64 {
        self.conv_pre + self.conv_post + self.av_pre + self.av_mvp + self.av_post + self.av_direct
    }
}

/// Result of one transform: the output vector plus its operation tallies.
#[derive(Clone, Debug)]
pub struct TransformResult {
    pub output: Vec<FieldElement>,
    pub tallies: StageTallies,
    pub used_addnet: bool,
}

/// A plan paired with its (optional) addition network, ready to transform
/// vectors. The engine is immutable after construction; transforms are pure
/// and independent.
#[derive(Clone, Debug)]
pub struct CfftEngine {
    pub plan: CfftPlan,
    pub addnet: Option<AdditionNetworkPlan>,
}

impl CfftEngine {
    /// Builds the block-cyclic form and addition network alongside the plan.
    pub fn new(plan: CfftPlan) -> Result<CfftEngine> {
        let form = build_block_form(&plan)?;
        let addnet = build_addnet(form)?;
        Ok(CfftEngine {
            plan,
            addnet: Some(addnet),
        })
    }

    /// Engine with only the direct evaluation path.
    pub fn without_addnet(plan: CfftPlan) -> CfftEngine {
        CfftEngine { plan, addnet: None }
    }

    /// Runs the planned transform: permute into coset blocks, one
    /// specialized convolution per coset, then the recombination product
    /// through the addition network (flag set and network present) or the
    /// direct row-XOR path. Both paths produce identical output.
    pub fn transform(&self, f: &[FieldElement], use_addnet: bool) -> Result<TransformResult> {
        let plan = &self.plan;
        if f.len() != plan.n {
            return Err(Error::LengthMismatch {
                got: f.len(),
                expected: plan.n,
            });
        }
        let mut tallies = StageTallies::default();

        let permuted: Vec<FieldElement> = plan.input_perm.iter().map(|&i| f[i]).collect();
        let mut v = Vec::with_capacity(plan.n);
        let mut offset = 0;
        for coset in &plan.partition.cosets {
            let d = coset.size();
            let sc = plan.size_class(d);
            let (block_out, conv_tally) = sc.apply(&plan.field, &permuted[offset..offset + d])?;
            tallies.conv_pre += conv_tally.pre_adds;
            tallies.conv_mults += conv_tally.mults;
            tallies.conv_post += conv_tally.post_adds;
            v.extend(block_out);
            offset += d;
        }

        let (output, used_addnet) = match (&self.addnet, use_addnet) {
            (Some(net), true) => {
                let (out, counts) = net.eval(&v)?;
                tallies.av_pre = counts.pre;
                tallies.av_mvp = counts.mvp;
                tallies.av_post = counts.post;
                (out, true)
            }
            _ => {
                let (out, adds) = direct_matvec(&plan.recombine, &v)?;
                tallies.av_direct = adds;
                (out, false)
            }
        };
        Ok(TransformResult {
            output,
            tallies,
            used_addnet,
        })
    }

    /// Transforms a batch of vectors against the shared plan.
    pub fn transform_batch(
        &self,
        inputs: &[Vec<FieldElement>],
        use_addnet: bool,
    ) -> Result<Vec<TransformResult>> {
        inputs.iter().map(|f| self.transform(f, use_addnet)).collect()
    }

    /// Seeded randomized verification: trial 0 uses the all-zero vector,
    /// later trials draw uniform random vectors from a ChaCha stream. Every
    /// trial compares the direct path, the network path (when present) and
    /// the evaluation oracle, and checks that the tallies repeat between
    /// trials (they are data-independent by construction).
    pub fn verify(&self, trials: usize, seed: u64) -> VerifyReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = self.plan.field;
        let n = self.plan.n;
        let mut failures: Vec<TrialFailure> = Vec::new();
        let mut tallies_consistent = true;
        let mut baseline: Option<(StageTallies, StageTallies)> = None;

        for trial in 0..trials {
            let f: Vec<FieldElement> = if trial == 0 {
                vec![FieldElement::ZERO; n]
            } else {
                (0..n).map(|_| field.random_element(&mut rng)).collect()
            };
            let expected = match naive_dft(&field, &f) {
                Ok(e) => e,
                Err(e) => {
                    failures.push(TrialFailure {
                        trial,
                        detail: format!("oracle error: {e}"),
                    });
                    continue;
                }
            };
            let outcome = self
                .transform(&f, false)
                .and_then(|d| self.transform(&f, true).map(|a| (d, a)));
            match outcome {
                Ok((d, a)) => {
                    if d.output != expected {
                        failures.push(TrialFailure {
                            trial,
                            detail: "direct path disagrees with evaluation oracle".into(),
                        });
                    }
                    if self.addnet.is_some() && a.output != expected {
                        failures.push(TrialFailure {
                            trial,
                            detail: "network path disagrees with evaluation oracle".into(),
                        });
                    }
                    if d.output != a.output {
                        failures.push(TrialFailure {
                            trial,
                            detail: "network path disagrees with direct path".into(),
                        });
                    }
                    match &baseline {
                        None => baseline = Some((d.tallies, a.tallies)),
                        Some((bd, ba)) => {
                            if d.tallies != *bd || a.tallies != *ba {
                                tallies_consistent = false;
                            }
                        }
                    }
                }
                Err(e) => {
                    failures.push(TrialFailure {
                        trial,
                        detail: format!("transform error: {e}"),
                    });
                }
            }
        }
        let failed_trials: BTreeSet<usize> = failures.iter().map(|f| f.trial).collect();
        VerifyReport {
            seed,
            trials,
            passed: trials - failed_trials.len(),
            failures,
            tallies_consistent,
        }
    }
}

/// One failed verification trial.
#[derive(Clone, Debug)]
pub struct TrialFailure {
    pub trial: usize,
    pub detail: String,
}

/// Outcome of [`CfftEngine::verify`].
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    pub failures: Vec<TrialFailure>,
    pub tallies_consistent: bool,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty() && self.tallies_consistent
    }
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{}/{} pass (seed {})", self.passed, self.trials, self.seed)?;
        for fail in &self.failures {
            writeln!(f, "  trial {}: {}", fail.trial, fail.detail)?;
        }
        if !self.tallies_consistent {
            writeln!(f, "  tallies varied between trials")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Vector files
// ---------------------------------------------------------------------------

/// One element per line, lowercase hex of the bitmask, index 0 first.
pub fn format_vector(v: &[FieldElement]) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    for e in v {
        writeln!(s, "{:x}", e.bits()).unwrap();
    }
    s
}

/// Parses the vector file format; rejects bad hex and out-of-range masks
/// with the offending line number.
pub fn parse_vector(field: &FieldSpec, text: &str) -> Result<Vec<FieldElement>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bits = u32::from_str_radix(line, 16).map_err(|e| Error::VectorFile {
            line: i + 1,
            reason: format!("bad hex {line:?}: {e}"),
        })?;
        out.push(field.element(bits).map_err(|e| Error::VectorFile {
            line: i + 1,
            reason: e.to_string(),
        })?);
    }
    Ok(out)
}
