//! Transform plans: everything needed to evaluate a polynomial at all n-th
//! roots of unity by the cyclotomic decomposition.
//!
//! A plan carries the input permutation into coset blocks, one specialized
//! convolution per coset size (cosets of equal size share their normal basis
//! and therefore their kernel), and the binary recombination matrix whose
//! row j holds, blockwise, the normal-basis coordinates of alpha^(j * s_i).
//!
//! [`build_block_form`] rearranges that matrix by cosets into a grid of
//! circulant blocks, tiles the blocks up to degree-size squares, and
//! reorders rows and columns so the result is block-cyclic: block (i2, j2)
//! depends only on (j2 - i2) mod m. That form is what the structured
//! addition network consumes; the index maps for the padded input vector and
//! for recovering the original output order are precomputed here. Both the
//! per-block circulant property and the block-cyclic property are verified
//! during the build, not assumed.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bilinear::{gen_cyclic, gen_cyclic_short, specialize_left, ConvTally, SpecializedConv};
use crate::cyclotomic::CosetPartition;
use crate::gf2m::{BitMatrix, FieldElement, FieldSpec};
use crate::normal_basis::{find_normal_basis, NormalBasis};
use crate::{Error, Result};

/// Which cyclic-convolution generator backs the per-coset kernels.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ConvProfile {
    /// Wrapped padded Karatsuba, r = 3^ceil(log2 size).
    #[default]
    PaddedKaratsuba,
    /// Structured short algorithms where they win (see
    /// [`gen_cyclic_short`]); used by the complexity-bound tables.
    ShortConvolution,
}

pub fn profile_label(profile: ConvProfile) -> &'static str {
    match profile {
        ConvProfile::PaddedKaratsuba => "padded-karatsuba",
        ConvProfile::ShortConvolution => "short-convolution",
    }
}

fn profile_from_label(label: &str) -> Result<ConvProfile> {
    match label {
        "padded-karatsuba" => Ok(ConvProfile::PaddedKaratsuba),
        "short-convolution" => Ok(ConvProfile::ShortConvolution),
        other => Err(Error::PlanDocument(format!("unknown conv profile {other:?}"))),
    }
}

/// Shared machinery for all cosets of one size: the normal basis of the
/// size-d subfield, the fixed convolution kernel derived from it, and the
/// specialized cyclic convolution computing the circulant block product.
#[derive(Clone, Debug)]
pub struct SizeClass {
    pub size: usize,
    pub basis: NormalBasis,
    /// Fixed operand (g^(2^0), g^(2^(d-1)), g^(2^(d-2)), .., g^(2^1)).
    pub kernel: Vec<FieldElement>,
    pub conv: SpecializedConv,
    /// Whether the convolution output is consumed through the index-negation
    /// rewiring s -> (-s) mod d. Determined by the build-time equivalence
    /// check against the circulant block itself.
    pub reversed_output: bool,
}

impl SizeClass {
    /// Runs the specialized convolution on one coset block, including the
    /// output rewiring (wiring only, no additions).
    pub fn apply(
        &self,
        field: &FieldSpec,
        block: &[FieldElement],
    ) -> Result<(Vec<FieldElement>, ConvTally)> {
        let (raw, tally) = self.conv.apply(field, block)?;
        let d = self.size;
        let out = if self.reversed_output {
            (0..d).map(|s| raw[(d - s) % d]).collect()
        } else {
            raw
        };
        Ok((out, tally))
    }
}

/// A complete transform plan for one field and length.
#[derive(Clone, Debug)]
pub struct CfftPlan {
    pub field: FieldSpec,
    pub n: usize,
    pub partition: CosetPartition,
    pub size_classes: BTreeMap<usize, SizeClass>,
    /// input_perm[p] = source index: slot p of the permuted input reads
    /// f[input_perm[p]] (cosets in order, each in doubling order).
    pub input_perm: Vec<usize>,
    /// The n x n binary recombination matrix, columns laid out per coset:
    /// row j of block i holds the coordinates of alpha^(j * s_i) in the
    /// size-class basis.
    pub recombine: BitMatrix,
    pub profile: ConvProfile,
}

impl CfftPlan {
    pub fn size_class(&self, size: usize) -> &SizeClass {
        &self.size_classes[&size]
    }

    /// Column offset of each coset's block in the recombination matrix.
    pub fn block_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.partition.k());
        let mut acc = 0;
        for c in &self.partition.cosets {
            offsets.push(acc);
            acc += c.size();
        }
        offsets
    }
}

/// Builds a plan with the default (padded Karatsuba) convolution profile.
pub fn build_plan(field: &FieldSpec, n: usize) -> Result<CfftPlan> {
    build_plan_with(field, n, ConvProfile::PaddedKaratsuba)
}

/// Builds a plan with an explicit convolution profile.
pub fn build_plan_with(field: &FieldSpec, n: usize, profile: ConvProfile) -> Result<CfftPlan> {
    let alpha = field.root_of_order(n)?;
    let partition = CosetPartition::new(n)?;

    let mut size_classes = BTreeMap::new();
    for &size in partition.size_groups().keys() {
        size_classes.insert(size, build_size_class(field, size, profile)?);
    }

    let input_perm: Vec<usize> = partition
        .cosets
        .iter()
        .flat_map(|c| c.elements.iter().copied())
        .collect();

    // Power table of the order-n root; exponents are reduced mod n.
    let mut powers = vec![FieldElement::ONE; n];
    for j in 1..n {
        powers[j] = field.mul(powers[j - 1], alpha);
    }

    let mut recombine = BitMatrix::zero(n, n);
    let mut col = 0;
    for coset in &partition.cosets {
        let d = coset.size();
        let basis = &size_classes[&d].basis;
        for j in 0..n {
            let coords = basis.coordinates(powers[j * coset.rep % n])?;
            for s in 0..d {
                if coords >> s & 1 != 0 {
                    recombine.set(j, col + s, true);
                }
            }
        }
        col += d;
    }
    debug_assert_eq!(col, n);

    Ok(CfftPlan {
        field: *field,
        n,
        partition,
        size_classes,
        input_perm,
        recombine,
        profile,
    })
}

fn build_size_class(field: &FieldSpec, size: usize, profile: ConvProfile) -> Result<SizeClass> {
    let basis = find_normal_basis(field, size)?;
    // Kernel order: g^(2^0) followed by the conjugates in descending
    // exponent order.
    let conj = basis.conjugates().to_vec();
    let mut kernel = Vec::with_capacity(size);
    kernel.push(conj[0]);
    for s in (1..size).rev() {
        kernel.push(conj[s]);
    }
    let base = match profile {
        ConvProfile::PaddedKaratsuba => gen_cyclic(size)?,
        ConvProfile::ShortConvolution => gen_cyclic_short(size)?,
    };
    let conv = specialize_left(&base, &kernel)?;

    // The circulant block the convolution must reproduce has entry
    // (s, t) = g^(2^((s + t) mod d)). Checking all unit vectors pins the
    // whole linear map exactly.
    let matches = |reversed: bool| -> Result<bool> {
        for t in 0..size {
            let mut unit = vec![FieldElement::ZERO; size];
            unit[t] = FieldElement::ONE;
            let (raw, _) = conv.apply(field, &unit)?;
            for s in 0..size {
                let got = if reversed { raw[(size - s) % size] } else { raw[s] };
                if got != conj[(s + t) % size] {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    };
    let reversed_output = if matches(false)? {
        false
    } else if matches(true)? {
        true
    } else {
        return Err(Error::ConvOrientation(size));
    };
    Ok(SizeClass {
        size,
        basis,
        kernel,
        conv,
        reversed_output,
    })
}

/// Per-size tallies of the coset partition: (size, number of cosets) pairs
/// in ascending size order, plus the number of distinct sizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupProfile {
    pub groups: Vec<(usize, usize)>,
    pub d: usize,
}

pub fn coset_group_profile(plan: &CfftPlan) -> GroupProfile {
    let groups: Vec<(usize, usize)> = plan
        .partition
        .size_groups()
        .into_iter()
        .map(|(size, members)| (size, members.len()))
        .collect();
    let d = groups.len();
    GroupProfile { groups, d }
}

/// The block-cyclic rearrangement of a plan's recombination matrix.
///
/// Rows are permuted into coset order, every block of the resulting k x k
/// grid is verified circulant, blocks are (conceptually) tiled to m x m
/// squares, and the row/column reorder indexed by (within-block position,
/// block index) turns the tiled matrix into a block-cyclic one whose block
/// (i2, j2) is `first_block_row[(j2 - i2) mod m]`. Padding and extraction
/// are pure index maps.
#[derive(Clone, Debug)]
pub struct BlockCyclicForm {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    /// Coset sizes, partition order.
    pub sizes: Vec<usize>,
    /// Start of each coset block in the convolution-output vector.
    pub offsets: Vec<usize>,
    /// row_perm[new] = original row index of the recombination matrix.
    pub row_perm: Vec<usize>,
    /// The m matrices c_0 .. c_(m-1), each k x k: the first block-row of the
    /// block-cyclic matrix.
    pub first_block_row: Vec<BitMatrix>,
    /// For each padded-reordered slot q = j2 * k + j1: the source index in
    /// the convolution-output vector, or None for a constant-zero pad.
    pub u_sources: Vec<Option<usize>>,
    /// For each original output row j: the index in the block-cyclic product
    /// that holds it.
    pub output_sources: Vec<usize>,
    /// Set when n < 2^m - 1; the construction still applies whenever every
    /// coset size divides m, but only the full-length case is the standard
    /// setting.
    pub experimental: bool,
}

pub fn build_block_form(plan: &CfftPlan) -> Result<BlockCyclicForm> {
    let m = plan.field.degree();
    let n = plan.n;
    let k = plan.partition.k();
    let sizes = plan.partition.sizes();
    let offsets = plan.block_offsets();
    let experimental = n != plan.field.group_order();

    let row_perm = plan.input_perm.clone();
    // Permuted view of the recombination matrix.
    let ap = |r: usize, c: usize| plan.recombine.get(row_perm[r], c);

    // Every block must be circulant, wraparound included.
    for i in 0..k {
        for j in 0..k {
            let (di, dj) = (sizes[i], sizes[j]);
            let (oi, oj) = (offsets[i], offsets[j]);
            for t in 0..di {
                for c in 0..dj {
                    if ap(oi + (t + 1) % di, oj + (c + 1) % dj) != ap(oi + t, oj + c) {
                        return Err(Error::CyclicityViolation(i, j));
                    }
                }
            }
        }
    }

    // First block-row of the block-cyclic matrix: entry (i1, j1) of block d
    // is row 0, column d mod size(j1) of the tiled block (i1, j1).
    let mut first_block_row = Vec::with_capacity(m);
    for d in 0..m {
        let mut c_d = BitMatrix::zero(k, k);
        for i1 in 0..k {
            for j1 in 0..k {
                if ap(offsets[i1], offsets[j1] + d % sizes[j1]) {
                    c_d.set(i1, j1, true);
                }
            }
        }
        first_block_row.push(c_d);
    }

    // Verify block-cyclicity: the tiled block entry (i2, j2) must equal
    // entry (i1, j1) of c_((j2 - i2) mod m) for every index combination.
    for i1 in 0..k {
        for j1 in 0..k {
            let (di, dj) = (sizes[i1], sizes[j1]);
            let (oi, oj) = (offsets[i1], offsets[j1]);
            for i2 in 0..m {
                for j2 in 0..m {
                    let tiled = ap(oi + i2 % di, oj + j2 % dj);
                    let d = (m + j2 - i2) % m;
                    if tiled != first_block_row[d].get(i1, j1) {
                        return Err(Error::BlockCyclicityViolation(i1, j1));
                    }
                }
            }
        }
    }

    let mut u_sources = vec![None; k * m];
    for j1 in 0..k {
        for j2 in 0..m {
            if j2 < sizes[j1] {
                u_sources[j2 * k + j1] = Some(offsets[j1] + j2);
            }
        }
    }

    let mut output_sources = vec![0usize; n];
    for (i1, coset) in plan.partition.cosets.iter().enumerate() {
        for (t, &orig) in coset.elements.iter().enumerate() {
            output_sources[orig] = t * k + i1;
        }
    }

    Ok(BlockCyclicForm {
        k,
        m,
        n,
        sizes,
        offsets,
        row_perm,
        first_block_row,
        u_sources,
        output_sources,
        experimental,
    })
}

impl BlockCyclicForm {
    /// Materializes the full block-cyclic matrix (km x km). Intended for
    /// verification at desk scale.
    pub fn assemble_block_cyclic(&self) -> BitMatrix {
        let km = self.k * self.m;
        let mut b = BitMatrix::zero(km, km);
        for i2 in 0..self.m {
            for j2 in 0..self.m {
                let c = &self.first_block_row[(self.m + j2 - i2) % self.m];
                for i1 in 0..self.k {
                    for j1 in 0..self.k {
                        if c.get(i1, j1) {
                            b.set(i2 * self.k + i1, j2 * self.k + j1, true);
                        }
                    }
                }
            }
        }
        b
    }

    /// Builds the padded-reordered vector from a convolution-output vector
    /// (wiring only).
    pub fn reorder_input(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if v.len() != self.n {
            return Err(Error::LengthMismatch {
                got: v.len(),
                expected: self.n,
            });
        }
        Ok(self
            .u_sources
            .iter()
            .map(|src| src.map_or(FieldElement::ZERO, |i| v[i]))
            .collect())
    }

    /// Extracts the original output order from the block-cyclic product
    /// (wiring only; extended rows are discarded).
    pub fn extract_output(&self, bu: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if bu.len() != self.k * self.m {
            return Err(Error::LengthMismatch {
                got: bu.len(),
                expected: self.k * self.m,
            });
        }
        Ok(self.output_sources.iter().map(|&q| bu[q]).collect())
    }
}

// ---------------------------------------------------------------------------
// Plan document
// ---------------------------------------------------------------------------

const PLAN_VERSION: &str = "cfft-plan/1";

#[derive(Serialize, Deserialize)]
struct FieldDoc {
    m: usize,
    poly: String,
}

#[derive(Serialize, Deserialize)]
struct SizeClassDoc {
    size: usize,
    gamma: String,
    reversed_output: bool,
}

#[derive(Serialize, Deserialize)]
struct PlanDoc {
    version: String,
    field: FieldDoc,
    n: usize,
    conv_profile: String,
    cosets: Vec<Vec<usize>>,
    size_classes: Vec<SizeClassDoc>,
    a_rows: Vec<String>,
    block_form: bool,
}

/// Serializes a plan to its document form: field, length, cosets, per-size
/// basis generators, the recombination matrix as lowercase hex rows
/// (row-major), and a flag recording whether a block form accompanies the
/// plan.
pub fn plan_to_document(plan: &CfftPlan, block_form: bool) -> String {
    let doc = PlanDoc {
        version: PLAN_VERSION.to_string(),
        field: FieldDoc {
            m: plan.field.degree(),
            poly: format!("{:x}", plan.field.poly()),
        },
        n: plan.n,
        conv_profile: profile_label(plan.profile).to_string(),
        cosets: plan
            .partition
            .cosets
            .iter()
            .map(|c| c.elements.clone())
            .collect(),
        size_classes: plan
            .size_classes
            .values()
            .map(|sc| SizeClassDoc {
                size: sc.size,
                gamma: format!("{:x}", sc.basis.gamma().bits()),
                reversed_output: sc.reversed_output,
            })
            .collect(),
        a_rows: (0..plan.n).map(|r| plan.recombine.row_hex(r)).collect(),
        block_form,
    };
    serde_json::to_string_pretty(&doc).expect("plan document serializes")
}

/// Loads a plan document: the plan is rebuilt deterministically from the
/// field, length and profile, then cross-checked against the document's
/// cosets, basis generators and matrix rows. Any mismatch is an error.
pub fn plan_from_document(json: &str) -> Result<(CfftPlan, bool)> {
    let doc: PlanDoc = serde_json::from_str(json)?;
    if doc.version != PLAN_VERSION {
        return Err(Error::PlanDocument(format!(
            "unsupported version {:?}",
            doc.version
        )));
    }
    let poly = u32::from_str_radix(&doc.field.poly, 16)
        .map_err(|e| Error::PlanDocument(format!("bad poly hex: {e}")))?;
    let field = FieldSpec::new(doc.field.m, Some(poly))?;
    let profile = profile_from_label(&doc.conv_profile)?;
    let plan = build_plan_with(&field, doc.n, profile)?;

    let cosets: Vec<Vec<usize>> = plan
        .partition
        .cosets
        .iter()
        .map(|c| c.elements.clone())
        .collect();
    if cosets != doc.cosets {
        return Err(Error::PlanDocument("coset list mismatch".into()));
    }
    if doc.size_classes.len() != plan.size_classes.len() {
        return Err(Error::PlanDocument("size class count mismatch".into()));
    }
    for sc_doc in &doc.size_classes {
        let sc = plan
            .size_classes
            .get(&sc_doc.size)
            .ok_or_else(|| Error::PlanDocument(format!("unknown size {}", sc_doc.size)))?;
        let gamma = format!("{:x}", sc.basis.gamma().bits());
        if gamma != sc_doc.gamma || sc.reversed_output != sc_doc.reversed_output {
            return Err(Error::PlanDocument(format!(
                "size-{} class mismatch",
                sc_doc.size
            )));
        }
    }
    if doc.a_rows.len() != plan.n {
        return Err(Error::PlanDocument("matrix row count mismatch".into()));
    }
    for (r, hex) in doc.a_rows.iter().enumerate() {
        if *hex != plan.recombine.row_hex(r) {
            return Err(Error::PlanDocument(format!("matrix row {r} mismatch")));
        }
    }
    Ok((plan, doc.block_form))
}
