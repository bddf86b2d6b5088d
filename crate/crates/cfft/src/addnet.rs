//! The structured addition network: pad, reorder, pre-addition, parallel
//! k x k matrix-vector modules, post-addition, extraction.
//!
//! The network evaluates the recombination matrix through its block-cyclic
//! form. The block sequence is fixed, so all combinations of the k x k
//! blocks demanded by the block-level bilinear algorithm are precomputed at
//! build time and contribute nothing at runtime; what remains per transform
//! is the pre-addition of k-dimensional vectors, one binary matrix-vector
//! product per combination (realized with the four-Russians table method),
//! and the post-addition. Padding, reordering and extraction are index maps
//! with zero additions.
//!
//! [`direct_matvec`] is the row-wise XOR baseline that everything else is
//! checked against, and [`export_netlist`] serializes the network as an
//! explicit node list.

use serde::{Deserialize, Serialize};

use crate::bilinear::{gen_cyclic, BilinearAlgorithm};
use crate::gf2m::{mask_hex, BitMatrix, FieldElement};
use crate::planner::BlockCyclicForm;
use crate::{Error, Result};

/// Row-wise XOR evaluation of a binary matrix against a field vector.
/// Returns the product and the addition count (popcount - 1 per nonzero
/// row). This is the oracle for the structured network.
pub fn direct_matvec(m: &BitMatrix, v: &[FieldElement]) -> Result<(Vec<FieldElement>, u64)> {
    if v.len() != m.cols() {
        return Err(Error::LengthMismatch {
            got: v.len(),
            expected: m.cols(),
        });
    }
    let mut out = Vec::with_capacity(m.rows());
    let mut adds = 0u64;
    for r in 0..m.rows() {
        let mut acc = FieldElement::ZERO;
        let mut terms = 0u64;
        for c in m.row_indices(r) {
            acc += v[c];
            terms += 1;
        }
        adds += terms.saturating_sub(1);
        out.push(acc);
    }
    Ok((out, adds))
}

/// Static addition count of the direct row-XOR evaluation.
pub fn direct_add_count(m: &BitMatrix) -> u64 {
    (0..m.rows())
        .map(|r| m.row_popcount(r).saturating_sub(1) as u64)
        .sum()
}

/// One column group of a four-Russians tableau.
#[derive(Clone, Debug)]
pub struct FrGroup {
    pub start_col: usize,
    pub width: usize,
    /// For each of the 2^width input combinations, the mask of output rows
    /// whose pattern in this group equals that combination (word-packed,
    /// k bits).
    pub row_select: Vec<Vec<u64>>,
}

/// Four-Russians evaluation plan for one k x k binary matrix: columns are
/// chunked into groups of width at most s = ceil(log2 k), all combinations
/// of each group's inputs are formed in Gray-code order (one addition per
/// nonzero non-singleton combination), and each output row sums its
/// looked-up value from every group with a nonzero pattern.
#[derive(Clone, Debug)]
pub struct FourRussiansTableau {
    pub k: usize,
    pub s: usize,
    pub groups: Vec<FrGroup>,
    /// Static addition count, combination stage plus row-sum stage.
    pub add_count: u64,
}

/// Builds the tableau for a square binary matrix, 1 <= k <= 4096.
pub fn build_four_russians(m: &BitMatrix) -> FourRussiansTableau {
    let k = m.rows();
    assert_eq!(k, m.cols(), "four-Russians tableau needs a square matrix");
    assert!((1..=4096).contains(&k));
    // ceil(log2 k); a lone column still needs a width-1 group.
    let s = (k.next_power_of_two().trailing_zeros() as usize).max(1);
    let words = k.div_ceil(64);

    let mut groups = Vec::with_capacity(k.div_ceil(s));
    let mut combo_adds = 0u64;
    let mut start = 0;
    while start < k {
        let width = s.min(k - start);
        let mut row_select = vec![vec![0u64; words]; 1 << width];
        for r in 0..k {
            let mut pattern = 0usize;
            for b in 0..width {
                if m.get(r, start + b) {
                    pattern |= 1 << b;
                }
            }
            row_select[pattern][r / 64] |= 1u64 << (r % 64);
        }
        // Every nonzero non-singleton combination costs one addition.
        combo_adds += (1u64 << width) - 1 - width as u64;
        groups.push(FrGroup {
            start_col: start,
            width,
            row_select,
        });
        start += width;
    }

    // Row-sum stage: each row adds one looked-up value per group with a
    // nonzero pattern, minus one for the first.
    let mut row_sum_adds = 0u64;
    for r in 0..k {
        let nonzero = groups
            .iter()
            .filter(|g| g.row_select[0][r / 64] >> (r % 64) & 1 == 0)
            .count() as u64;
        row_sum_adds += nonzero.saturating_sub(1);
    }

    FourRussiansTableau {
        k,
        s,
        groups,
        add_count: combo_adds + row_sum_adds,
    }
}

impl FourRussiansTableau {
    /// Evaluates the matrix-vector product. The dynamic addition tally
    /// always equals `add_count`: all combinations are formed regardless of
    /// the data, and zero-pattern lookups are skipped statically.
    pub fn eval(&self, v: &[FieldElement]) -> Result<(Vec<FieldElement>, u64)> {
        if v.len() != self.k {
            return Err(Error::LengthMismatch {
                got: v.len(),
                expected: self.k,
            });
        }
        let mut out = vec![FieldElement::ZERO; self.k];
        let mut touched = vec![false; self.k];
        let mut adds = 0u64;
        for g in &self.groups {
            // Gray-code sweep: table[x] holds the XOR of the inputs selected
            // by x; each step flips one bit relative to the previous entry,
            // and singletons are plain copies.
            let size = 1usize << g.width;
            let mut table = vec![FieldElement::ZERO; size];
            let mut prev = 0usize;
            for i in 1..size {
                let cur = i ^ (i >> 1);
                if cur.is_power_of_two() {
                    table[cur] = v[g.start_col + cur.trailing_zeros() as usize];
                } else {
                    let bit = i.trailing_zeros() as usize;
                    table[cur] = table[prev] + v[g.start_col + bit];
                    adds += 1;
                }
                prev = cur;
            }
            for (pattern, mask) in g.row_select.iter().enumerate().skip(1) {
                for (wi, &w) in mask.iter().enumerate() {
                    let mut w = w;
                    while w != 0 {
                        let r = wi * 64 + w.trailing_zeros() as usize;
                        w &= w - 1;
                        if touched[r] {
                            out[r] += table[pattern];
                            adds += 1;
                        } else {
                            out[r] = table[pattern];
                            touched[r] = true;
                        }
                    }
                }
            }
        }
        debug_assert_eq!(adds, self.add_count);
        Ok((out, adds))
    }
}

/// Per-stage addition counters of the network.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AddnetCounts {
    pub pre: u64,
    pub mvp: u64,
    pub post: u64,
}

impl AddnetCounts {
    pub fn total(&self) -> u64 {
        self.pre + self.mvp + self.post
    }
}

/// The built addition network: the block-cyclic form it evaluates, the
/// block-level cyclic algorithm, the precomputed block combinations, and
/// one four-Russians module per combination (None where the combination
/// XORed to the zero matrix and the module is elided).
#[derive(Clone, Debug)]
pub struct AdditionNetworkPlan {
    pub form: BlockCyclicForm,
    pub block_conv: BilinearAlgorithm,
    pub g: Vec<BitMatrix>,
    pub mvps: Vec<Option<FourRussiansTableau>>,
    pub static_counts: AddnetCounts,
}

/// Builds the network for a block-cyclic form.
///
/// The block-level cyclic algorithm has length m; its left operand is the
/// fixed block sequence, index-reversed so the circulant-stack product
/// becomes a genuine cyclic convolution. The orientation is validated
/// against the block-cyclic matrix on a sample of unit vectors before the
/// plan is returned.
pub fn build_addnet(form: BlockCyclicForm) -> Result<AdditionNetworkPlan> {
    let (k, m) = (form.k, form.m);
    let block_conv = gen_cyclic(m)?;
    let r = block_conv.r;

    // G_t = XOR over the pre_left row of the index-reversed block sequence
    // e_d = c_((-d) mod m). Precomputed; zero runtime additions.
    let mut g = Vec::with_capacity(r);
    for t in 0..r {
        let mut acc = BitMatrix::zero(k, k);
        for d in block_conv.pre_left.row_indices(t) {
            acc.xor_with(&form.first_block_row[(m - d) % m]);
        }
        g.push(acc);
    }
    let mvps: Vec<Option<FourRussiansTableau>> = g
        .iter()
        .map(|gt| {
            if gt.is_zero() {
                None
            } else {
                Some(build_four_russians(gt))
            }
        })
        .collect();

    let mut counts = AddnetCounts::default();
    for t in 0..r {
        let Some(tableau) = &mvps[t] else { continue };
        let fan_in = block_conv.pre_right.row_popcount(t) as u64;
        counts.pre += fan_in.saturating_sub(1) * k as u64;
        counts.mvp += tableau.add_count;
    }
    for i2 in 0..m {
        let terms = block_conv
            .post
            .row_indices(i2)
            .into_iter()
            .filter(|&t| mvps[t].is_some())
            .count() as u64;
        counts.post += terms.saturating_sub(1) * k as u64;
    }

    let plan = AdditionNetworkPlan {
        form,
        block_conv,
        g,
        mvps,
        static_counts: counts,
    };
    plan.orientation_self_check()?;
    Ok(plan)
}

impl AdditionNetworkPlan {
    /// Spot-checks the network against columns of the block-cyclic matrix
    /// computed straight from the first block-row.
    fn orientation_self_check(&self) -> Result<()> {
        let (k, m) = (self.form.k, self.form.m);
        let km = k * m;
        for q in [0, km / 2, km - 1] {
            let (j2, j1) = (q / k, q % k);
            let mut unit = vec![FieldElement::ZERO; km];
            unit[q] = FieldElement::ONE;
            let (bu, _) = self.eval_blocks(&unit);
            for i2 in 0..m {
                for i1 in 0..k {
                    let expected = if self.form.first_block_row[(m + j2 - i2) % m].get(i1, j1) {
                        FieldElement::ONE
                    } else {
                        FieldElement::ZERO
                    };
                    if bu[i2 * k + i1] != expected {
                        return Err(Error::AddnetOrientation);
                    }
                }
            }
        }
        Ok(())
    }

    /// Core network: padded-reordered input blocks to product blocks.
    fn eval_blocks(&self, u: &[FieldElement]) -> (Vec<FieldElement>, AddnetCounts) {
        let (k, m) = (self.form.k, self.form.m);
        let r = self.block_conv.r;
        let mut counts = AddnetCounts::default();

        // Pre-addition: combinations of the m input blocks, k wide each.
        let mut products: Vec<Option<Vec<FieldElement>>> = vec![None; r];
        for t in 0..r {
            let Some(tableau) = &self.mvps[t] else { continue };
            let mut combo = vec![FieldElement::ZERO; k];
            let mut terms = 0u64;
            for d in self.block_conv.pre_right.row_indices(t) {
                for i in 0..k {
                    combo[i] += u[d * k + i];
                }
                terms += 1;
            }
            counts.pre += terms.saturating_sub(1) * k as u64;
            let (w, adds) = tableau.eval(&combo).expect("combo length is k");
            counts.mvp += adds;
            products[t] = Some(w);
        }

        // Post-addition: XOR the product blocks selected per output block.
        let mut bu = vec![FieldElement::ZERO; k * m];
        for i2 in 0..m {
            let mut terms = 0u64;
            for t in self.block_conv.post.row_indices(i2) {
                let Some(w) = &products[t] else { continue };
                for i1 in 0..k {
                    bu[i2 * k + i1] += w[i1];
                }
                terms += 1;
            }
            counts.post += terms.saturating_sub(1) * k as u64;
        }
        (bu, counts)
    }

    /// Evaluates the recombination product through the network: pad and
    /// reorder (wiring), pre-addition, MVP modules, post-addition, extract
    /// (wiring). Equals [`direct_matvec`] on the source matrix exactly; the
    /// returned tally always equals `static_counts`.
    pub fn eval(&self, v: &[FieldElement]) -> Result<(Vec<FieldElement>, AddnetCounts)> {
        let u = self.form.reorder_input(v)?;
        let (bu, counts) = self.eval_blocks(&u);
        debug_assert_eq!(counts, self.static_counts);
        let out = self.form.extract_output(&bu)?;
        Ok((out, counts))
    }
}

// ---------------------------------------------------------------------------
// Netlist document
// ---------------------------------------------------------------------------

const NETLIST_VERSION: &str = "cfft-netlist/1";

#[derive(Serialize, Deserialize, Debug)]
pub struct NetlistDoc {
    pub version: String,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub experimental: bool,
    /// Pad/reorder stage: slot q reads input `source`, or constant zero.
    pub pad_reorder: Vec<USlotDoc>,
    /// Pre-addition stage: one XOR node per live product, fan-in of input
    /// block indices.
    pub pre_add: Vec<XorNodeDoc>,
    pub mvp_modules: Vec<MvpModuleDoc>,
    /// Post-addition stage: one XOR node per output block, fan-in of
    /// product indices.
    pub post_add: Vec<XorNodeDoc>,
    /// Extraction stage: output j reads product position `source`.
    pub extract: Vec<ExtractDoc>,
    pub counts: AddnetCounts,
}

#[derive(Serialize, Deserialize, Debug)]
pub struct USlotDoc {
    pub slot: usize,
    pub source: Option<usize>,
}

#[derive(Serialize, Deserialize, Debug)]
pub struct XorNodeDoc {
    pub out: usize,
    pub inputs: Vec<usize>,
}

#[derive(Serialize, Deserialize, Debug)]
pub struct MvpModuleDoc {
    pub index: usize,
    pub elided: bool,
    pub k: usize,
    pub s: usize,
    /// Per group: the 2^width row-selection masks, lowercase hex.
    pub groups: Vec<GroupDoc>,
    pub adds: u64,
}

#[derive(Serialize, Deserialize, Debug)]
pub struct GroupDoc {
    pub start_col: usize,
    pub width: usize,
    pub tables: Vec<String>,
}

#[derive(Serialize, Deserialize, Debug)]
pub struct ExtractDoc {
    pub out: usize,
    pub source: usize,
}

pub(crate) fn mvp_module_entry(
    index: usize,
    k: usize,
    tableau: Option<&FourRussiansTableau>,
) -> MvpModuleDoc {
    match tableau {
        None => MvpModuleDoc {
            index,
            elided: true,
            k,
            s: 0,
            groups: Vec::new(),
            adds: 0,
        },
        Some(t) => MvpModuleDoc {
            index,
            elided: false,
            k: t.k,
            s: t.s,
            groups: t
                .groups
                .iter()
                .map(|g| GroupDoc {
                    start_col: g.start_col,
                    width: g.width,
                    tables: g.row_select.iter().map(|m| mask_hex(m, t.k)).collect(),
                })
                .collect(),
            adds: t.add_count,
        },
    }
}

/// Serializes the network structure: stages in dataflow order, explicit
/// fan-in lists for every XOR node, per-module lookup tables as hex masks,
/// and the static counters.
pub fn export_netlist(plan: &AdditionNetworkPlan) -> NetlistDoc {
    let form = &plan.form;
    let pad_reorder = form
        .u_sources
        .iter()
        .enumerate()
        .map(|(slot, source)| USlotDoc {
            slot,
            source: *source,
        })
        .collect();
    let pre_add = (0..plan.block_conv.r)
        .filter(|&t| plan.mvps[t].is_some())
        .map(|t| XorNodeDoc {
            out: t,
            inputs: plan.block_conv.pre_right.row_indices(t),
        })
        .collect();
    let mvp_modules = (0..plan.block_conv.r)
        .map(|t| mvp_module_entry(t, form.k, plan.mvps[t].as_ref()))
        .collect();
    let post_add = (0..form.m)
        .map(|i2| XorNodeDoc {
            out: i2,
            inputs: plan
                .block_conv
                .post
                .row_indices(i2)
                .into_iter()
                .filter(|&t| plan.mvps[t].is_some())
                .collect(),
        })
        .collect();
    let extract = form
        .output_sources
        .iter()
        .enumerate()
        .map(|(out, &source)| ExtractDoc { out, source })
        .collect();
    NetlistDoc {
        version: NETLIST_VERSION.to_string(),
        m: form.m,
        n: form.n,
        k: form.k,
        r: plan.block_conv.r,
        experimental: form.experimental,
        pad_reorder,
        pre_add,
        mvp_modules,
        post_add,
        extract,
        counts: plan.static_counts,
    }
}

impl NetlistDoc {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("netlist document serializes")
    }

    /// Structural padding-isolation check: padded slots carry no source
    /// wire (constant zero), the genuine slots read each input exactly
    /// once, and extraction stays within the product vector. Because pads
    /// have no fan-in, no input can reach an extracted output through one.
    pub fn padding_isolated(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut pads = 0usize;
        for slot in &self.pad_reorder {
            match slot.source {
                None => pads += 1,
                Some(src) => {
                    if src >= self.n || seen[src] {
                        return false;
                    }
                    seen[src] = true;
                }
            }
        }
        pads == self.k * self.m - self.n
            && seen.iter().all(|&s| s)
            && self.extract.iter().all(|e| e.source < self.k * self.m)
    }
}
