//! Bilinear convolution algorithms with binary pre/post matrices.
//!
//! An algorithm computes `post * ((pre_left * x) .* (pre_right * y))`, where
//! the pre/post matrices live over GF(2) and the r entrywise products are
//! the only field multiplications. Matrix-vector products against the binary
//! matrices are XOR accumulations of field elements, so multiplicative and
//! additive costs are cleanly separated.
//!
//! The default generator is a recursive Karatsuba over GF(2), zero-padded to
//! the next power of two (subtraction equals addition in characteristic 2,
//! which keeps every combination matrix binary). Cyclic algorithms wrap the
//! linear ones. [`gen_cyclic_short`] additionally knows two structured
//! constructions with fewer products — a coprime-length tensor split and a
//! divisor split of x^q + 1 for odd q — and falls back to the wrapped
//! Karatsuba whenever those do not win.

use crate::gf2m::{BitMatrix, FieldElement, FieldSpec};
use crate::{Error, Result};

/// Largest convolution length the generators accept.
pub const MAX_CONV_LEN: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvMode {
    Linear,
    Cyclic,
}

/// A bilinear convolution algorithm with binary coefficient matrices.
#[derive(Clone, Debug)]
pub struct BilinearAlgorithm {
    pub length: usize,
    pub out_len: usize,
    /// Number of entrywise field multiplications.
    pub r: usize,
    pub pre_left: BitMatrix,
    pub pre_right: BitMatrix,
    pub post: BitMatrix,
    pub mode: ConvMode,
}

/// Operation tally of one [`BilinearAlgorithm::apply`] call.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ApplyTally {
    pub mults: u64,
    pub adds: u64,
}

impl BilinearAlgorithm {
    /// Applies the algorithm to two field vectors. Multiplications are
    /// counted as r with no data-dependent elision.
    pub fn apply(
        &self,
        field: &FieldSpec,
        x: &[FieldElement],
        y: &[FieldElement],
    ) -> Result<(Vec<FieldElement>, ApplyTally)> {
        check_len(x.len(), self.length)?;
        check_len(y.len(), self.length)?;
        let mut tally = ApplyTally::default();
        let gx = combine(&self.pre_left, x, &mut tally.adds);
        let gy = combine(&self.pre_right, y, &mut tally.adds);
        let products: Vec<FieldElement> = gx
            .iter()
            .zip(&gy)
            .map(|(&a, &b)| field.mul(a, b))
            .collect();
        tally.mults = self.r as u64;
        let out = combine(&self.post, &products, &mut tally.adds);
        Ok((out, tally))
    }

    /// Static addition count: popcount sums of both pre matrices and the
    /// post matrix, one addition per fan-in beyond the first.
    pub fn static_adds(&self) -> u64 {
        [&self.pre_left, &self.pre_right, &self.post]
            .iter()
            .map(|m| (0..m.rows()).map(|r| m.row_popcount(r).saturating_sub(1) as u64).sum::<u64>())
            .sum()
    }
}

fn check_len(got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::LengthMismatch { got, expected });
    }
    Ok(())
}

/// XOR accumulation of the vector entries selected by each matrix row.
fn combine(m: &BitMatrix, v: &[FieldElement], adds: &mut u64) -> Vec<FieldElement> {
    let mut out = Vec::with_capacity(m.rows());
    for r in 0..m.rows() {
        let mut acc = FieldElement::ZERO;
        let mut terms = 0u64;
        for c in m.row_indices(r) {
            acc += v[c];
            terms += 1;
        }
        *adds += terms.saturating_sub(1);
        out.push(acc);
    }
    out
}

/// Generates a linear convolution algorithm of the given length with
/// r = 3^ceil(log2 len) products: Karatsuba on the next power of two, then
/// padded input columns and output rows are dropped.
pub fn gen_linear(len: usize) -> Result<BilinearAlgorithm> {
    if len == 0 || len > MAX_CONV_LEN {
        return Err(Error::ConvLengthOutOfRange(len, 1, MAX_CONV_LEN));
    }
    let levels = len.next_power_of_two().trailing_zeros() as usize;
    let (pre, post) = karatsuba(levels);
    let r = pre.rows();
    let out_len = 2 * len - 1;
    let mut pre_trim = BitMatrix::zero(r, len);
    for t in 0..r {
        for c in 0..len {
            pre_trim.set(t, c, pre.get(t, c));
        }
    }
    let mut post_trim = BitMatrix::zero(out_len, r);
    for j in 0..out_len {
        for t in 0..r {
            post_trim.set(j, t, post.get(j, t));
        }
    }
    Ok(BilinearAlgorithm {
        length: len,
        out_len,
        r,
        pre_left: pre_trim.clone(),
        pre_right: pre_trim,
        post: post_trim,
        mode: ConvMode::Linear,
    })
}

/// Karatsuba matrices for length 2^levels: pre is 3^levels x 2^levels, post
/// is (2^(levels+1) - 1) x 3^levels. The three product groups per step are
/// ordered low half, high half, then the folded middle.
fn karatsuba(levels: usize) -> (BitMatrix, BitMatrix) {
    if levels == 0 {
        return (BitMatrix::identity(1), BitMatrix::identity(1));
    }
    let (sub_pre, sub_post) = karatsuba(levels - 1);
    let h = 1usize << (levels - 1);
    let rh = sub_pre.rows();
    let mut pre = BitMatrix::zero(3 * rh, 2 * h);
    for t in 0..rh {
        for c in 0..h {
            if sub_pre.get(t, c) {
                pre.set(t, c, true);
                pre.set(rh + t, h + c, true);
                pre.set(2 * rh + t, c, true);
                pre.set(2 * rh + t, h + c, true);
            }
        }
    }
    let mut post = BitMatrix::zero(4 * h - 1, 3 * rh);
    for j in 0..2 * h - 1 {
        for t in 0..rh {
            if sub_post.get(j, t) {
                // low block at offset 0; middle correction
                // (p_low + p_high + p_mid) at offset h; high block at 2h.
                post.flip(j, t);
                post.flip(j + h, t);
                post.flip(j + h, rh + t);
                post.flip(j + h, 2 * rh + t);
                post.flip(j + 2 * h, rh + t);
            }
        }
    }
    (pre, post)
}

/// Folds a linear algorithm into a cyclic one of the same length: output
/// rows j and j + len of the post matrix are XOR-merged; r is unchanged.
pub fn wrap_cyclic(alg: &BilinearAlgorithm) -> Result<BilinearAlgorithm> {
    if alg.mode != ConvMode::Linear {
        return Err(Error::ConvModeMismatch(ConvMode::Linear));
    }
    let len = alg.length;
    let mut post = BitMatrix::zero(len, alg.r);
    for j in 0..alg.out_len {
        for t in 0..alg.r {
            if alg.post.get(j, t) {
                post.flip(j % len, t);
            }
        }
    }
    Ok(BilinearAlgorithm {
        length: len,
        out_len: len,
        r: alg.r,
        pre_left: alg.pre_left.clone(),
        pre_right: alg.pre_right.clone(),
        post,
        mode: ConvMode::Cyclic,
    })
}

/// Default cyclic generator: wrapped padded Karatsuba, r = 3^ceil(log2 len).
pub fn gen_cyclic(len: usize) -> Result<BilinearAlgorithm> {
    wrap_cyclic(&gen_linear(len)?)
}

/// Cyclic generator with the structured catalog enabled: considers, besides
/// the default, a divisor split of x^q + 1 for the odd part q and a
/// coprime-length tensor combination, and returns whichever needs the fewest
/// products (ties go to the default).
pub fn gen_cyclic_short(len: usize) -> Result<BilinearAlgorithm> {
    let default = gen_cyclic(len)?;
    let twos = len.trailing_zeros() as usize;
    let odd = len >> twos;
    if odd == 1 {
        return Ok(default);
    }
    let odd_alg = {
        let split = odd_divisor_split(odd)?;
        let padded = gen_cyclic(odd)?;
        if split.r < padded.r {
            split
        } else {
            padded
        }
    };
    let candidate = if twos == 0 {
        odd_alg
    } else {
        tensor_cyclic(&gen_cyclic(1 << twos)?, &odd_alg)?
    };
    Ok(if candidate.r < default.r { candidate } else { default })
}

/// Cyclic convolution of odd length q through the factorization
/// x^q + 1 = (x + 1) * p(x) with p = 1 + x + .. + x^(q-1): one product for
/// the (x + 1) residue, a linear convolution of length q - 1 for the other
/// residue, and a binary reconstruction. r = 1 + 3^ceil(log2(q-1)).
fn odd_divisor_split(q: usize) -> Result<BilinearAlgorithm> {
    assert!(q >= 3 && q % 2 == 1);
    let lin = gen_linear(q - 1)?;
    let r = 1 + lin.r;

    // Residue map modulo p: drop the top coefficient into every lower one.
    let mut reduce = BitMatrix::zero(q - 1, q);
    for j in 0..q - 1 {
        reduce.set(j, j, true);
        reduce.set(j, q - 1, true);
    }
    let mut pre = BitMatrix::zero(r, q);
    for c in 0..q {
        pre.set(0, c, true); // the (x + 1) residue: sum of all coefficients
    }
    let composed = lin.pre_left.multiply(&reduce);
    for t in 0..lin.r {
        for c in 0..q {
            pre.set(1 + t, c, composed.get(t, c));
        }
    }

    // Fold the degree-(2q-4) product back below degree q - 1.
    let pmask = (1u64 << q) - 1;
    let mut fold = BitMatrix::zero(q - 1, 2 * q - 3);
    let mut cur = 1u64;
    for c in 0..2 * q - 3 {
        for e in 0..q - 1 {
            fold.set(e, c, cur >> e & 1 != 0);
        }
        cur <<= 1;
        if cur >> (q - 1) & 1 != 0 {
            cur ^= pmask;
        }
    }
    let folded_post = fold.multiply(&lin.post); // (q-1) x lin.r

    // Reconstruction: out_o = z1 + sum_{e != o} zhat_e, with z1 the (x + 1)
    // residue product and zhat the folded residue coefficients.
    let mut post = BitMatrix::zero(q, r);
    let colsum: Vec<bool> = (0..lin.r)
        .map(|t| (0..q - 1).fold(false, |acc, e| acc ^ folded_post.get(e, t)))
        .collect();
    for o in 0..q {
        post.set(o, 0, true);
        for t in 0..lin.r {
            let v = colsum[t] ^ (o < q - 1 && folded_post.get(o, t));
            post.set(o, 1 + t, v);
        }
    }
    Ok(BilinearAlgorithm {
        length: q,
        out_len: q,
        r,
        pre_left: pre.clone(),
        pre_right: pre,
        post,
        mode: ConvMode::Cyclic,
    })
}

/// Tensor combination of two cyclic algorithms of coprime lengths n1, n2
/// into one of length n1 * n2, with the index maps p -> (p mod n1, p mod n2)
/// applied on both ends. r = r1 * r2.
fn tensor_cyclic(a1: &BilinearAlgorithm, a2: &BilinearAlgorithm) -> Result<BilinearAlgorithm> {
    if a1.mode != ConvMode::Cyclic || a2.mode != ConvMode::Cyclic {
        return Err(Error::ConvModeMismatch(ConvMode::Cyclic));
    }
    let (n1, n2) = (a1.length, a2.length);
    assert_eq!(gcd(n1, n2), 1, "tensor lengths must be coprime");
    let n = n1 * n2;
    if n > MAX_CONV_LEN {
        return Err(Error::ConvLengthOutOfRange(n, 1, MAX_CONV_LEN));
    }
    let r = a1.r * a2.r;
    let (mut pre_l, mut pre_r, mut post) = (
        BitMatrix::zero(r, n),
        BitMatrix::zero(r, n),
        BitMatrix::zero(n, r),
    );
    for t1 in 0..a1.r {
        for t2 in 0..a2.r {
            let t = t1 * a2.r + t2;
            for p in 0..n {
                let (p1, p2) = (p % n1, p % n2);
                pre_l.set(t, p, a1.pre_left.get(t1, p1) && a2.pre_left.get(t2, p2));
                pre_r.set(t, p, a1.pre_right.get(t1, p1) && a2.pre_right.get(t2, p2));
                post.set(p, t, a1.post.get(p1, t1) && a2.post.get(p2, t2));
            }
        }
    }
    Ok(BilinearAlgorithm {
        length: n,
        out_len: n,
        r,
        pre_left: pre_l,
        pre_right: pre_r,
        post,
        mode: ConvMode::Cyclic,
    })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A cyclic algorithm with the left operand fixed: the r left combinations
/// collapse into precomputed constants, and products whose constant is 0
/// (skipped) or 1 (passed through) are elided from the multiplication count.
#[derive(Clone, Debug)]
pub struct SpecializedConv {
    pub base: BilinearAlgorithm,
    pub constants: Vec<FieldElement>,
    /// Product indices whose constant is 0 or 1.
    pub elided: Vec<usize>,
}

/// Per-stage tally of a specialized convolution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConvTally {
    pub pre_adds: u64,
    pub mults: u64,
    pub post_adds: u64,
}

impl ConvTally {
    pub fn accumulate(&mut self, other: ConvTally) {
        self.pre_adds += other.pre_adds;
        self.mults += other.mults;
        self.post_adds += other.post_adds;
    }
}

/// Fixes the left operand of a cyclic algorithm.
pub fn specialize_left(alg: &BilinearAlgorithm, fixed: &[FieldElement]) -> Result<SpecializedConv> {
    check_len(fixed.len(), alg.length)?;
    let mut ignored = 0u64;
    let constants = combine(&alg.pre_left, fixed, &mut ignored);
    let elided = constants
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_zero() || **c == FieldElement::ONE)
        .map(|(t, _)| t)
        .collect();
    Ok(SpecializedConv {
        base: alg.clone(),
        constants,
        elided,
    })
}

impl SpecializedConv {
    /// Genuine multiplications: r minus the elided products.
    pub fn genuine_mults(&self) -> u64 {
        (self.base.r - self.elided.len()) as u64
    }

    /// Applies the specialized convolution to `y`. Zero-constant products
    /// are skipped entirely (their right combination is never formed);
    /// one-constant products pass the combination through unmultiplied.
    pub fn apply(&self, field: &FieldSpec, y: &[FieldElement]) -> Result<(Vec<FieldElement>, ConvTally)> {
        check_len(y.len(), self.base.length)?;
        let mut tally = ConvTally::default();
        let mut products = vec![FieldElement::ZERO; self.base.r];
        for t in 0..self.base.r {
            let c = self.constants[t];
            if c.is_zero() {
                continue;
            }
            let mut acc = FieldElement::ZERO;
            let mut terms = 0u64;
            for j in self.base.pre_right.row_indices(t) {
                acc += y[j];
                terms += 1;
            }
            tally.pre_adds += terms.saturating_sub(1);
            products[t] = if c == FieldElement::ONE {
                acc
            } else {
                tally.mults += 1;
                field.mul(c, acc)
            };
        }
        let mut out = Vec::with_capacity(self.base.out_len);
        for j in 0..self.base.out_len {
            let mut acc = FieldElement::ZERO;
            let mut terms = 0u64;
            for t in self.base.post.row_indices(j) {
                if self.constants[t].is_zero() {
                    continue;
                }
                acc += products[t];
                terms += 1;
            }
            tally.post_adds += terms.saturating_sub(1);
            out.push(acc);
        }
        Ok((out, tally))
    }

    /// The tally [`SpecializedConv::apply`] will report, derived statically
    /// from the matrices and constants.
    pub fn static_tally(&self) -> ConvTally {
        let mut tally = ConvTally::default();
        tally.mults = self
            .constants
            .iter()
            .filter(|c| !c.is_zero() && **c != FieldElement::ONE)
            .count() as u64;
        for t in 0..self.base.r {
            if !self.constants[t].is_zero() {
                tally.pre_adds += (self.base.pre_right.row_popcount(t)).saturating_sub(1) as u64;
            }
        }
        for j in 0..self.base.out_len {
            let terms = self
                .base
                .post
                .row_indices(j)
                .into_iter()
                .filter(|&t| !self.constants[t].is_zero())
                .count() as u64;
            tally.post_adds += terms.saturating_sub(1);
        }
        tally
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn naive_linear(field: &FieldSpec, x: &[FieldElement], y: &[FieldElement]) -> Vec<FieldElement> {
        let mut out = vec![FieldElement::ZERO; x.len() + y.len() - 1];
        for (i, &a) in x.iter().enumerate() {
            for (j, &b) in y.iter().enumerate() {
                out[i + j] += field.mul(a, b);
            }
        }
        out
    }

    fn naive_cyclic(field: &FieldSpec, x: &[FieldElement], y: &[FieldElement]) -> Vec<FieldElement> {
        let n = x.len();
        let mut out = vec![FieldElement::ZERO; n];
        for (i, &a) in x.iter().enumerate() {
            for (j, &b) in y.iter().enumerate() {
                out[(i + j) % n] += field.mul(a, b);
            }
        }
        out
    }

    fn random_vec(field: &FieldSpec, len: usize, rng: &mut ChaCha8Rng) -> Vec<FieldElement> {
        (0..len).map(|_| field.random_element(rng)).collect()
    }

    #[test]
    fn gen_linear_base_case() {
        let alg = gen_linear(1).unwrap();
        assert_eq!((alg.r, alg.out_len), (1, 1));
        let f = FieldSpec::new(4, None).unwrap();
        let (out, tally) = alg
            .apply(&f, &[FieldElement(0x3)], &[FieldElement(0x7)])
            .unwrap();
        assert_eq!(out, vec![f.mul(FieldElement(0x3), FieldElement(0x7))]);
        assert_eq!(tally, ApplyTally { mults: 1, adds: 0 });
    }

    #[test]
    fn gen_linear_two_matches_karatsuba_structure() {
        let alg = gen_linear(2).unwrap();
        assert_eq!(alg.r, 3);
        // Products: x0*y0, x1*y1, (x0+x1)(y0+y1).
        assert_eq!(alg.pre_left.row_mask(0), 0b01);
        assert_eq!(alg.pre_left.row_mask(1), 0b10);
        assert_eq!(alg.pre_left.row_mask(2), 0b11);
        // Outputs: c0 = p0, c1 = p0 + p1 + p2, c2 = p1.
        assert_eq!(alg.post.row_mask(0), 0b001);
        assert_eq!(alg.post.row_mask(1), 0b111);
        assert_eq!(alg.post.row_mask(2), 0b010);
    }

    #[test]
    fn gen_linear_two_exhaustive_and_random() {
        let f = FieldSpec::new(4, None).unwrap();
        let alg = gen_linear(2).unwrap();
        // All 16^2 scalar pairs on the coordinate pattern x = (a, b), y = (a, b).
        for a in 0..16u32 {
            for b in 0..16u32 {
                let x = vec![FieldElement(a), FieldElement(b)];
                let (out, _) = alg.apply(&f, &x, &x).unwrap();
                assert_eq!(out, naive_linear(&f, &x, &x));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let x = random_vec(&f, 2, &mut rng);
            let y = random_vec(&f, 2, &mut rng);
            let (out, _) = alg.apply(&f, &x, &y).unwrap();
            assert_eq!(out, naive_linear(&f, &x, &y));
        }
    }

    #[test]
    fn gen_linear_three_padded() {
        let f = FieldSpec::new(4, None).unwrap();
        let alg = gen_linear(3).unwrap();
        assert_eq!(alg.r, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x = random_vec(&f, 3, &mut rng);
            let y = random_vec(&f, 3, &mut rng);
            let (out, _) = alg.apply(&f, &x, &y).unwrap();
            assert_eq!(out, naive_linear(&f, &x, &y));
        }
    }

    #[test]
    fn gen_linear_rejects_out_of_range() {
        assert!(gen_linear(0).is_err());
        assert!(gen_linear(65).is_err());
    }

    #[test]
    fn r_matches_closed_form() {
        let expected = [1usize, 3, 9, 9, 27, 27, 27, 27, 81, 81, 81, 81, 81, 81, 81, 81];
        for (len, &want) in (1..=16).zip(expected.iter()) {
            assert_eq!(gen_linear(len).unwrap().r, want, "len={len}");
            assert_eq!(gen_cyclic(len).unwrap().r, want, "cyclic len={len}");
        }
    }

    #[test]
    fn wrap_cyclic_length_one() {
        let f = FieldSpec::new(4, None).unwrap();
        let alg = gen_cyclic(1).unwrap();
        let (out, _) = alg.apply(&f, &[FieldElement(0x5)], &[FieldElement(0x9)]).unwrap();
        assert_eq!(out, vec![f.mul(FieldElement(0x5), FieldElement(0x9))]);
    }

    #[test]
    fn wrap_cyclic_delta_identity() {
        let f3 = FieldSpec::new(3, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let alg = gen_cyclic(3).unwrap();
        for _ in 0..20 {
            let y = random_vec(&f3, 3, &mut rng);
            let mut delta = vec![FieldElement::ZERO; 3];
            delta[0] = FieldElement::ONE;
            let (out, _) = alg.apply(&f3, &delta, &y).unwrap();
            assert_eq!(out, y);
        }
        // Delta identity across lengths.
        let f = FieldSpec::new(6, None).unwrap();
        for m in 1..=12usize {
            let alg = gen_cyclic(m).unwrap();
            let y = random_vec(&f, m, &mut rng);
            let mut delta = vec![FieldElement::ZERO; m];
            delta[0] = FieldElement::ONE;
            let (out, _) = alg.apply(&f, &delta, &y).unwrap();
            assert_eq!(out, y, "m={m}");
        }
    }

    #[test]
    fn wrap_cyclic_matches_naive() {
        let f = FieldSpec::new(4, None).unwrap();
        let alg = gen_cyclic(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let x = random_vec(&f, 4, &mut rng);
            let y = random_vec(&f, 4, &mut rng);
            let (out, _) = alg.apply(&f, &x, &y).unwrap();
            assert_eq!(out, naive_cyclic(&f, &x, &y));
        }
    }

    #[test]
    fn wrap_cyclic_rejects_cyclic_input() {
        let alg = gen_cyclic(3).unwrap();
        assert!(wrap_cyclic(&alg).is_err());
    }

    #[test]
    fn apply_zero_operand_still_counts_r() {
        let f = FieldSpec::new(4, None).unwrap();
        let alg = gen_cyclic(3).unwrap();
        let zero = vec![FieldElement::ZERO; 3];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = random_vec(&f, 3, &mut rng);
        let (out, tally) = alg.apply(&f, &x, &zero).unwrap();
        assert!(out.iter().all(|e| e.is_zero()));
        assert_eq!(tally.mults, alg.r as u64);
    }

    #[test]
    fn dynamic_adds_equal_static_popcount_sums() {
        let f = FieldSpec::new(8, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for len in 1..=10usize {
            for alg in [gen_linear(len).unwrap(), gen_cyclic(len).unwrap()] {
                let x = random_vec(&f, len, &mut rng);
                let y = random_vec(&f, len, &mut rng);
                let (_, tally) = alg.apply(&f, &x, &y).unwrap();
                assert_eq!(tally.adds, alg.static_adds(), "len={len}");
            }
        }
    }

    #[test]
    fn bilinear_identity_sizes_1_to_16() {
        for m in [4usize, 8] {
            let f = FieldSpec::new(m, None).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(m as u64);
            for len in 1..=16usize {
                let lin = gen_linear(len).unwrap();
                let cyc = gen_cyclic(len).unwrap();
                for _ in 0..20 {
                    let x = random_vec(&f, len, &mut rng);
                    let y = random_vec(&f, len, &mut rng);
                    let (lo, _) = lin.apply(&f, &x, &y).unwrap();
                    assert_eq!(lo, naive_linear(&f, &x, &y), "linear len={len} m={m}");
                    let (co, _) = cyc.apply(&f, &x, &y).unwrap();
                    assert_eq!(co, naive_cyclic(&f, &x, &y), "cyclic len={len} m={m}");
                }
            }
        }
    }

    #[test]
    fn short_catalog_matches_naive_and_improves_r() {
        let f = FieldSpec::new(8, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for len in 1..=12usize {
            let alg = gen_cyclic_short(len).unwrap();
            assert_eq!(alg.length, len);
            assert!(alg.r <= gen_cyclic(len).unwrap().r);
            for _ in 0..30 {
                let x = random_vec(&f, len, &mut rng);
                let y = random_vec(&f, len, &mut rng);
                let (out, _) = alg.apply(&f, &x, &y).unwrap();
                assert_eq!(out, naive_cyclic(&f, &x, &y), "len={len}");
            }
        }
        // Structured sizes where the catalog beats the padded default.
        assert_eq!(gen_cyclic_short(3).unwrap().r, 4);
        assert_eq!(gen_cyclic_short(5).unwrap().r, 10);
        assert_eq!(gen_cyclic_short(6).unwrap().r, 12);
        assert_eq!(gen_cyclic_short(9).unwrap().r, 28);
        assert_eq!(gen_cyclic_short(10).unwrap().r, 30);
        // Powers of two have no odd part to split.
        for len in [1usize, 2, 4, 8] {
            assert_eq!(gen_cyclic_short(len).unwrap().r, gen_cyclic(len).unwrap().r);
        }
    }

    #[test]
    fn specialize_all_zero_elides_everything() {
        let f = FieldSpec::new(4, None).unwrap();
        let alg = gen_cyclic(3).unwrap();
        let sp = specialize_left(&alg, &[FieldElement::ZERO; 3]).unwrap();
        assert_eq!(sp.elided.len(), alg.r);
        assert_eq!(sp.genuine_mults(), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let y = random_vec(&f, 3, &mut rng);
        let (out, tally) = sp.apply(&f, &y).unwrap();
        assert!(out.iter().all(|e| e.is_zero()));
        assert_eq!(tally, ConvTally::default());
    }

    #[test]
    fn specialize_unit_length_one() {
        let f = FieldSpec::new(4, None).unwrap();
        let alg = gen_cyclic(1).unwrap();
        let sp = specialize_left(&alg, &[FieldElement::ONE]).unwrap();
        assert_eq!(sp.base.r, 1);
        assert_eq!(sp.constants, vec![FieldElement::ONE]);
        assert_eq!(sp.genuine_mults(), 0);
        let (out, tally) = sp.apply(&f, &[FieldElement(0xa)]).unwrap();
        assert_eq!(out, vec![FieldElement(0xa)]);
        assert_eq!(tally.mults, 0);
    }

    #[test]
    fn specialize_matches_unspecialized_apply() {
        let f = FieldSpec::new(3, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let alg = gen_cyclic(3).unwrap();
        let fixed = random_vec(&f, 3, &mut rng);
        let sp = specialize_left(&alg, &fixed).unwrap();
        assert_eq!(sp.constants.len(), 9);
        for _ in 0..100 {
            let y = random_vec(&f, 3, &mut rng);
            let (a, _) = alg.apply(&f, &fixed, &y).unwrap();
            let (b, _) = sp.apply(&f, &y).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn specialized_static_tally_matches_dynamic() {
        let f = FieldSpec::new(6, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for len in [2usize, 3, 4, 6] {
            for alg in [gen_cyclic(len).unwrap(), gen_cyclic_short(len).unwrap()] {
                let fixed = random_vec(&f, len, &mut rng);
                let sp = specialize_left(&alg, &fixed).unwrap();
                let y = random_vec(&f, len, &mut rng);
                let (_, tally) = sp.apply(&f, &y).unwrap();
                assert_eq!(tally, sp.static_tally(), "len={len}");
            }
        }
    }

    #[test]
    fn apply_rejects_length_mismatch() {
        let f = FieldSpec::new(4, None).unwrap();
        let alg = gen_cyclic(3).unwrap();
        let short = vec![FieldElement::ZERO; 2];
        let ok = vec![FieldElement::ZERO; 3];
        assert!(alg.apply(&f, &short, &ok).is_err());
        assert!(alg.apply(&f, &ok, &short).is_err());
    }
}
