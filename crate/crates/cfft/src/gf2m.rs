//! Arithmetic in GF(2^m) and the GF(2) linear algebra behind it.
//!
//! Field elements use the polynomial-basis bit representation: bit i of the
//! mask is the coefficient of x^i, addition is XOR, and multiplication is a
//! carry-less product reduced by the field's primitive polynomial. There are
//! no log/antilog tables on the contract surface, so every degree in 2..=20
//! runs through the same exact code path.
//!
//! [`BitMatrix`] is a dense bit matrix used throughout the crate for the
//! binary pre/post matrices of convolution algorithms, the recombination
//! matrix of a transform plan, and the Gaussian elimination that extracts
//! normal-basis coordinates.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Smallest supported extension degree.
pub const MIN_DEGREE: usize = 2;
/// Largest supported extension degree (desk-scale cap).
pub const MAX_DEGREE: usize = 20;

/// Default primitive polynomial per degree, indexed by m - 2. Each entry is
/// re-verified by [`FieldSpec::new`]; the table is a convenience, not a
/// trusted source.
const DEFAULT_POLYS: [u32; MAX_DEGREE - MIN_DEGREE + 1] = [
    0x7,        // m = 2:  x^2 + x + 1
    0xb,        // m = 3:  x^3 + x + 1
    0x13,       // m = 4:  x^4 + x + 1
    0x25,       // m = 5:  x^5 + x^2 + 1
    0x43,       // m = 6:  x^6 + x + 1
    0x89,       // m = 7:  x^7 + x^3 + 1
    0x11d,      // m = 8:  x^8 + x^4 + x^3 + x^2 + 1
    0x211,      // m = 9:  x^9 + x^4 + 1
    0x409,      // m = 10: x^10 + x^3 + 1
    0x805,      // m = 11: x^11 + x^2 + 1
    0x1053,     // m = 12: x^12 + x^6 + x^4 + x + 1
    0x201b,     // m = 13: x^13 + x^4 + x^3 + x + 1
    0x4443,     // m = 14: x^14 + x^10 + x^6 + x + 1
    0x8003,     // m = 15: x^15 + x + 1
    0x1100b,    // m = 16: x^16 + x^12 + x^3 + x + 1
    0x20009,    // m = 17: x^17 + x^3 + 1
    0x40081,    // m = 18: x^18 + x^7 + 1
    0x80027,    // m = 19: x^19 + x^5 + x^2 + x + 1
    0x100009,   // m = 20: x^20 + x^3 + 1
];

/// An element of GF(2^m) in the polynomial basis: bit i = coefficient of x^i.
///
/// Elements carry no field tag; all arithmetic goes through the owning
/// [`FieldSpec`], which checks the bit range in debug builds. Mixing elements
/// of different fields is a contract violation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::ops::Add for FieldElement {
    type Output = FieldElement;
    // Characteristic 2: addition is XOR regardless of the field spec.
    #[inline]
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

impl std::ops::AddAssign for FieldElement {
    #[inline]
    fn add_assign(&mut self, rhs: FieldElement) {
        self.0 ^= rhs.0;
    }
}

impl std::fmt::Display for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:x}", self.0)
    }
}

/// A verified GF(2^m) field description.
///
/// `poly` is the bitmask of a degree-m primitive polynomial over GF(2) (bit i
/// = coefficient of x^i, bit m always set) and `n = 2^m - 1` is the order of
/// the multiplicative group. Construction verifies irreducibility by a
/// brute-force factor search and primitivity by an order check, including for
/// the built-in defaults.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    m: usize,
    poly: u32,
    n: usize,
}

impl FieldSpec {
    /// Builds a field of degree `m`. With `poly = None` the built-in default
    /// polynomial for `m` is used; either way the polynomial is verified.
    pub fn new(m: usize, poly: Option<u32>) -> Result<FieldSpec> {
        if !(MIN_DEGREE..=MAX_DEGREE).contains(&m) {
            return Err(Error::DegreeOutOfRange(m));
        }
        let poly = poly.unwrap_or(DEFAULT_POLYS[m - MIN_DEGREE]);
        if poly_degree(poly as u64) != Some(m) {
            return Err(Error::PolyDegreeMismatch { poly, expected: m });
        }
        verify_irreducible(poly, m)?;
        verify_primitive(poly, m)?;
        Ok(FieldSpec {
            m,
            poly,
            n: (1usize << m) - 1,
        })
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn poly(&self) -> u32 {
        self.poly
    }

    /// Order of the multiplicative group, 2^m - 1.
    #[inline]
    pub fn group_order(&self) -> usize {
        self.n
    }

    /// Checked element constructor: the mask must fit in m bits.
    pub fn element(&self, bits: u32) -> Result<FieldElement> {
        if bits >> self.m != 0 {
            return Err(Error::ElementOutOfRange { bits, m: self.m });
        }
        Ok(FieldElement(bits))
    }

    /// The residue class of x, a generator of the multiplicative group.
    #[inline]
    pub fn alpha(&self) -> FieldElement {
        FieldElement(2)
    }

    #[inline]
    fn debug_check(&self, a: FieldElement) {
        debug_assert!(
            a.0 >> self.m == 0,
            "element {:#x} out of range for GF(2^{})",
            a.0,
            self.m
        );
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.debug_check(a);
        self.debug_check(b);
        a + b
    }

    /// Carry-less product reduced modulo the field polynomial.
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.debug_check(a);
        self.debug_check(b);
        FieldElement(mul_raw(self.m, self.poly, a.0, b.0))
    }

    #[inline]
    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    /// Exponentiation by square-and-multiply. `pow(a, 0) = 1` for every a.
    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        self.debug_check(a);
        FieldElement(pow_raw(self.m, self.poly, a.0, e))
    }

    /// Multiplicative inverse, a^(2^m - 2). Errors on zero.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, self.n as u64 - 1))
    }

    /// An element of multiplicative order exactly `n`, taken as the fixed
    /// power alpha^((2^m - 1) / n) of the primitive element.
    pub fn root_of_order(&self, n: usize) -> Result<FieldElement> {
        if n == 0 || self.n % n != 0 {
            return Err(Error::LengthNotDividing { n, m: self.m });
        }
        Ok(self.pow(self.alpha(), (self.n / n) as u64))
    }

    /// Uniform random element drawn from the low m bits of the generator.
    pub fn random_element<R: rand::RngCore>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.next_u32() & ((1u32 << self.m) - 1))
    }
}

/// Degree of a polynomial bitmask, `None` for the zero polynomial.
fn poly_degree(p: u64) -> Option<usize> {
    if p == 0 {
        None
    } else {
        Some(63 - p.leading_zeros() as usize)
    }
}

/// Remainder of polynomial division over GF(2).
fn poly_rem(mut a: u64, b: u64) -> u64 {
    let db = poly_degree(b).expect("division by zero polynomial");
    while let Some(da) = poly_degree(a) {
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

/// Brute-force factor search: tries every monic polynomial of degree
/// 1..=m/2 as a divisor.
fn verify_irreducible(poly: u32, m: usize) -> Result<()> {
    for d in 1..=m / 2 {
        for q in (1u64 << d)..(1u64 << (d + 1)) {
            if poly_rem(poly as u64, q) == 0 {
                return Err(Error::NotIrreducible(poly));
            }
        }
    }
    Ok(())
}

/// Order check: x must have order exactly 2^m - 1 modulo `poly`.
fn verify_primitive(poly: u32, m: usize) -> Result<()> {
    let n = (1u64 << m) - 1;
    if pow_raw(m, poly, 2, n) != 1 {
        return Err(Error::NotPrimitive(poly));
    }
    for p in prime_factors(n) {
        if pow_raw(m, poly, 2, n / p) == 1 {
            return Err(Error::NotPrimitive(poly));
        }
    }
    Ok(())
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn mul_raw(m: usize, poly: u32, a: u32, b: u32) -> u32 {
    let mut acc: u64 = 0;
    let a = a as u64;
    let mut b = b as u64;
    let mut shift = 0;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a << shift;
        }
        b >>= 1;
        shift += 1;
    }
    // Reduce the (2m-1)-bit product back below degree m.
    for bit in (m..=2 * m.saturating_sub(1)).rev() {
        if acc >> bit & 1 != 0 {
            acc ^= (poly as u64) << (bit - m);
        }
    }
    acc as u32
}

fn pow_raw(m: usize, poly: u32, a: u32, mut e: u64) -> u32 {
    let mut base = a;
    let mut acc = 1u32;
    while e != 0 {
        if e & 1 != 0 {
            acc = mul_raw(m, poly, acc, base);
        }
        base = mul_raw(m, poly, base, base);
        e >>= 1;
    }
    acc
}

/// Dense bit matrix over GF(2). Bit j of row i is entry (i, j); rows are
/// packed into u64 words, least-significant bit first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn zero(rows: usize, cols: usize) -> BitMatrix {
        let words_per_row = cols.div_ceil(64).max(1);
        BitMatrix {
            rows,
            cols,
            words_per_row,
            bits: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> BitMatrix {
        let mut m = BitMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from per-row masks (only usable for cols <= 64).
    pub fn from_row_masks(rows: &[u64], cols: usize) -> BitMatrix {
        assert!(cols <= 64);
        let mut m = BitMatrix::zero(rows.len(), cols);
        for (i, &mask) in rows.iter().enumerate() {
            debug_assert!(cols == 64 || mask >> cols == 0, "row mask wider than cols");
            m.bits[i * m.words_per_row] = mask;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        self.bits[r * self.words_per_row + c / 64] >> (c % 64) & 1 != 0
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.bits[r * self.words_per_row + c / 64];
        if v {
            *w |= 1u64 << (c % 64);
        } else {
            *w &= !(1u64 << (c % 64));
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        let w = &mut self.bits[r * self.words_per_row + c / 64];
        *w ^= 1u64 << (c % 64);
    }

    #[inline]
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    /// Row as a u64 mask; only valid when cols <= 64.
    #[inline]
    pub fn row_mask(&self, r: usize) -> u64 {
        debug_assert!(self.cols <= 64);
        self.bits[r * self.words_per_row]
    }

    pub fn row_popcount(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn row_is_zero(&self, r: usize) -> bool {
        self.row_words(r).iter().all(|&w| w == 0)
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Column indices of the set bits in row `r`, ascending.
    pub fn row_indices(&self, r: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.row_popcount(r));
        for (wi, &w) in self.row_words(r).iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(wi * 64 + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }

    pub fn xor_row_from(&mut self, dst: usize, src: usize) {
        debug_assert!(dst != src);
        let (d, s) = (dst * self.words_per_row, src * self.words_per_row);
        for i in 0..self.words_per_row {
            let v = self.bits[s + i];
            self.bits[d + i] ^= v;
        }
    }

    /// GF(2) matrix product; self is (a x b), rhs is (b x c).
    pub fn multiply(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, rhs.rows);
        let mut out = BitMatrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in self.row_indices(i) {
                let d = i * out.words_per_row;
                let s = j * rhs.words_per_row;
                for w in 0..out.words_per_row {
                    out.bits[d + w] ^= rhs.bits[s + w];
                }
            }
        }
        out
    }

    /// GF(2) matrix-vector product with the vector given as a bitmask
    /// (cols <= 64): bit i of the result is parity(row_i AND x).
    pub fn matvec_mask(&self, x: u64) -> u64 {
        debug_assert!(self.cols <= 64 && self.rows <= 64);
        let mut out = 0u64;
        for r in 0..self.rows {
            if (self.row_mask(r) & x).count_ones() % 2 == 1 {
                out |= 1 << r;
            }
        }
        out
    }

    /// Rank over GF(2).
    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        let mut rank = 0;
        for c in 0..work.cols {
            if rank == work.rows {
                break;
            }
            let Some(pivot) = (rank..work.rows).find(|&r| work.get(r, c)) else {
                continue;
            };
            work.swap_rows(rank, pivot);
            for r in 0..work.rows {
                if r != rank && work.get(r, c) {
                    work.xor_row_from(r, rank);
                }
            }
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.words_per_row {
            self.bits.swap(a * self.words_per_row + i, b * self.words_per_row + i);
        }
    }

    /// Solves M x = rhs over GF(2) by Gaussian elimination on the augmented
    /// system. Both the columns and rows must fit in a u64 mask. Returns one
    /// solution, or `None` when rhs lies outside the column space (rank
    /// deficiency is reported through the `None`).
    pub fn solve(&self, rhs: u64) -> Option<u64> {
        assert!(self.cols <= 64 && self.rows <= 64);
        let mut rows: Vec<(u64, bool)> = (0..self.rows)
            .map(|r| (self.row_mask(r), rhs >> r & 1 != 0))
            .collect();
        let mut pivot_cols = Vec::new();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].0 >> c & 1 != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let (prow, pb) = rows[rank];
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.0 >> c & 1 != 0 {
                    row.0 ^= prow;
                    row.1 ^= pb;
                }
            }
            pivot_cols.push(c);
            rank += 1;
        }
        // Inconsistent system: a zero row with a nonzero right-hand side.
        if rows[rank..].iter().any(|&(row, b)| row == 0 && b) {
            return None;
        }
        let mut x = 0u64;
        for (r, &c) in pivot_cols.iter().enumerate() {
            if rows[r].1 {
                x |= 1 << c;
            }
        }
        Some(x)
    }

    /// XORs another matrix of identical shape into this one.
    pub fn xor_with(&mut self, other: &BitMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a ^= b;
        }
    }

    /// Row encoded as lowercase hex, bit j of the row being bit j of the
    /// integer value; fixed width of ceil(cols/4) digits.
    pub fn row_hex(&self, r: usize) -> String {
        mask_hex(self.row_words(r), self.cols)
    }

    /// Inverse of [`BitMatrix::row_hex`].
    pub fn set_row_from_hex(&mut self, r: usize, hex: &str) -> Result<()> {
        let digits = self.cols.div_ceil(4);
        if hex.len() != digits {
            return Err(Error::PlanDocument(format!(
                "row {r}: expected {digits} hex digits, got {}",
                hex.len()
            )));
        }
        for (i, ch) in hex.chars().rev().enumerate() {
            let nibble = ch
                .to_digit(16)
                .ok_or_else(|| Error::PlanDocument(format!("row {r}: bad hex digit {ch:?}")))?;
            for b in 0..4 {
                let c = i * 4 + b;
                if nibble >> b & 1 != 0 {
                    if c >= self.cols {
                        return Err(Error::PlanDocument(format!("row {r}: bit beyond column count")));
                    }
                    self.set(r, c, true);
                }
            }
        }
        Ok(())
    }
}

/// Lowercase hex of a little-endian word-packed bitmask, fixed width of
/// ceil(bits/4) digits; bit j of the mask is bit j of the printed integer.
pub fn mask_hex(words: &[u64], bits: usize) -> String {
    let digits = bits.div_ceil(4);
    let mut s = String::with_capacity(digits);
    for d in (0..digits).rev() {
        let mut nibble = 0u8;
        for b in 0..4 {
            let bit = d * 4 + b;
            if bit < bits && words[bit / 64] >> (bit % 64) & 1 != 0 {
                nibble |= 1 << b;
            }
        }
        s.push(char::from_digit(nibble as u32, 16).unwrap());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn make_field_small_examples() {
        let f = FieldSpec::new(3, Some(0b1011)).unwrap();
        assert_eq!(f.degree(), 3);
        assert_eq!(f.group_order(), 7);

        let f = FieldSpec::new(4, Some(0b10011)).unwrap();
        assert_eq!(f.degree(), 4);
        assert_eq!(f.group_order(), 15);
    }

    #[test]
    fn make_field_rejects_reducible() {
        // x^3 + x^2 + x + 1 = (x + 1)(x^2 + 1)
        assert!(matches!(
            FieldSpec::new(3, Some(0b1111)),
            Err(Error::NotIrreducible(_))
        ));
    }

    #[test]
    fn make_field_rejects_bad_inputs() {
        assert!(matches!(FieldSpec::new(1, None), Err(Error::DegreeOutOfRange(1))));
        assert!(matches!(FieldSpec::new(21, None), Err(Error::DegreeOutOfRange(21))));
        assert!(matches!(
            FieldSpec::new(4, Some(0b1011)),
            Err(Error::PolyDegreeMismatch { .. })
        ));
        // x^4 + x^3 + x^2 + x + 1 is irreducible but x has order 5, not 15.
        assert!(matches!(
            FieldSpec::new(4, Some(0b11111)),
            Err(Error::NotPrimitive(_))
        ));
    }

    #[test]
    fn default_polys_all_verify() {
        for m in MIN_DEGREE..=MAX_DEGREE {
            let f = FieldSpec::new(m, None).unwrap();
            assert_eq!(f.group_order(), (1 << m) - 1);
        }
    }

    /// Independent primitivity oracle: enumerate all powers of x and check
    /// the first return to 1 happens at exactly 2^m - 1.
    fn order_by_enumeration(f: &FieldSpec) -> usize {
        let mut e = f.alpha();
        let mut order = 1;
        while e != FieldElement::ONE {
            e = f.mul(e, f.alpha());
            order += 1;
        }
        order
    }

    #[test]
    fn brute_force_order_matches_group_order() {
        for m in [2, 3, 4, 5, 8] {
            let f = FieldSpec::new(m, None).unwrap();
            assert_eq!(order_by_enumeration(&f), f.group_order());
        }
    }

    #[test]
    fn mul_example_gf8() {
        // x * x^2 = x^3 = x + 1 under x^3 + x + 1.
        let f = FieldSpec::new(3, Some(0b1011)).unwrap();
        assert_eq!(f.mul(FieldElement(0b010), FieldElement(0b100)), FieldElement(0b011));
    }

    /// Log-table oracle: multiplication through discrete logs of the
    /// enumerated power table. Independent of the carry-less reduce path.
    fn mul_by_log_table(f: &FieldSpec, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        let n = f.group_order();
        let mut log = vec![0usize; n + 1];
        let mut e = FieldElement::ONE;
        for i in 0..n {
            log[e.bits() as usize] = i;
            e = f.mul(e, f.alpha());
        }
        let mut exp = (log[a.bits() as usize] + log[b.bits() as usize]) % n;
        let mut out = FieldElement::ONE;
        while exp > 0 {
            out = f.mul(out, f.alpha());
            exp -= 1;
        }
        out
    }

    #[test]
    fn mul_cross_checked_against_log_table() {
        let f = FieldSpec::new(3, Some(0b1011)).unwrap();
        for a in 0..8u32 {
            for b in 0..8u32 {
                let (a, b) = (FieldElement(a), FieldElement(b));
                assert_eq!(f.mul(a, b), mul_by_log_table(&f, a, b));
            }
        }
    }

    #[test]
    fn mul_identities_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = FieldSpec::new(6, None).unwrap();
        for _ in 0..20 {
            let a = f.random_element(&mut rng);
            assert_eq!(f.mul(a, FieldElement::ONE), a);
            assert_eq!(f.add(a, a), FieldElement::ZERO);
        }
    }

    #[test]
    fn field_axioms_random_triples() {
        for m in MIN_DEGREE..=12 {
            let f = FieldSpec::new(m, None).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(m as u64);
            for _ in 0..1000 {
                let a = f.random_element(&mut rng);
                let b = f.random_element(&mut rng);
                let c = f.random_element(&mut rng);
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            }
        }
    }

    #[test]
    fn frobenius_is_additive() {
        for m in [3, 5, 8, 11] {
            let f = FieldSpec::new(m, None).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(m as u64 + 100);
            for _ in 0..200 {
                let a = f.random_element(&mut rng);
                let b = f.random_element(&mut rng);
                assert_eq!(f.square(f.add(a, b)), f.add(f.square(a), f.square(b)));
            }
        }
    }

    #[test]
    fn primitivity_via_divisor_powers() {
        for m in [4usize, 6, 10, 12] {
            let f = FieldSpec::new(m, None).unwrap();
            let n = f.group_order() as u64;
            assert_eq!(f.pow(f.alpha(), n), FieldElement::ONE);
            for d in 1..n {
                if n % d == 0 {
                    assert_ne!(f.pow(f.alpha(), d), FieldElement::ONE, "m={m} d={d}");
                }
            }
        }
    }

    #[test]
    fn inv_and_pow() {
        let f = FieldSpec::new(5, None).unwrap();
        assert!(matches!(f.inv(FieldElement::ZERO), Err(Error::ZeroInverse)));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let a = f.random_element(&mut rng);
            if a.is_zero() {
                continue;
            }
            assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
        }
        assert_eq!(f.pow(FieldElement::ZERO, 0), FieldElement::ONE);
    }

    #[test]
    fn solve_identity() {
        let m = BitMatrix::identity(3);
        assert_eq!(m.solve(0b101), Some(0b101));
    }

    #[test]
    fn solve_conjugate_column_system() {
        // Columns are the GF(8) conjugates (0b011, 0b101, 0b111) of the
        // normal-basis element; alpha = 0b010 decomposes as the second plus
        // the third column.
        let cols = [0b011u64, 0b101, 0b111];
        let mut m = BitMatrix::zero(3, 3);
        for (j, col) in cols.iter().enumerate() {
            for (i, _) in (0..3).enumerate() {
                m.set(i, j, col >> i & 1 != 0);
            }
        }
        let x = m.solve(0b010).unwrap();
        assert_eq!(x, 0b110);
        // Exhaustive oracle over all 2^3 candidate solutions.
        let brute: Vec<u64> = (0..8).filter(|&x| m.matvec_mask(x) == 0b010).collect();
        assert_eq!(brute, vec![0b110]);
    }

    #[test]
    fn solve_reports_no_solution() {
        // Two equal rows with inconsistent right-hand sides.
        let m = BitMatrix::from_row_masks(&[0b11, 0b11], 2);
        assert_eq!(m.solve(0b01), None);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn row_hex_roundtrip() {
        let mut m = BitMatrix::zero(2, 9);
        m.set(0, 0, true);
        m.set(0, 8, true);
        m.set(1, 4, true);
        assert_eq!(m.row_hex(0), "101");
        assert_eq!(m.row_hex(1), "010");
        let mut back = BitMatrix::zero(2, 9);
        back.set_row_from_hex(0, "101").unwrap();
        back.set_row_from_hex(1, "010").unwrap();
        assert_eq!(m, back);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// Solving a solvable system and re-multiplying reproduces the
        /// right-hand side.
        #[test]
        fn solve_then_multiply_is_identity(rows in proptest::collection::vec(0u64..1 << 12, 12), x in 0u64..1 << 12) {
            let m = BitMatrix::from_row_masks(&rows, 12);
            let rhs = m.matvec_mask(x);
            let sol = m.solve(rhs).expect("constructively solvable");
            prop_assert_eq!(m.matvec_mask(sol), rhs);
        }

        #[test]
        fn matrix_multiply_matches_entrywise(a in proptest::collection::vec(0u64..1 << 8, 6), b in proptest::collection::vec(0u64..1 << 6, 8)) {
            let ma = BitMatrix::from_row_masks(&a, 8);
            let mb = BitMatrix::from_row_masks(&b, 6);
            let prod = ma.multiply(&mb);
            for i in 0..6 {
                for j in 0..6 {
                    let mut e = false;
                    for t in 0..8 {
                        e ^= ma.get(i, t) & mb.get(t, j);
                    }
                    prop_assert_eq!(prod.get(i, j), e);
                }
            }
        }
    }
}
