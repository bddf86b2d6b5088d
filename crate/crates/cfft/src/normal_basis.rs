//! Normal bases of subfields GF(2^d) inside GF(2^m).
//!
//! A normal basis is {g, g^2, g^4, .., g^(2^(d-1))} for a suitable g; its
//! defining feature is that squaring an element cyclically shifts its
//! coordinate vector. The shift convention fixed here — squaring moves
//! coordinate s to position (s + 1) mod d — is what the planner and the
//! addition network rely on for their circulant structure, and it is
//! asserted by tests rather than assumed.

use crate::gf2m::{BitMatrix, FieldElement, FieldSpec};
use crate::{Error, Result};

/// A normal basis of the subfield GF(2^d) of `field`, together with a
/// precomputed solver mapping subfield elements to their coordinates.
#[derive(Clone, Debug)]
pub struct NormalBasis {
    field: FieldSpec,
    subfield_degree: usize,
    gamma: FieldElement,
    conjugates: Vec<FieldElement>,
    /// Rows of the ambient representation that pin down the coordinates: the
    /// d x d submatrix of conjugate columns restricted to these rows is
    /// invertible, and `inv_rows` holds its inverse (one u32 row mask each).
    pivot_rows: Vec<usize>,
    inv_rows: Vec<u32>,
}

/// Finds a normal basis of GF(2^d) inside `field` deterministically:
/// candidates are the subfield elements alpha^(j * (2^m - 1)/(2^d - 1)) for
/// ascending j >= 1 (for d = 1 the first candidate is already 1), and the
/// first whose conjugates are GF(2)-independent wins.
pub fn find_normal_basis(field: &FieldSpec, subfield_degree: usize) -> Result<NormalBasis> {
    let m = field.degree();
    let d = subfield_degree;
    if d == 0 || m % d != 0 {
        return Err(Error::NotADivisor(d, m));
    }
    let subfield_order = (1u64 << d) - 1;
    let step = field.group_order() as u64 / subfield_order;
    for j in 1..=subfield_order {
        let gamma = field.pow(field.alpha(), j * step);
        let conjugates = conjugate_orbit(field, gamma, d);
        if independent(field, &conjugates) {
            let (pivot_rows, inv_rows) = coordinate_solver(field, &conjugates)
                .expect("independent columns always yield a solver");
            return Ok(NormalBasis {
                field: *field,
                subfield_degree: d,
                gamma,
                conjugates,
                pivot_rows,
                inv_rows,
            });
        }
    }
    // The normal basis theorem guarantees a hit before the scan runs out.
    Err(Error::NormalBasisExhausted(d))
}

fn conjugate_orbit(field: &FieldSpec, gamma: FieldElement, d: usize) -> Vec<FieldElement> {
    let mut out = Vec::with_capacity(d);
    let mut e = gamma;
    for _ in 0..d {
        out.push(e);
        e = field.square(e);
    }
    out
}

fn independent(field: &FieldSpec, conjugates: &[FieldElement]) -> bool {
    let mut m = BitMatrix::zero(field.degree(), conjugates.len());
    for (j, c) in conjugates.iter().enumerate() {
        for i in 0..field.degree() {
            m.set(i, j, c.bits() >> i & 1 != 0);
        }
    }
    m.rank() == conjugates.len()
}

/// Gaussian elimination on the m x d conjugate-column matrix: returns d pivot
/// rows and the inverse of the restricted d x d matrix, as row masks.
fn coordinate_solver(field: &FieldSpec, conjugates: &[FieldElement]) -> Option<(Vec<usize>, Vec<u32>)> {
    let d = conjugates.len();
    let m = field.degree();
    // Row r of the ambient matrix, restricted to the d columns.
    let row = |r: usize| -> u32 {
        let mut mask = 0u32;
        for (j, c) in conjugates.iter().enumerate() {
            if c.bits() >> r & 1 != 0 {
                mask |= 1 << j;
            }
        }
        mask
    };
    // Pick pivot rows greedily so the restricted matrix has full rank.
    let mut pivots: Vec<usize> = Vec::with_capacity(d);
    let mut basis: Vec<u32> = Vec::new();
    for r in 0..m {
        if pivots.len() == d {
            break;
        }
        let mut v = row(r);
        for &b in &basis {
            let lead = 31 - b.leading_zeros();
            if v >> lead & 1 != 0 {
                v ^= b;
            }
        }
        if v != 0 {
            pivots.push(r);
            basis.push(v);
            basis.sort_by_key(|b| std::cmp::Reverse(*b));
        }
    }
    if pivots.len() < d {
        return None;
    }
    // Invert the restricted matrix by augmented elimination.
    let mut work: Vec<u64> = pivots
        .iter()
        .map(|&r| row(r) as u64)
        .collect();
    let mut inv: Vec<u64> = (0..d).map(|i| 1u64 << i).collect();
    for c in 0..d {
        let p = (c..d).find(|&r| work[r] >> c & 1 != 0)?;
        work.swap(c, p);
        inv.swap(c, p);
        for r in 0..d {
            if r != c && work[r] >> c & 1 != 0 {
                work[r] ^= work[c];
                inv[r] ^= inv[c];
            }
        }
    }
    Some((pivots, inv.into_iter().map(|v| v as u32).collect()))
}

impl NormalBasis {
    #[inline]
    pub fn subfield_degree(&self) -> usize {
        self.subfield_degree
    }

    #[inline]
    pub fn gamma(&self) -> FieldElement {
        self.gamma
    }

    /// The conjugates g^(2^0), .., g^(2^(d-1)), in squaring order.
    #[inline]
    pub fn conjugates(&self) -> &[FieldElement] {
        &self.conjugates
    }

    /// Membership test for the subfield: e^(2^d) = e.
    pub fn in_subfield(&self, e: FieldElement) -> bool {
        let mut x = e;
        for _ in 0..self.subfield_degree {
            x = self.field.square(x);
        }
        x == e
    }

    /// Coordinates of `e` in the basis, as a bitmask: bit s set means the
    /// conjugate g^(2^s) participates in the sum. Errors when `e` lies
    /// outside the subfield.
    pub fn coordinates(&self, e: FieldElement) -> Result<u32> {
        if !self.in_subfield(e) {
            return Err(Error::NotInSubfield {
                bits: e.bits(),
                degree: self.subfield_degree,
            });
        }
        let mut restricted = 0u32;
        for (i, &r) in self.pivot_rows.iter().enumerate() {
            if e.bits() >> r & 1 != 0 {
                restricted |= 1 << i;
            }
        }
        let mut coords = 0u32;
        for (s, &inv_row) in self.inv_rows.iter().enumerate() {
            if (inv_row & restricted).count_ones() % 2 == 1 {
                coords |= 1 << s;
            }
        }
        debug_assert_eq!(self.expand(coords), e);
        Ok(coords)
    }

    /// Sum of the conjugates selected by `coords` — the inverse of
    /// [`NormalBasis::coordinates`].
    pub fn expand(&self, coords: u32) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        for (s, &c) in self.conjugates.iter().enumerate() {
            if coords >> s & 1 != 0 {
                acc += c;
            }
        }
        acc
    }
}
