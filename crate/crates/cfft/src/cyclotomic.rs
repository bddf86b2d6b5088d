//! Cyclotomic cosets of {0, .., n-1} modulo n with respect to 2.
//!
//! A coset is the orbit of an integer under doubling mod n. Cosets are stored
//! in doubling order starting from their smallest element, because that is
//! the order in which downstream convolution kernels consume the input; the
//! partition also carries the grouping of cosets by size.
//!
//! Two counting properties of the partition are exposed as executable
//! checks: the per-size bound (at most (2^g - 1)/g cosets of size g when
//! n = 2^m - 1) and the total-size range n < k*m < 2n for the coset count k.

use std::collections::BTreeMap;

use crate::{Error, Result};

/// One cyclotomic coset: the orbit {s, 2s, 4s, ...} mod n, in doubling order.
/// The representative is the smallest element and always comes first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coset {
    pub rep: usize,
    pub elements: Vec<usize>,
}

impl Coset {
    #[inline]
    pub fn size(&self) -> usize {
        self.elements.len()
    }
}

/// Partition of {0, .., n-1} into cyclotomic cosets, ordered by ascending
/// representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetPartition {
    pub n: usize,
    pub cosets: Vec<Coset>,
}

impl CosetPartition {
    /// Partitions {0, .., n-1} by repeated doubling mod n. Rejects even n
    /// (doubling is not invertible there and no field of odd order contains
    /// such a group).
    pub fn new(n: usize) -> Result<CosetPartition> {
        if n == 0 || n % 2 == 0 {
            return Err(Error::EvenModulus(n));
        }
        let mut seen = vec![false; n];
        let mut cosets = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            // Scanning ascending guarantees the representative is minimal.
            let mut elements = Vec::new();
            let mut e = s;
            loop {
                seen[e] = true;
                elements.push(e);
                e = e * 2 % n;
                if e == s {
                    break;
                }
            }
            cosets.push(Coset { rep: s, elements });
        }
        Ok(CosetPartition { n, cosets })
    }

    /// Number of cosets.
    #[inline]
    pub fn k(&self) -> usize {
        self.cosets.len()
    }

    /// Coset sizes in partition order.
    pub fn sizes(&self) -> Vec<usize> {
        self.cosets.iter().map(Coset::size).collect()
    }

    /// Groups of cosets sharing a size: size -> indices into `cosets`.
    pub fn size_groups(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, c) in self.cosets.iter().enumerate() {
            groups.entry(c.size()).or_default().push(i);
        }
        groups
    }
}

/// Result row of the per-size coset-count check: for each size present,
/// the number of cosets of that size must not exceed (2^size - 1)/size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeBoundRow {
    pub size: usize,
    pub count: usize,
    /// Floor of (2^size - 1)/size; with integer counts the floor comparison
    /// is equivalent to the exact rational one.
    pub bound: u64,
    pub pass: bool,
}

/// Checks, for a partition of n = 2^m - 1, that each size-g group holds at
/// most (2^g - 1)/g cosets.
pub fn check_size_bound(p: &CosetPartition, m: usize) -> Vec<SizeBoundRow> {
    debug_assert_eq!(p.n, (1usize << m) - 1);
    p.size_groups()
        .into_iter()
        .map(|(size, members)| {
            let bound = ((1u64 << size) - 1) / size as u64;
            SizeBoundRow {
                size,
                count: members.len(),
                bound,
                pass: members.len() as u64 <= bound,
            }
        })
        .collect()
}

/// Result of the coset-count range check n < k*m < 2n for n = 2^m - 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KmRangeRow {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub km: usize,
    pub pass: bool,
}

/// Evaluates both strict inequalities n < k*m and k*m < 2n for the partition
/// of n = 2^m - 1. The check is restricted to m >= 2: at m = 1 the lower
/// bound fails literally (k = 1, km = 1 = n).
pub fn check_km_range(m: usize) -> Result<KmRangeRow> {
    if m < 2 {
        return Err(Error::DegreeTooSmall(m));
    }
    let n = (1usize << m) - 1;
    let k = CosetPartition::new(n)?.k();
    let km = k * m;
    Ok(KmRangeRow {
        m,
        n,
        k,
        km,
        pass: n < km && km < 2 * n,
    })
}
