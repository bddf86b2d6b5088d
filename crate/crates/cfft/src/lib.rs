//! Cyclotomic FFTs over GF(2^m).
//!
//! This crate computes discrete Fourier transforms over binary extension
//! fields by the cyclotomic decomposition: the input is permuted into
//! cyclotomic-coset blocks, each block goes through a short cyclic
//! convolution against a fixed kernel derived from a normal basis, and the
//! results are recombined by a binary matrix using only additions. The
//! recombination step can run either as a direct row-XOR product or through
//! a structured addition network that reorders the matrix into block-cyclic
//! form and evaluates it with Four-Russians matrix-vector modules.
//!
//! Modules:
//! - [`gf2m`]: field arithmetic and GF(2) linear algebra.
//! - [`cyclotomic`]: coset partitions and their counting bounds.
//! - [`normal_basis`]: normal bases of subfields and coordinate extraction.
//! - [`bilinear`]: bilinear convolution algorithms with binary matrices.
//! - [`planner`]: transform plans and the block-cyclic rearrangement.
//! - [`addnet`]: the structured addition network and its netlist export.
//! - [`engine`]: end-to-end transforms and randomized verification.
//! - [`metrics`]: operation counting and complexity-bound tables.
//! - [`cli`]: the command-line surface.

pub mod addnet;
pub mod bilinear;
pub mod cli;
pub mod cyclotomic;
pub mod engine;
pub mod gf2m;
pub mod metrics;
pub mod normal_basis;
pub mod planner;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("extension degree {0} outside supported range 2..=20")]
    DegreeOutOfRange(usize),
    #[error("polynomial {poly:#x} does not have degree {expected}")]
    PolyDegreeMismatch { poly: u32, expected: usize },
    #[error("polynomial {0:#x} is reducible over GF(2)")]
    NotIrreducible(u32),
    #[error("polynomial {0:#x} is irreducible but not primitive")]
    NotPrimitive(u32),
    #[error("inverse of zero is undefined")]
    ZeroInverse,
    #[error("element {bits:#x} is not a valid GF(2^{m}) element")]
    ElementOutOfRange { bits: u32, m: usize },
    #[error("modulus {0} must be odd")]
    EvenModulus(usize),
    #[error("degree {0} is not supported for this check (needs m >= 2)")]
    DegreeTooSmall(usize),
    #[error("{0} does not divide the subfield structure: expected a divisor of {1}")]
    NotADivisor(usize, usize),
    #[error("element {bits:#x} does not lie in the subfield GF(2^{degree})")]
    NotInSubfield { bits: u32, degree: usize },
    #[error("no normal basis found for subfield degree {0} (theory violation)")]
    NormalBasisExhausted(usize),
    #[error("convolution length {0} outside supported range {1}..={2}")]
    ConvLengthOutOfRange(usize, usize, usize),
    #[error("expected a {0:?}-mode bilinear algorithm")]
    ConvModeMismatch(crate::bilinear::ConvMode),
    #[error("vector length {got} does not match expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("transform length {n} does not divide 2^{m} - 1")]
    LengthNotDividing { n: usize, m: usize },
    #[error("coset convolution does not reproduce the circulant block for size {0}")]
    ConvOrientation(usize),
    #[error("rearranged block ({0},{1}) is not cyclic; shift convention violated")]
    CyclicityViolation(usize, usize),
    #[error("reordered matrix is not block-cyclic at block ({0},{1})")]
    BlockCyclicityViolation(usize, usize),
    #[error("addition network disagrees with its source matrix (orientation self-check)")]
    AddnetOrientation,
    #[error("plan document invalid: {0}")]
    PlanDocument(String),
    #[error("vector file invalid at line {line}: {reason}")]
    VectorFile { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
