//! Exact Hochschild, cyclic and periodic cyclic homology of finite-dimensional
//! algebras, together with characteristic-p tooling: Tate homology of Z/p,
//! quasi-Frobenius maps and the Cartier comparison, the Eilenberg–MacLane cube
//! construction and second Witt vectors.
//!
//! Everything is exact: scalars live in a prime field GF(p) or in Q.

pub mod algebra;
pub mod cartier;
pub mod complexes;
pub mod cube;
pub mod cyclic;
pub mod exactlin;
pub mod simplicial;
pub mod tate;

pub use exactlin::{FieldSpec, Matrix, Scalar, SparseVec, Subspace};

/// Errors shared by all modules.
#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("composite of differentials is nonzero")]
    CompositeNonzero,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("operands live over different fields")]
    FieldMismatch,
    #[error("{0} is not a prime below 2^31")]
    InvalidPrime(u64),
    #[error("degree {0} outside the computable range")]
    DegreeOutOfRange(i64),
    #[error("truncation too shallow: need {needed}, have {available}")]
    TruncationTooShallow { needed: usize, available: usize },
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("operation requires a prime field")]
    NotPrimeField,
    #[error("naturality failure: {0}")]
    NaturalityFailure(String),
    #[error("no stable window detected up to degree {0}")]
    InconclusiveStabilization(usize),
    #[error("size budget exceeded: {needed} cells requested, budget {budget}")]
    SizeBudgetExceeded { needed: u64, budget: u64 },
    #[error("no isomorphism found: {0}")]
    NoIsomorphismFound(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
