//! Exact-arithmetic construction of A∞ (strong homotopy) algebra
//! structures on subcomplexes of finite differential graded
//! superalgebras, together with the discrete Hodge theory that produces
//! the homotopy data on simplicial cochain algebras.
//!
//! The pipeline: build or load a DGA ([`dga`]), equip it with an inner
//! product and derive adjoints, Laplacians, Green operators and
//! harmonic projectors ([`hodge`]), pick a subcomplex and a homotopy
//! ([`transfer::check_assumption`]), then evaluate the transferred
//! higher products and verify the associativity tower
//! ([`transfer::AInftyStructure`]). All arithmetic is exact rational;
//! every identity is checked to be literally zero.

pub mod dga;
pub mod graded;
pub mod hodge;
pub mod ingest;
pub mod linalg;
pub mod simplicial;
pub mod transfer;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("operator is not self-adjoint for the given inner product")]
    NotSelfAdjoint,
    #[error("supplied vectors do not form a basis of the kernel")]
    KernelMismatch,
    #[error("graded spaces do not match: {context}")]
    SpaceMismatch { context: String },
    #[error("unexpected degree shift: expected {expected}, got {got}")]
    ShiftMismatch { expected: i64, got: i64 },
    #[error("invalid graded data: {0}")]
    InvalidGradedData(String),
    #[error("subspace is not invariant under the differential (witness: degree {degree}, basis index {index})")]
    NotDInvariant { degree: i64, index: usize },
    #[error("projector image escapes the subspace (witness: degree {degree}, basis index {index})")]
    AssumptionViolated { degree: i64, index: usize },
    #[error("element does not lie in the subspace (degree {degree})")]
    NotInSubspace { degree: i64 },
    #[error("argument is not homogeneous or has the wrong coordinate length")]
    NotHomogeneous,
    #[error("unknown builtin algebra `{0}`")]
    UnknownBuiltin(String),
    #[error("simplicial complex error: {0}")]
    Simplicial(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("mu-table error: {0}")]
    Table(String),
    #[error("Hodge identity failed to hold exactly: {0}")]
    HodgeBuild(String),
}

pub type Result<T> = std::result::Result<T, Error>;
