use num_complex::Complex64;
use thiserror::Error;

use crate::canonical::DecompKind;
use crate::scalars::RingId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(RingId, RingId),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("element is not invertible")]
    NotInvertible,

    #[error("matrix is not self-adjoint")]
    NotHermitian,

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("matrix is not antisymmetric")]
    NotAntisymmetric,

    #[error("matrix entries are not integers")]
    NotInteger,

    #[error("component of size {size} exceeds the canonicalization cap {cap}")]
    SizeCapExceeded { size: usize, cap: usize },

    #[error("{kind} over {ring} is not supported")]
    UnsupportedRingKind { ring: RingId, kind: DecompKind },

    #[error("eigenvalue clusters near {a} and {b} cannot be separated reliably")]
    ClusterAmbiguity { a: Complex64, b: Complex64 },

    #[error("block is not equivalent to a generator")]
    NotEquivalentToGenerator,

    #[error("iteration did not converge")]
    NoConvergence,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
