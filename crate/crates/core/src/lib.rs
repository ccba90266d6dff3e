//! Canonical decompositions of matrices over concrete *-rings.
//!
//! Supported rings: the zero ring, ℝ, ℂ, the dual numbers with the trivial
//! or conjugate involution, the quaternions, ℂ ⊕ ℂ with the swap involution,
//! and ℤ. For each ring the crate computes SVD-type (unitary equivalence)
//! and spectral (unitary similarity) decompositions, plus the Jordan form
//! over ℂ, and reports the result as a canonical multiset of generator
//! blocks.

pub mod canonical;
pub mod cli;
pub mod decomp;
pub mod engines;
pub mod error;
pub mod io;
pub mod matrices;
pub mod scalars;
pub mod testkit;

pub use canonical::{Block, BlockMultiset, DecompKind};
pub use decomp::{decompose, Factorization, Options};
pub use error::{Error, Result};
pub use matrices::Matrix;
pub use scalars::{Dual, Quaternion, RingId, Scalar};
