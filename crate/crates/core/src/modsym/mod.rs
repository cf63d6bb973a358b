//! Modular symbols for `Gamma_0(N)` of even weight `k >= 2` with sign +1:
//! Manin-symbol presentation, boundary map, cuspidal and new subspaces, and
//! Hecke operators through Heilbronn matrices.

pub mod boundary;
pub mod heilbronn;
pub mod manin;
pub mod p1;
mod presentation;
mod space;

pub use presentation::SparseVec;
pub use space::{build_space, HeckeOperator, ModSymSpace};

use crate::algebra::AlgebraError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModSymError {
    #[error("level must be positive, got {0}")]
    Level(u64),
    #[error("weight must be at least 2, got {0}")]
    WeightTooSmall(u32),
    #[error("odd weight {0} is not supported")]
    OddWeight(u32),
    #[error("Hecke operators are only provided at prime index, got {0}")]
    CompositeIndex(u64),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
