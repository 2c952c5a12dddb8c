//! Finite groups: generator closures of matrix groups, abstract finite
//! abelian groups, automorphisms, and conjugation bookkeeping.

mod abelian;
mod matrix_group;

pub use abelian::{automorphism_group, AbelianAutomorphism, AbstractAbelianGroup};
pub use matrix_group::{
    conjugation_map, generate_closure, generate_closure_mod, Conjugation, FiniteMatrixGroup,
};

use thiserror::Error;

/// Default cap on enumerated group orders.
pub const DEFAULT_BOUND: usize = 10_000;

/// A finite group presented by an element table. Index 0 is the identity.
pub trait FiniteGroup {
    fn order(&self) -> usize;
    fn product(&self, a: usize, b: usize) -> usize;
    fn inverse(&self, a: usize) -> usize;

    fn identity(&self) -> usize {
        0
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("group closure exceeds the bound of {bound} elements")]
    ClosureExceedsBound { bound: usize },
    #[error("matrices must be square and of equal degree")]
    DimensionMismatch,
    #[error("matrix is not invertible over the coefficient ring")]
    NotInvertible,
    #[error("cyclic factor orders must be positive")]
    InvalidModulus,
    #[error("matrix entry does not fit in 64 bits")]
    EntryOverflow,
}
