//! Exact integer linear algebra: Smith form, linear systems over `ℤ` and
//! `ℤ/m`, cokernels, and modular lattices.

mod abelian;
mod lattice;
mod matrix;
mod snf;
mod solve;

pub use abelian::{cokernel_structure, AbelianStructure};
pub use lattice::{ModularLattice, Subquotient};
pub use matrix::IntMatrix;
pub use snf::{elementary_divisors, smith_normal_form, SmithNormalForm};
pub use solve::{solve_linear, RatVector, SolutionSet};

pub(crate) use snf::{Elimination, Tracking};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {left:?} against {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("rows of unequal length")]
    RaggedRows,
    #[error("modulus must be non-negative")]
    NegativeModulus,
    #[error("right-hand side must be integral when solving modulo m")]
    NonIntegralRhs,
}
