//! Exact computations for flat Kähler manifolds `T/G̃`: a complex torus `T`
//! presented as a product of factors, a finite abelian group `G` acting
//! diagonally through factor units, and translation cocycles making the
//! action free.
//!
//! The pipeline is: build a [`torus::TorusSpec`], a [`crystal::DiagonalAction`],
//! compute `H¹(G, T)` with [`cohomology::torus_h1`], keep the classes whose
//! affine action is free, and let [`classifier`] group them into
//! biholomorphism classes and report automorphism group orders.

pub mod classifier;
pub mod cohomology;
pub mod crystal;
pub mod exec;
pub mod groups;
pub mod linalg;
pub mod torus;

pub use exec::Execution;
