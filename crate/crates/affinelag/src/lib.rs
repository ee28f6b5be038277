//! Exact-arithmetic engine for twisted simplicial cohomology on integral
//! affine data: Smith normal form linear algebra, local coefficient systems,
//! cohomology with witnesses, the radiance obstruction, and the obstruction
//! pipeline deciding which Chern classes are realizable by Lagrangian bundles.
//!
//! Everything is computed over arbitrary-precision integers and rationals;
//! there is no floating point anywhere.

pub mod affine;
pub mod cli;
pub mod linalg;
pub mod local_system;
pub mod obstruction;
pub mod problem;
pub mod report;
pub mod simplicial;
pub mod twisted;

pub use linalg::{
    rank_and_kernel_rational, smith_normal_form, solve_integer, IntMatrix, RatMatrix, Rational,
    SmithDecomposition,
};
