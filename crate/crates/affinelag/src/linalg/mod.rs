//! Exact integer and rational linear algebra: Smith normal form, integer
//! solvability, kernels and images. This is the computational substrate for
//! every cohomology group in the crate.

mod int_matrix;
mod rat_matrix;
mod rational;
mod smith;

pub use int_matrix::IntMatrix;
pub use rat_matrix::{rank_and_kernel_rational, RatMatrix};
pub use rational::{denominator_lcm, format_rational, parse_rational, Rational};
pub use smith::{smith_normal_form, solve_integer, IntegerSolution, SmithDecomposition};

pub(crate) use smith::{smith_col_transforms, smith_row_transforms, smith_shape};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

