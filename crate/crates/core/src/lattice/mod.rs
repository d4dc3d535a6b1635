//! Exact integer linear algebra on lattices `Z^n`.

mod matrix;
pub mod normal_form;
mod quasitorus;
pub(crate) mod vector;

pub use matrix::{rational_rank, solve_rational, LatticeMatrix};
pub use normal_form::{
    column_hermite, extends_to_basis, smith_normal_form, solve_dual_pair, unimodular_completion, ColumnHermite,
    SmithDecomposition,
};
pub use quasitorus::{quasitorus_kernel, QuasitorusPresentation};
pub use vector::LatticeVector;
