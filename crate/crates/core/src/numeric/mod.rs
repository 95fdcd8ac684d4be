//! Dense linear algebra and a small linear-program solver.

mod eig;
mod factor;
mod lp;
mod matrix;

pub use eig::{cdot, hermitian_eig, psd_project, sym_eig, HermitianEig, SymEig};
pub use factor::{ldlt_pivoted, least_squares, normal_residual, Ldlt, LeastSquares, RANK_TOL};
pub use lp::{dual_violation, lp_solve, Bound, Goal, LpOutcome, LpProblem, RowSense};
pub use matrix::{dot, norm2, DenseMatrix};
