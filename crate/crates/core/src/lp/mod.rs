//! Small dense linear programs in inequality form,
//!
//! ```text
//! minimize    c . x
//! subject to  x_j >= l_j            (one lower bound per variable)
//!             a_i . x >= b_i        (sparse rows)
//! ```
//!
//! solved by an active-set simplex whose basis is always `n` tight
//! constraints. The final basis doubles as the linear system used to
//! differentiate the optimum with respect to the problem data.

mod backward;
mod bruteforce;
mod problem;
mod simplex;

use thiserror::Error;

pub use backward::{lp_backward, LpGradients};
pub use bruteforce::{enumerate_vertices_bruteforce, BRUTEFORCE_MAX_CONSTRAINTS, BRUTEFORCE_MAX_VARS};
pub use problem::{ConstraintId, LinearProgram, LpSolution, LpStatus, SparseRow};
pub use simplex::{solve_lp, solve_lp_with, SimplexOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("invalid linear program: {0}")]
    InvalidProblem(String),
    #[error("problem too large for vertex enumeration ({n} variables, {constraints} constraints)")]
    TooLarge { n: usize, constraints: usize },
    #[error("active constraint matrix is singular (pivot ratio {pivot_ratio:.3e})")]
    SingularActiveSet { pivot_ratio: f64 },
    #[error("solution is not optimal ({0:?})")]
    NotOptimal(LpStatus),
    #[error("upstream gradient has length {got}, expected {expected}")]
    GradientLength { got: usize, expected: usize },
}

/// Per-constraint activity threshold `1e-7 * max(1, |rhs|)`.
pub fn activity_tolerance(rhs: f64) -> f64 {
    1e-7 * rhs.abs().max(1.0)
}
