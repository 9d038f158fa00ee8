//! Gradients of the optimal vertex with respect to the problem data.
//!
//! At a non-degenerate optimum the solution satisfies `A d = h`, where the
//! rows of `A` are the `n` basis constraints and `h` their right-hand sides.
//! With `y = A^-T g` for an upstream gradient `g`:
//!
//! ```text
//! dL/dh_k   =  y_k
//! dL/dA_kj  = -y_k d_j
//! ```
//!
//! Non-basis constraints receive exactly zero.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{ConstraintId, LinearProgram, LpError, LpSolution};

/// Pivot ratio below which the active matrix counts as singular.
const SINGULAR_RATIO: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpGradients {
    /// One entry per inequality row.
    pub rhs: Vec<f64>,
    pub lower_bounds: Vec<f64>,
    /// Aligned with each row's `entries`.
    pub coeffs: Vec<Vec<f64>>,
    /// `y`, in the sorted order of the active set.
    pub active_rhs: Vec<f64>,
    /// `min |U_ii| / max |U_ii|` of the LU factorization of the active matrix.
    pub pivot_ratio: f64,
}

pub fn lp_backward(lp: &LinearProgram, solution: &LpSolution, upstream: &[f64]) -> Result<LpGradients, LpError> {
    let n = lp.n();
    if !solution.is_optimal() {
        return Err(LpError::NotOptimal(solution.status));
    }
    if upstream.len() != n {
        return Err(LpError::GradientLength {
            got: upstream.len(),
            expected: n,
        });
    }
    if solution.active_set.len() != n {
        return Err(LpError::InvalidProblem(format!(
            "active set has {} constraints for {n} variables",
            solution.active_set.len()
        )));
    }

    let mut a = DMatrix::<f64>::zeros(n, n);
    for (k, &id) in solution.active_set.iter().enumerate() {
        lp.for_each_coeff(id, |j, v| a[(k, j)] = v);
    }
    let pivot_ratio = if n == 0 { 1.0 } else { pivot_ratio(&a) };
    if !(pivot_ratio > SINGULAR_RATIO) {
        return Err(LpError::SingularActiveSet { pivot_ratio });
    }
    let y = a
        .transpose()
        .lu()
        .solve(&DVector::from_column_slice(upstream))
        .ok_or(LpError::SingularActiveSet { pivot_ratio })?;

    let mut grads = LpGradients {
        rhs: vec![0.0; lp.ineqs().len()],
        lower_bounds: vec![0.0; n],
        coeffs: lp.ineqs().iter().map(|r| vec![0.0; r.entries.len()]).collect(),
        active_rhs: y.iter().copied().collect(),
        pivot_ratio,
    };
    for (k, &id) in solution.active_set.iter().enumerate() {
        match id {
            ConstraintId::Bound(j) => grads.lower_bounds[j] = y[k],
            ConstraintId::Row(i) => {
                grads.rhs[i] = y[k];
                for (g, &(j, _)) in grads.coeffs[i].iter_mut().zip(&lp.ineqs()[i].entries) {
                    *g = -y[k] * solution.d[j];
                }
            }
        }
    }
    Ok(grads)
}

fn pivot_ratio(a: &DMatrix<f64>) -> f64 {
    let u = a.clone().lu().u();
    let diag = u.diagonal();
    let max = diag.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let min = diag.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{solve_lp, SparseRow};

    fn example() -> LinearProgram {
        LinearProgram::min_sum(vec![1.0, 1.0], vec![SparseRow::new(vec![(1, 1.0), (0, -1.0)], 0.6)]).unwrap()
    }

    #[test]
    fn closed_form_gradients() {
        // d = (l0, l0 + b): dL/db = g1, dL/dl0 = g0 + g1, dL/dl1 = 0
        let lp = example();
        let s = solve_lp(&lp);
        let g = lp_backward(&lp, &s, &[0.3, 0.7]).unwrap();
        assert!((g.rhs[0] - 0.7).abs() < 1e-12);
        assert!((g.lower_bounds[0] - 1.0).abs() < 1e-12);
        assert_eq!(g.lower_bounds[1], 0.0);
        // entries (1, 1.0), (0, -1.0) with d = (1, 1.6)
        assert!((g.coeffs[0][0] + 0.7 * 1.6).abs() < 1e-12);
        assert!((g.coeffs[0][1] + 0.7 * 1.0).abs() < 1e-12);
    }

    #[test]
    fn inactive_rows_get_zero() {
        let lp = LinearProgram::min_sum(
            vec![1.0, 1.0],
            vec![
                SparseRow::new(vec![(1, 1.0), (0, -1.0)], 0.6),
                SparseRow::new(vec![(0, 1.0), (1, 1.0)], 0.5),
            ],
        )
        .unwrap();
        let s = solve_lp(&lp);
        let g = lp_backward(&lp, &s, &[1.0, 1.0]).unwrap();
        assert_eq!(g.rhs[1], 0.0);
        assert_eq!(g.coeffs[1], vec![0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_input() {
        let lp = example();
        let s = solve_lp(&lp);
        assert!(matches!(lp_backward(&lp, &s, &[1.0]), Err(LpError::GradientLength { .. })));
        let mut bad = s.clone();
        bad.status = crate::lp::LpStatus::Infeasible;
        assert!(matches!(lp_backward(&lp, &bad, &[1.0, 1.0]), Err(LpError::NotOptimal(_))));
    }

    #[test]
    fn singular_active_set() {
        let lp = LinearProgram::min_sum(
            vec![0.0, 0.0],
            vec![SparseRow::new(vec![(0, 1.0)], 0.0)],
        )
        .unwrap();
        let mut s = solve_lp(&lp);
        s.active_set = vec![ConstraintId::Bound(0), ConstraintId::Row(0)];
        assert!(matches!(
            lp_backward(&lp, &s, &[1.0, 1.0]),
            Err(LpError::SingularActiveSet { .. })
        ));
    }
}
