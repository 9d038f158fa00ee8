//! Exhaustive vertex enumeration, used as an independent reference solver
//! for tiny programs.

use nalgebra::{DMatrix, DVector};

use super::{ConstraintId, LinearProgram, LpError, LpSolution, LpStatus};

pub const BRUTEFORCE_MAX_VARS: usize = 8;
pub const BRUTEFORCE_MAX_CONSTRAINTS: usize = 16;

const FEAS_TOL: f64 = 1e-9;

/// Solves `lp` by trying every `n`-subset of constraints as a vertex and
/// every `(n-1)`-subset as an edge direction for unboundedness.
///
/// Among optimal vertices the first subset in lexicographic order wins.
pub fn enumerate_vertices_bruteforce(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    let n = lp.n();
    let m = lp.num_constraints();
    if n == 0 || n > BRUTEFORCE_MAX_VARS || m > BRUTEFORCE_MAX_CONSTRAINTS {
        return Err(LpError::TooLarge { n, constraints: m });
    }
    let dense: Vec<Vec<f64>> = (0..m)
        .map(|c| {
            let mut row = vec![0.0; n];
            lp.for_each_coeff(lp.constraint_id(c), |j, a| row[j] = a);
            row
        })
        .collect();
    let rhs: Vec<f64> = (0..m).map(|c| lp.rhs(lp.constraint_id(c))).collect();

    let mut best: Option<(f64, Vec<f64>, Vec<usize>)> = None;
    for subset in combinations(m, n) {
        let a = DMatrix::from_fn(n, n, |r, j| dense[subset[r]][j]);
        let b = DVector::from_iterator(n, subset.iter().map(|&c| rhs[c]));
        let lu = a.lu();
        if is_singular(&lu.u()) {
            continue;
        }
        let Some(x) = lu.solve(&b) else { continue };
        let x: Vec<f64> = x.iter().copied().collect();
        let feasible = (0..m).all(|c| {
            let lhs: f64 = dense[c].iter().zip(&x).map(|(g, v)| g * v).sum();
            lhs - rhs[c] >= -FEAS_TOL * rhs[c].abs().max(1.0)
        });
        if !feasible {
            continue;
        }
        let obj = lp.objective_value(&x);
        let improves = match &best {
            None => true,
            Some((o, _, _)) => obj < o - 1e-12 * o.abs().max(1.0),
        };
        if improves {
            best = Some((obj, x, subset));
        }
    }

    let Some((obj, x, subset)) = best else {
        return Ok(LpSolution {
            d: lp.lower_bounds().to_vec(),
            status: LpStatus::Infeasible,
            active_set: Vec::new(),
            objective_value: f64::NAN,
            iterations: 0,
        });
    };

    if has_improving_ray(lp, &dense) {
        return Ok(LpSolution {
            d: x,
            status: LpStatus::Unbounded,
            active_set: Vec::new(),
            objective_value: f64::NEG_INFINITY,
            iterations: 0,
        });
    }

    let mut active_set: Vec<ConstraintId> = subset.iter().map(|&c| lp.constraint_id(c)).collect();
    active_set.sort_unstable();
    Ok(LpSolution {
        d: x,
        status: LpStatus::Optimal,
        active_set,
        objective_value: obj,
        iterations: 0,
    })
}

fn is_singular(u: &DMatrix<f64>) -> bool {
    let diag: Vec<f64> = u.diagonal().iter().map(|v| v.abs()).collect();
    let max = diag.iter().copied().fold(0.0, f64::max);
    let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    max == 0.0 || min <= 1e-12 * max
}

/// A recession direction `r` (with `G r >= 0`) along which `c . r < 0`.
/// Extreme rays of the recession cone are null vectors of `n - 1` rows.
fn has_improving_ray(lp: &LinearProgram, dense: &[Vec<f64>]) -> bool {
    let n = lp.n();
    let c = lp.objective();
    let check = |r: &[f64]| {
        let scale = r.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            return false;
        }
        let tol = 1e-9 * scale;
        let recedes = dense
            .iter()
            .all(|g| g.iter().zip(r).map(|(a, b)| a * b).sum::<f64>() >= -tol);
        recedes && c.iter().zip(r).map(|(a, b)| a * b).sum::<f64>() < -tol
    };
    if n == 1 {
        return check(&[1.0]) || check(&[-1.0]);
    }
    for subset in combinations(dense.len(), n - 1) {
        let r = null_vector(&subset.iter().map(|&i| dense[i].as_slice()).collect::<Vec<_>>(), n);
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        if check(&r) || check(&neg) {
            return true;
        }
    }
    false
}

/// Generalized cross product of `n - 1` rows of length `n`: component `j` is
/// the signed minor with column `j` removed. Zero when the rows are dependent.
fn null_vector(rows: &[&[f64]], n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let minor = DMatrix::from_fn(n - 1, n - 1, |r, k| rows[r][if k < j { k } else { k + 1 }]);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * minor.determinant()
        })
        .collect()
}

/// All `k`-subsets of `0..m` in lexicographic order.
fn combinations(m: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = (k <= m).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                current = None;
                break;
            }
            i -= 1;
            if next[i] < m - k + i {
                next[i] += 1;
                for l in i + 1..k {
                    next[l] = next[l - 1] + 1;
                }
                current = Some(next);
                break;
            }
        }
        Some(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::SparseRow;

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).count(), 10);
        assert_eq!(combinations(4, 0).count(), 1);
        assert_eq!(combinations(3, 4).count(), 0);
        assert_eq!(combinations(4, 2).next().unwrap(), vec![0, 1]);
    }

    #[test]
    fn null_vector_is_orthogonal() {
        let rows: [&[f64]; 2] = [&[1.0, 2.0, 3.0], &[0.0, 1.0, -1.0]];
        let r = null_vector(&rows, 3);
        for row in rows {
            let dot: f64 = row.iter().zip(&r).map(|(a, b)| a * b).sum();
            assert!(dot.abs() < 1e-12);
        }
        assert!(r.iter().any(|v| v.abs() > 0.1));
    }

    #[test]
    fn reference_examples() {
        let lp = LinearProgram::min_sum(vec![2.0], vec![]).unwrap();
        assert_eq!(enumerate_vertices_bruteforce(&lp).unwrap().d, vec![2.0]);

        let lp = LinearProgram::min_sum(vec![1.0, 1.0], vec![SparseRow::new(vec![(1, 1.0), (0, -1.0)], 0.6)])
            .unwrap();
        let s = enumerate_vertices_bruteforce(&lp).unwrap();
        assert!((s.objective_value - 2.6).abs() < 1e-12);

        let lp = LinearProgram::min_sum(vec![0.0], vec![SparseRow::new(vec![(0, -1.0)], 1.0)]).unwrap();
        assert_eq!(enumerate_vertices_bruteforce(&lp).unwrap().status, LpStatus::Infeasible);

        let lp = LinearProgram::new(vec![-1.0], vec![0.0], vec![]).unwrap();
        assert_eq!(enumerate_vertices_bruteforce(&lp).unwrap().status, LpStatus::Unbounded);

        let lp = LinearProgram::new(vec![-1.0, 0.0], vec![0.0, 0.0], vec![SparseRow::new(vec![(0, 1.0), (1, -1.0)], -1.0)])
            .unwrap();
        assert_eq!(enumerate_vertices_bruteforce(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn rejects_large_problems() {
        let lp = LinearProgram::min_sum(vec![0.0; 9], vec![]).unwrap();
        assert!(matches!(enumerate_vertices_bruteforce(&lp), Err(LpError::TooLarge { .. })));
    }
}
