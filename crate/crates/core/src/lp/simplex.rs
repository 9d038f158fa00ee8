//! Two-phase active-set simplex.
//!
//! The basis is a set of `n` linearly independent constraints held at
//! equality; its vertex is `x = G_B^-1 h_B` and its multipliers are
//! `lambda = G_B^-T c`. Because every variable has a finite lower bound, the
//! all-bounds basis is always a vertex.
//!
//! Phase 1 runs the dual simplex with the auxiliary objective `sum(x)`,
//! for which the all-bounds basis is dual feasible, until the vertex is
//! primal feasible (or the dual ratio test proves infeasibility). Phase 2
//! runs the primal simplex on the real objective from that vertex. Both
//! phases use Bland's smallest-index rule, so neither can cycle. When the
//! objective is `sum(x)` itself, phase 2 finishes without pivoting.

use nalgebra::DMatrix;

use super::{ConstraintId, LinearProgram, LpSolution, LpStatus};

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Defaults to `50 * (n + rows)`.
    pub max_iterations: Option<usize>,
    /// A constraint counts as violated below `-feasibility_tol * max(1, |rhs|)`.
    pub feasibility_tol: f64,
    /// Smallest admissible pivot element.
    pub pivot_tol: f64,
    pub optimality_tol: f64,
    /// Pivots between fresh factorizations of the basis inverse.
    pub refactor_every: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iterations: None,
            feasibility_tol: 1e-10,
            pivot_tol: 1e-9,
            optimality_tol: 1e-11,
            refactor_every: 50,
        }
    }
}

pub fn solve_lp(lp: &LinearProgram) -> LpSolution {
    solve_lp_with(lp, &SimplexOptions::default())
}

pub fn solve_lp_with(lp: &LinearProgram, opts: &SimplexOptions) -> LpSolution {
    let mut state = Basis::all_bounds(lp);
    let cap = opts
        .max_iterations
        .unwrap_or(50 * lp.num_constraints());
    let status = state
        .run_dual_phase(lp, opts, cap)
        .and_then(|()| state.run_primal_phase(lp, opts, cap));
    let status = match status {
        Ok(()) => LpStatus::Optimal,
        Err(s) => s,
    };
    let mut active_set: Vec<ConstraintId> = state.ids.iter().map(|&c| lp.constraint_id(c)).collect();
    active_set.sort_unstable();
    LpSolution {
        objective_value: lp.objective_value(&state.x),
        d: state.x,
        status,
        active_set,
        iterations: state.iterations,
    }
}

struct Basis {
    n: usize,
    /// Constraint index held at each basis position.
    ids: Vec<usize>,
    in_basis: Vec<bool>,
    /// Row-major `G_B^-1`; column `k` belongs to basis position `k`.
    inv: Vec<f64>,
    x: Vec<f64>,
    iterations: usize,
    since_refactor: usize,
}

impl Basis {
    fn all_bounds(lp: &LinearProgram) -> Self {
        let n = lp.n();
        let mut inv = vec![0.0; n * n];
        for i in 0..n {
            inv[i * n + i] = 1.0;
        }
        let mut in_basis = vec![false; lp.num_constraints()];
        in_basis[..n].iter_mut().for_each(|b| *b = true);
        Self {
            n,
            ids: (0..n).collect(),
            in_basis,
            inv,
            x: lp.lower_bounds().to_vec(),
            iterations: 0,
            since_refactor: 0,
        }
    }

    fn recompute_x(&mut self, lp: &LinearProgram) {
        let n = self.n;
        let h: Vec<f64> = self.ids.iter().map(|&c| lp.rhs(lp.constraint_id(c))).collect();
        for i in 0..n {
            let row = &self.inv[i * n..(i + 1) * n];
            self.x[i] = row.iter().zip(&h).map(|(m, b)| m * b).sum();
        }
    }

    /// `G_B^-T v` for a dense `v`.
    fn transposed_solve(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for (j, &vj) in v.iter().enumerate() {
            if vj != 0.0 {
                let row = &self.inv[j * n..(j + 1) * n];
                out.iter_mut().zip(row).for_each(|(o, m)| *o += vj * m);
            }
        }
        out
    }

    /// `G_B^-T g_c` for constraint `c`.
    fn transposed_solve_constraint(&self, lp: &LinearProgram, c: usize) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        lp.for_each_coeff(lp.constraint_id(c), |j, a| {
            let row = &self.inv[j * n..(j + 1) * n];
            out.iter_mut().zip(row).for_each(|(o, m)| *o += a * m);
        });
        out
    }

    fn column(&self, k: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.inv[i * self.n + k]).collect()
    }

    /// Puts constraint `entering` at basis position `k`; `w = G_B^-T g_entering`.
    fn pivot(&mut self, lp: &LinearProgram, k: usize, entering: usize, w: &[f64], opts: &SimplexOptions) {
        let n = self.n;
        let p = self.column(k);
        let wk = w[k];
        for i in 0..n {
            let pi = p[i] / wk;
            if pi == 0.0 {
                continue;
            }
            let row = &mut self.inv[i * n..(i + 1) * n];
            for (l, m) in row.iter_mut().enumerate() {
                let wl = if l == k { w[l] - 1.0 } else { w[l] };
                *m -= pi * wl;
            }
        }
        self.in_basis[self.ids[k]] = false;
        self.in_basis[entering] = true;
        self.ids[k] = entering;
        self.iterations += 1;
        self.since_refactor += 1;
        if self.since_refactor >= opts.refactor_every {
            self.refactor(lp);
        }
        self.recompute_x(lp);
    }

    fn refactor(&mut self, lp: &LinearProgram) {
        let n = self.n;
        let mut g = DMatrix::<f64>::zeros(n, n);
        for (k, &c) in self.ids.iter().enumerate() {
            lp.for_each_coeff(lp.constraint_id(c), |j, a| g[(k, j)] = a);
        }
        if let Some(inv) = g.lu().try_inverse() {
            for i in 0..n {
                for k in 0..n {
                    self.inv[i * n + k] = inv[(i, k)];
                }
            }
        }
        self.since_refactor = 0;
    }

    fn violated(&self, lp: &LinearProgram, c: usize, opts: &SimplexOptions) -> Option<f64> {
        let id = lp.constraint_id(c);
        let rhs = lp.rhs(id);
        let r = lp.lhs(id, &self.x) - rhs;
        (r < -opts.feasibility_tol * rhs.abs().max(1.0)).then_some(r)
    }

    fn first_violated(&self, lp: &LinearProgram, opts: &SimplexOptions) -> Option<usize> {
        (0..lp.num_constraints()).find(|&c| !self.in_basis[c] && self.violated(lp, c, opts).is_some())
    }

    fn run_dual_phase(&mut self, lp: &LinearProgram, opts: &SimplexOptions, cap: usize) -> Result<(), LpStatus> {
        let ones = vec![1.0; self.n];
        loop {
            let Some(entering) = self.first_violated(lp, opts) else {
                if self.since_refactor == 0 {
                    return Ok(());
                }
                // confirm feasibility against a fresh factorization
                self.refactor(lp);
                self.recompute_x(lp);
                if self.first_violated(lp, opts).is_none() {
                    return Ok(());
                }
                continue;
            };
            if self.iterations >= cap {
                return Err(LpStatus::IterationLimit);
            }
            let lambda = self.transposed_solve(&ones);
            let w = self.transposed_solve_constraint(lp, entering);
            let mut best: Option<(f64, usize)> = None;
            for k in 0..self.n {
                if w[k] <= opts.pivot_tol {
                    continue;
                }
                let ratio = lambda[k].max(0.0) / w[k];
                let better = match best {
                    None => true,
                    Some((r, bk)) => {
                        let tie = (ratio - r).abs() <= 1e-12 * r.abs().max(1e-12);
                        if tie {
                            self.ids[k] < self.ids[bk]
                        } else {
                            ratio < r
                        }
                    }
                };
                if better {
                    best = Some((ratio, k));
                }
            }
            match best {
                Some((_, k)) => self.pivot(lp, k, entering, &w, opts),
                None => return Err(LpStatus::Infeasible),
            }
        }
    }

    fn run_primal_phase(&mut self, lp: &LinearProgram, opts: &SimplexOptions, cap: usize) -> Result<(), LpStatus> {
        loop {
            let lambda = self.transposed_solve(lp.objective());
            let leaving = (0..self.n)
                .filter(|&k| lambda[k] < -opts.optimality_tol)
                .min_by_key(|&k| self.ids[k]);
            let Some(k) = leaving else {
                return Ok(());
            };
            if self.iterations >= cap {
                return Err(LpStatus::IterationLimit);
            }
            // moving along column k loosens constraint ids[k] and keeps the rest tight
            let dir = self.column(k);
            let mut best: Option<(f64, usize)> = None;
            for c in 0..lp.num_constraints() {
                if self.in_basis[c] {
                    continue;
                }
                let id = lp.constraint_id(c);
                let rate = lp.lhs(id, &dir);
                if rate >= -opts.pivot_tol {
                    continue;
                }
                let step = (lp.residual(id, &self.x)).max(0.0) / -rate;
                let better = match best {
                    None => true,
                    Some((s, _)) => step < s - 1e-12 * s.abs().max(1e-12),
                };
                if better {
                    best = Some((step, c));
                }
            }
            let Some((_, entering)) = best else {
                return Err(LpStatus::Unbounded);
            };
            let w = self.transposed_solve_constraint(lp, entering);
            self.pivot(lp, k, entering, &w, opts);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::SparseRow;

    #[test]
    fn bound_only() {
        let lp = LinearProgram::min_sum(vec![2.0], vec![]).unwrap();
        let s = solve_lp(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.d, vec![2.0]);
        assert_eq!(s.active_set, vec![ConstraintId::Bound(0)]);
    }

    #[test]
    fn two_variable_example() {
        let lp = LinearProgram::min_sum(
            vec![1.0, 1.0],
            vec![SparseRow::new(vec![(1, 1.0), (0, -1.0)], 0.6)],
        )
        .unwrap();
        let s = solve_lp(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.d[0] - 1.0).abs() < 1e-12 && (s.d[1] - 1.6).abs() < 1e-12);
        assert!((s.objective_value - 2.6).abs() < 1e-12);
        assert_eq!(s.active_set, vec![ConstraintId::Bound(0), ConstraintId::Row(0)]);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let lp = LinearProgram::min_sum(vec![0.0], vec![SparseRow::new(vec![(0, -1.0)], 1.0)]).unwrap();
        assert_eq!(solve_lp(&lp).status, LpStatus::Infeasible);
        let lp = LinearProgram::new(vec![-1.0], vec![0.0], vec![]).unwrap();
        assert_eq!(solve_lp(&lp).status, LpStatus::Unbounded);
    }

    #[test]
    fn negative_costs_bounded_by_rows() {
        // min -x - y  s.t. x, y >= 0, -x - y >= -4, -x + y >= -2  ->  optimum -4
        let lp = LinearProgram::new(
            vec![-1.0, -1.0],
            vec![0.0, 0.0],
            vec![
                SparseRow::new(vec![(0, -1.0), (1, -1.0)], -4.0),
                SparseRow::new(vec![(0, -1.0), (1, 1.0)], -2.0),
            ],
        )
        .unwrap();
        let s = solve_lp(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value + 4.0).abs() < 1e-12);
    }

    #[test]
    fn iteration_cap_is_reported() {
        let lp = LinearProgram::min_sum(
            vec![0.0, 0.0],
            vec![
                SparseRow::new(vec![(0, 1.0), (1, 1.0)], 1.0),
                SparseRow::new(vec![(0, 1.0), (1, -1.0)], 0.5),
            ],
        )
        .unwrap();
        let opts = SimplexOptions {
            max_iterations: Some(0),
            ..SimplexOptions::default()
        };
        assert_eq!(solve_lp_with(&lp, &opts).status, LpStatus::IterationLimit);
    }

    #[test]
    fn deterministic() {
        let rows: Vec<SparseRow> = (0..20)
            .map(|i| SparseRow::new(vec![(i % 5, 0.5), ((i + 1) % 5, 0.5), ((i + 2) % 5, -1.0)], 0.1 * i as f64))
            .collect();
        let lp = LinearProgram::min_sum(vec![0.0; 5], rows).unwrap();
        let a = solve_lp(&lp);
        let b = solve_lp(&lp);
        assert_eq!(a, b);
    }
}
