use serde::Serialize;

use super::{activity_tolerance, LpError};

/// Sparse inequality `entries . x >= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparseRow {
    pub entries: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl SparseRow {
    pub fn new(entries: Vec<(usize, f64)>, rhs: f64) -> Self {
        Self { entries, rhs }
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.entries.iter().map(|&(j, a)| a * x[j]).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    n: usize,
    objective: Vec<f64>,
    lower_bounds: Vec<f64>,
    ineqs: Vec<SparseRow>,
}

impl LinearProgram {
    pub fn new(
        objective: Vec<f64>,
        lower_bounds: Vec<f64>,
        ineqs: Vec<SparseRow>,
    ) -> Result<Self, LpError> {
        let n = objective.len();
        if lower_bounds.len() != n {
            return Err(LpError::InvalidProblem(format!(
                "{} lower bounds for {n} variables",
                lower_bounds.len()
            )));
        }
        if objective.iter().chain(&lower_bounds).any(|v| !v.is_finite()) {
            return Err(LpError::InvalidProblem("non-finite objective or bound".into()));
        }
        for (i, row) in ineqs.iter().enumerate() {
            if !row.rhs.is_finite() || row.entries.iter().any(|(_, a)| !a.is_finite()) {
                return Err(LpError::InvalidProblem(format!("row {i} is not finite")));
            }
            let mut seen: Vec<usize> = row.entries.iter().map(|&(j, _)| j).collect();
            if let Some(&j) = seen.iter().find(|&&j| j >= n) {
                return Err(LpError::InvalidProblem(format!("row {i} references variable {j}")));
            }
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                return Err(LpError::InvalidProblem(format!("row {i} repeats a variable")));
            }
        }
        Ok(Self {
            n,
            objective,
            lower_bounds,
            ineqs,
        })
    }

    /// `min sum(x)` subject to `x >= lower_bounds` and `ineqs`.
    pub fn min_sum(lower_bounds: Vec<f64>, ineqs: Vec<SparseRow>) -> Result<Self, LpError> {
        Self::new(vec![1.0; lower_bounds.len()], lower_bounds, ineqs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn lower_bounds(&self) -> &[f64] {
        &self.lower_bounds
    }

    pub fn ineqs(&self) -> &[SparseRow] {
        &self.ineqs
    }

    pub fn num_constraints(&self) -> usize {
        self.n + self.ineqs.len()
    }

    /// Constraint by position: bounds first, then rows.
    pub fn constraint_id(&self, index: usize) -> ConstraintId {
        if index < self.n {
            ConstraintId::Bound(index)
        } else {
            ConstraintId::Row(index - self.n)
        }
    }

    pub fn constraint_index(&self, id: ConstraintId) -> usize {
        match id {
            ConstraintId::Bound(j) => j,
            ConstraintId::Row(i) => self.n + i,
        }
    }

    pub fn rhs(&self, id: ConstraintId) -> f64 {
        match id {
            ConstraintId::Bound(j) => self.lower_bounds[j],
            ConstraintId::Row(i) => self.ineqs[i].rhs,
        }
    }

    /// Calls `f(variable, coefficient)` for each nonzero of the constraint.
    pub fn for_each_coeff(&self, id: ConstraintId, mut f: impl FnMut(usize, f64)) {
        match id {
            ConstraintId::Bound(j) => f(j, 1.0),
            ConstraintId::Row(i) => self.ineqs[i].entries.iter().for_each(|&(j, a)| f(j, a)),
        }
    }

    pub fn lhs(&self, id: ConstraintId, x: &[f64]) -> f64 {
        match id {
            ConstraintId::Bound(j) => x[j],
            ConstraintId::Row(i) => self.ineqs[i].dot(x),
        }
    }

    /// `lhs - rhs`; non-negative when satisfied.
    pub fn residual(&self, id: ConstraintId, x: &[f64]) -> f64 {
        self.lhs(id, x) - self.rhs(id)
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest constraint violation at `x` (zero if feasible).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        (0..self.num_constraints())
            .map(|c| -self.residual(self.constraint_id(c), x))
            .fold(0.0, f64::max)
    }
}

/// Identifies one constraint of a [`LinearProgram`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ConstraintId {
    Bound(usize),
    Row(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub d: Vec<f64>,
    pub status: LpStatus,
    /// The `n` constraints of the final basis, sorted.
    pub active_set: Vec<ConstraintId>,
    pub objective_value: f64,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Constraints whose residual at `d` is within the activity tolerance.
    /// This is a superset of the basis at degenerate vertices.
    pub fn tight_constraints(&self, lp: &LinearProgram) -> Vec<ConstraintId> {
        (0..lp.num_constraints())
            .map(|c| lp.constraint_id(c))
            .filter(|&id| lp.residual(id, &self.d).abs() <= activity_tolerance(lp.rhs(id)))
            .collect()
    }
}
