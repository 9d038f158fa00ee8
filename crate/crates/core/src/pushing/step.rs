use super::constraints::build_constraints_projected;
use super::{DeformStep, PushConfig, PushConstraintSet, PushError};
use crate::geometry::{
    count_intersecting_faces, default_tolerance, orthonormal_basis, project_mesh, ProjectedMesh, ProjectionFrame,
};
use crate::lp::{solve_lp_with, LinearProgram, LpSolution, LpStatus, SimplexOptions};
use crate::mesh::{Mesh, Vec3};

/// State kept from the forward pass for [`push_step_backward`](super::push_step_backward).
#[derive(Debug, Clone)]
pub struct BackwardContext {
    pub frame: ProjectionFrame,
    /// Input mesh in frame coordinates.
    pub projected: ProjectedMesh,
    pub lp: LinearProgram,
    pub config: PushConfig,
}

#[derive(Debug, Clone)]
pub struct StepResult {
    pub mesh_out: Mesh,
    pub d: Vec<f64>,
    pub constraints: PushConstraintSet,
    pub lp_solution: LpSolution,
    pub backward_ctx: BackwardContext,
}

impl StepResult {
    pub fn u_hat(&self) -> Vec3 {
        self.backward_ctx.frame.u_hat
    }

    pub fn objective(&self) -> f64 {
        self.lp_solution.objective_value
    }

    /// Smallest post-move corner gap minus `epsilon`; non-negative up to
    /// solver tolerance when every ordering is preserved.
    pub fn min_ordering_slack(&self) -> f64 {
        self.constraints
            .rows
            .iter()
            .map(|r| r.coeffs.iter().map(|&(v, a)| a * self.d[v]).sum::<f64>() - r.rhs)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Solves the pushing LP for one step and applies it.
pub fn push_step(mesh: &Mesh, step: &DeformStep, config: &PushConfig) -> Result<StepResult, PushError> {
    let u_hat = step.validate(mesh.num_vertices())?;
    let frame = orthonormal_basis(&u_hat)?;
    let projected = project_mesh(mesh, &frame);
    let config = config.resolved(mesh);
    let constraints = build_constraints_projected(mesh, &projected, &config)?;

    let lp = LinearProgram::min_sum(step.d_min.clone(), constraints.sparse_rows())?;
    let opts = SimplexOptions {
        max_iterations: config.max_lp_iterations,
        ..SimplexOptions::default()
    };
    let lp_solution = solve_lp_with(&lp, &opts);
    match lp_solution.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return Err(PushError::PushInfeasible {
                pair_count: constraints.pair_count,
                constraint_count: constraints.len(),
            })
        }
        other => return Err(PushError::LpNotSolved(other)),
    }

    let d = lp_solution.d.clone();
    let vertices: Vec<Vec3> = mesh
        .vertices()
        .iter()
        .zip(&d)
        .map(|(v, &dv)| v + dv * frame.u_hat)
        .collect();
    let mesh_out = mesh.with_vertices(vertices);

    if config.verify_output {
        let report = count_intersecting_faces(&mesh_out, default_tolerance(&mesh_out));
        if report.count > 0 {
            return Err(PushError::VerificationFailed {
                intersecting: report.count,
            });
        }
    }

    Ok(StepResult {
        mesh_out,
        d,
        constraints,
        lp_solution,
        backward_ctx: BackwardContext {
            frame,
            projected,
            lp,
            config,
        },
    })
}
