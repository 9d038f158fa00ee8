//! Pushing-faces deformation steps.
//!
//! One step moves every vertex along a shared unit direction `u` by a
//! distance `d_v >= d_min_v`. Faces whose projections onto the plane
//! perpendicular to `u` overlap must keep their depth order: at every corner
//! of the overlap polygon, the upper face stays at least `epsilon` above the
//! lower one. Corners are written as barycentric combinations of each face's
//! vertices, so every condition is linear in `d`, and the distances come from
//! the linear program
//!
//! ```text
//! minimize    sum(d)
//! subject to  d >= d_min
//!             beta_upper . d_upper - beta_lower . d_lower >= (q_lower - q_upper) . u + epsilon
//! ```
//!
//! Because motion is purely along `u`, projected footprints never change
//! during a step and the constraints computed before the move stay exact.

mod backward;
mod constraints;
mod deform;
mod step;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::GeometryError;
use crate::lp::{LpError, LpStatus};
use crate::mesh::{Mesh, Vec3};

pub use backward::{push_step_backward, StepGradients};
pub use constraints::{build_constraints, PushConstraintSet, PushRow, RowKey};
pub use deform::{deform, deform_backward, DeformError, DeformGradients};
pub use step::{push_step, BackwardContext, StepResult};

/// Direction and per-vertex minimum distances of one step.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformStep {
    pub direction: Vec3,
    pub d_min: Vec<f64>,
}

impl DeformStep {
    pub fn new(direction: Vec3, d_min: Vec<f64>) -> Self {
        Self { direction, d_min }
    }

    /// Unit direction, or an error if `direction` is (near) zero.
    pub fn u_hat(&self) -> Result<Vec3, PushError> {
        let n = self.direction.norm();
        if !(n > 1e-9) || !n.is_finite() {
            return Err(PushError::Geometry(GeometryError::ZeroDirection));
        }
        Ok(self.direction / n)
    }

    fn validate(&self, num_vertices: usize) -> Result<Vec3, PushError> {
        if self.d_min.len() != num_vertices {
            return Err(PushError::InvalidStep(format!(
                "{} distances for {num_vertices} vertices",
                self.d_min.len()
            )));
        }
        if let Some(v) = self.d_min.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(PushError::InvalidStep(format!(
                "d_min[{v}] = {} is not a finite non-negative distance",
                self.d_min[v]
            )));
        }
        self.u_hat()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PushConfig {
    /// Buffer distance; defaults to `1e-3 * bbox diagonal` of the input mesh.
    pub epsilon: Option<f64>,
    /// Minimum overlap area; defaults to `1e-9 * bbox diagonal^2`.
    pub area_tol: Option<f64>,
    /// Run the intersection oracle on every output mesh.
    pub verify_output: bool,
    /// Simplex iteration cap; defaults to `50 * (n + rows)`.
    pub max_lp_iterations: Option<usize>,
    /// Backward pass treats barycentric weights and corner positions as
    /// constants, so in-plane vertex motion gets no gradient through the LP.
    pub freeze_beta: bool,
}

impl Default for PushConfig {
    fn default() -> Self {
        Self {
            epsilon: None,
            area_tol: None,
            verify_output: false,
            max_lp_iterations: None,
            freeze_beta: false,
        }
    }
}

impl PushConfig {
    pub fn epsilon_for(&self, mesh: &Mesh) -> f64 {
        self.epsilon.unwrap_or_else(|| 1e-3 * mesh.bbox_diagonal())
    }

    pub fn area_tol_for(&self, mesh: &Mesh) -> f64 {
        self.area_tol
            .unwrap_or_else(|| crate::geometry::default_area_tolerance(mesh))
    }

    /// Copy with `epsilon` fixed from `mesh`, so that later steps keep using
    /// the same value as the mesh grows.
    pub fn resolved(&self, mesh: &Mesh) -> Self {
        Self {
            epsilon: Some(self.epsilon_for(mesh)),
            area_tol: Some(self.area_tol_for(mesh)),
            ..self.clone()
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PushError {
    #[error("invalid step: {0}")]
    InvalidStep(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(
        "faces {face_a} and {face_b} have no consistent depth order along the direction \
         (corner gaps {min_gap:.3e}..{max_gap:.3e}); the input already interpenetrates"
    )]
    OrderingViolated {
        face_a: usize,
        face_b: usize,
        min_gap: f64,
        max_gap: f64,
    },
    #[error("pushing LP is infeasible ({constraint_count} constraints over {pair_count} overlapping pairs)")]
    PushInfeasible { pair_count: usize, constraint_count: usize },
    #[error("pushing LP was not solved: {0:?}")]
    LpNotSolved(LpStatus),
    #[error("output mesh has {intersecting} intersecting faces")]
    VerificationFailed { intersecting: usize },
    #[error("active constraint matrix is singular (pivot ratio {pivot_ratio:.3e})")]
    SingularActiveSet { pivot_ratio: f64 },
    #[error(transparent)]
    Lp(LpError),
    #[error("gradient has length {got}, expected {expected}")]
    GradientLength { got: usize, expected: usize },
}

impl From<LpError> for PushError {
    fn from(e: LpError) -> Self {
        match e {
            LpError::SingularActiveSet { pivot_ratio } => PushError::SingularActiveSet { pivot_ratio },
            other => PushError::Lp(other),
        }
    }
}

impl PushError {
    /// Short machine-readable name, used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            PushError::InvalidStep(_) => "InvalidStep",
            PushError::InvalidConfig(_) => "InvalidConfig",
            PushError::Geometry(_) => "Geometry",
            PushError::OrderingViolated { .. } => "OrderingViolated",
            PushError::PushInfeasible { .. } => "PushInfeasible",
            PushError::LpNotSolved(_) => "LpNotSolved",
            PushError::VerificationFailed { .. } => "VerificationFailed",
            PushError::SingularActiveSet { .. } => "SingularActiveSet",
            PushError::Lp(_) => "Lp",
            PushError::GradientLength { .. } => "GradientLength",
        }
    }
}
