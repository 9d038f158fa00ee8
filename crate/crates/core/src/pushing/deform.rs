use serde::Serialize;
use thiserror::Error;

use super::{push_step, push_step_backward, DeformStep, PushConfig, PushError, StepResult};
use crate::mesh::{Mesh, Vec3};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("step {step}: {source}")]
pub struct DeformError {
    pub step: usize,
    #[source]
    pub source: PushError,
}

/// Applies `steps` in order. The buffer distance is fixed from the initial
/// mesh, so every step of one deformation uses the same `epsilon`.
pub fn deform(mesh: &Mesh, steps: &[DeformStep], config: &PushConfig) -> Result<(Mesh, Vec<StepResult>), DeformError> {
    let config = config.resolved(mesh);
    let mut current = mesh.clone();
    let mut tape = Vec::with_capacity(steps.len());
    for (i, step) in steps.iter().enumerate() {
        let result = push_step(&current, step, &config).map_err(|source| DeformError { step: i, source })?;
        current = result.mesh_out.clone();
        tape.push(result);
    }
    Ok((current, tape))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeformGradients {
    /// With respect to the initial vertex positions.
    pub vertices: Vec<[f64; 3]>,
    /// Per step, with respect to `d_min`.
    pub d_min: Vec<Vec<f64>>,
    /// Per step, with respect to the raw (unnormalized) direction.
    pub directions: Vec<[f64; 3]>,
}

/// Reverse sweep over a tape recorded by [`deform`].
pub fn deform_backward(
    steps: &[DeformStep],
    tape: &[StepResult],
    grad_final: &[Vec3],
) -> Result<DeformGradients, DeformError> {
    assert_eq!(steps.len(), tape.len(), "one tape entry per step");
    let mut grad: Vec<Vec3> = grad_final.to_vec();
    let mut d_min = vec![Vec::new(); tape.len()];
    let mut directions = vec![[0.0; 3]; tape.len()];
    for (i, result) in tape.iter().enumerate().rev() {
        let g = push_step_backward(result, &grad, None).map_err(|source| DeformError { step: i, source })?;
        let raw = steps[i].direction;
        let u = result.u_hat();
        let g_u = Vec3::from(g.u_hat);
        let g_raw = (g_u - u * u.dot(&g_u)) / raw.norm();
        directions[i] = [g_raw.x, g_raw.y, g_raw.z];
        grad = g.vertices_vec3();
        d_min[i] = g.d_min;
    }
    Ok(DeformGradients {
        vertices: grad.iter().map(|g| [g.x, g.y, g.z]).collect(),
        d_min,
        directions,
    })
}
