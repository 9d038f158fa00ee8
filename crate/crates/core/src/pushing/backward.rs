//! Reverse pass of one pushing step.
//!
//! `mesh_out = mesh_in + d * u` gives a pass-through gradient to the input
//! vertices and `grad_d = grad_out . u`. The LP maps `grad_d` to multipliers
//! `y` on its active constraints (see [`lp_backward`]); active bounds route
//! them to `d_min`, active ordering rows route them to the vertices that
//! define the row.
//!
//! Each ordering row reads `g(d, x) = H_upper(p) - H_lower(p) - epsilon >= 0`,
//! with `H_f(p)` the post-move height of face `f` above the overlap corner
//! `p`, so the row's contribution to the gradient of parameter `x` is
//! `-y * dg/dx` at fixed `d`. Depth enters through the barycentric weights
//! (`dH_f/dz_k = beta_k`). In-plane coordinates enter through the weights and
//! through the corner itself: with `grad_f` the in-plane gradient of face
//! `f`'s height, `dH_f/ds_k = -beta_k * grad_f` at a fixed corner and
//! `dH_f/dp = grad_f`, while `p` follows whichever vertices or edges define
//! it. With `freeze_beta` only the depth term is kept. The direction `u`
//! receives only the direct term `sum(grad_out_v * d_v)`.

use serde::Serialize;

use super::{PushError, PushRow, StepResult};
use crate::geometry::{CornerOrigin, Vec2};
use crate::lp::lp_backward;
use crate::mesh::Vec3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepGradients {
    /// Total gradient with respect to the pushed distances.
    pub d: Vec<f64>,
    pub d_min: Vec<f64>,
    /// With respect to the input vertex positions.
    pub vertices: Vec<[f64; 3]>,
    /// With respect to the unit direction, direct term only.
    pub u_hat: [f64; 3],
    /// LP multiplier of every ordering row (zero when inactive).
    pub rows: Vec<f64>,
}

impl StepGradients {
    pub fn vertex(&self, v: usize) -> Vec3 {
        Vec3::from(self.vertices[v])
    }

    pub fn vertices_vec3(&self) -> Vec<Vec3> {
        self.vertices.iter().map(|&g| Vec3::from(g)).collect()
    }
}

/// Gradients of a scalar loss with respect to the step inputs, given its
/// gradient with respect to the output vertices and, optionally, to `d`.
pub fn push_step_backward(
    result: &StepResult,
    grad_mesh_out: &[Vec3],
    grad_d: Option<&[f64]>,
) -> Result<StepGradients, PushError> {
    let n = result.d.len();
    if grad_mesh_out.len() != n {
        return Err(PushError::GradientLength {
            got: grad_mesh_out.len(),
            expected: n,
        });
    }
    if let Some(g) = grad_d {
        if g.len() != n {
            return Err(PushError::GradientLength { got: g.len(), expected: n });
        }
    }
    let ctx = &result.backward_ctx;
    let frame = &ctx.frame;
    let u = frame.u_hat;

    let mut g_d: Vec<f64> = grad_mesh_out.iter().map(|g| g.dot(&u)).collect();
    if let Some(extra) = grad_d {
        g_d.iter_mut().zip(extra).for_each(|(a, b)| *a += b);
    }
    let g_u: Vec3 = grad_mesh_out.iter().zip(&result.d).map(|(g, &d)| g * d).sum();

    let lp_grads = lp_backward(&ctx.lp, &result.lp_solution, &g_d)?;

    let mut g_plane = vec![Vec2::zeros(); n];
    let mut g_depth = vec![0.0; n];
    let heights: Vec<f64> = ctx.projected.depth.iter().zip(&result.d).map(|(z, d)| z + d).collect();
    let faces = result.mesh_out.faces();
    for (row, &y) in result.constraints.rows.iter().zip(&lp_grads.rhs) {
        if y == 0.0 {
            continue;
        }
        let lower = faces[row.face_lower];
        let upper = faces[row.face_upper];
        for i in 0..3 {
            g_depth[lower[i]] += y * row.beta_lower[i];
            g_depth[upper[i]] -= y * row.beta_upper[i];
        }
        if !ctx.config.freeze_beta {
            accumulate_in_plane(row, y, &lower, &upper, &ctx.projected.coords2d, &heights, &mut g_plane);
        }
    }

    let vertices = (0..n)
        .map(|v| {
            let g = grad_mesh_out[v] + g_plane[v].x * frame.e1 + g_plane[v].y * frame.e2 + g_depth[v] * u;
            [g.x, g.y, g.z]
        })
        .collect();
    Ok(StepGradients {
        d: g_d,
        d_min: lp_grads.lower_bounds,
        vertices,
        u_hat: [g_u.x, g_u.y, g_u.z],
        rows: lp_grads.rhs,
    })
}

fn perp(v: &Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// In-plane gradient of the height interpolated over a triangle.
fn height_gradient(s: [Vec2; 3], h: [f64; 3]) -> Vec2 {
    let e1 = s[1] - s[0];
    let e2 = s[2] - s[0];
    let det = cross(&e1, &e2);
    if det == 0.0 {
        return Vec2::zeros();
    }
    let (dh1, dh2) = (h[1] - h[0], h[2] - h[0]);
    Vec2::new(e2.y * dh1 - e1.y * dh2, -e2.x * dh1 + e1.x * dh2) / det
}

fn accumulate_in_plane(
    row: &PushRow,
    y: f64,
    lower: &[usize; 3],
    upper: &[usize; 3],
    coords: &[Vec2],
    heights: &[f64],
    g_plane: &mut [Vec2],
) {
    let s_l = lower.map(|v| coords[v]);
    let s_u = upper.map(|v| coords[v]);
    let grad_l = height_gradient(s_l, lower.map(|v| heights[v]));
    let grad_u = height_gradient(s_u, upper.map(|v| heights[v]));

    // weights at a fixed corner
    for i in 0..3 {
        g_plane[upper[i]] += y * row.beta_upper[i] * grad_u;
        g_plane[lower[i]] -= y * row.beta_lower[i] * grad_l;
    }

    // motion of the corner itself
    let dg_dp = grad_u - grad_l;
    match row.origin {
        CornerOrigin::First(k) => g_plane[lower[k]] -= y * dg_dp,
        CornerOrigin::Second(k) => g_plane[upper[k]] -= y * dg_dp,
        CornerOrigin::EdgeCrossing {
            first_edge,
            second_edge,
        } => {
            let (a0, a1) = (lower[first_edge], lower[(first_edge + 1) % 3]);
            let (b0, b1) = (upper[second_edge], upper[(second_edge + 1) % 3]);
            let (p0, p1, q0, q1) = (coords[a0], coords[a1], coords[b0], coords[b1]);
            let dir1 = p1 - p0;
            let dir2 = q1 - q0;
            let denom = cross(&dir1, &dir2);
            if denom.abs() <= 1e-14 * dir1.norm_squared().max(dir2.norm_squared()) {
                return;
            }
            let t = cross(&(q0 - p0), &dir2) / denom;
            let u = cross(&(q0 - p0), &dir1) / denom;
            // shifting edge 1 slides the corner along edge 2, and vice versa
            let n1 = perp(&dir1);
            let n2 = perp(&dir2);
            let along1 = n1 * (dir2.dot(&dg_dp) / n1.dot(&dir2));
            let along2 = n2 * (dir1.dot(&dg_dp) / n2.dot(&dir1));
            g_plane[a0] -= y * (1.0 - t) * along1;
            g_plane[a1] -= y * t * along1;
            g_plane[b0] -= y * (1.0 - u) * along2;
            g_plane[b1] -= y * u * along2;
        }
        CornerOrigin::Unresolved => {}
    }
}
