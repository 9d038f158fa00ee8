//! Planar projection along a motion direction, triangle overlap in that
//! plane, and the 3D self-intersection oracle.

mod barycentric;
mod broad_phase;
mod clip;
mod frame;
mod intersect;

use nalgebra::Vector2;
use thiserror::Error;

use crate::mesh::Mesh;

pub use barycentric::{barycentric, Barycentric};
pub use broad_phase::{broad_phase_pairs, broad_phase_pairs_with_margin, Aabb2};
pub use clip::{clip_triangles, clip_triangles_tracked, signed_area, ConvexPolygon2D, CornerOrigin};
pub use frame::{orthonormal_basis, project_mesh, ProjectedMesh, ProjectionFrame};
pub use intersect::{
    count_intersecting_faces, count_intersecting_faces_exhaustive, tri_tri_intersect_3d,
    IntersectionReport,
};

pub type Vec2 = Vector2<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("direction has (near) zero length")]
    ZeroDirection,
    #[error("triangle is degenerate")]
    DegenerateTriangle,
}

/// Contact tolerance used by the intersection oracle: `1e-9 * bbox diagonal`.
pub fn default_tolerance(mesh: &Mesh) -> f64 {
    1e-9 * mesh.bbox_diagonal()
}

/// Minimum overlap area considered non-degenerate: `1e-9 * bbox diagonal^2`.
pub fn default_area_tolerance(mesh: &Mesh) -> f64 {
    let d = mesh.bbox_diagonal();
    1e-9 * d * d
}
