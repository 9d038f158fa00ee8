use super::{GeometryError, Vec2};
use crate::mesh::{Mesh, Vec3};

/// Right-handed orthonormal frame `(e1, e2, u_hat)`; `e1, e2` span the
/// plane perpendicular to the motion direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionFrame {
    pub u_hat: Vec3,
    pub e1: Vec3,
    pub e2: Vec3,
}

impl ProjectionFrame {
    pub fn to_plane(&self, p: &Vec3) -> Vec2 {
        Vec2::new(p.dot(&self.e1), p.dot(&self.e2))
    }

    pub fn depth(&self, p: &Vec3) -> f64 {
        p.dot(&self.u_hat)
    }

    pub fn reconstruct(&self, planar: &Vec2, depth: f64) -> Vec3 {
        planar.x * self.e1 + planar.y * self.e2 + depth * self.u_hat
    }

    /// Splits a 3D vector into its in-plane and along-direction parts.
    pub fn split(&self, g: &Vec3) -> (Vec2, f64) {
        (self.to_plane(g), self.depth(g))
    }
}

/// Builds a frame around `direction`, pivoting on its smallest-magnitude
/// component so the result is deterministic and well conditioned.
pub fn orthonormal_basis(direction: &Vec3) -> Result<ProjectionFrame, GeometryError> {
    let norm = direction.norm();
    if !(norm > 1e-9) || !norm.is_finite() {
        return Err(GeometryError::ZeroDirection);
    }
    let u_hat = direction / norm;
    let pivot = (0..3)
        .min_by(|&i, &j| u_hat[i].abs().total_cmp(&u_hat[j].abs()))
        .unwrap_or(0);
    let mut axis = Vec3::zeros();
    axis[pivot] = 1.0;
    let e1 = u_hat.cross(&axis).normalize();
    let e2 = u_hat.cross(&e1);
    Ok(ProjectionFrame { u_hat, e1, e2 })
}

/// Vertex positions split into in-plane coordinates and depth along `u_hat`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedMesh {
    pub coords2d: Vec<Vec2>,
    pub depth: Vec<f64>,
}

impl ProjectedMesh {
    pub fn triangle(&self, face: &[usize; 3]) -> [Vec2; 3] {
        face.map(|i| self.coords2d[i])
    }
}

pub fn project_mesh(mesh: &Mesh, frame: &ProjectionFrame) -> ProjectedMesh {
    let (coords2d, depth) = mesh
        .vertices()
        .iter()
        .map(|v| (frame.to_plane(v), frame.depth(v)))
        .unzip();
    ProjectedMesh { coords2d, depth }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::make_icosphere;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_frame(f: &ProjectionFrame) {
        for v in [f.u_hat, f.e1, f.e2] {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
        assert!(f.u_hat.dot(&f.e1).abs() < 1e-12);
        assert!(f.u_hat.dot(&f.e2).abs() < 1e-12);
        assert!(f.e1.dot(&f.e2).abs() < 1e-12);
        assert!((f.e1.cross(&f.e2) - f.u_hat).norm() < 1e-12);
    }

    #[test]
    fn axis_frames() {
        let f = orthonormal_basis(&Vec3::z()).unwrap();
        check_frame(&f);
        assert_eq!(orthonormal_basis(&Vec3::new(0.0, 0.0, 2.0)).unwrap(), f);
        assert_eq!(
            orthonormal_basis(&Vec3::zeros()),
            Err(GeometryError::ZeroDirection)
        );
        assert_eq!(
            orthonormal_basis(&Vec3::new(1e-12, 0.0, 0.0)),
            Err(GeometryError::ZeroDirection)
        );
    }

    #[test]
    fn random_frames() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let d = Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            check_frame(&orthonormal_basis(&d).unwrap());
        }
    }

    #[test]
    fn projection_reconstructs() {
        let f = orthonormal_basis(&Vec3::z()).unwrap();
        let m = Mesh::new(
            vec![Vec3::new(3.0, 4.0, 5.0), Vec3::x(), Vec3::y()],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let p = project_mesh(&m, &f);
        assert_eq!(p.depth[0], 5.0);
        let expected = Vec2::new(3.0 * f.e1.x + 4.0 * f.e1.y, 3.0 * f.e2.x + 4.0 * f.e2.y);
        assert!((p.coords2d[0] - expected).norm() < 1e-15);

        let sphere = make_icosphere(1).unwrap();
        let f = orthonormal_basis(&Vec3::new(0.3, -0.5, 0.8)).unwrap();
        let p = project_mesh(&sphere, &f);
        for (i, v) in sphere.vertices().iter().enumerate() {
            assert!((f.reconstruct(&p.coords2d[i], p.depth[i]) - v).norm() < 1e-9);
        }
    }

    #[test]
    fn translation_along_direction_only_shifts_depth() {
        let sphere = make_icosphere(1).unwrap();
        let f = orthonormal_basis(&Vec3::new(0.3, -0.5, 0.8)).unwrap();
        let moved = sphere.transformed(Vec3::repeat(1.0), 0.75 * f.u_hat);
        let (a, b) = (project_mesh(&sphere, &f), project_mesh(&moved, &f));
        for i in 0..sphere.num_vertices() {
            assert!((a.coords2d[i] - b.coords2d[i]).norm() < 1e-12);
            assert!((b.depth[i] - a.depth[i] - 0.75).abs() < 1e-12);
        }
        // axis-aligned directions leave planar coordinates bit-identical
        let fz = orthonormal_basis(&Vec3::z()).unwrap();
        let up = sphere.transformed(Vec3::repeat(1.0), Vec3::new(0.0, 0.0, 0.4321));
        assert_eq!(project_mesh(&sphere, &fz).coords2d, project_mesh(&up, &fz).coords2d);
    }
}
