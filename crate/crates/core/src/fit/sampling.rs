use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use super::FitError;
use crate::mesh::{Mesh, Vec3};

/// Points on a mesh surface, each stored with the face and barycentric
/// weights it was drawn from so it can be re-evaluated after the vertices move.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSamples {
    pub points: Vec<Vec3>,
    pub faces: Vec<usize>,
    pub weights: Vec<[f64; 3]>,
}

impl SurfaceSamples {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The same surface locations on a mesh with identical faces.
    pub fn reevaluate(&self, mesh: &Mesh) -> Vec<Vec3> {
        self.faces
            .iter()
            .zip(&self.weights)
            .map(|(&f, b)| {
                let t = mesh.triangle(f);
                t[0] * b[0] + t[1] * b[1] + t[2] * b[2]
            })
            .collect()
    }

    /// Pulls per-point gradients back to the vertices.
    pub fn scatter_gradient(&self, mesh: &Mesh, point_grads: &[Vec3], out: &mut [Vec3]) {
        for ((&f, b), g) in self.faces.iter().zip(&self.weights).zip(point_grads) {
            for (k, &v) in mesh.faces()[f].iter().enumerate() {
                out[v] += b[k] * g;
            }
        }
    }
}

/// `n` points drawn uniformly by area. Deterministic for a given seed.
pub fn sample_surface(mesh: &Mesh, n: usize, seed: u64) -> Result<SurfaceSamples, FitError> {
    sample_surface_with(mesh, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn sample_surface_with(mesh: &Mesh, n: usize, rng: &mut impl Rng) -> Result<SurfaceSamples, FitError> {
    if n == 0 {
        return Err(FitError::InvalidConfig("sample count must be at least 1".into()));
    }
    let mut cumulative = Vec::with_capacity(mesh.num_faces());
    let mut total = 0.0;
    for f in 0..mesh.num_faces() {
        total += mesh.face_area(f);
        cumulative.push(total);
    }
    if !(total > 0.0) || !total.is_finite() {
        return Err(FitError::ZeroAreaMesh);
    }

    let mut out = SurfaceSamples {
        points: Vec::with_capacity(n),
        faces: Vec::with_capacity(n),
        weights: Vec::with_capacity(n),
    };
    for _ in 0..n {
        let target = rng.random::<f64>() * total;
        let f = cumulative
            .partition_point(|&c| c <= target)
            .min(cumulative.len() - 1);
        let (r1, r2): (f64, f64) = (rng.random(), rng.random());
        let s = r1.sqrt();
        let b = [1.0 - s, s * (1.0 - r2), s * r2];
        let t = mesh.triangle(f);
        out.points.push(t[0] * b[0] + t[1] * b[1] + t[2] * b[2]);
        out.faces.push(f);
        out.weights.push(b);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_lie_in_their_triangle() {
        let m = Mesh::new(
            vec![Vec3::zeros(), Vec3::new(2.0, 0.0, 1.0), Vec3::new(0.0, 1.0, 0.0)],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let s = sample_surface(&m, 500, 1).unwrap();
        for (p, b) in s.points.iter().zip(&s.weights) {
            assert!(b.iter().all(|&x| (0.0..=1.0).contains(&x)));
            assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let t = m.triangle(0);
            assert!((t[0] * b[0] + t[1] * b[1] + t[2] * b[2] - p).norm() < 1e-12);
        }
    }

    #[test]
    fn area_proportional() {
        // areas 1 and 3
        let m = Mesh::new(
            vec![
                Vec3::zeros(),
                Vec3::new(2.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
                Vec3::new(10.0, 0.0, 0.0),
                Vec3::new(13.0, 0.0, 0.0),
                Vec3::new(10.0, 2.0, 0.0),
            ],
            vec![[0, 1, 2], [3, 4, 5]],
        )
        .unwrap();
        let s = sample_surface(&m, 4000, 9).unwrap();
        let first = s.faces.iter().filter(|&&f| f == 0).count() as f64;
        assert!((first - 1000.0).abs() <= 50.0, "{first}");
        assert!((4000.0 - first - 3000.0).abs() <= 150.0);
    }

    #[test]
    fn deterministic_and_reevaluable() {
        let m = crate::mesh::make_icosphere(1).unwrap();
        let a = sample_surface(&m, 100, 5).unwrap();
        assert_eq!(a, sample_surface(&m, 100, 5).unwrap());
        assert_ne!(a, sample_surface(&m, 100, 6).unwrap());
        assert_eq!(a.reevaluate(&m), a.points);
    }

    #[test]
    fn zero_area_is_rejected() {
        let m = Mesh::new(vec![Vec3::zeros(), Vec3::x(), Vec3::x() * 2.0], vec![[0, 1, 2]]).unwrap();
        assert!(matches!(sample_surface(&m, 10, 0), Err(FitError::ZeroAreaMesh)));
    }
}
