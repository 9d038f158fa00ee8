use super::{GeometryError, Vec2};
use crate::mesh::Vec3;

/// Barycentric coordinates with respect to a triangle's three corners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Barycentric {
    pub b: [f64; 3],
}

impl Barycentric {
    pub fn apply2(&self, t: &[Vec2; 3]) -> Vec2 {
        t[0] * self.b[0] + t[1] * self.b[1] + t[2] * self.b[2]
    }

    pub fn apply3(&self, t: &[Vec3; 3]) -> Vec3 {
        t[0] * self.b[0] + t[1] * self.b[1] + t[2] * self.b[2]
    }

    pub fn dot(&self, values: &[f64; 3]) -> f64 {
        self.b[0] * values[0] + self.b[1] * values[1] + self.b[2] * values[2]
    }
}

/// Coordinates of `p` with respect to `t`. Because projection along a
/// direction is affine, the same weights applied to the 3D corners of the
/// face give the point on the face that projects to `p`.
pub fn barycentric(p: &Vec2, t: &[Vec2; 3]) -> Result<Barycentric, GeometryError> {
    let e1 = t[1] - t[0];
    let e2 = t[2] - t[0];
    let det = e1.x * e2.y - e1.y * e2.x;
    let scale = e1.norm_squared().max(e2.norm_squared());
    if !(det.abs() > 1e-14 * scale) {
        return Err(GeometryError::DegenerateTriangle);
    }
    let r = p - t[0];
    let b1 = (r.x * e2.y - r.y * e2.x) / det;
    let b2 = (e1.x * r.y - e1.y * r.x) / det;
    Ok(Barycentric {
        b: [1.0 - b1 - b2, b1, b2],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn centroid_and_corners() {
        let t = [Vec2::new(0.0, 0.0), Vec2::new(3.0, 0.0), Vec2::new(0.0, 3.0)];
        let c = barycentric(&Vec2::new(1.0, 1.0), &t).unwrap();
        for b in c.b {
            assert!((b - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(barycentric(&t[1], &t).unwrap().b, [0.0, 1.0, 0.0]);
        assert_eq!(barycentric(&t[2], &t).unwrap().b, [0.0, 0.0, 1.0]);
    }

    #[test]
    fn degenerate_is_rejected() {
        let t = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(2.0, 2.0)];
        assert_eq!(
            barycentric(&Vec2::zeros(), &t),
            Err(GeometryError::DegenerateTriangle)
        );
    }

    #[test]
    fn random_interior_points_reconstruct() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let t = [0, 1, 2].map(|_| Vec2::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)));
            let mut w = [rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()];
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= s);
            let p = t[0] * w[0] + t[1] * w[1] + t[2] * w[2];
            let Ok(b) = barycentric(&p, &t) else { continue };
            assert!((b.apply2(&t) - p).norm() < 1e-9);
            assert!((b.b.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!(b.b.iter().all(|&x| (-1e-9..=1.0 + 1e-9).contains(&x)));
        }
    }

    #[test]
    fn weights_transfer_to_3d_face() {
        let face = [
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(2.0, 0.0, 3.0),
            Vec3::new(0.0, 2.0, -1.0),
        ];
        let flat = face.map(|v| Vec2::new(v.x, v.y));
        let b = barycentric(&Vec2::new(0.5, 0.5), &flat).unwrap();
        let q = b.apply3(&face);
        assert!((q - Vec3::new(0.5, 0.5, 1.0)).norm() < 1e-15);
    }
}
