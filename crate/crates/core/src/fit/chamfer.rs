use super::FitError;
use crate::mesh::Vec3;

/// Exact nearest neighbours by a sweep over points sorted along x.
/// Equidistant candidates resolve to the lowest index.
pub struct NearestNeighbors<'a> {
    points: &'a [Vec3],
    order: Vec<usize>,
    xs: Vec<f64>,
}

impl<'a> NearestNeighbors<'a> {
    pub fn new(points: &'a [Vec3]) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].x.total_cmp(&points[b].x).then(a.cmp(&b)));
        let xs = order.iter().map(|&i| points[i].x).collect();
        Self { points, order, xs }
    }

    /// Index of the nearest point and the squared distance to it.
    pub fn nearest(&self, q: &Vec3) -> (usize, f64) {
        let start = self.xs.partition_point(|&x| x < q.x);
        let mut best = (usize::MAX, f64::INFINITY);
        let consider = |best: &mut (usize, f64), i: usize| {
            let d = (self.points[i] - q).norm_squared();
            if d < best.1 || (d == best.1 && i < best.0) {
                *best = (i, d);
            }
        };
        for k in start..self.order.len() {
            let dx = self.xs[k] - q.x;
            if dx * dx > best.1 {
                break;
            }
            consider(&mut best, self.order[k]);
        }
        for k in (0..start).rev() {
            let dx = q.x - self.xs[k];
            if dx * dx > best.1 {
                break;
            }
            consider(&mut best, self.order[k]);
        }
        best
    }
}

/// Symmetric Chamfer distance
/// `mean_a min_b |a - b|^2 + mean_b min_a |a - b|^2`
/// and its gradient with respect to the points of `a`.
pub fn chamfer_distance(a: &[Vec3], b: &[Vec3]) -> Result<(f64, Vec<Vec3>), FitError> {
    if a.is_empty() || b.is_empty() {
        return Err(FitError::EmptyPointSet);
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut grad = vec![Vec3::zeros(); a.len()];

    let tree_b = NearestNeighbors::new(b);
    let mut forward = 0.0;
    for (i, p) in a.iter().enumerate() {
        let (j, d2) = tree_b.nearest(p);
        forward += d2;
        grad[i] += 2.0 * (p - b[j]) / na;
    }

    let tree_a = NearestNeighbors::new(a);
    let mut backward = 0.0;
    for q in b {
        let (i, d2) = tree_a.nearest(q);
        backward += d2;
        grad[i] += 2.0 * (a[i] - q) / nb;
    }
    Ok((forward / na + backward / nb, grad))
}
