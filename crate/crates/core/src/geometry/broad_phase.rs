//! Uniform-grid culling of face pairs by 2D bounding-box overlap.

use super::{ProjectedMesh, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb2 {
    pub min: Vec2,
    pub max: Vec2,
}

impl Aabb2 {
    pub fn of_points<'a>(points: impl IntoIterator<Item = &'a Vec2>) -> Self {
        let mut it = points.into_iter();
        let first = *it.next().expect("at least one point");
        it.fold(Aabb2 { min: first, max: first }, |b, p| Aabb2 {
            min: b.min.inf(p),
            max: b.max.sup(p),
        })
    }

    /// Closed overlap test with both boxes grown by `margin`.
    pub fn overlaps(&self, other: &Aabb2, margin: f64) -> bool {
        self.min.x <= other.max.x + margin
            && other.min.x <= self.max.x + margin
            && self.min.y <= other.max.y + margin
            && other.min.y <= self.max.y + margin
    }

    pub fn diagonal(&self) -> f64 {
        (self.max - self.min).norm()
    }
}

fn share_vertex(a: &[usize; 3], b: &[usize; 3]) -> bool {
    b.iter().any(|v| a.contains(v))
}

/// Face pairs `(f, g)` with `f < g`, no shared vertex, and overlapping 2D
/// boxes. Sorted and free of duplicates; identical to exhaustive pairing.
pub fn broad_phase_pairs(projected: &ProjectedMesh, faces: &[[usize; 3]]) -> Vec<(usize, usize)> {
    broad_phase_pairs_with_margin(projected, faces, 0.0)
}

pub fn broad_phase_pairs_with_margin(
    projected: &ProjectedMesh,
    faces: &[[usize; 3]],
    margin: f64,
) -> Vec<(usize, usize)> {
    let boxes: Vec<Aabb2> = faces
        .iter()
        .map(|f| Aabb2::of_points(f.iter().map(|&i| &projected.coords2d[i])))
        .collect();
    grid_pairs(&boxes, margin, |a, b| !share_vertex(&faces[a], &faces[b]))
}

/// Every index pair `(a, b)`, `a < b`, whose boxes overlap (with `margin`)
/// and that passes `keep`. Boxes are binned into a uniform grid whose cell
/// size is about the median box diagonal.
pub(crate) fn grid_pairs(
    boxes: &[Aabb2],
    margin: f64,
    keep: impl Fn(usize, usize) -> bool,
) -> Vec<(usize, usize)> {
    if boxes.len() < 2 {
        return Vec::new();
    }
    let total = Aabb2 {
        min: boxes.iter().fold(boxes[0].min, |m, b| m.inf(&b.min)),
        max: boxes.iter().fold(boxes[0].max, |m, b| m.sup(&b.max)),
    };
    let extent = total.max - total.min;
    let mut diagonals: Vec<f64> = boxes.iter().map(|b| b.diagonal()).collect();
    diagonals.sort_by(f64::total_cmp);
    let mut cell = diagonals[diagonals.len() / 2];
    // keep the grid at most ~4 cells per box
    let max_cells = (4 * boxes.len()).max(16) as f64;
    let min_cell = (extent.x * extent.y / max_cells).sqrt();
    cell = cell.max(min_cell).max(extent.amax() / 1024.0);
    if !(cell > 0.0) || !cell.is_finite() {
        cell = 1.0;
    }
    let nx = ((extent.x / cell).floor() as usize + 1).max(1);
    let ny = ((extent.y / cell).floor() as usize + 1).max(1);
    let index = |v: f64, lo: f64, n: usize| (((v - lo) / cell).floor().max(0.0) as usize).min(n - 1);

    let mut bins: Vec<Vec<usize>> = vec![Vec::new(); nx * ny];
    for (i, b) in boxes.iter().enumerate() {
        let (x0, x1) = (
            index(b.min.x - margin, total.min.x, nx),
            index(b.max.x + margin, total.min.x, nx),
        );
        let (y0, y1) = (
            index(b.min.y - margin, total.min.y, ny),
            index(b.max.y + margin, total.min.y, ny),
        );
        for y in y0..=y1 {
            for x in x0..=x1 {
                bins[y * nx + x].push(i);
            }
        }
    }

    let mut pairs = Vec::new();
    for bin in &bins {
        for (k, &a) in bin.iter().enumerate() {
            for &b in &bin[k + 1..] {
                if boxes[a].overlaps(&boxes[b], margin) && keep(a, b) {
                    pairs.push((a.min(b), a.max(b)));
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}
