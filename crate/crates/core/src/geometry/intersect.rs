//! Closed triangle/triangle intersection in 3D and the per-mesh
//! intersecting-face count.
//!
//! The test follows the plane-splitting scheme: each triangle is cut by the
//! other's supporting plane, both cuts lie on the planes' common line, and
//! the triangles meet iff the two cut intervals on that line overlap.
//! Coplanar pairs fall back to a 2D overlap test. Distances within `tol`
//! count as contact.

use super::broad_phase::{grid_pairs, Aabb2};
use super::Vec2;
use crate::mesh::{Mesh, Vec3};

fn snap(d: f64, tol: f64) -> f64 {
    if d.abs() <= tol {
        0.0
    } else {
        d
    }
}

fn all_strictly_same_side(d: &[f64; 3]) -> bool {
    d.iter().all(|&x| x > 0.0) || d.iter().all(|&x| x < 0.0)
}

/// Points where triangle `t` (signed plane distances `d`) meets the plane.
fn plane_cut(t: &[Vec3; 3], d: &[f64; 3]) -> Vec<Vec3> {
    let mut pts = Vec::with_capacity(3);
    for i in 0..3 {
        if d[i] == 0.0 {
            pts.push(t[i]);
        }
        let j = (i + 1) % 3;
        if (d[i] > 0.0 && d[j] < 0.0) || (d[i] < 0.0 && d[j] > 0.0) {
            pts.push(t[i] + (t[j] - t[i]) * (d[i] / (d[i] - d[j])));
        }
    }
    pts
}

fn interval_on(dir: &Vec3, pts: &[Vec3]) -> (f64, f64) {
    pts.iter().map(|p| p.dot(dir)).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
        (lo.min(t), hi.max(t))
    })
}

fn drop_axis(normal: &Vec3) -> impl Fn(&Vec3) -> Vec2 {
    let axis = normal.iamax();
    move |p: &Vec3| match axis {
        0 => Vec2::new(p.y, p.z),
        1 => Vec2::new(p.z, p.x),
        _ => Vec2::new(p.x, p.y),
    }
}

fn cross2(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

fn point_segment_distance(p: &Vec2, a: &Vec2, b: &Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 {
        ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p - (a + ab * t)).norm()
}

fn segments_touch_2d(a: &Vec2, b: &Vec2, c: &Vec2, d: &Vec2, tol: f64) -> bool {
    let o1 = cross2(&(b - a), &(c - a));
    let o2 = cross2(&(b - a), &(d - a));
    let o3 = cross2(&(d - c), &(a - c));
    let o4 = cross2(&(d - c), &(b - c));
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    [
        point_segment_distance(c, a, b),
        point_segment_distance(d, a, b),
        point_segment_distance(a, c, d),
        point_segment_distance(b, c, d),
    ]
    .into_iter()
    .any(|dist| dist <= tol)
}

fn point_in_triangle_2d(p: &Vec2, t: &[Vec2; 3], tol: f64) -> bool {
    let area = cross2(&(t[1] - t[0]), &(t[2] - t[0]));
    if area == 0.0 {
        return false;
    }
    let s = area.signum();
    (0..3).all(|k| {
        let (a, b) = (t[k], t[(k + 1) % 3]);
        let len = (b - a).norm();
        len > 0.0 && s * cross2(&(b - a), &(p - a)) / len >= -tol
    })
}

/// Closed overlap of two (possibly degenerate) coplanar triangles in 2D.
fn coplanar_overlap(a: &[Vec2; 3], b: &[Vec2; 3], tol: f64) -> bool {
    for i in 0..3 {
        for j in 0..3 {
            if segments_touch_2d(&a[i], &a[(i + 1) % 3], &b[j], &b[(j + 1) % 3], tol) {
                return true;
            }
        }
    }
    a.iter().any(|p| point_in_triangle_2d(p, b, tol)) || b.iter().any(|p| point_in_triangle_2d(p, a, tol))
}

/// Distance between segments `p1q1` and `p2q2` in 3D.
fn segment_segment_distance(p1: &Vec3, q1: &Vec3, p2: &Vec3, q2: &Vec3) -> f64 {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let (a, e, f) = (d1.norm_squared(), d2.norm_squared(), d2.dot(&r));
    let (s, t);
    if a <= f64::EPSILON && e <= f64::EPSILON {
        return r.norm();
    }
    if a <= f64::EPSILON {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= f64::EPSILON {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    ((p1 + d1 * s) - (p2 + d2 * t)).norm()
}

fn longest_edge(t: &[Vec3; 3]) -> (Vec3, Vec3) {
    (0..3)
        .map(|k| (t[k], t[(k + 1) % 3]))
        .max_by(|a, b| (a.1 - a.0).norm_squared().total_cmp(&(b.1 - b.0).norm_squared()))
        .expect("three edges")
}

/// Degenerate (collinear) triangle `seg` against a proper triangle `t`.
fn segment_vs_triangle(seg: (Vec3, Vec3), t: &[Vec3; 3], n_unit: &Vec3, tol: f64) -> bool {
    let d0 = snap(n_unit.dot(&(seg.0 - t[0])), tol);
    let d1 = snap(n_unit.dot(&(seg.1 - t[0])), tol);
    if (d0 > 0.0 && d1 > 0.0) || (d0 < 0.0 && d1 < 0.0) {
        return false;
    }
    let proj = drop_axis(n_unit);
    let t2 = t.map(|p| proj(&p));
    if d0 == 0.0 && d1 == 0.0 {
        let s = [proj(&seg.0), proj(&seg.1), proj(&seg.1)];
        return coplanar_overlap(&s, &t2, tol);
    }
    let hit = if d0 == 0.0 {
        seg.0
    } else if d1 == 0.0 {
        seg.1
    } else {
        seg.0 + (seg.1 - seg.0) * (d0 / (d0 - d1))
    };
    point_in_triangle_2d(&proj(&hit), &t2, tol)
}

/// True iff the closed triangles share a point (within `tol`).
///
/// Coplanar overlap and mere touching both count. Callers are expected to
/// skip pairs that share a mesh vertex.
pub fn tri_tri_intersect_3d(a: &[Vec3; 3], b: &[Vec3; 3], tol: f64) -> bool {
    let na = (a[1] - a[0]).cross(&(a[2] - a[0]));
    let nb = (b[1] - b[0]).cross(&(b[2] - b[0]));
    let scale = a.iter().chain(b).map(|p| p.amax()).fold(1.0, f64::max);
    let degenerate = |n: &Vec3| n.norm() <= 1e-14 * scale * scale;
    match (degenerate(&na), degenerate(&nb)) {
        (true, true) => {
            let (p1, q1) = longest_edge(a);
            let (p2, q2) = longest_edge(b);
            return segment_segment_distance(&p1, &q1, &p2, &q2) <= tol;
        }
        (true, false) => return segment_vs_triangle(longest_edge(a), b, &nb.normalize(), tol),
        (false, true) => return segment_vs_triangle(longest_edge(b), a, &na.normalize(), tol),
        (false, false) => {}
    }
    let na = na.normalize();
    let nb = nb.normalize();

    let db = b.map(|p| snap(na.dot(&(p - a[0])), tol));
    if all_strictly_same_side(&db) {
        return false;
    }
    let da = a.map(|p| snap(nb.dot(&(p - b[0])), tol));
    if all_strictly_same_side(&da) {
        return false;
    }

    let line = na.cross(&nb);
    if db.iter().all(|&x| x == 0.0) || da.iter().all(|&x| x == 0.0) || line.norm() < 1e-12 {
        let proj = drop_axis(&na);
        return coplanar_overlap(&a.map(|p| proj(&p)), &b.map(|p| proj(&p)), tol);
    }
    let line = line.normalize();
    let (a_lo, a_hi) = interval_on(&line, &plane_cut(a, &da));
    let (b_lo, b_hi) = interval_on(&line, &plane_cut(b, &db));
    a_lo <= b_hi + tol && b_lo <= a_hi + tol
}

/// Result of the intersecting-face count.
#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionReport {
    pub count: usize,
    pub fraction: f64,
    /// Number of narrow-phase triangle tests performed.
    pub pairs_tested: usize,
    pub intersecting: Vec<bool>,
}

fn finish(mesh: &Mesh, intersecting: Vec<bool>, pairs_tested: usize) -> IntersectionReport {
    let count = intersecting.iter().filter(|&&x| x).count();
    let fraction = if mesh.num_faces() == 0 {
        0.0
    } else {
        count as f64 / mesh.num_faces() as f64
    };
    IntersectionReport {
        count,
        fraction,
        pairs_tested,
        intersecting,
    }
}

/// Counts faces that intersect at least one face they share no vertex with.
pub fn count_intersecting_faces(mesh: &Mesh, tol: f64) -> IntersectionReport {
    let faces = mesh.faces();
    let verts = mesh.vertices();
    let boxes3: Vec<(Vec3, Vec3)> = faces
        .iter()
        .map(|f| {
            let p = f.map(|i| verts[i]);
            (p[0].inf(&p[1]).inf(&p[2]), p[0].sup(&p[1]).sup(&p[2]))
        })
        .collect();
    let boxes2: Vec<Aabb2> = boxes3
        .iter()
        .map(|(lo, hi)| Aabb2 {
            min: Vec2::new(lo.x, lo.y),
            max: Vec2::new(hi.x, hi.y),
        })
        .collect();
    let candidates = grid_pairs(&boxes2, tol, |f, g| {
        let (alo, ahi) = &boxes3[f];
        let (blo, bhi) = &boxes3[g];
        alo.z <= bhi.z + tol && blo.z <= ahi.z + tol && !mesh.faces_share_vertex(f, g)
    });
    let mut intersecting = vec![false; faces.len()];
    for &(f, g) in &candidates {
        if intersecting[f] && intersecting[g] {
            continue;
        }
        if tri_tri_intersect_3d(&mesh.triangle(f), &mesh.triangle(g), tol) {
            intersecting[f] = true;
            intersecting[g] = true;
        }
    }
    finish(mesh, intersecting, candidates.len())
}

/// Reference implementation over all `O(N_F^2)` face pairs.
pub fn count_intersecting_faces_exhaustive(mesh: &Mesh, tol: f64) -> IntersectionReport {
    let n = mesh.num_faces();
    let mut intersecting = vec![false; n];
    let mut tested = 0;
    for f in 0..n {
        for g in f + 1..n {
            if mesh.faces_share_vertex(f, g) {
                continue;
            }
            tested += 1;
            if tri_tri_intersect_3d(&mesh.triangle(f), &mesh.triangle(g), tol) {
                intersecting[f] = true;
                intersecting[g] = true;
            }
        }
    }
    finish(mesh, intersecting, tested)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{fixtures, make_icosphere};

    fn tri(p: [[f64; 3]; 3]) -> [Vec3; 3] {
        p.map(Vec3::from)
    }

    #[test]
    fn parallel_planes_do_not_meet() {
        let a = tri([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let b = tri([[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0]]);
        assert!(!tri_tri_intersect_3d(&a, &b, 1e-9));
    }

    #[test]
    fn piercing_triangle() {
        let a = tri([[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 2.0, 0.0]]);
        let b = tri([[0.5, 0.5, -1.0], [0.5, 0.5, 1.0], [1.5, 0.5, 1.0]]);
        assert!(tri_tri_intersect_3d(&a, &b, 1e-9));
        assert!(tri_tri_intersect_3d(&b, &a, 1e-9));
        let shifted = b.map(|p| p + Vec3::new(3.0, 0.0, 0.0));
        assert!(!tri_tri_intersect_3d(&a, &shifted, 1e-9));
    }

    #[test]
    fn coplanar_touching_along_segment() {
        let a = tri([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let b = tri([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]]);
        assert!(tri_tri_intersect_3d(&a, &b, 1e-9));
        let apart = b.map(|p| p + Vec3::new(0.01, 0.01, 0.0));
        assert!(!tri_tri_intersect_3d(&a, &apart, 1e-9));
    }

    #[test]
    fn touching_at_a_point_counts() {
        let a = tri([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let b = tri([[0.2, 0.2, 0.0], [0.2, 0.2, 1.0], [1.0, 1.0, 1.0]]);
        assert!(tri_tri_intersect_3d(&a, &b, 1e-9));
        let lifted = b.map(|p| p + Vec3::new(0.0, 0.0, 1e-6));
        assert!(!tri_tri_intersect_3d(&a, &lifted, 1e-9));
    }

    #[test]
    fn degenerate_triangles() {
        let a = tri([[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 2.0, 0.0]]);
        let needle = tri([[0.5, 0.5, -1.0], [0.5, 0.5, 1.0], [0.5, 0.5, 0.0]]);
        assert!(tri_tri_intersect_3d(&a, &needle, 1e-9));
        let other = tri([[0.0, 0.5, 0.5], [1.0, 0.5, 0.5], [2.0, 0.5, 0.5]]);
        assert!(tri_tri_intersect_3d(&needle, &other, 1e-9));
    }

    #[test]
    fn icosphere_is_clean() {
        let m = make_icosphere(2).unwrap();
        let r = count_intersecting_faces(&m, 1e-9);
        assert_eq!(r.count, 0);
        assert_eq!(r.fraction, 0.0);
    }

    #[test]
    fn two_tetrahedra_fully_intersecting() {
        let m = fixtures::two_tetrahedra();
        let r = count_intersecting_faces(&m, 1e-9);
        assert_eq!(r.fraction, 1.0);
        assert_eq!(r, count_intersecting_faces_exhaustive(&m, 1e-9).clone_with_tested(r.pairs_tested));
    }

    impl IntersectionReport {
        fn clone_with_tested(&self, tested: usize) -> Self {
            Self {
                pairs_tested: tested,
                ..self.clone()
            }
        }
    }
}
