//! Triangle/triangle intersection in the plane by successive half-plane
//! clipping (Sutherland-Hodgman with a convex clip region).
//!
//! Besides the corner positions, the tracked variant reports how each corner
//! arose: a corner of one input triangle, or the crossing of one edge from
//! each. Edge `k` of a triangle runs from corner `k` to corner `k + 1 mod 3`.

use super::Vec2;

fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Signed area, positive for counter-clockwise corners.
pub fn signed_area(t: &[Vec2; 3]) -> f64 {
    0.5 * cross(&(t[1] - t[0]), &(t[2] - t[0]))
}

/// Convex polygon with counter-clockwise corners.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvexPolygon2D {
    corners: Vec<Vec2>,
}

impl ConvexPolygon2D {
    pub fn corners(&self) -> &[Vec2] {
        &self.corners
    }

    pub fn len(&self) -> usize {
        self.corners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corners.is_empty()
    }

    pub fn area(&self) -> f64 {
        let n = self.corners.len();
        0.5 * (0..n)
            .map(|i| cross(&self.corners[i], &self.corners[(i + 1) % n]))
            .sum::<f64>()
    }
}

/// Where an overlap-polygon corner comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CornerOrigin {
    /// Corner `k` of the first triangle.
    First(usize),
    /// Corner `k` of the second triangle.
    Second(usize),
    /// Crossing of edge `first_edge` of the first triangle with edge
    /// `second_edge` of the second.
    EdgeCrossing { first_edge: usize, second_edge: usize },
    /// Could not be attributed (numerically collapsed corner).
    Unresolved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EdgeTag {
    First(usize),
    Second(usize),
}

fn shared_corner(e1: usize, e2: usize) -> Option<usize> {
    if e1 == e2 {
        None
    } else if (e1 + 1) % 3 == e2 {
        Some(e2)
    } else {
        Some(e1)
    }
}

fn origin_of(incoming: EdgeTag, outgoing: EdgeTag) -> CornerOrigin {
    use EdgeTag::*;
    match (incoming, outgoing) {
        (First(a), First(b)) => shared_corner(a, b).map_or(CornerOrigin::Unresolved, CornerOrigin::First),
        (Second(a), Second(b)) => {
            shared_corner(a, b).map_or(CornerOrigin::Unresolved, CornerOrigin::Second)
        }
        (First(a), Second(b)) | (Second(b), First(a)) => CornerOrigin::EdgeCrossing {
            first_edge: a,
            second_edge: b,
        },
    }
}

/// Clips `poly` (vertices paired with the tag of the edge leaving them)
/// against the half-plane left of `a -> b` (scaled by `orient`).
fn clip_half_plane(
    poly: &[(Vec2, EdgeTag)],
    a: Vec2,
    b: Vec2,
    orient: f64,
    tag: EdgeTag,
) -> Vec<(Vec2, EdgeTag)> {
    let dir = b - a;
    let side = |p: &Vec2| orient * cross(&dir, &(p - a));
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let (p, ptag) = poly[i];
        let (q, _) = poly[(i + 1) % n];
        let (sp, sq) = (side(&p), side(&q));
        let (p_in, q_in) = (sp >= 0.0, sq >= 0.0);
        if p_in {
            out.push((p, ptag));
        }
        if p_in != q_in {
            let t = sp / (sp - sq);
            let x = p + (q - p) * t;
            out.push((x, if p_in { tag } else { ptag }));
        }
    }
    out
}

/// Clips `t1` by `t2` and returns the convex overlap with corner origins,
/// or `None` when the overlap area is below `area_tol`. Either input
/// orientation is accepted; the output is counter-clockwise.
pub fn clip_triangles_tracked(
    t1: &[Vec2; 3],
    t2: &[Vec2; 3],
    area_tol: f64,
) -> Option<(ConvexPolygon2D, Vec<CornerOrigin>)> {
    let a1 = signed_area(t1);
    let a2 = signed_area(t2);
    if a1 == 0.0 || a2 == 0.0 {
        return None;
    }
    let mut poly: Vec<(Vec2, EdgeTag)> = (0..3).map(|k| (t1[k], EdgeTag::First(k))).collect();
    let orient = a2.signum();
    for k in 0..3 {
        poly = clip_half_plane(&poly, t2[k], t2[(k + 1) % 3], orient, EdgeTag::Second(k));
        if poly.len() < 3 {
            return None;
        }
    }

    // merge corners that collapsed onto their successor
    let scale = t1
        .iter()
        .chain(t2.iter())
        .map(|p| p.amax())
        .fold(1.0, f64::max);
    let merge_tol = 1e-12 * scale;
    let mut i = 0;
    while poly.len() > 1 && i < poly.len() {
        let j = (i + 1) % poly.len();
        if (poly[i].0 - poly[j].0).amax() <= merge_tol {
            poly[i].1 = poly[j].1;
            poly.remove(j);
            if j < i {
                i -= 1;
            }
        } else {
            i += 1;
        }
    }
    if poly.len() < 3 {
        return None;
    }

    let n = poly.len();
    let mut corners: Vec<Vec2> = poly.iter().map(|(p, _)| *p).collect();
    let mut origins: Vec<CornerOrigin> = (0..n)
        .map(|i| origin_of(poly[(i + n - 1) % n].1, poly[i].1))
        .collect();
    if a1 < 0.0 {
        corners.reverse();
        origins.reverse();
    }
    let polygon = ConvexPolygon2D { corners };
    if polygon.area() < area_tol {
        return None;
    }
    Some((polygon, origins))
}

/// Convex overlap of two triangles, or `None` if its area is below `area_tol`.
pub fn clip_triangles(t1: &[Vec2; 3], t2: &[Vec2; 3], area_tol: f64) -> Option<ConvexPolygon2D> {
    clip_triangles_tracked(t1, t2, area_tol).map(|(p, _)| p)
}
