use serde::Serialize;

use super::{PushConfig, PushError};
use crate::geometry::{
    barycentric, broad_phase_pairs, clip_triangles_tracked, orthonormal_basis, project_mesh, CornerOrigin,
    ProjectedMesh, Vec2,
};
use crate::lp::SparseRow;
use crate::mesh::{Mesh, Vec3};

/// One ordering condition at one overlap corner:
/// `sum(coeffs_k * d_k) >= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PushRow {
    pub face_lower: usize,
    pub face_upper: usize,
    /// Index of the corner in the overlap polygon.
    pub corner: usize,
    /// Corner provenance; `First` refers to the lower face, `Second` to the upper.
    #[serde(skip)]
    pub origin: CornerOrigin,
    #[serde(skip)]
    pub corner_2d: Vec2,
    pub beta_lower: [f64; 3],
    pub beta_upper: [f64; 3],
    /// `-beta_lower` on the lower face's vertices, then `+beta_upper` on the upper face's.
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// Identifies a row independently of its position, for comparing constraint
/// sets built from slightly different meshes.
pub type RowKey = (usize, usize, CornerOrigin);

impl PushRow {
    pub fn key(&self) -> RowKey {
        (self.face_lower, self.face_upper, self.origin)
    }

    pub fn to_sparse(&self) -> SparseRow {
        SparseRow::new(self.coeffs.clone(), self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PushConstraintSet {
    pub rows: Vec<PushRow>,
    pub epsilon: f64,
    /// Overlapping pairs dropped because a face projects to a (near) segment.
    pub skipped_degenerate: usize,
    /// Face pairs with a non-degenerate projected overlap.
    pub pair_count: usize,
}

impl PushConstraintSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn sparse_rows(&self) -> Vec<SparseRow> {
        self.rows.iter().map(PushRow::to_sparse).collect()
    }
}

/// Depth-ordering constraints for moving `mesh` along `direction`.
pub fn build_constraints(mesh: &Mesh, direction: &Vec3, config: &PushConfig) -> Result<PushConstraintSet, PushError> {
    let frame = orthonormal_basis(direction)?;
    let projected = project_mesh(mesh, &frame);
    build_constraints_projected(mesh, &projected, config)
}

pub(crate) fn build_constraints_projected(
    mesh: &Mesh,
    projected: &ProjectedMesh,
    config: &PushConfig,
) -> Result<PushConstraintSet, PushError> {
    let epsilon = config.epsilon_for(mesh);
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(PushError::InvalidConfig(format!("epsilon must be positive, got {epsilon}")));
    }
    let area_tol = config.area_tol_for(mesh);
    let gap_tol = 1e-9 * mesh.bbox_diagonal();
    let faces = mesh.faces();

    let mut rows = Vec::new();
    let mut skipped_degenerate = 0;
    let mut pair_count = 0;
    for (f, g) in broad_phase_pairs(projected, faces) {
        let tf = projected.triangle(&faces[f]);
        let tg = projected.triangle(&faces[g]);
        let Some((polygon, origins)) = clip_triangles_tracked(&tf, &tg, area_tol) else {
            continue;
        };
        pair_count += 1;

        let mut corners = Vec::with_capacity(polygon.len());
        let mut degenerate = false;
        for p in polygon.corners() {
            match (barycentric(p, &tf), barycentric(p, &tg)) {
                (Ok(bf), Ok(bg)) => corners.push((*p, bf.b, bg.b)),
                _ => {
                    degenerate = true;
                    break;
                }
            }
        }
        if degenerate {
            skipped_degenerate += 1;
            continue;
        }

        let zf = faces[f].map(|v| projected.depth[v]);
        let zg = faces[g].map(|v| projected.depth[v]);
        let dot = |b: &[f64; 3], z: &[f64; 3]| b[0] * z[0] + b[1] * z[1] + b[2] * z[2];
        // positive gap: g lies above f
        let gaps: Vec<f64> = corners.iter().map(|(_, bf, bg)| dot(bg, &zg) - dot(bf, &zf)).collect();
        let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
        let max_gap = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let g_above = if min_gap > -gap_tol && max_gap > gap_tol {
            true
        } else if max_gap < gap_tol && min_gap < -gap_tol {
            false
        } else {
            return Err(PushError::OrderingViolated {
                face_a: f,
                face_b: g,
                min_gap,
                max_gap,
            });
        };

        let (lower, upper) = if g_above { (f, g) } else { (g, f) };
        for (k, &(p, bf, bg)) in corners.iter().enumerate() {
            let (beta_lower, beta_upper, z_lower, z_upper) = if g_above {
                (bf, bg, zf, zg)
            } else {
                (bg, bf, zg, zf)
            };
            let origin = if g_above { origins[k] } else { swap_origin(origins[k]) };
            let mut coeffs = Vec::with_capacity(6);
            coeffs.extend((0..3).map(|i| (faces[lower][i], -beta_lower[i])));
            coeffs.extend((0..3).map(|i| (faces[upper][i], beta_upper[i])));
            rows.push(PushRow {
                face_lower: lower,
                face_upper: upper,
                corner: k,
                origin,
                corner_2d: p,
                beta_lower,
                beta_upper,
                coeffs,
                rhs: dot(&beta_lower, &z_lower) - dot(&beta_upper, &z_upper) + epsilon,
            });
        }
    }
    rows.sort_by_key(|r| (r.face_lower, r.face_upper, r.corner));
    Ok(PushConstraintSet {
        rows,
        epsilon,
        skipped_degenerate,
        pair_count,
    })
}

fn swap_origin(o: CornerOrigin) -> CornerOrigin {
    match o {
        CornerOrigin::First(k) => CornerOrigin::Second(k),
        CornerOrigin::Second(k) => CornerOrigin::First(k),
        CornerOrigin::EdgeCrossing { first_edge, second_edge } => CornerOrigin::EdgeCrossing {
            first_edge: second_edge,
            second_edge: first_edge,
        },
        CornerOrigin::Unresolved => CornerOrigin::Unresolved,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{fixtures, make_icosphere};

    #[test]
    fn single_triangle_has_no_rows() {
        let m = Mesh::new(vec![Vec3::zeros(), Vec3::x(), Vec3::y()], vec![[0, 1, 2]]).unwrap();
        let c = build_constraints(&m, &Vec3::new(0.2, 0.3, 1.0), &PushConfig::default()).unwrap();
        assert!(c.is_empty());
        assert_eq!(c.pair_count, 0);
    }

    #[test]
    fn stacked_triangles_rows() {
        let m = fixtures::stacked_triangles(0.5);
        let config = PushConfig {
            epsilon: Some(0.01),
            ..PushConfig::default()
        };
        let c = build_constraints(&m, &Vec3::z(), &config).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.pair_count, 1);
        for row in &c.rows {
            assert_eq!((row.face_lower, row.face_upper), (0, 1));
            assert!((row.rhs + 0.49).abs() < 1e-12);
            // one-hot weights on matching corners
            let hot_lower = row.beta_lower.iter().position(|&b| (b - 1.0).abs() < 1e-12).unwrap();
            let hot_upper = row.beta_upper.iter().position(|&b| (b - 1.0).abs() < 1e-12).unwrap();
            assert_eq!(hot_lower, hot_upper);
            assert!(row.beta_lower.iter().chain(&row.beta_upper).all(|b| b.abs() < 1e-12 || (b - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn reversed_direction_swaps_roles() {
        let m = fixtures::stacked_triangles(0.5);
        let c = build_constraints(&m, &-Vec3::z(), &PushConfig::default()).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.rows.iter().all(|r| r.face_lower == 1 && r.face_upper == 0));
    }

    #[test]
    fn icosphere_rows_are_well_formed() {
        let m = make_icosphere(2).unwrap();
        let c = build_constraints(&m, &Vec3::z(), &PushConfig::default()).unwrap();
        assert!(c.pair_count > 0);
        for r in &c.rows {
            let neg: f64 = r.coeffs[..3].iter().map(|c| c.1).sum();
            let pos: f64 = r.coeffs[3..].iter().map(|c| c.1).sum();
            assert!((neg + 1.0).abs() < 1e-9 && (pos - 1.0).abs() < 1e-9);
            assert!(r.rhs < c.epsilon);
        }
        let keys: Vec<_> = c.rows.iter().map(|r| (r.face_lower, r.face_upper, r.corner)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn interpenetrating_input_is_rejected() {
        // two crossing triangles: corner gaps change sign
        let m = Mesh::new(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(2.0, 0.0, 0.0),
                Vec3::new(0.0, 2.0, 0.0),
                Vec3::new(0.0, 0.0, -0.5),
                Vec3::new(2.0, 0.0, 0.5),
                Vec3::new(0.0, 2.0, -0.5),
            ],
            vec![[0, 1, 2], [3, 4, 5]],
        )
        .unwrap();
        let err = build_constraints(&m, &Vec3::z(), &PushConfig::default()).unwrap_err();
        assert!(matches!(err, PushError::OrderingViolated { .. }));
    }
}
