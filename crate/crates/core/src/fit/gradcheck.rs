//! Central finite differences against the analytic gradients, on seeded
//! random instances.
//!
//! Relative error per coordinate is `|a - f| / max(|a|, |f|, floor)` with
//! `floor = 1e-4 * max|a|` over the instance, so coordinates whose true
//! gradient is (near) zero are judged on an absolute scale. LP-based
//! gradients are piecewise constant in the active set; coordinates whose
//! probe changes the active set (or, for Chamfer losses, a nearest-neighbour
//! match) are skipped and counted as excluded.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::Serialize;

use super::{chamfer_distance, sample_surface, stream_rng, NearestNeighbors};
use crate::lp::{lp_backward, solve_lp, ConstraintId, LinearProgram, LpSolution, SparseRow};
use crate::mesh::{crease_energy, fixtures, laplacian_energy, make_icosphere, Mesh, Vec3};
use crate::pushing::{deform, deform_backward, push_step, push_step_backward, DeformStep, PushConfig, RowKey, StepResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GradcheckOp {
    Laplacian,
    Crease,
    Chamfer,
    Lp,
    PushDmin,
    EndToEnd,
}

impl GradcheckOp {
    pub const ALL: [GradcheckOp; 6] = [
        GradcheckOp::Laplacian,
        GradcheckOp::Crease,
        GradcheckOp::Chamfer,
        GradcheckOp::Lp,
        GradcheckOp::PushDmin,
        GradcheckOp::EndToEnd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GradcheckOp::Laplacian => "laplacian",
            GradcheckOp::Crease => "crease",
            GradcheckOp::Chamfer => "chamfer",
            GradcheckOp::Lp => "lp",
            GradcheckOp::PushDmin => "push_dmin",
            GradcheckOp::EndToEnd => "end_to_end",
        }
    }

    /// Largest acceptable relative error.
    pub fn threshold(self) -> f64 {
        match self {
            GradcheckOp::Laplacian | GradcheckOp::Crease | GradcheckOp::Chamfer => 1e-4,
            GradcheckOp::Lp | GradcheckOp::PushDmin => 1e-3,
            GradcheckOp::EndToEnd => 1e-2,
        }
    }
}

impl fmt::Display for GradcheckOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GradcheckOp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Self::ALL.iter().map(|op| op.name()).collect();
                format!("unknown selector '{s}' (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradcheckReport {
    pub op: GradcheckOp,
    pub seed: u64,
    pub probe: f64,
    pub max_rel_error: f64,
    pub checked: usize,
    pub excluded: usize,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Default)]
struct Tally {
    max_rel_error: f64,
    checked: usize,
    excluded: usize,
}

impl Tally {
    /// Compares `analytic` against finite differences; `fd(i)` returns
    /// `None` when coordinate `i` must be excluded.
    fn compare(&mut self, coords: &[usize], analytic: &[f64], mut fd: impl FnMut(usize) -> Option<f64>) {
        let floor = 1e-4 * analytic.iter().map(|a| a.abs()).fold(0.0, f64::max).max(1e-12);
        for &i in coords {
            match fd(i) {
                Some(f) => {
                    let a = analytic[i];
                    let err = (a - f).abs() / a.abs().max(f.abs()).max(floor);
                    self.max_rel_error = self.max_rel_error.max(err);
                    self.checked += 1;
                }
                None => self.excluded += 1,
            }
        }
    }
}

/// Runs the selected check. `probe` is the finite-difference step.
pub fn gradcheck(op: GradcheckOp, seed: u64, probe: f64) -> GradcheckReport {
    let mut tally = Tally::default();
    match op {
        GradcheckOp::Laplacian => check_energy(&mut tally, seed, probe, |m| laplacian_energy(m).expect("closed mesh")),
        GradcheckOp::Crease => check_energy(&mut tally, seed, probe, |m| crease_energy(m).expect("closed mesh")),
        GradcheckOp::Chamfer => check_chamfer(&mut tally, seed, probe),
        GradcheckOp::Lp => {
            for instance in 0..10 {
                check_lp(&mut tally, &random_lp(seed, instance), seed ^ instance, probe);
            }
        }
        GradcheckOp::PushDmin => check_push(&mut tally, seed, probe),
        GradcheckOp::EndToEnd => check_end_to_end(&mut tally, seed, probe),
    }
    let threshold = op.threshold();
    GradcheckReport {
        op,
        seed,
        probe,
        max_rel_error: tally.max_rel_error,
        checked: tally.checked,
        excluded: tally.excluded,
        threshold,
        passed: tally.checked > 0 && tally.max_rel_error <= threshold,
    }
}

fn flatten(v: &[Vec3]) -> Vec<f64> {
    v.iter().flat_map(|g| [g.x, g.y, g.z]).collect()
}

fn perturbed(mesh: &Mesh, coord: usize, delta: f64) -> Mesh {
    let mut v = mesh.vertices().to_vec();
    v[coord / 3][coord % 3] += delta;
    mesh.with_vertices(v)
}

fn noisy_sphere(seed: u64, subdivisions: u32, amount: f64) -> Mesh {
    let mut rng = stream_rng(seed, 1);
    let m = make_icosphere(subdivisions).expect("small subdivision");
    let v = m
        .vertices()
        .iter()
        .map(|p| p + amount * Vec3::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    m.with_vertices(v)
}

fn check_energy(tally: &mut Tally, seed: u64, h: f64, energy: impl Fn(&Mesh) -> (f64, Vec<Vec3>)) {
    let mesh = noisy_sphere(seed, 1, 0.2);
    let analytic = flatten(&energy(&mesh).1);
    let coords: Vec<usize> = (0..analytic.len()).collect();
    tally.compare(&coords, &analytic, |i| {
        Some((energy(&perturbed(&mesh, i, h)).0 - energy(&perturbed(&mesh, i, -h)).0) / (2.0 * h))
    });
}

fn assignments(a: &[Vec3], b: &[Vec3]) -> (Vec<usize>, Vec<usize>) {
    let nb = NearestNeighbors::new(b);
    let na = NearestNeighbors::new(a);
    (
        a.iter().map(|p| nb.nearest(p).0).collect(),
        b.iter().map(|q| na.nearest(q).0).collect(),
    )
}

fn random_points(n: usize, rng: &mut impl Rng) -> Vec<Vec3> {
    (0..n)
        .map(|_| Vec3::new(rng.random(), rng.random(), rng.random()))
        .collect()
}

fn check_chamfer(tally: &mut Tally, seed: u64, h: f64) {
    let mut rng = stream_rng(seed, 2);
    let a = random_points(40, &mut rng);
    let b = random_points(55, &mut rng);
    let (_, grad) = chamfer_distance(&a, &b).expect("nonempty");
    let analytic = flatten(&grad);
    let base = assignments(&a, &b);
    let coords: Vec<usize> = (0..analytic.len()).collect();
    tally.compare(&coords, &analytic, |i| {
        let shift = |delta: f64| {
            let mut p = a.clone();
            p[i / 3][i % 3] += delta;
            p
        };
        let (ap, am) = (shift(h), shift(-h));
        if assignments(&ap, &b) != base || assignments(&am, &b) != base {
            return None;
        }
        let f = |p: &[Vec3]| chamfer_distance(p, &b).expect("nonempty").0;
        Some((f(&ap) - f(&am)) / (2.0 * h))
    });
}

/// A random feasible, bounded program with `n <= 6` variables and at most
/// ten constraints in total.
pub(crate) fn random_lp(seed: u64, instance: u64) -> LinearProgram {
    let mut rng = stream_rng(seed, 100 + instance);
    let n = rng.random_range(1..=6usize);
    let rows = rng.random_range(0..=(10 - n));
    let lower: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let x0: Vec<f64> = lower.iter().map(|l| l + rng.random_range(0.0..2.0)).collect();
    let mut ineqs = Vec::with_capacity(rows);
    for _ in 0..rows {
        let mut entries = Vec::new();
        for j in 0..n {
            if rng.random_bool(0.7) {
                entries.push((j, rng.random_range(-1.0..1.0)));
            }
        }
        let lhs: f64 = entries.iter().map(|&(j, a)| a * x0[j]).sum();
        ineqs.push(SparseRow::new(entries, lhs - rng.random_range(0.0..0.5)));
    }
    let objective = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
    LinearProgram::new(objective, lower, ineqs).expect("well-formed")
}

fn check_lp(tally: &mut Tally, lp: &LinearProgram, seed: u64, h: f64) {
    let sol = solve_lp(lp);
    if !sol.is_optimal() {
        return;
    }
    let mut rng = stream_rng(seed, 3);
    let w: Vec<f64> = (0..lp.n()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let Ok(grads) = lp_backward(lp, &sol, &w) else {
        return;
    };
    let loss = |s: &LpSolution| s.d.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
    let probe = |modified: LinearProgram| -> Option<(LpSolution, f64)> {
        let s = solve_lp(&modified);
        (s.is_optimal() && s.active_set == sol.active_set).then(|| {
            let l = loss(&s);
            (s, l)
        })
    };
    let fd = |plus: LinearProgram, minus: LinearProgram| -> Option<f64> {
        let (_, lp_) = probe(plus)?;
        let (_, lm) = probe(minus)?;
        Some((lp_ - lm) / (2.0 * h))
    };
    let rebuild = |lower: Vec<f64>, ineqs: Vec<SparseRow>| {
        LinearProgram::new(lp.objective().to_vec(), lower, ineqs).expect("well-formed")
    };

    // lower bounds
    let coords: Vec<usize> = (0..lp.n()).collect();
    tally.compare(&coords, &grads.lower_bounds, |j| {
        let shift = |d: f64| {
            let mut l = lp.lower_bounds().to_vec();
            l[j] += d;
            rebuild(l, lp.ineqs().to_vec())
        };
        fd(shift(h), shift(-h))
    });
    // right-hand sides
    let coords: Vec<usize> = (0..lp.ineqs().len()).collect();
    tally.compare(&coords, &grads.rhs, |i| {
        let shift = |d: f64| {
            let mut rows = lp.ineqs().to_vec();
            rows[i].rhs += d;
            rebuild(lp.lower_bounds().to_vec(), rows)
        };
        fd(shift(h), shift(-h))
    });
    // coefficients, flattened row by row
    let flat: Vec<f64> = grads.coeffs.iter().flatten().copied().collect();
    let index: Vec<(usize, usize)> = lp
        .ineqs()
        .iter()
        .enumerate()
        .flat_map(|(i, r)| (0..r.entries.len()).map(move |k| (i, k)))
        .collect();
    let coords: Vec<usize> = (0..flat.len()).collect();
    tally.compare(&coords, &flat, |c| {
        let (i, k) = index[c];
        let shift = |d: f64| {
            let mut rows = lp.ineqs().to_vec();
            rows[i].entries[k].1 += d;
            rebuild(lp.lower_bounds().to_vec(), rows)
        };
        fd(shift(h), shift(-h))
    });
}

/// Active set expressed through row keys, comparable across meshes.
fn active_keys(r: &StepResult) -> Vec<(usize, Option<RowKey>)> {
    let mut keys: Vec<_> = r
        .lp_solution
        .active_set
        .iter()
        .map(|c| match *c {
            ConstraintId::Bound(j) => (j, None),
            ConstraintId::Row(i) => (usize::MAX, Some(r.constraints.rows[i].key())),
        })
        .collect();
    keys.sort();
    keys
}

/// One step on icosphere(2) with `d_min` large enough that faces push each
/// other. Checks `d_min` and the input vertex positions on up to a dozen
/// vertices of active ordering rows plus a few random ones.
fn check_push(tally: &mut Tally, seed: u64, h: f64) {
    let mesh = make_icosphere(2).expect("small subdivision");
    let config = PushConfig::default().resolved(&mesh);
    let mut rng = stream_rng(seed, 4);
    let n = mesh.num_vertices();
    let dir = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let d_min: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.5)).collect();
    let w: Vec<Vec3> = (0..n)
        .map(|_| Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let step = DeformStep::new(dir, d_min.clone());
    let Ok(base) = push_step(&mesh, &step, &config) else {
        return;
    };
    let grads = push_step_backward(&base, &w, None).expect("optimal step");
    let keys = active_keys(&base);
    let loss = |r: &StepResult| r.mesh_out.vertices().iter().zip(&w).map(|(a, b)| a.dot(b)).sum::<f64>();
    let probe = |m: &Mesh, s: &DeformStep| -> Option<f64> {
        let r = push_step(m, s, &config).ok()?;
        (active_keys(&r) == keys).then(|| loss(&r))
    };

    // vertices touched by active ordering rows, plus a random sample of the rest
    let mut involved: Vec<usize> = base
        .lp_solution
        .active_set
        .iter()
        .filter_map(|c| match *c {
            ConstraintId::Row(i) => Some(&base.constraints.rows[i]),
            ConstraintId::Bound(_) => None,
        })
        .flat_map(|r| r.coeffs.iter().map(|&(v, _)| v))
        .collect();
    involved.sort_unstable();
    involved.dedup();
    let mut chosen: Vec<usize> = sample_indices(&mut rng, involved.len(), involved.len().min(12))
        .into_iter()
        .map(|k| involved[k])
        .collect();
    chosen.extend(sample_indices(&mut rng, n, 4).into_iter());
    chosen.sort_unstable();
    chosen.dedup();
    let involved = chosen;

    tally.compare(&involved, &grads.d_min, |v| {
        let shift = |d: f64| {
            let mut s = step.clone();
            s.d_min[v] = (s.d_min[v] + d).max(0.0);
            s
        };
        if d_min[v] < h {
            return None;
        }
        Some((probe(&mesh, &shift(h))? - probe(&mesh, &shift(-h))?) / (2.0 * h))
    });

    let analytic: Vec<f64> = grads.vertices.iter().flatten().copied().collect();
    let coords: Vec<usize> = involved.iter().flat_map(|&v| [3 * v, 3 * v + 1, 3 * v + 2]).collect();
    tally.compare(&coords, &analytic, |c| {
        Some((probe(&perturbed(&mesh, c, h), &step)? - probe(&perturbed(&mesh, c, -h), &step)?) / (2.0 * h))
    });
}

/// Chamfer loss after three steps on icosphere(1) against an L-shaped
/// point cloud, differentiated with respect to the first step's `d_min`.
/// Surface samples keep their faces and weights, so the loss is a smooth
/// function of the vertices away from active-set and matching changes.
fn check_end_to_end(tally: &mut Tally, seed: u64, h: f64) {
    let mesh = make_icosphere(1).expect("small subdivision");
    let config = PushConfig::default().resolved(&mesh);
    let mut rng = stream_rng(seed, 5);
    let n = mesh.num_vertices();
    let steps: Vec<DeformStep> = (0..3)
        .map(|_| {
            let dir = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            DeformStep::new(dir, (0..n).map(|_| rng.random_range(0.0..0.8)).collect())
        })
        .collect();
    let target = sample_surface(&fixtures::l_shape(), 300, seed).expect("valid fixture").points;
    let samples = sample_surface(&mesh, 300, seed.wrapping_add(1)).expect("valid mesh");

    let Ok((out, tape)) = deform(&mesh, &steps, &config) else {
        return;
    };
    let points = samples.reevaluate(&out);
    let (_, point_grads) = chamfer_distance(&points, &target).expect("nonempty");
    let mut grad_mesh = vec![Vec3::zeros(); n];
    samples.scatter_gradient(&out, &point_grads, &mut grad_mesh);
    let grads = deform_backward(&steps, &tape, &grad_mesh).expect("optimal steps");
    let base_keys: Vec<_> = tape.iter().map(active_keys).collect();
    let base_match = assignments(&points, &target);

    let probe = |s: &[DeformStep]| -> Option<f64> {
        let (m, t) = deform(&mesh, s, &config).ok()?;
        let keys: Vec<_> = t.iter().map(active_keys).collect();
        let p = samples.reevaluate(&m);
        (keys == base_keys && assignments(&p, &target) == base_match)
            .then(|| chamfer_distance(&p, &target).expect("nonempty").0)
    };
    let coords: Vec<usize> = (0..n).collect();
    tally.compare(&coords, &grads.d_min[0], |v| {
        if steps[0].d_min[v] < h {
            return None;
        }
        let shift = |d: f64| {
            let mut s = steps.clone();
            s[0].d_min[v] += d;
            s
        };
        Some((probe(&shift(h))? - probe(&shift(-h))?) / (2.0 * h))
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selector_names_round_trip() {
        for op in GradcheckOp::ALL {
            assert_eq!(op.name().parse::<GradcheckOp>().unwrap(), op);
        }
        assert!("nope".parse::<GradcheckOp>().is_err());
    }

    #[test]
    fn cheap_checks_pass() {
        for op in [GradcheckOp::Laplacian, GradcheckOp::Crease, GradcheckOp::Chamfer, GradcheckOp::Lp] {
            let r = gradcheck(op, 1, 1e-6);
            assert!(r.passed, "{r:?}");
        }
    }
}
