//! Chamfer fitting of a sphere to a target shape, with vertices either free
//! (dense offsets) or produced by a sequence of pushing steps.

mod adam;
mod chamfer;
mod gradcheck;
mod sampling;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{count_intersecting_faces, default_tolerance};
use crate::mesh::{crease_energy, laplacian_energy, make_icosphere, Mesh, MeshError, Vec3};
use crate::pushing::{deform, deform_backward, DeformError, DeformStep, PushConfig};

pub use adam::Adam;
pub use chamfer::{chamfer_distance, NearestNeighbors};
pub use gradcheck::{gradcheck, GradcheckOp, GradcheckReport};
pub use sampling::{sample_surface, SurfaceSamples};

pub(crate) use sampling::{sample_surface_with, stream_rng};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("mesh has zero surface area")]
    ZeroAreaMesh,
    #[error("invalid fit configuration: {0}")]
    InvalidConfig(String),
    #[error("loss diverged at iteration {iteration}: {loss} (minimum so far {min_seen})")]
    NonFiniteLoss { iteration: usize, loss: f64, min_seen: f64 },
    #[error("iteration {iteration}: {source}")]
    Deform {
        iteration: usize,
        #[source]
        source: DeformError,
    },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("pushing fit produced {count} intersecting faces")]
    IntersectionsAfterPushing { count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parametrization {
    Dense,
    Pushing,
}

impl fmt::Display for Parametrization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Parametrization::Dense => "dense",
            Parametrization::Pushing => "pushing",
        })
    }
}

impl FromStr for Parametrization {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dense" => Ok(Parametrization::Dense),
            "pushing" => Ok(Parametrization::Pushing),
            other => Err(format!("unknown parametrization '{other}' (expected dense or pushing)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitConfig {
    pub iterations: usize,
    pub step_size: f64,
    pub lambda_laplacian: f64,
    pub lambda_crease: f64,
    /// Points drawn from the current mesh each iteration.
    pub surface_samples: usize,
    /// Points drawn once from a target mesh.
    pub target_samples: usize,
    pub seed: u64,
    pub parametrization: Parametrization,
    /// Number of pushing steps.
    pub n_steps: usize,
    /// Subdivision level of the base sphere.
    pub subdivisions: u32,
    /// Base sphere size relative to the target bounding box.
    pub base_scale: f64,
    /// Initial `d_min` of every pushing step is `softplus(initial_raw_dmin)`.
    pub initial_raw_dmin: f64,
    pub push: PushConfig,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            iterations: 200,
            step_size: 1e-2,
            lambda_laplacian: 0.0,
            lambda_crease: 0.0,
            surface_samples: 1000,
            target_samples: 1000,
            seed: 0,
            parametrization: Parametrization::Dense,
            n_steps: 6,
            subdivisions: 2,
            base_scale: 1.0,
            initial_raw_dmin: -2.0,
            push: PushConfig::default(),
        }
    }
}

impl FitConfig {
    fn validate(&self) -> Result<(), FitError> {
        let bad = |m: &str| Err(FitError::InvalidConfig(m.into()));
        if self.iterations < 1 {
            return bad("iterations must be at least 1");
        }
        if self.surface_samples < 16 || self.target_samples < 16 {
            return bad("surface_samples and target_samples must be at least 16");
        }
        if !(self.step_size > 0.0) || !self.step_size.is_finite() {
            return bad("step_size must be positive");
        }
        if !(self.lambda_laplacian >= 0.0 && self.lambda_crease >= 0.0) {
            return bad("regularizer weights must be non-negative");
        }
        if !(self.base_scale > 0.0) || !self.base_scale.is_finite() {
            return bad("base_scale must be positive");
        }
        if self.parametrization == Parametrization::Pushing && self.n_steps == 0 {
            return bad("pushing needs at least one step");
        }
        Ok(())
    }
}

/// What to fit: a mesh (sampled once) or a fixed point set.
#[derive(Debug, Clone)]
pub enum FitTarget {
    Mesh(Mesh),
    Points(Vec<Vec3>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LossPoint {
    pub iteration: usize,
    pub loss: f64,
    pub chamfer: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub schema_version: u32,
    pub parametrization: Parametrization,
    pub loss_curve: Vec<LossPoint>,
    /// Chamfer of the base sphere, on the evaluation samples.
    pub initial_chamfer: f64,
    /// Chamfer of the fitted mesh, on the evaluation samples.
    pub final_chamfer: f64,
    pub intersecting_count: usize,
    pub intersecting_fraction: f64,
    pub wall_time: f64,
    pub config: FitConfig,
}

/// Sample streams: per-iteration draws use the iteration number.
const TARGET_STREAM: u64 = u64::MAX;
const EVAL_STREAM: u64 = u64::MAX - 1;
const INIT_STREAM: u64 = u64::MAX - 2;

fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Icosphere stretched to the bounding box of `points`, shrunk by `scale`
/// about the box center.
pub fn base_mesh(points: &[Vec3], subdivisions: u32, scale: f64) -> Result<Mesh, FitError> {
    if points.is_empty() {
        return Err(FitError::EmptyPointSet);
    }
    let lo = points.iter().fold(points[0], |m, p| m.inf(p));
    let hi = points.iter().fold(points[0], |m, p| m.sup(p));
    let center = (lo + hi) / 2.0;
    let half = (hi - lo) / 2.0 * scale;
    let half = half.map(|h| if h > 0.0 { h } else { 1e-3 * (hi - lo).amax().max(1.0) });
    Ok(make_icosphere(subdivisions)?.transformed(half, center))
}

/// Free parameters and the mesh they produce.
struct Model<'a> {
    base: &'a Mesh,
    config: &'a FitConfig,
}

struct Forward {
    mesh: Mesh,
    steps: Vec<DeformStep>,
    tape: Vec<crate::pushing::StepResult>,
}

impl Model<'_> {
    fn n_vertices(&self) -> usize {
        self.base.num_vertices()
    }

    fn step_len(&self) -> usize {
        3 + self.n_vertices()
    }

    fn initial_params(&self) -> Vec<f64> {
        match self.config.parametrization {
            Parametrization::Dense => vec![0.0; 3 * self.n_vertices()],
            Parametrization::Pushing => {
                use rand::Rng;
                let mut rng = stream_rng(self.config.seed, INIT_STREAM);
                let axes = [Vec3::x(), -Vec3::x(), Vec3::y(), -Vec3::y(), Vec3::z(), -Vec3::z()];
                let mut params = Vec::with_capacity(self.config.n_steps * self.step_len());
                for s in 0..self.config.n_steps {
                    let a = axes[s % axes.len()];
                    for c in 0..3 {
                        params.push(a[c] + 0.05 * (rng.random::<f64>() - 0.5));
                    }
                    params.extend(std::iter::repeat_n(self.config.initial_raw_dmin, self.n_vertices()));
                }
                params
            }
        }
    }

    fn forward(&self, params: &[f64], iteration: usize) -> Result<Forward, FitError> {
        match self.config.parametrization {
            Parametrization::Dense => {
                let vertices = self
                    .base
                    .vertices()
                    .iter()
                    .enumerate()
                    .map(|(v, p)| p + Vec3::new(params[3 * v], params[3 * v + 1], params[3 * v + 2]))
                    .collect();
                Ok(Forward {
                    mesh: self.base.with_vertices(vertices),
                    steps: Vec::new(),
                    tape: Vec::new(),
                })
            }
            Parametrization::Pushing => {
                let steps: Vec<DeformStep> = params
                    .chunks(self.step_len())
                    .map(|chunk| {
                        DeformStep::new(
                            Vec3::new(chunk[0], chunk[1], chunk[2]),
                            chunk[3..].iter().map(|&r| softplus(r)).collect(),
                        )
                    })
                    .collect();
                let (mesh, tape) = deform(self.base, &steps, &self.config.push)
                    .map_err(|source| FitError::Deform { iteration, source })?;
                Ok(Forward { mesh, steps, tape })
            }
        }
    }

    fn backward(&self, params: &[f64], fwd: &Forward, grad_mesh: &[Vec3], iteration: usize) -> Result<Vec<f64>, FitError> {
        match self.config.parametrization {
            Parametrization::Dense => Ok(grad_mesh.iter().flat_map(|g| [g.x, g.y, g.z]).collect()),
            Parametrization::Pushing => {
                let grads = deform_backward(&fwd.steps, &fwd.tape, grad_mesh)
                    .map_err(|source| FitError::Deform { iteration, source })?;
                let mut out = Vec::with_capacity(params.len());
                for (s, chunk) in params.chunks(self.step_len()).enumerate() {
                    out.extend(grads.directions[s]);
                    out.extend(chunk[3..].iter().zip(&grads.d_min[s]).map(|(&r, g)| g * sigmoid(r)));
                }
                Ok(out)
            }
        }
    }
}

fn regularizers(mesh: &Mesh, config: &FitConfig, grad: &mut [Vec3]) -> Result<f64, FitError> {
    let mut total = 0.0;
    if config.lambda_laplacian > 0.0 {
        let (e, g) = laplacian_energy(mesh)?;
        total += config.lambda_laplacian * e;
        grad.iter_mut().zip(&g).for_each(|(a, b)| *a += config.lambda_laplacian * b);
    }
    if config.lambda_crease > 0.0 {
        let (e, g) = crease_energy(mesh)?;
        total += config.lambda_crease * e;
        grad.iter_mut().zip(&g).for_each(|(a, b)| *a += config.lambda_crease * b);
    }
    Ok(total)
}

/// Fits the base sphere to `target` by gradient descent on
/// `chamfer + lambda_lap * laplacian + lambda_crease * crease`.
pub fn fit(target: &FitTarget, config: &FitConfig) -> Result<(Mesh, FitReport), FitError> {
    let started = Instant::now();
    config.validate()?;
    let target_points = match target {
        FitTarget::Mesh(m) => {
            sample_surface_with(m, config.target_samples, &mut stream_rng(config.seed, TARGET_STREAM))?.points
        }
        FitTarget::Points(p) => p.clone(),
    };
    if target_points.is_empty() {
        return Err(FitError::EmptyPointSet);
    }
    let base = base_mesh(&target_points, config.subdivisions, config.base_scale)?;
    let model = Model { base: &base, config };

    let evaluate = |mesh: &Mesh| -> Result<f64, FitError> {
        let samples = sample_surface_with(mesh, config.surface_samples, &mut stream_rng(config.seed, EVAL_STREAM))?;
        Ok(chamfer_distance(&samples.points, &target_points)?.0)
    };

    let mut params = model.initial_params();
    let initial_chamfer = evaluate(&model.forward(&params, 0)?.mesh)?;
    let mut opt = Adam::new(params.len(), config.step_size);
    let mut loss_curve = Vec::with_capacity(config.iterations);
    let mut min_seen = f64::INFINITY;

    for iteration in 0..config.iterations {
        let fwd = model.forward(&params, iteration)?;
        let samples = sample_surface_with(
            &fwd.mesh,
            config.surface_samples,
            &mut stream_rng(config.seed, iteration as u64),
        )?;
        let (chamfer, point_grads) = chamfer_distance(&samples.points, &target_points)?;
        let mut grad_mesh = vec![Vec3::zeros(); fwd.mesh.num_vertices()];
        samples.scatter_gradient(&fwd.mesh, &point_grads, &mut grad_mesh);
        let loss = chamfer + regularizers(&fwd.mesh, config, &mut grad_mesh)?;

        if !loss.is_finite() || loss > 10.0 * min_seen {
            return Err(FitError::NonFiniteLoss {
                iteration,
                loss,
                min_seen,
            });
        }
        min_seen = min_seen.min(loss);
        loss_curve.push(LossPoint {
            iteration,
            loss,
            chamfer,
        });

        let grads = model.backward(&params, &fwd, &grad_mesh, iteration)?;
        opt.step(&mut params, &grads);
    }

    let fitted = model.forward(&params, config.iterations)?.mesh;
    let final_chamfer = evaluate(&fitted)?;
    let report = count_intersecting_faces(&fitted, default_tolerance(&fitted));
    if config.parametrization == Parametrization::Pushing && report.count > 0 {
        return Err(FitError::IntersectionsAfterPushing { count: report.count });
    }
    let fit_report = FitReport {
        schema_version: REPORT_SCHEMA_VERSION,
        parametrization: config.parametrization,
        loss_curve,
        initial_chamfer,
        final_chamfer,
        intersecting_count: report.count,
        intersecting_fraction: report.fraction,
        wall_time: started.elapsed().as_secs_f64(),
        config: config.clone(),
    };
    Ok((fitted, fit_report))
}
