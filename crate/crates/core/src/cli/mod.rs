//! The `meshpush` command line.
//!
//! Exit codes: 0 on success, 1 on runtime errors, 2 on usage errors. Every
//! command that writes an artifact also writes a run manifest next to it
//! (`<artifact>.manifest.json`, or the path given by `--manifest`).

mod manifest;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::fit::{fit, gradcheck, FitConfig, FitTarget, GradcheckOp, Parametrization};
use crate::geometry::{count_intersecting_faces, count_intersecting_faces_exhaustive, default_tolerance};
use crate::mesh::{load_obj_path, make_icosphere, save_obj_path, Mesh, MeshError, Vec3, MAX_SUBDIVISIONS};
use crate::pushing::{push_step, DeformStep, PushConfig, PushError};

pub use manifest::RunManifest;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "meshpush", version, about = "Intersection-free mesh deformation by pushing faces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write an icosphere as OBJ.
    Sphere(SphereArgs),
    /// Apply one pushing step to a mesh.
    Push(PushArgs),
    /// Count self-intersecting faces.
    Check(CheckArgs),
    /// Fit a sphere to a target mesh.
    Fit(FitArgs),
    /// Compare analytic gradients with finite differences.
    Gradcheck(GradcheckArgs),
}

#[derive(Debug, Args)]
pub struct SphereArgs {
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(0..=MAX_SUBDIVISIONS as i64))]
    pub subdiv: u32,
    #[arg(short, long)]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PushArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    /// Motion direction as `x,y,z` (normalized internally).
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub direction: Vec3,
    /// A scalar applied to every vertex, or a JSON array with one value per vertex.
    #[arg(long, default_value = "0")]
    pub dmin: String,
    /// Buffer distance; defaults to 1e-3 times the bounding-box diagonal.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(short, long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Fail if the intersection oracle finds any intersecting face afterwards.
    #[arg(long)]
    pub verify: bool,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Exit 1 when any face intersects.
    #[arg(long)]
    pub fail_on_intersect: bool,
    /// Test every face pair instead of using the broad phase.
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long, default_value = "pushing")]
    pub param: Parametrization,
    #[arg(long, default_value_t = 6)]
    pub n_steps: usize,
    #[arg(long, default_value_t = 500)]
    pub iterations: usize,
    #[arg(long, default_value_t = 1e-2)]
    pub step_size: f64,
    #[arg(long, default_value_t = 0.0)]
    pub lambda_lap: f64,
    #[arg(long, default_value_t = 0.0)]
    pub lambda_crease: f64,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 2)]
    pub subdiv: u32,
    #[arg(long, default_value_t = 1.0)]
    pub base_scale: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    /// One of laplacian, crease, chamfer, lp, push_dmin, end_to_end, or all.
    #[arg(long, default_value = "all", value_parser = parse_selector)]
    pub op: Selector,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    pub probe: f64,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy)]
pub enum Selector {
    All,
    One(GradcheckOp),
}

fn parse_selector(s: &str) -> Result<Selector, String> {
    if s == "all" {
        Ok(Selector::All)
    } else {
        s.parse().map(Selector::One)
    }
}

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z but got '{s}'"));
    }
    let mut v = Vec3::zeros();
    for (i, p) in parts.iter().enumerate() {
        v[i] = p.parse().map_err(|_| format!("'{p}' is not a number"))?;
    }
    Ok(v)
}

/// A runtime failure, reported on stderr.
struct Failure {
    message: String,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { message: e.to_string() }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let started = Instant::now();
    let mut manifest = RunManifest::new(&cli.command);
    let (code, manifest_path) = match &cli.command {
        Command::Sphere(a) => (finish(cmd_sphere(a, &mut manifest), &mut manifest), manifest_for(&a.manifest, Some(&a.out))),
        Command::Push(a) => (finish(cmd_push(a, &mut manifest), &mut manifest), manifest_for(&a.manifest, Some(&a.out))),
        Command::Check(a) => (cmd_check(a, &mut manifest), manifest_for(&a.manifest, a.report.as_ref())),
        Command::Fit(a) => (finish(cmd_fit(a, &mut manifest), &mut manifest), manifest_for(&a.manifest, Some(&a.out))),
        Command::Gradcheck(a) => (cmd_gradcheck(a, &mut manifest), manifest_for(&a.manifest, a.report.as_ref())),
    };
    manifest.wall_time = started.elapsed().as_secs_f64();
    if code == 2 {
        return code;
    }
    if let Some(path) = manifest_path {
        if let Err(e) = write_json(&path, &manifest) {
            eprintln!("error: cannot write manifest {}: {e}", path.display());
            return 1;
        }
    }
    code
}

fn manifest_for(explicit: &Option<PathBuf>, artifact: Option<&PathBuf>) -> Option<PathBuf> {
    explicit.clone().or_else(|| {
        artifact.map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        })
    })
}

fn finish(result: Result<i32, Failure>, manifest: &mut RunManifest) -> i32 {
    result.unwrap_or_else(|f| {
        eprintln!("error: {}", f.message);
        manifest.error.get_or_insert(f.message);
        1
    })
}

fn write_json(path: &Path, value: &impl Serialize) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)
}

fn load_mesh(path: &Path) -> Result<Mesh, Failure> {
    let loaded = load_obj_path(path).map_err(|e| Failure {
        message: format!("cannot load {}: {e}", path.display()),
    })?;
    Ok(loaded.mesh)
}

fn cmd_sphere(a: &SphereArgs, manifest: &mut RunManifest) -> Result<i32, Failure> {
    manifest.config = json!({ "subdiv": a.subdiv });
    manifest.outputs.push(a.out.display().to_string());
    let mesh = match make_icosphere(a.subdiv) {
        Ok(m) => m,
        Err(e @ MeshError::SubdivisionTooLarge { .. }) => {
            eprintln!("error: {e}");
            return Ok(2);
        }
        Err(e) => return Err(e.into()),
    };
    save_obj_path(&mesh, &a.out)?;
    println!("wrote {} ({} vertices, {} faces)", a.out.display(), mesh.num_vertices(), mesh.num_faces());
    Ok(0)
}

fn parse_dmin(arg: &str, n: usize) -> Result<Vec<f64>, Failure> {
    if let Ok(x) = arg.parse::<f64>() {
        return Ok(vec![x; n]);
    }
    let text = std::fs::read_to_string(arg).map_err(|e| Failure {
        message: format!("--dmin is neither a number nor a readable file ({arg}): {e}"),
    })?;
    let values: Vec<f64> = serde_json::from_str(&text).map_err(|e| Failure {
        message: format!("{arg}: expected a JSON array of numbers: {e}"),
    })?;
    if values.len() != n {
        return Err(Failure {
            message: format!("{arg}: {} values for {n} vertices", values.len()),
        });
    }
    Ok(values)
}

#[derive(Debug, Serialize)]
struct PushReport {
    schema_version: u32,
    pair_count: Option<usize>,
    constraint_count: Option<usize>,
    skipped_degenerate: Option<usize>,
    epsilon: Option<f64>,
    objective: Option<f64>,
    lp_status: Option<String>,
    lp_iterations: Option<usize>,
    intersecting_fraction_after: Option<f64>,
    wall_time: f64,
    error: Option<String>,
    error_kind: Option<String>,
}

fn cmd_push(a: &PushArgs, manifest: &mut RunManifest) -> Result<i32, Failure> {
    manifest.config = json!({
        "direction": [a.direction.x, a.direction.y, a.direction.z],
        "dmin": a.dmin,
        "epsilon": a.epsilon,
        "verify": a.verify,
    });
    manifest.inputs.push(a.mesh.display().to_string());
    manifest.outputs.push(a.out.display().to_string());
    if let Some(r) = &a.report {
        manifest.outputs.push(r.display().to_string());
    }
    let mesh = load_mesh(&a.mesh)?;
    let d_min = parse_dmin(&a.dmin, mesh.num_vertices())?;
    let config = PushConfig {
        epsilon: a.epsilon,
        verify_output: a.verify,
        ..PushConfig::default()
    };
    let mut report = PushReport {
        schema_version: REPORT_SCHEMA_VERSION,
        pair_count: None,
        constraint_count: None,
        skipped_degenerate: None,
        epsilon: None,
        objective: None,
        lp_status: None,
        lp_iterations: None,
        intersecting_fraction_after: None,
        wall_time: 0.0,
        error: None,
        error_kind: None,
    };
    let started = Instant::now();
    let outcome = push_step(&mesh, &DeformStep::new(a.direction, d_min), &config);
    let code = match outcome {
        Ok(step) => {
            save_obj_path(&step.mesh_out, &a.out)?;
            let after = count_intersecting_faces(&step.mesh_out, default_tolerance(&step.mesh_out));
            report.pair_count = Some(step.constraints.pair_count);
            report.constraint_count = Some(step.constraints.len());
            report.skipped_degenerate = Some(step.constraints.skipped_degenerate);
            report.epsilon = Some(step.constraints.epsilon);
            report.objective = Some(step.objective());
            report.lp_status = Some(format!("{:?}", step.lp_solution.status));
            report.lp_iterations = Some(step.lp_solution.iterations);
            report.intersecting_fraction_after = Some(after.fraction);
            println!(
                "pushed {} pairs, {} constraints, objective {}",
                step.constraints.pair_count,
                step.constraints.len(),
                step.objective()
            );
            0
        }
        Err(e) => {
            if let PushError::PushInfeasible {
                pair_count,
                constraint_count,
            } = e
            {
                report.pair_count = Some(pair_count);
                report.constraint_count = Some(constraint_count);
                report.lp_status = Some("Infeasible".into());
            }
            if let PushError::LpNotSolved(status) = e {
                report.lp_status = Some(format!("{status:?}"));
            }
            report.error = Some(e.to_string());
            report.error_kind = Some(e.kind().into());
            manifest.error = Some(e.to_string());
            eprintln!("error: {e}");
            1
        }
    };
    report.wall_time = started.elapsed().as_secs_f64();
    match &a.report {
        Some(path) => write_json(path, &report)?,
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(code)
}

#[derive(Debug, Serialize)]
struct CheckReport {
    schema_version: u32,
    n_faces: usize,
    intersecting_count: usize,
    fraction: f64,
    pairs_tested: usize,
    wall_time: f64,
}

fn cmd_check(a: &CheckArgs, manifest: &mut RunManifest) -> i32 {
    manifest.config = json!({ "fail_on_intersect": a.fail_on_intersect, "exhaustive": a.exhaustive });
    manifest.inputs.push(a.mesh.display().to_string());
    if let Some(r) = &a.report {
        manifest.outputs.push(r.display().to_string());
    }
    let result = (|| -> Result<i32, Failure> {
        let started = Instant::now();
        let mesh = load_mesh(&a.mesh)?;
        let tol = default_tolerance(&mesh);
        let r = if a.exhaustive {
            count_intersecting_faces_exhaustive(&mesh, tol)
        } else {
            count_intersecting_faces(&mesh, tol)
        };
        let report = CheckReport {
            schema_version: REPORT_SCHEMA_VERSION,
            n_faces: mesh.num_faces(),
            intersecting_count: r.count,
            fraction: r.fraction,
            pairs_tested: r.pairs_tested,
            wall_time: started.elapsed().as_secs_f64(),
        };
        match &a.report {
            Some(path) => {
                write_json(path, &report)?;
                println!("{} of {} faces intersect (fraction {})", r.count, report.n_faces, r.fraction);
            }
            None => println!("{}", serde_json::to_string_pretty(&report)?),
        }
        Ok(if a.fail_on_intersect && r.count > 0 { 1 } else { 0 })
    })();
    finish(result, manifest)
}

fn cmd_fit(a: &FitArgs, manifest: &mut RunManifest) -> Result<i32, Failure> {
    let config = FitConfig {
        iterations: a.iterations,
        step_size: a.step_size,
        lambda_laplacian: a.lambda_lap,
        lambda_crease: a.lambda_crease,
        surface_samples: a.samples,
        target_samples: a.samples,
        seed: a.seed,
        parametrization: a.param,
        n_steps: a.n_steps,
        subdivisions: a.subdiv,
        base_scale: a.base_scale,
        ..FitConfig::default()
    };
    manifest.config = serde_json::to_value(&config)?;
    manifest.seed = Some(a.seed);
    manifest.inputs.push(a.target.display().to_string());
    manifest.outputs.push(a.out.display().to_string());
    if let Some(r) = &a.report {
        manifest.outputs.push(r.display().to_string());
    }
    let target = load_mesh(&a.target)?;
    match fit(&FitTarget::Mesh(target), &config) {
        Ok((mesh, report)) => {
            save_obj_path(&mesh, &a.out)?;
            if let Some(path) = &a.report {
                write_json(path, &report)?;
            }
            println!(
                "{} fit: chamfer {} -> {}, intersecting fraction {}",
                report.parametrization, report.initial_chamfer, report.final_chamfer, report.intersecting_fraction
            );
            Ok(0)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_gradcheck(a: &GradcheckArgs, manifest: &mut RunManifest) -> i32 {
    manifest.config = json!({ "op": match a.op { Selector::All => "all".to_string(), Selector::One(op) => op.to_string() }, "probe": a.probe });
    manifest.seed = Some(a.seed);
    let ops: Vec<GradcheckOp> = match a.op {
        Selector::All => GradcheckOp::ALL.to_vec(),
        Selector::One(op) => vec![op],
    };
    let reports: Vec<_> = ops.iter().map(|&op| gradcheck(op, a.seed, a.probe)).collect();
    let mut out = std::io::stdout().lock();
    for r in &reports {
        let _ = writeln!(
            out,
            "{:<11} max_rel_error {:.3e} (threshold {:.0e}) checked {} excluded {} {}",
            r.op.name(),
            r.max_rel_error,
            r.threshold,
            r.checked,
            r.excluded,
            if r.passed { "PASS" } else { "FAIL" }
        );
    }
    if let Some(path) = &a.report {
        manifest.outputs.push(path.display().to_string());
        let body = json!({ "schema_version": REPORT_SCHEMA_VERSION, "results": reports });
        if let Err(e) = write_json(path, &body) {
            eprintln!("error: {e}");
            return 1;
        }
    }
    if reports.iter().all(|r| r.passed) {
        0
    } else {
        manifest.error = Some("gradient check above threshold".into());
        1
    }
}
