//! Acceptance suite. Each criterion runs on its own thread and reports one
//! PASS/FAIL line; the process exits non-zero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use meshpush::fit::{fit, gradcheck, FitConfig, FitTarget, GradcheckOp, Parametrization};
use meshpush::geometry::{
    broad_phase_pairs, clip_triangles, count_intersecting_faces, count_intersecting_faces_exhaustive,
    default_tolerance, orthonormal_basis, project_mesh, Aabb2, Vec2,
};
use meshpush::lp::{enumerate_vertices_bruteforce, solve_lp, LinearProgram, LpStatus, SparseRow};
use meshpush::mesh::{fixtures, make_icosphere, Mesh, Vec3};
use meshpush::pushing::{deform, push_step, DeformStep, PushConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, UnitSphere};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// 100 seeds, icosphere(2), 5 random steps each; every intermediate mesh
/// is checked by the exhaustive oracle.
fn criterion_1() -> Outcome {
    let sphere = make_icosphere(2).unwrap();
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let mut meshes = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let steps: Vec<DeformStep> = (0..5)
            .map(|_| {
                let u: [f64; 3] = UnitSphere.sample(&mut rng);
                let d_min = (0..sphere.num_vertices())
                    .map(|_| 0.1 * rng.sample::<f64, _>(StandardNormal).abs())
                    .collect();
                DeformStep::new(Vec3::from(u), d_min)
            })
            .collect();
        match deform(&sphere, &steps, &PushConfig::default()) {
            Ok((_, tape)) => {
                for s in &tape {
                    let m = &s.mesh_out;
                    let r = count_intersecting_faces_exhaustive(m, default_tolerance(m));
                    worst = worst.max(r.fraction);
                    meshes += 1;
                }
            }
            Err(e) => failures.push(format!("seed {seed}: {e}")),
        }
    }
    outcome(
        worst == 0.0 && failures.is_empty(),
        format!(
            "{meshes} meshes checked, max intersecting fraction {worst}, {} failed runs{}",
            failures.len(),
            failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
        ),
    )
}

fn l_fit(param: Parametrization, seed: u64) -> meshpush::fit::FitReport {
    let config = FitConfig {
        iterations: 500,
        parametrization: param,
        n_steps: 6,
        lambda_laplacian: 0.0,
        lambda_crease: 0.0,
        seed,
        ..FitConfig::default()
    };
    fit(&FitTarget::Mesh(fixtures::l_shape()), &config).unwrap().1
}

fn criterion_2() -> Outcome {
    let fractions: Vec<f64> = (0..10).map(|s| l_fit(Parametrization::Dense, s).intersecting_fraction).collect();
    let positive = fractions.iter().filter(|&&f| f > 0.0).count();
    let shown: Vec<String> = fractions.iter().map(|f| format!("{f:.3}")).collect();
    outcome(
        positive >= 9,
        format!("{positive}/10 dense fits intersect, fractions [{}]", shown.join(", ")),
    )
}

/// Random feasible LP around a known feasible point.
fn random_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
    let n = rng.random_range(1..=6usize);
    let m = rng.random_range(0..=10usize);
    let lower: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let x0: Vec<f64> = lower.iter().map(|l| l + rng.random_range(0.0..2.0)).collect();
    let mut rows = Vec::new();
    for _ in 0..m {
        let mut entries = Vec::new();
        for j in 0..n {
            if rng.random_bool(0.7) {
                entries.push((j, rng.random_range(-1.0..1.0)));
            }
        }
        let lhs: f64 = entries.iter().map(|&(j, a)| a * x0[j]).sum();
        rows.push(SparseRow::new(entries, lhs - rng.random_range(0.0..0.5)));
    }
    let c = (0..n).map(|_| rng.random_range(0.1..2.0)).collect();
    LinearProgram::new(c, lower, rows).unwrap()
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut mismatched = 0;
    for _ in 0..200 {
        let lp = random_lp(&mut rng);
        let a = solve_lp(&lp);
        let b = enumerate_vertices_bruteforce(&lp).unwrap();
        if a.status != LpStatus::Optimal || b.status != LpStatus::Optimal {
            mismatched += 1;
            continue;
        }
        worst = worst.max((a.objective_value - b.objective_value).abs());
    }
    let mut status_ok = 0;
    for k in 0..10 {
        let n = 1 + k % 5;
        let t = rng.random_range(-1.0..1.0);
        // x_0 >= t together with x_0 <= t - gap
        let gap = rng.random_range(0.01..1.0);
        let infeasible = LinearProgram::new(
            vec![1.0; n],
            vec![t; n],
            vec![SparseRow::new(vec![(0, -1.0)], gap - t)],
        )
        .unwrap();
        // x_last has negative cost and no upper limit
        let mut c = vec![1.0; n];
        c[n - 1] = -rng.random_range(0.1..2.0);
        let unbounded = LinearProgram::new(
            c,
            vec![0.0; n],
            vec![SparseRow::new(vec![(0, 1.0)], t)],
        )
        .unwrap();
        for (lp, want) in [(infeasible, LpStatus::Infeasible), (unbounded, LpStatus::Unbounded)] {
            let a = solve_lp(&lp).status;
            let b = enumerate_vertices_bruteforce(&lp).unwrap().status;
            if a == want && b == want {
                status_ok += 1;
            }
        }
    }
    outcome(
        worst <= 1e-8 && mismatched == 0 && status_ok == 20,
        format!("200 LPs, max objective gap {worst:.2e}, {mismatched} non-optimal; {status_ok}/20 status cases agree"),
    )
}

fn criterion_4() -> Outcome {
    let mesh = fixtures::stacked_triangles(0.5);
    let step = DeformStep::new(Vec3::z(), vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
    let config = PushConfig {
        epsilon: Some(0.01),
        ..PushConfig::default()
    };
    let r = push_step(&mesh, &step, &config).unwrap();
    let upper_err = r.d[3..].iter().map(|d| (d - 0.51).abs()).fold(0.0, f64::max);
    let obj_err = (r.objective() - 4.53).abs();
    outcome(
        upper_err <= 1e-9 && obj_err <= 1e-9,
        format!("d_upper {:?}, objective {:.12}", &r.d[3..], r.objective()),
    )
}

fn criterion_5() -> Outcome {
    let mut lines = Vec::new();
    let mut all = true;
    for op in GradcheckOp::ALL {
        let mut worst = 0.0f64;
        let (mut checked, mut excluded, mut failed) = (0, 0, 0);
        for seed in 0..50 {
            let r = gradcheck(op, seed, 1e-6);
            worst = worst.max(r.max_rel_error);
            checked += r.checked;
            excluded += r.excluded;
            if !r.passed {
                failed += 1;
            }
        }
        let ok = failed == 0 && worst <= op.threshold() && checked > 0;
        all &= ok;
        lines.push(format!(
            "{} {:.1e}/{:.0e} ({checked} checked, {excluded} excluded)",
            op.name(),
            worst,
            op.threshold()
        ));
    }
    outcome(all, lines.join("; "))
}

fn criterion_6() -> Outcome {
    let r = l_fit(Parametrization::Pushing, 0);
    let ratio = r.final_chamfer / r.initial_chamfer;
    outcome(
        ratio <= 0.5 && r.intersecting_fraction == 0.0,
        format!(
            "chamfer {:.4} -> {:.4} (ratio {ratio:.3}), intersecting fraction {}",
            r.initial_chamfer, r.final_chamfer, r.intersecting_fraction
        ),
    )
}

/// Point-in-triangle by edge orientation signs, for either winding.
fn inside(p: &Vec2, t: &[Vec2; 3]) -> bool {
    let side = |a: &Vec2, b: &Vec2| (b - a).perp(&(p - a));
    let s = [side(&t[0], &t[1]), side(&t[1], &t[2]), side(&t[2], &t[0])];
    s.iter().all(|&x| x >= 0.0) || s.iter().all(|&x| x <= 0.0)
}

/// Jittered-grid Monte Carlo estimate of the area of `t1 ∩ t2`.
fn mc_overlap(t1: &[Vec2; 3], t2: &[Vec2; 3], rng: &mut ChaCha8Rng) -> f64 {
    let b1 = Aabb2::of_points(t1.iter());
    let b2 = Aabb2::of_points(t2.iter());
    let lo = b1.min.sup(&b2.min);
    let hi = b1.max.inf(&b2.max);
    if lo.x >= hi.x || lo.y >= hi.y {
        return 0.0;
    }
    let k = 700;
    let (dx, dy) = ((hi.x - lo.x) / k as f64, (hi.y - lo.y) / k as f64);
    let mut hits = 0usize;
    for i in 0..k {
        for j in 0..k {
            let p = Vec2::new(
                lo.x + (i as f64 + rng.random::<f64>()) * dx,
                lo.y + (j as f64 + rng.random::<f64>()) * dy,
            );
            if inside(&p, t1) && inside(&p, t2) {
                hits += 1;
            }
        }
    }
    hits as f64 * dx * dy
}

fn brute_pairs(mesh: &Mesh, direction: &Vec3) -> Vec<(usize, usize)> {
    let projected = project_mesh(mesh, &orthonormal_basis(direction).unwrap());
    let faces = mesh.faces();
    let boxes: Vec<Aabb2> = faces
        .iter()
        .map(|f| Aabb2::of_points(f.iter().map(|&i| &projected.coords2d[i])))
        .collect();
    let mut pairs = Vec::new();
    for a in 0..faces.len() {
        for b in a + 1..faces.len() {
            if !mesh.faces_share_vertex(a, b) && boxes[a].overlaps(&boxes[b], 0.0) {
                pairs.push((a, b));
            }
        }
    }
    pairs
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let tri = |rng: &mut ChaCha8Rng| {
        [0, 1, 2].map(|_| Vec2::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)))
    };
    let (mut pairs, mut worst, mut zero_bad) = (0, 0.0f64, 0);
    while pairs < 200 {
        let (t1, t2) = (tri(&mut rng), tri(&mut rng));
        let smaller = meshpush::geometry::signed_area(&t1).abs().min(meshpush::geometry::signed_area(&t2).abs());
        if smaller < 0.02 {
            continue;
        }
        let exact = clip_triangles(&t1, &t2, 0.0).map(|p| p.area()).unwrap_or(0.0);
        let mc = mc_overlap(&t1, &t2, &mut rng);
        if exact < 0.05 * smaller {
            // tiny overlaps are too small for a 1% Monte Carlo check
            if exact == 0.0 && mc > 1e-3 * smaller {
                zero_bad += 1;
            }
            continue;
        }
        worst = worst.max((mc - exact).abs() / exact);
        pairs += 1;
    }

    let mut sphere_noisy = make_icosphere(2).unwrap();
    let mut nrng = ChaCha8Rng::seed_from_u64(70);
    let noisy: Vec<Vec3> = sphere_noisy
        .vertices()
        .iter()
        .map(|v| v * (1.0 + 0.6 * (nrng.random::<f64>() - 0.5)))
        .collect();
    sphere_noisy = sphere_noisy.with_vertices(noisy);
    let meshes = [
        fixtures::stacked_triangles(0.5),
        fixtures::two_tetrahedra(),
        fixtures::l_shape(),
        make_icosphere(2).unwrap(),
        sphere_noisy,
    ];
    let directions = [Vec3::z(), Vec3::new(1.0, -2.0, 0.5), Vec3::new(-0.3, 0.1, -1.0)];
    let mut broad_ok = true;
    let mut count_ok = true;
    for m in &meshes {
        for d in &directions {
            let projected = project_mesh(m, &orthonormal_basis(d).unwrap());
            broad_ok &= broad_phase_pairs(&projected, m.faces()) == brute_pairs(m, d);
        }
        let tol = default_tolerance(m);
        let (a, b) = (count_intersecting_faces(m, tol), count_intersecting_faces_exhaustive(m, tol));
        count_ok &= a.intersecting == b.intersecting;
    }
    outcome(
        worst <= 0.01 && zero_bad == 0 && broad_ok && count_ok,
        format!(
            "max clip-vs-MC relative error {worst:.2e} over 200 pairs, {zero_bad} disjoint mismatches; \
             broad phase equals exhaustive: {broad_ok}; intersection counts agree: {count_ok}"
        ),
    )
}

fn strip_timing(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            map.remove("wall_time");
            map.values_mut().for_each(strip_timing);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

fn artifacts_equal(a: &Path, b: &Path) -> bool {
    let (x, y) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    if a.extension().is_some_and(|e| e == "json") {
        let mut x: serde_json::Value = serde_json::from_slice(&x).unwrap();
        let mut y: serde_json::Value = serde_json::from_slice(&y).unwrap();
        strip_timing(&mut x);
        strip_timing(&mut y);
        x == y
    } else {
        x == y
    }
}

fn criterion_8() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_meshpush");
    let fixture = |n: &str| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(n);
    let dir = tempfile::tempdir().unwrap();
    let stacked = fixture("stacked_triangles.obj");
    let dmin = fixture("stacked_dmin.json");
    let l_shape = fixture("l_shape.obj");
    let sphere_in = dir.path().join("sphere_in.obj");
    let status = Command::new(bin).args(["sphere", "--subdiv", "2", "-o"]).arg(&sphere_in).status().unwrap();
    assert!(status.success());

    // (name, arguments before the per-run outputs, output flags, output file names)
    type Case<'a> = (&'a str, Vec<String>, Vec<(&'a str, &'a str)>);
    let s = |p: &Path| p.display().to_string();
    let cases: Vec<Case> = vec![
        ("sphere", vec!["sphere".into(), "--subdiv".into(), "3".into()], vec![("-o", "out.obj")]),
        (
            "push",
            vec![
                "push".into(),
                "--mesh".into(),
                s(&stacked),
                "--direction".into(),
                "0,0,1".into(),
                "--dmin".into(),
                s(&dmin),
                "--epsilon".into(),
                "0.01".into(),
            ],
            vec![("-o", "out.obj"), ("--report", "report.json")],
        ),
        (
            "push-sphere",
            vec![
                "push".into(),
                "--mesh".into(),
                s(&sphere_in),
                "--direction".into(),
                "-0.3,1,0.2".into(),
                "--dmin".into(),
                "0.2".into(),
            ],
            vec![("-o", "out.obj"), ("--report", "report.json")],
        ),
        (
            "check",
            vec!["check".into(), "--mesh".into(), s(&l_shape)],
            vec![("--report", "report.json")],
        ),
        (
            "fit",
            vec![
                "fit".into(),
                "--target".into(),
                s(&l_shape),
                "--param".into(),
                "pushing".into(),
                "--iterations".into(),
                "40".into(),
                "--samples".into(),
                "400".into(),
                "--seed".into(),
                "11".into(),
            ],
            vec![("-o", "out.obj"), ("--report", "report.json")],
        ),
        (
            "gradcheck",
            vec!["gradcheck".into(), "--op".into(), "all".into(), "--seed".into(), "2".into()],
            vec![("--report", "report.json")],
        ),
    ];

    let mut differing = Vec::new();
    for (name, args, outputs) in &cases {
        let mut runs = Vec::new();
        for run in 0..2 {
            let run_dir = dir.path().join(format!("{name}-{run}"));
            std::fs::create_dir(&run_dir).unwrap();
            let mut cmd = Command::new(bin);
            cmd.args(args);
            for (flag, file) in outputs {
                cmd.arg(flag).arg(run_dir.join(file));
            }
            cmd.arg("--manifest").arg(run_dir.join("manifest.json"));
            let out = cmd.output().unwrap();
            if !out.status.success() {
                differing.push(format!("{name} exited {:?}", out.status.code()));
            }
            runs.push(run_dir);
        }
        let mut files: Vec<&str> = outputs.iter().map(|(_, f)| *f).collect();
        files.push("manifest.json");
        for f in files {
            let (a, b) = (runs[0].join(f), runs[1].join(f));
            // the manifest echoes its own per-run paths; compare everything else
            let same = if f == "manifest.json" {
                manifests_equal(&a, &b, &runs[0], &runs[1])
            } else {
                artifacts_equal(&a, &b)
            };
            if !same {
                differing.push(format!("{name}/{f}"));
            }
        }
    }
    outcome(
        differing.is_empty(),
        format!("{} commands run twice; differing artifacts: {:?}", cases.len(), differing),
    )
}

fn manifests_equal(a: &Path, b: &Path, dir_a: &Path, dir_b: &Path) -> bool {
    let read = |p: &Path, dir: &Path| {
        let text = std::fs::read_to_string(p).unwrap().replace(&dir.display().to_string(), "RUN");
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        strip_timing(&mut v);
        v
    };
    read(a, dir_a) == read(b, dir_b)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("non-intersection guarantee", criterion_1),
        ("dense contrast", criterion_2),
        ("LP oracle equivalence", criterion_3),
        ("stacked-triangle golden fixture", criterion_4),
        ("gradient fidelity", criterion_5),
        ("pushing expressiveness", criterion_6),
        ("geometry oracles", criterion_7),
        ("CLI determinism", criterion_8),
    ];
    let results: Vec<(Outcome, f64)> = std::thread::scope(|scope| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, f)| {
                scope.spawn(move || {
                    let t = Instant::now();
                    let r = f();
                    (r, t.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| (outcome(false, "panicked".into()), 0.0)))
            .collect()
    });
    let mut failed = 0;
    for (i, ((name, _), (r, secs))) in criteria.iter().zip(&results).enumerate() {
        println!(
            "criterion {} [{}] {name}: {} ({secs:.1}s)",
            i + 1,
            if r.passed { "PASS" } else { "FAIL" },
            r.detail
        );
        failed += usize::from(!r.passed);
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
