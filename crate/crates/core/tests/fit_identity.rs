use meshpush::fit::{fit, FitConfig, FitTarget, Parametrization};
use meshpush::mesh::make_icosphere;

#[test]
fn dense_fit_recovers_shrunken_sphere() {
    // the base mesh starts at half the target's size
    let target = FitTarget::Mesh(make_icosphere(2).unwrap());
    let config = FitConfig {
        iterations: 200,
        base_scale: 0.5,
        surface_samples: 500,
        target_samples: 500,
        ..FitConfig::default()
    };
    let (_, report) = fit(&target, &config).unwrap();
    assert!(
        report.final_chamfer < 0.1 * report.initial_chamfer,
        "chamfer {} -> {}",
        report.initial_chamfer,
        report.final_chamfer
    );
    assert_eq!(report.loss_curve.len(), 200);
}

#[test]
fn pushing_fit_never_intersects() {
    let target = FitTarget::Mesh(meshpush::mesh::fixtures::l_shape());
    let config = FitConfig {
        iterations: 40,
        parametrization: Parametrization::Pushing,
        subdivisions: 1,
        surface_samples: 300,
        target_samples: 300,
        seed: 5,
        ..FitConfig::default()
    };
    let (_, report) = fit(&target, &config).unwrap();
    assert_eq!(report.intersecting_count, 0);
    assert!(report.final_chamfer < report.initial_chamfer);
}

#[test]
fn fit_is_deterministic() {
    let target = FitTarget::Mesh(meshpush::mesh::fixtures::l_shape());
    let config = FitConfig {
        iterations: 30,
        surface_samples: 200,
        target_samples: 200,
        seed: 9,
        ..FitConfig::default()
    };
    let (a, ra) = fit(&target, &config).unwrap();
    let (b, rb) = fit(&target, &config).unwrap();
    assert_eq!(a, b);
    assert_eq!(ra.loss_curve, rb.loss_curve);
}
