//! Fit a sphere to the concave L-shaped prism with both parametrizations
//! and compare the Chamfer reduction and the fraction of intersecting faces.
//!
//! Pass an iteration count as the first argument (default 150).

use meshpush::fit::{fit, FitConfig, FitTarget, Parametrization};
use meshpush::mesh::fixtures;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let iterations = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(150);
    let target = FitTarget::Mesh(fixtures::l_shape());
    for param in [Parametrization::Dense, Parametrization::Pushing] {
        let config = FitConfig {
            iterations,
            parametrization: param,
            seed: 3,
            ..FitConfig::default()
        };
        let (_, report) = fit(&target, &config)?;
        println!(
            "{param:<8} chamfer {:.4} -> {:.4} ({:>5.1}%), intersecting faces {:>5.1}%, {:.1}s",
            report.initial_chamfer,
            report.final_chamfer,
            100.0 * report.final_chamfer / report.initial_chamfer,
            100.0 * report.intersecting_fraction,
            report.wall_time
        );
    }
    Ok(())
}
