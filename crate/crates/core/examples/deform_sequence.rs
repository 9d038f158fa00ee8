//! A sequence of random pushing steps on an icosphere. Every intermediate
//! mesh is checked with the exhaustive intersection oracle.

use meshpush::geometry::{count_intersecting_faces_exhaustive, default_tolerance};
use meshpush::mesh::{make_icosphere, Vec3};
use meshpush::pushing::{deform, deform_backward, DeformStep, PushConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, UnitSphere};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mesh = make_icosphere(2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let normal = Normal::<f64>::new(0.0, 0.3)?;
    let steps: Vec<DeformStep> = (0..5)
        .map(|_| {
            let u: [f64; 3] = UnitSphere.sample(&mut rng);
            let d_min = (0..mesh.num_vertices())
                .map(|_| if rng.random::<f64>() < 0.3 { normal.sample(&mut rng).abs() } else { 0.0 })
                .collect();
            DeformStep::new(Vec3::from(u), d_min)
        })
        .collect();

    let (out, tape) = deform(&mesh, &steps, &PushConfig::default())?;
    for (i, s) in tape.iter().enumerate() {
        let m = &s.mesh_out;
        let check = count_intersecting_faces_exhaustive(m, default_tolerance(m));
        let pushed = s.d.iter().zip(&steps[i].d_min).filter(|(d, lo)| **d > **lo + 1e-12).count();
        println!(
            "step {i}: {:>3} rows, {:>3} vertices pushed beyond d_min, objective {:8.4}, intersecting {}",
            s.constraints.len(),
            pushed,
            s.objective(),
            check.count
        );
    }

    // gradient of the mean x coordinate of the final mesh
    let n = out.num_vertices() as f64;
    let grad = vec![Vec3::new(1.0 / n, 0.0, 0.0); out.num_vertices()];
    let g = deform_backward(&steps, &tape, &grad)?;
    for (i, dir) in g.directions.iter().enumerate() {
        println!("d(mean x) / d direction[{i}] = [{:+.4}, {:+.4}, {:+.4}]", dir[0], dir[1], dir[2]);
    }
    Ok(())
}
