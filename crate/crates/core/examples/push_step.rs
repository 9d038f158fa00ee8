//! One pushing step on the stacked-triangle fixture: the lower triangle is
//! asked to rise by 1 and pushes the upper one ahead of it.

use meshpush::lp::enumerate_vertices_bruteforce;
use meshpush::mesh::{fixtures, Vec3};
use meshpush::pushing::{push_step, push_step_backward, DeformStep, PushConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mesh = fixtures::stacked_triangles(0.5);
    let step = DeformStep::new(Vec3::z(), vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
    let config = PushConfig {
        epsilon: Some(0.01),
        verify_output: true,
        ..PushConfig::default()
    };
    let r = push_step(&mesh, &step, &config)?;
    println!("{} pair(s), {} constraint row(s)", r.constraints.pair_count, r.constraints.len());
    println!("d = {:?}", r.d);
    println!("objective {:.12} (LP iterations {})", r.objective(), r.lp_solution.iterations);
    let oracle = enumerate_vertices_bruteforce(&r.backward_ctx.lp)?;
    println!("brute-force objective {:.12}", oracle.objective_value);

    // how does the total height of the upper triangle depend on d_min?
    let mut grad_out = vec![Vec3::zeros(); mesh.num_vertices()];
    for g in &mut grad_out[3..] {
        *g = Vec3::z();
    }
    let grads = push_step_backward(&r, &grad_out, None)?;
    println!("d(sum of upper z) / d d_min = {:?}", grads.d_min);
    Ok(())
}
