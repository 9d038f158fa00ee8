//! Solve a small LP with the simplex solver, check it against brute-force
//! vertex enumeration and backpropagate through the active set.

use meshpush::lp::{enumerate_vertices_bruteforce, lp_backward, solve_lp, LinearProgram, LpStatus, SparseRow};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // min x0 + 2 x1  s.t.  x0 + x1 >= 1,  x0 - x1 >= -0.5,  x >= 0
    let lp = LinearProgram::new(
        vec![1.0, 2.0],
        vec![0.0, 0.0],
        vec![
            SparseRow::new(vec![(0, 1.0), (1, 1.0)], 1.0),
            SparseRow::new(vec![(0, 1.0), (1, -1.0)], -0.5),
        ],
    )?;
    let sol = solve_lp(&lp);
    let oracle = enumerate_vertices_bruteforce(&lp)?;
    println!("simplex:     x = {:?}, objective {}, {} pivots", sol.d, sol.objective_value, sol.iterations);
    println!("brute force: x = {:?}, objective {}", oracle.d, oracle.objective_value);
    println!("tight: {:?}", sol.tight_constraints(&lp));

    // gradient of the objective with respect to the problem data
    let grads = lp_backward(&lp, &sol, lp.objective())?;
    println!("d objective / d rhs         = {:?}", grads.rhs);
    println!("d objective / d lower bound = {:?}", grads.lower_bounds);

    let infeasible = LinearProgram::min_sum(
        vec![0.0],
        vec![SparseRow::new(vec![(0, -1.0)], 1.0)],
    )?;
    assert_eq!(solve_lp(&infeasible).status, LpStatus::Infeasible);
    println!("-x >= 1 with x >= 0: {:?}", solve_lp(&infeasible).status);
    Ok(())
}
