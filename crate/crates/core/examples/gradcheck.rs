//! Finite-difference checks of every differentiable component.

use meshpush::fit::{gradcheck, GradcheckOp};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    for op in GradcheckOp::ALL {
        let r = gradcheck(op, seed, 1e-6);
        println!(
            "{:<11} max relative error {:.2e} over {} coordinates ({} excluded), threshold {:.0e}: {}",
            op.name(),
            r.max_rel_error,
            r.checked,
            r.excluded,
            r.threshold,
            if r.passed { "ok" } else { "FAILED" }
        );
    }
}
