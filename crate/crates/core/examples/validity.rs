//! Checks `P(p <= t) <= t` over the null for every construction.
//!
//! `cargo run --example validity`

use randp::pvalues::check_validity;
use randp::{OneSidedProblem, PValueKind};

fn main() -> randp::Result<()> {
    let thetas = [0.01, 0.05, 0.1, 0.2, 0.25];
    let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    for n in [2, 10, 50] {
        let problem = OneSidedProblem::new(n, 0.25)?;
        for kind in PValueKind::ALL {
            let r = check_validity(kind, &problem, 0.5, &thetas, &grid)?;
            println!(
                "n={n:<3} {:<5} max(P(p<=t)-t) = {:+.2e} at theta={} t={:.2}  {}",
                kind.as_str(),
                r.max_violation,
                r.worst_theta,
                r.worst_t,
                if r.passed { "ok" } else { "VIOLATED" }
            );
        }
    }
    Ok(())
}
