//! Power of the rescaled p-value as `c` varies, and its jump at a support point.
//!
//! `cargo run --example c_sweep`

use randp::power::{power_vs_c, support_neighbourhood, DEFAULT_SUPPORT_EPSILON};
use randp::{OneSidedProblem, PValueKind, PowerQuery};

fn main() -> randp::Result<()> {
    let (n, theta_star, theta_alt, alpha) = (20, 0.25, 0.5, 0.05);
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let query = PowerQuery::new(PValueKind::Rand1, theta_star, theta_alt, alpha, 0.5)?;
    let curve = power_vs_c(&query, n, &grid)?;
    for (c, y) in curve.points() {
        println!("c = {c:.2}  power = {y:.4}");
    }

    let problem = OneSidedProblem::new(n, theta_star)?;
    let s = problem.lfc_support().values().find(|&v| v > 0.3).unwrap();
    let [at, above, below] =
        support_neighbourhood(&problem, theta_alt, s, DEFAULT_SUPPORT_EPSILON, &[alpha])?;
    println!("support point s = {s:.6}");
    println!(
        "  power at s-eps {:.4}, s {:.4}, s+eps {:.4}",
        below.y[0], at.y[0], above.y[0]
    );
    Ok(())
}
