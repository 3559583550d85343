//! Null CDFs of the four p-values at the boundary and inside the null.
//!
//! `cargo run --example cdf_curves`

use randp::power::cdf_curve;
use randp::{OneSidedProblem, PValueKind};

fn main() -> randp::Result<()> {
    let problem = OneSidedProblem::new(10, 0.25)?;
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    for theta in [0.25, 0.15] {
        println!("theta = {theta}");
        for kind in PValueKind::ALL {
            let curve = cdf_curve(kind, &problem, theta, 0.5, &grid)?;
            let ys: Vec<String> = curve.y.iter().map(|y| format!("{y:.3}")).collect();
            println!("  {:<5} {}", kind.as_str(), ys.join(" "));
        }
    }
    Ok(())
}
