//! Pooled testing with imperfect assays: power as the pool size grows.
//!
//! `cargo run --example group_testing`

use randp::grouptest::{power_fixed_individuals, power_fixed_inspections, GroupPowerConfig};
use randp::PValueKind;

fn main() -> randp::Result<()> {
    let base = GroupPowerConfig {
        kind: PValueKind::Lfc,
        theta_star: 0.1,
        theta_alt: 0.2,
        alpha: 0.05,
        c: 0.5,
        se: 0.95,
        sp: 0.95,
    };
    let s_range: Vec<f64> = (1..=40).map(f64::from).collect();
    println!("50 pools, s = 1..40");
    for kind in PValueKind::ALL {
        let sweep = power_fixed_inspections(&base.with_kind(kind), 50, &s_range)?;
        let (s_best, best) =
            sweep
                .series
                .points()
                .fold((0.0, f64::MIN), |acc, p| if p.1 > acc.1 { p } else { acc });
        println!(
            "  {:<5} best s = {s_best:>4}  power {best:.4}",
            kind.as_str()
        );
    }

    println!("300 individuals, largest pools");
    let g_range: Vec<u64> = (6..=300).collect();
    for kind in PValueKind::ALL {
        let sweep = power_fixed_individuals(&base.with_kind(kind), 300, &g_range)?;
        let points: Vec<(f64, f64)> = sweep.series.points().collect();
        let tail: Vec<String> = points[points.len() - 3..]
            .iter()
            .map(|(s, y)| format!("s={s:.1}:{y:.4}"))
            .collect();
        println!(
            "  {:<5} {}  ({} degenerate)",
            kind.as_str(),
            tail.join(" "),
            sweep.degenerate.len()
        );
    }
    Ok(())
}
