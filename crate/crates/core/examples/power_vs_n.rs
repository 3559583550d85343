//! Exact power against sample size; the deterministic p-value zigzags.
//!
//! `cargo run --example power_vs_n`

use randp::power::{drops_exceeding, power_vs_n};
use randp::{PValueKind, PowerQuery};

fn main() -> randp::Result<()> {
    let ns: Vec<u64> = (5..=60).collect();
    for kind in PValueKind::ALL {
        let query = PowerQuery::new(kind, 0.25, 0.5, 0.05, 0.5)?;
        let curve = power_vs_n(&query, &ns)?;
        let drops = drops_exceeding(&curve, 1e-9);
        println!(
            "{:<5} power(n=20) = {:.4}  power(n=60) = {:.4}  drops as n grows: {}",
            kind.as_str(),
            curve.y_at(20.0).unwrap(),
            curve.y_at(60.0).unwrap(),
            drops.len()
        );
    }
    Ok(())
}
