//! Estimating the number of true nulls across regions from case-fatality counts.
//!
//! `cargo run --release --example k0_study [path/to/counts.csv]`

use std::path::PathBuf;

use randp::ingest::load_strata;
use randp::multiple::k0_study;
use randp::PValueKind;

fn main() -> randp::Result<()> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/covid_fixture.csv").into());
    let problem = load_strata(&path, 0.01)?;
    println!("{} regions", problem.k());
    println!("theta*   k0   kind   mean k0_hat");
    for theta_star in [0.0100, 0.0144, 0.0198, 0.0254] {
        for row in k0_study(&problem, theta_star, &PValueKind::ALL, 1000, 20210101)? {
            println!(
                "{:.4}  {:>3}   {:<5}  {:.2}",
                row.theta_star,
                row.k0_true,
                row.kind.as_str(),
                row.mean_k0_hat
            );
        }
    }
    Ok(())
}
