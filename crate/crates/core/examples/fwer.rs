//! Family-wise error under the global null, with and without the plug-in estimate of `k0`.
//!
//! `cargo run --release --example fwer`

use randp::multiple::{fwer_mc, Method, MultipleProblem, Stratum};
use randp::PValueKind;

fn main() -> randp::Result<()> {
    let strata = (0..20)
        .map(|i| Stratum::new(format!("s{i}"), 50, 0.25)?.with_theta(0.25))
        .collect::<randp::Result<Vec<_>>>()?;
    let problem = MultipleProblem::with_defaults(strata)?;
    for method in [Method::Bonferroni, Method::Sidak] {
        for plug_in in [false, true] {
            for kind in [PValueKind::Lfc, PValueKind::Rand2] {
                let est = fwer_mc(&problem, kind, method, plug_in, 5000, 1)?;
                println!(
                    "{:<10} plug-in={plug_in:<5} {:<5} FWER {:.4} (se {:.4})",
                    method.to_string(),
                    kind.as_str(),
                    est.estimate,
                    est.std_error
                );
            }
        }
    }
    Ok(())
}
