//! Randomized p-values for one-sided binomial tests.
//!
//! The crate computes four p-values for `H0: theta <= theta*` against
//! `theta > theta*` (or the mirrored lower-tail problem), their exact
//! distribution functions, and the power curves, group-testing translations
//! and multiple-testing procedures built on top of them.
//!
//! ```
//! use randp::{OneSidedProblem, PValueKind, RandomizationInput};
//!
//! let problem = OneSidedProblem::new(10, 0.5).unwrap();
//! let rin = RandomizationInput::new(0.5, 0.5).unwrap();
//! let p = problem.p_value(PValueKind::Pt, 7, &rin).unwrap();
//! assert!((p - (0.0546875 + 0.5 * 0.1171875)).abs() < 1e-12);
//! ```

pub mod cli;
pub mod dist;
pub mod error;
pub mod grouptest;
pub mod ingest;
pub mod multiple;
pub mod output;
pub mod power;
pub mod pvalues;
pub mod rng;

pub use dist::{Binomial, DiscreteModel};
pub use error::{Error, Result};
pub use output::{CurveSeries, Format};
pub use power::PowerQuery;
pub use pvalues::{Observation, OneSidedProblem, PValueKind, RandomizationInput, Tail};
pub use rng::{SeedKey, StreamRole};
