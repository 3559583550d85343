//! Multiple one-sided binomial tests across strata.
//!
//! Each stratum `i` tests `theta_i <= theta*_i` on a count `r_i ~ Bin(n_i, theta_i)`.
//! The number of true nulls `k0` is estimated with the Schweder-Spjotvoll
//! estimator `k * (1 - F_k(lambda)) / (1 - lambda)`, which can then replace
//! `k` in the Bonferroni or Sidak local level.
//!
//! Every uniform draw is addressed by `(seed, repetition, stratum, role)`, so
//! Monte Carlo results do not depend on how repetitions are scheduled.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::Binomial as BinomialSampler;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::pvalues::{Observation, OneSidedProblem, PValueKind};
use crate::rng::{uniform, SeedKey, StreamRole};

pub const DEFAULT_REPS: u64 = 10_000;
pub const DEFAULT_LAMBDA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stratum {
    pub label: String,
    pub n: u64,
    /// True rate, used for simulation and for counting true nulls.
    pub theta: Option<f64>,
    pub theta_star: f64,
    /// Observed count.
    pub r: Option<u64>,
}

impl Stratum {
    pub fn new(label: impl Into<String>, n: u64, theta_star: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("stratum size must be at least 1"));
        }
        if !(theta_star > 0.0 && theta_star < 1.0) {
            return Err(Error::domain(format!(
                "theta* must lie in (0, 1), got {theta_star}"
            )));
        }
        Ok(Self {
            label: label.into(),
            n,
            theta: None,
            theta_star,
            r: None,
        })
    }

    pub fn with_theta(mut self, theta: f64) -> Result<Self> {
        check_probability("theta", theta)?;
        self.theta = Some(theta);
        Ok(self)
    }

    pub fn with_count(mut self, r: u64) -> Result<Self> {
        if r > self.n {
            return Err(Error::domain(format!(
                "count {r} exceeds stratum size {}",
                self.n
            )));
        }
        self.r = Some(r);
        Ok(self)
    }

    /// `Some(true)` when the stratum's null hypothesis holds.
    pub fn is_null(&self) -> Option<bool> {
        self.theta.map(|t| t <= self.theta_star)
    }

    fn problem(&self) -> Result<OneSidedProblem> {
        OneSidedProblem::new(self.n, self.theta_star)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultipleProblem {
    strata: Vec<Stratum>,
    c: f64,
    lambda: f64,
    alpha: f64,
}

impl MultipleProblem {
    pub fn new(strata: Vec<Stratum>, c: f64, lambda: f64, alpha: f64) -> Result<Self> {
        if strata.is_empty() {
            return Err(Error::domain("at least one stratum is required"));
        }
        check_probability("c", c)?;
        if !(0.0..1.0).contains(&lambda) {
            return Err(Error::domain(format!(
                "lambda must lie in [0, 1), got {lambda}"
            )));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        Ok(Self {
            strata,
            c,
            lambda,
            alpha,
        })
    }

    /// Strata with `c = 0.5`, `lambda = 0.5`, `alpha = 0.05`.
    pub fn with_defaults(strata: Vec<Stratum>) -> Result<Self> {
        Self::new(strata, 0.5, DEFAULT_LAMBDA, 0.05)
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn k(&self) -> usize {
        self.strata.len()
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn with_c(self, c: f64) -> Result<Self> {
        Self::new(self.strata, c, self.lambda, self.alpha)
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        Self::new(self.strata, self.c, lambda, self.alpha)
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        Self::new(self.strata, self.c, self.lambda, alpha)
    }

    /// Replaces every boundary with `theta_star`.
    pub fn with_common_theta_star(mut self, theta_star: f64) -> Result<Self> {
        if !(theta_star > 0.0 && theta_star < 1.0) {
            return Err(Error::domain(format!(
                "theta* must lie in (0, 1), got {theta_star}"
            )));
        }
        for s in &mut self.strata {
            s.theta_star = theta_star;
        }
        Ok(self)
    }

    /// Number of true nulls; `None` if some stratum lacks a true rate.
    pub fn k0(&self) -> Option<usize> {
        self.strata
            .iter()
            .map(Stratum::is_null)
            .try_fold(0, |acc, null| null.map(|b| acc + usize::from(b)))
    }

    fn true_rates(&self) -> Result<Vec<f64>> {
        self.strata
            .iter()
            .map(|s| {
                s.theta.ok_or_else(|| {
                    Error::usage(format!(
                        "stratum `{}` has no true rate to simulate from",
                        s.label
                    ))
                })
            })
            .collect()
    }

    fn check_counts(&self, counts: &[u64]) -> Result<()> {
        if counts.len() != self.k() {
            return Err(Error::usage(format!(
                "{} counts supplied for {} strata",
                counts.len(),
                self.k()
            )));
        }
        Ok(())
    }
}

/// One binomial count per stratum drawn from its true rate.
pub fn simulate_counts(problem: &MultipleProblem, seed: u64, repetition: u64) -> Result<Vec<u64>> {
    let rates = problem.true_rates()?;
    problem
        .strata
        .iter()
        .zip(rates)
        .enumerate()
        .map(|(i, (s, theta))| {
            let sampler = BinomialSampler::new(s.n, theta)
                .map_err(|e| Error::domain(format!("stratum `{}`: {e}", s.label)))?;
            let mut stream = SeedKey::new(seed, repetition, i as u64, StreamRole::Data).stream();
            Ok(stream.sample(sampler))
        })
        .collect()
}

/// `(u, u_tilde)` for stratum `i` in one repetition.
fn draws(seed: u64, repetition: u64, stratum: usize) -> (f64, f64) {
    let key = |role| SeedKey::new(seed, repetition, stratum as u64, role);
    (
        uniform(&key(StreamRole::U), 0),
        uniform(&key(StreamRole::UTilde), 0),
    )
}

fn observations(problem: &MultipleProblem, counts: &[u64]) -> Result<Vec<Observation>> {
    problem.check_counts(counts)?;
    problem
        .strata
        .iter()
        .zip(counts)
        .map(|(s, &r)| s.problem()?.observe(r as i64, problem.c))
        .collect()
}

fn pvalues_from(kind: PValueKind, obs: &[Observation], seed: u64, repetition: u64) -> Vec<f64> {
    obs.iter()
        .enumerate()
        .map(|(i, o)| {
            let (u, u_tilde) = draws(seed, repetition, i);
            o.value(kind, u, u_tilde)
        })
        .collect()
}

/// Per-stratum p-values with independent uniform draws for each stratum.
pub fn marginal_pvalues(
    kind: PValueKind,
    problem: &MultipleProblem,
    counts: &[u64],
    seed: u64,
    repetition: u64,
) -> Result<Vec<f64>> {
    Ok(pvalues_from(
        kind,
        &observations(problem, counts)?,
        seed,
        repetition,
    ))
}

/// Schweder-Spjotvoll estimate of the number of true nulls; not capped at `k`.
pub fn schweder_k0(pvalues: &[f64], lambda: f64) -> f64 {
    let k = pvalues.len();
    if k == 0 {
        return 0.0;
    }
    let above = pvalues.iter().filter(|&&p| p > lambda).count();
    above as f64 / (1.0 - lambda)
}

fn effective_k(k_eff: f64) -> f64 {
    k_eff.max(1.0)
}

pub fn bonferroni_level(k_eff: f64, alpha: f64) -> f64 {
    alpha / effective_k(k_eff)
}

pub fn sidak_level(k_eff: f64, alpha: f64) -> f64 {
    let k = effective_k(k_eff);
    if k == 1.0 {
        alpha
    } else {
        -((-alpha).ln_1p() / k).exp_m1()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Bonferroni,
    Sidak,
}

impl Method {
    pub fn level(self, k_eff: f64, alpha: f64) -> f64 {
        match self {
            Method::Bonferroni => bonferroni_level(k_eff, alpha),
            Method::Sidak => sidak_level(k_eff, alpha),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Bonferroni => "bonferroni",
            Method::Sidak => "sidak",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bonferroni" => Ok(Method::Bonferroni),
            "sidak" => Ok(Method::Sidak),
            other => Err(Error::usage(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestOutcome {
    pub pvalues: Vec<f64>,
    pub rejections: Vec<bool>,
    pub k0_hat: f64,
    pub adjusted_level: f64,
}

impl TestOutcome {
    pub fn rejected(&self) -> usize {
        self.rejections.iter().filter(|&&r| r).count()
    }
}

fn run_test(
    pvalues: &[f64],
    alpha: f64,
    lambda: f64,
    method: Method,
    plug_in: bool,
) -> TestOutcome {
    let k0_hat = schweder_k0(pvalues, lambda);
    let k_eff = if plug_in {
        k0_hat
    } else {
        pvalues.len() as f64
    };
    let adjusted_level = method.level(k_eff, alpha);
    TestOutcome {
        pvalues: pvalues.to_vec(),
        rejections: pvalues.iter().map(|&p| p <= adjusted_level).collect(),
        k0_hat,
        adjusted_level,
    }
}

/// Local level from `k_eff = max(1, k0_hat)`.
pub fn plug_in_test(pvalues: &[f64], alpha: f64, lambda: f64, method: Method) -> TestOutcome {
    run_test(pvalues, alpha, lambda, method, true)
}

/// Local level from the full number of hypotheses `k`.
pub fn standard_test(pvalues: &[f64], alpha: f64, lambda: f64, method: Method) -> TestOutcome {
    run_test(pvalues, alpha, lambda, method, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FwerEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub reps: u64,
}

/// Fraction of repetitions with at least one false rejection.
pub fn fwer_mc(
    problem: &MultipleProblem,
    kind: PValueKind,
    method: Method,
    use_plug_in: bool,
    reps: u64,
    seed: u64,
) -> Result<FwerEstimate> {
    if reps == 0 {
        return Err(Error::usage("reps must be at least 1"));
    }
    let null: Vec<bool> = problem
        .strata
        .iter()
        .map(|s| s.is_null())
        .collect::<Option<_>>()
        .ok_or_else(|| Error::usage("every stratum needs a true rate"))?;
    let hits = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let counts = simulate_counts(problem, seed, rep)?;
            let p = marginal_pvalues(kind, problem, &counts, seed, rep)?;
            let outcome = run_test(&p, problem.alpha, problem.lambda, method, use_plug_in);
            Ok(outcome
                .rejections
                .iter()
                .zip(&null)
                .any(|(&rej, &is_null)| rej && is_null))
        })
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .filter(|&b| b)
        .count();
    let estimate = hits as f64 / reps as f64;
    Ok(FwerEstimate {
        estimate,
        std_error: (estimate * (1.0 - estimate) / reps as f64).sqrt(),
        reps,
    })
}

/// One row of the `k0` study table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct K0Row {
    pub theta_star: f64,
    pub k0_true: usize,
    pub kind: PValueKind,
    pub mean_k0_hat: f64,
    pub reps: u64,
    pub seed: u64,
}

/// Mean `k0_hat` per kind with every boundary set to `theta_star`.
///
/// Strata carrying observed counts keep them fixed and only the uniform draws
/// vary across repetitions; `Lfc` is then evaluated once. Strata without
/// counts are simulated from their true rates in each repetition.
pub fn k0_study(
    problem: &MultipleProblem,
    theta_star: f64,
    kinds: &[PValueKind],
    reps: u64,
    seed: u64,
) -> Result<Vec<K0Row>> {
    if reps == 0 {
        return Err(Error::usage("reps must be at least 1"));
    }
    let problem = problem.clone().with_common_theta_star(theta_star)?;
    let k0_true = problem
        .k0()
        .ok_or_else(|| Error::usage("every stratum needs a true rate"))?;
    let fixed: Option<Vec<u64>> = problem.strata.iter().map(|s| s.r).collect();
    let fixed_obs = fixed
        .as_deref()
        .map(|counts| observations(&problem, counts))
        .transpose()?;
    let lambda = problem.lambda;

    kinds
        .iter()
        .map(|&kind| {
            let mean_k0_hat = match (&fixed_obs, kind) {
                (Some(obs), PValueKind::Lfc) => {
                    schweder_k0(&pvalues_from(kind, obs, seed, 0), lambda)
                }
                (Some(obs), _) => mean(
                    (0..reps)
                        .into_par_iter()
                        .map(|rep| Ok(schweder_k0(&pvalues_from(kind, obs, seed, rep), lambda)))
                        .collect::<Result<Vec<f64>>>()?,
                ),
                (None, _) => mean(
                    (0..reps)
                        .into_par_iter()
                        .map(|rep| {
                            let counts = simulate_counts(&problem, seed, rep)?;
                            let p = marginal_pvalues(kind, &problem, &counts, seed, rep)?;
                            Ok(schweder_k0(&p, lambda))
                        })
                        .collect::<Result<Vec<f64>>>()?,
                ),
            };
            Ok(K0Row {
                theta_star,
                k0_true,
                kind,
                mean_k0_hat,
                reps,
                seed,
            })
        })
        .collect()
}

/// Sums in index order so the result does not depend on thread scheduling.
fn mean(values: Vec<f64>) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}
