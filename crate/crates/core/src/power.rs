//! Exact power curves.
//!
//! The power of the level-`alpha` test that rejects when `p <= alpha` is the
//! p-value CDF at `alpha` under the alternative. Everything here is computed
//! from the analytic CDFs in [`crate::pvalues`], so curves are deterministic.

use rayon::prelude::*;

use crate::error::{check_probability, Error, Result};
use crate::output::CurveSeries;
use crate::pvalues::{OneSidedProblem, PValueKind, Tail};

/// Default `epsilon` for the support-point neighbourhood curves.
pub const DEFAULT_SUPPORT_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerQuery {
    pub kind: PValueKind,
    pub theta_star: f64,
    pub theta_alt: f64,
    pub alpha: f64,
    pub c: f64,
    pub tail: Tail,
}

impl PowerQuery {
    pub fn new(
        kind: PValueKind,
        theta_star: f64,
        theta_alt: f64,
        alpha: f64,
        c: f64,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        if !(theta_alt > 0.0 && theta_alt < 1.0) {
            return Err(Error::domain(format!(
                "theta must lie in (0, 1), got {theta_alt}"
            )));
        }
        check_probability("c", c)?;
        Ok(Self {
            kind,
            theta_star,
            theta_alt,
            alpha,
            c,
            tail: Tail::Upper,
        })
    }

    pub fn with_kind(self, kind: PValueKind) -> Self {
        Self { kind, ..self }
    }

    pub fn with_tail(self, tail: Tail) -> Self {
        Self { tail, ..self }
    }

    fn problem(&self, n: u64) -> Result<OneSidedProblem> {
        OneSidedProblem::with_tail(n, self.theta_star, self.tail)
    }
}

/// Rejection probability at sample size `n`.
pub fn power(query: &PowerQuery, n: u64) -> Result<f64> {
    let problem = query.problem(n)?;
    problem.cdf(query.kind, query.theta_alt, query.alpha, query.c)
}

pub fn power_vs_n(query: &PowerQuery, ns: &[u64]) -> Result<CurveSeries> {
    if ns.is_empty() {
        return Err(Error::usage("sample-size range is empty"));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::usage("sample sizes must be strictly ascending"));
    }
    let points = ns
        .par_iter()
        .map(|&n| power(query, n).map(|y| (n as f64, y)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveSeries::from_points(
        query.kind,
        query.theta_alt,
        query.c,
        points,
    ))
}

/// Power at fixed `n` as the randomization constant varies.
pub fn power_vs_c(query: &PowerQuery, n: u64, c_grid: &[f64]) -> Result<CurveSeries> {
    let problem = query.problem(n)?;
    let points = c_grid
        .par_iter()
        .map(|&c| {
            problem
                .cdf(query.kind, query.theta_alt, query.alpha, c)
                .map(|y| (c, y))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveSeries::from_points(
        query.kind,
        query.theta_alt,
        query.c,
        points,
    ))
}

/// The analytic p-value CDF on `t_grid`.
pub fn cdf_curve(
    kind: PValueKind,
    problem: &OneSidedProblem,
    theta: f64,
    c: f64,
    t_grid: &[f64],
) -> Result<CurveSeries> {
    let points = t_grid
        .par_iter()
        .map(|&t| problem.cdf(kind, theta, t, c).map(|y| (t, y)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveSeries::from_points(kind, theta, c, points))
}

/// `Rand1` CDFs at the support point `s = c*(c)` and at `s + epsilon`,
/// `s - epsilon`, in that order.
pub fn support_neighbourhood(
    problem: &OneSidedProblem,
    theta: f64,
    c: f64,
    epsilon: f64,
    t_grid: &[f64],
) -> Result<[CurveSeries; 3]> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::domain("epsilon must be positive"));
    }
    let s = problem.c_star(c)?;
    let at = |c: f64| cdf_curve(PValueKind::Rand1, problem, theta, c.clamp(0.0, 1.0), t_grid);
    Ok([at(s)?, at(s + epsilon)?, at(s - epsilon)?])
}

/// Every adjacent decrease in `series` as `(x after the drop, magnitude)`.
pub fn nonmonotonicity_report(series: &CurveSeries) -> Vec<(f64, f64)> {
    drops_exceeding(series, 0.0)
}

/// Adjacent decreases larger than `tol`.
pub fn drops_exceeding(series: &CurveSeries, tol: f64) -> Vec<(f64, f64)> {
    series
        .x
        .windows(2)
        .zip(series.y.windows(2))
        .filter_map(|(x, y)| {
            let drop = y[0] - y[1];
            (drop > tol).then_some((x[1], drop))
        })
        .collect()
}
