//! Group testing with misclassification.
//!
//! Pools of `s` individuals are inspected `g` times. A pool tests positive
//! with probability `pi = se + (1 - se - sp) * (1 - theta)^s`, so the number
//! of positive pools is `Bin(g, pi)` and a hypothesis on the individual rate
//! `theta` becomes the same hypothesis on `pi`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_probability, Error, Result};
use crate::output::CurveSeries;
use crate::pvalues::{OneSidedProblem, PValueKind};

/// Default group sizes swept with a fixed number of inspections.
pub const DEFAULT_S_RANGE: std::ops::RangeInclusive<u32> = 1..=40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupDesign {
    g: u64,
    s: f64,
    se: f64,
    sp: f64,
}

impl GroupDesign {
    pub fn new(g: u64, s: f64, se: f64, sp: f64) -> Result<Self> {
        if g == 0 {
            return Err(Error::domain("number of groups must be at least 1"));
        }
        if !(s >= 1.0 && s.is_finite()) {
            return Err(Error::domain(format!("group size must be >= 1, got {s}")));
        }
        check_probability("sensitivity", se)?;
        check_probability("specificity", sp)?;
        if se + sp <= 1.0 {
            return Err(Error::domain(format!(
                "se + sp must exceed 1, got {se} + {sp}"
            )));
        }
        Ok(Self { g, s, se, sp })
    }

    pub fn g(&self) -> u64 {
        self.g
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn se(&self) -> f64 {
        self.se
    }

    pub fn sp(&self) -> f64 {
        self.sp
    }
}

/// Probability that a pool tests positive.
pub fn pi_from_theta(theta: f64, design: &GroupDesign) -> Result<f64> {
    check_probability("theta", theta)?;
    let GroupDesign { s, se, sp, .. } = *design;
    let pi = se + (1.0 - se - sp) * (1.0 - theta).powf(s);
    Ok(pi.clamp((1.0 - sp).min(se), (1.0 - sp).max(se)))
}

/// Inverts [`pi_from_theta`]; estimates outside the attainable range clamp to 0 or 1.
pub fn theta_mle(pi_hat: f64, design: &GroupDesign) -> Result<f64> {
    check_probability("pi_hat", pi_hat)?;
    let GroupDesign { s, se, sp, .. } = *design;
    let ratio = (pi_hat - se) / (1.0 - se - sp);
    if ratio <= 0.0 {
        return Ok(1.0);
    }
    if ratio >= 1.0 {
        return Ok(0.0);
    }
    Ok((1.0 - ratio.powf(1.0 / s)).clamp(0.0, 1.0))
}

/// The binomial problem on pool counts with boundary `pi*`.
pub fn translate_problem(theta_star: f64, design: &GroupDesign) -> Result<OneSidedProblem> {
    if !(theta_star > 0.0 && theta_star < 1.0) {
        return Err(Error::domain(format!(
            "theta* must lie in (0, 1), got {theta_star}"
        )));
    }
    let pi_star = pi_from_theta(theta_star, design)?;
    if pi_star <= 0.0 || pi_star >= 1.0 {
        return Err(Error::DegenerateDesign(format!(
            "boundary maps to pi* = {pi_star} at s = {}",
            design.s
        )));
    }
    OneSidedProblem::new(design.g, pi_star)
}

/// Test settings shared by every point of a group-size sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupPowerConfig {
    pub kind: PValueKind,
    pub theta_star: f64,
    pub theta_alt: f64,
    pub alpha: f64,
    pub c: f64,
    pub se: f64,
    pub sp: f64,
}

impl GroupPowerConfig {
    pub fn with_kind(self, kind: PValueKind) -> Self {
        Self { kind, ..self }
    }

    /// Exact power for `g` pools of size `s`.
    pub fn power(&self, g: u64, s: f64) -> Result<f64> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::domain(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        check_probability("c", self.c)?;
        let design = GroupDesign::new(g, s, self.se, self.sp)?;
        let problem = translate_problem(self.theta_star, &design)?;
        let pi = pi_from_theta(self.theta_alt, &design)?;
        problem.cdf(self.kind, pi, self.alpha, self.c)
    }
}

/// A power sweep plus the group sizes whose translation degenerated.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSweep {
    /// Power against group size `s`, ascending in `s`.
    pub series: CurveSeries,
    pub degenerate: Vec<(f64, String)>,
}

fn sweep(config: &GroupPowerConfig, mut points: Vec<(u64, f64)>) -> Result<GroupSweep> {
    points.sort_by(|a, b| a.1.total_cmp(&b.1));
    let results: Vec<(f64, Result<f64>)> = points
        .par_iter()
        .map(|&(g, s)| (s, config.power(g, s)))
        .collect();
    let mut xy = Vec::with_capacity(results.len());
    let mut degenerate = Vec::new();
    for (s, r) in results {
        match r {
            Ok(y) => xy.push((s, y)),
            Err(Error::DegenerateDesign(msg)) => degenerate.push((s, msg)),
            Err(e) => return Err(e),
        }
    }
    Ok(GroupSweep {
        series: CurveSeries::from_points(config.kind, config.theta_alt, config.c, xy),
        degenerate,
    })
}

/// Fixed number of inspections `g`, varying pool size.
pub fn power_fixed_inspections(
    config: &GroupPowerConfig,
    g: u64,
    s_range: &[f64],
) -> Result<GroupSweep> {
    if s_range.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::usage("group sizes must be strictly ascending"));
    }
    sweep(config, s_range.iter().map(|&s| (g, s)).collect())
}

/// Fixed number of individuals `n_total` split into `g` pools of size `n_total / g`.
pub fn power_fixed_individuals(
    config: &GroupPowerConfig,
    n_total: u64,
    g_sequence: &[u64],
) -> Result<GroupSweep> {
    if let Some(&g) = g_sequence.iter().find(|&&g| g == 0 || g > n_total) {
        return Err(Error::domain(format!(
            "group count {g} must lie in 1..={n_total}"
        )));
    }
    sweep(
        config,
        g_sequence
            .iter()
            .map(|&g| (g, n_total as f64 / g as f64))
            .collect(),
    )
}
