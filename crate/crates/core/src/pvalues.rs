//! The four p-value constructions for a one-sided binomial test and their
//! exact distribution functions.
//!
//! | kind    | p-value                                                    |
//! |---------|------------------------------------------------------------|
//! | `Lfc`   | `1 - F*(T-)`, the non-randomized p-value at the boundary   |
//! | `Rand1` | `Lfc / c*` below the support point `c* <= c`, else `U`     |
//! | `Pt`    | `P*(T' > T) + U P*(T' = T)`, uniform at the boundary       |
//! | `Rand2` | `Pt / c` below `c`, else an independent `U~`               |
//!
//! `F*` is the binomial CDF at the null boundary `theta*`. All CDFs are
//! evaluated exactly from binomial tail sums; no Monte Carlo is involved.
//!
//! The lower-tailed problem `H: theta >= theta*` is handled by reflecting the
//! statistic (`T -> n - T`, `theta -> 1 - theta`); for `Lfc` this gives
//! `F*(T)` as expected.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dist::{Binomial, DiscreteModel};
use crate::error::{check_probability, Error, Result};

/// Slack allowed in the validity checks, `P(p <= t) <= t + VALIDITY_TOL`.
pub const VALIDITY_TOL: f64 = 1e-10;

/// Relative slack when a level is compared with a support point, so a level
/// that equals a support point up to rounding includes its atom.
pub const TIE_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    /// `H: theta <= theta*` against `K: theta > theta*`.
    #[default]
    Upper,
    /// `H: theta >= theta*` against `K: theta < theta*`.
    Lower,
}

impl FromStr for Tail {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "upper" => Ok(Tail::Upper),
            "lower" => Ok(Tail::Lower),
            other => Err(Error::usage(format!("unknown tail `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PValueKind {
    Lfc,
    Rand1,
    /// The randomized UMP p-value.
    Pt,
    Rand2,
}

impl PValueKind {
    pub const ALL: [PValueKind; 4] = [
        PValueKind::Lfc,
        PValueKind::Rand1,
        PValueKind::Pt,
        PValueKind::Rand2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PValueKind::Lfc => "lfc",
            PValueKind::Rand1 => "rand1",
            PValueKind::Pt => "pt",
            PValueKind::Rand2 => "rand2",
        }
    }

    /// Whether the construction consumes the uniform draw `U`.
    pub fn uses_u(self) -> bool {
        !matches!(self, PValueKind::Lfc)
    }
}

impl fmt::Display for PValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PValueKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lfc" | "p-lfc" => Ok(PValueKind::Lfc),
            "rand1" => Ok(PValueKind::Rand1),
            "pt" | "ump" | "pt-rand" => Ok(PValueKind::Pt),
            "rand2" => Ok(PValueKind::Rand2),
            other => Err(Error::usage(format!(
                "unknown p-value kind `{other}` (expected lfc, rand1, pt, rand2)"
            ))),
        }
    }
}

/// The randomization draws and the constant `c` for one p-value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomizationInput {
    pub u: f64,
    pub u_tilde: Option<f64>,
    pub c: f64,
}

impl RandomizationInput {
    pub fn new(u: f64, c: f64) -> Result<Self> {
        check_open_unit("u", u)?;
        check_probability("c", c)?;
        Ok(Self {
            u,
            u_tilde: None,
            c,
        })
    }

    pub fn with_u_tilde(mut self, u_tilde: f64) -> Result<Self> {
        check_open_unit("u_tilde", u_tilde)?;
        self.u_tilde = Some(u_tilde);
        Ok(self)
    }
}

fn check_open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must lie in (0, 1), got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportPoint {
    pub p_value: f64,
    /// Probability of this p-value at the null boundary.
    pub mass: f64,
    /// Boundary probability of a p-value at or below this point.
    pub cum_prob: f64,
}

/// Support of the `Lfc` p-value, ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportTable {
    pub points: Vec<SupportPoint>,
}

impl SupportTable {
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.p_value)
    }
}

/// `H: theta <= theta*` (or `>=` for [`Tail::Lower`]) for a binomial count
/// out of `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneSidedProblem {
    n: u64,
    theta_star: f64,
    tail: Tail,
    /// Boundary model in upper-tail orientation.
    null: Binomial,
}

impl OneSidedProblem {
    pub fn new(n: u64, theta_star: f64) -> Result<Self> {
        Self::with_tail(n, theta_star, Tail::Upper)
    }

    pub fn with_tail(n: u64, theta_star: f64, tail: Tail) -> Result<Self> {
        if !(theta_star > 0.0 && theta_star < 1.0) {
            return Err(Error::domain(format!(
                "null boundary theta* must lie in (0, 1), got {theta_star}"
            )));
        }
        let null = Binomial::new(n, orient(tail, theta_star))?;
        Ok(Self {
            n,
            theta_star,
            tail,
            null,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn theta_star(&self) -> f64 {
        self.theta_star
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// Whether `theta` belongs to the null hypothesis.
    pub fn in_null(&self, theta: f64) -> bool {
        match self.tail {
            Tail::Upper => theta <= self.theta_star,
            Tail::Lower => theta >= self.theta_star,
        }
    }

    fn statistic(&self, t_obs: i64) -> Result<i64> {
        if t_obs < 0 || t_obs as u64 > self.n {
            return Err(Error::domain(format!(
                "observed count {t_obs} outside support 0..={}",
                self.n
            )));
        }
        Ok(match self.tail {
            Tail::Upper => t_obs,
            Tail::Lower => self.n as i64 - t_obs,
        })
    }

    fn model_at(&self, theta: f64) -> Result<Binomial> {
        check_probability("theta", theta)?;
        Binomial::new(self.n, orient(self.tail, theta))
    }

    /// `1 - F*(t_obs-)`; `F*(t_obs)` for the lower tail.
    pub fn p_lfc(&self, t_obs: i64) -> Result<f64> {
        let t = self.statistic(t_obs)?;
        Ok(self.null.sf(t - 1))
    }

    /// `P_theta(Lfc <= t)`.
    pub fn p_lfc_cdf(&self, theta: f64, t: f64) -> Result<f64> {
        check_probability("t", t)?;
        Ok(lfc_cdf(&self.null, &self.model_at(theta)?, t))
    }

    pub fn lfc_support(&self) -> SupportTable {
        let n = self.n as i64;
        let mut cum = 0.0;
        let points = (0..=n)
            .rev()
            .map(|k| {
                let mass = self.null.pmf(k);
                cum += mass;
                SupportPoint {
                    p_value: self.null.sf(k - 1),
                    mass,
                    cum_prob: cum,
                }
            })
            .collect();
        SupportTable { points }
    }

    /// Largest support point of `Lfc` that does not exceed `c`, or 0.
    pub fn c_star(&self, c: f64) -> Result<f64> {
        check_probability("c", c)?;
        Ok(c_star(&self.null, c))
    }

    pub fn rand1(&self, t_obs: i64, rin: &RandomizationInput) -> Result<f64> {
        Ok(self.observe(t_obs, rin.c)?.rand1(rin.u))
    }

    pub fn rand1_cdf(&self, theta: f64, t: f64, c: f64) -> Result<f64> {
        check_probability("t", t)?;
        check_probability("c", c)?;
        Ok(rand1_cdf(&self.null, &self.model_at(theta)?, t, c))
    }

    /// `P*(T' > T) + U P*(T' = T)`, the randomized UMP p-value.
    pub fn pt_rand(&self, t_obs: i64, rin: &RandomizationInput) -> Result<f64> {
        Ok(self.observe(t_obs, rin.c)?.pt(rin.u))
    }

    pub fn pt_rand_cdf(&self, theta: f64, t: f64) -> Result<f64> {
        check_probability("t", t)?;
        pt_cdf(&self.null, &self.model_at(theta)?, t)
    }

    pub fn rand2(&self, t_obs: i64, rin: &RandomizationInput) -> Result<f64> {
        let u_tilde = rin
            .u_tilde
            .ok_or_else(|| Error::usage("rand2 needs a second-stage draw u_tilde"))?;
        Ok(self.observe(t_obs, rin.c)?.rand2(rin.u, u_tilde))
    }

    pub fn rand2_cdf(&self, theta: f64, t: f64, c: f64) -> Result<f64> {
        check_probability("t", t)?;
        check_probability("c", c)?;
        rand2_cdf(&self.null, &self.model_at(theta)?, t, c)
    }

    /// Precomputes everything the four p-values need at `t_obs`, leaving
    /// only the uniform draws.
    pub fn observe(&self, t_obs: i64, c: f64) -> Result<Observation> {
        check_probability("c", c)?;
        let t = self.statistic(t_obs)?;
        Ok(Observation {
            p_lfc: self.null.sf(t - 1),
            above: self.null.sf(t),
            atom: self.null.pmf(t),
            c,
            c_star: c_star(&self.null, c),
        })
    }

    pub fn p_value(&self, kind: PValueKind, t_obs: i64, rin: &RandomizationInput) -> Result<f64> {
        match kind {
            PValueKind::Lfc => self.p_lfc(t_obs),
            PValueKind::Rand1 => self.rand1(t_obs, rin),
            PValueKind::Pt => self.pt_rand(t_obs, rin),
            PValueKind::Rand2 => self.rand2(t_obs, rin),
        }
    }

    /// `P_theta(p <= t)` for the chosen construction. `c` is ignored by
    /// `Lfc` and `Pt`.
    pub fn cdf(&self, kind: PValueKind, theta: f64, t: f64, c: f64) -> Result<f64> {
        match kind {
            PValueKind::Lfc => self.p_lfc_cdf(theta, t),
            PValueKind::Rand1 => self.rand1_cdf(theta, t, c),
            PValueKind::Pt => self.pt_rand_cdf(theta, t),
            PValueKind::Rand2 => self.rand2_cdf(theta, t, c),
        }
    }
}

/// The data-dependent part of the p-values at one observed count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    p_lfc: f64,
    above: f64,
    atom: f64,
    c: f64,
    c_star: f64,
}

impl Observation {
    pub fn p_lfc(&self) -> f64 {
        self.p_lfc
    }

    pub fn rand1(&self, u: f64) -> f64 {
        let s = self.c_star;
        if self.c == 0.0 || s == 0.0 || self.p_lfc > s {
            u
        } else {
            self.p_lfc / s
        }
    }

    pub fn pt(&self, u: f64) -> f64 {
        self.above + u * self.atom
    }

    pub fn rand2(&self, u: f64, u_tilde: f64) -> f64 {
        let q = self.pt(u);
        if self.c == 0.0 {
            u_tilde
        } else if self.c == 1.0 {
            // q < 1 in exact arithmetic; keep the c = 1 identity under rounding.
            q
        } else if q < self.c {
            q / self.c
        } else {
            u_tilde
        }
    }

    /// `u_tilde` is only read by `Rand2`.
    pub fn value(&self, kind: PValueKind, u: f64, u_tilde: f64) -> f64 {
        match kind {
            PValueKind::Lfc => self.p_lfc,
            PValueKind::Rand1 => self.rand1(u),
            PValueKind::Pt => self.pt(u),
            PValueKind::Rand2 => self.rand2(u, u_tilde),
        }
    }
}

fn orient(tail: Tail, theta: f64) -> f64 {
    match tail {
        Tail::Upper => theta,
        Tail::Lower => 1.0 - theta,
    }
}

/// Index `j` of the smallest boundary tail `P*(T > j) <= t`, `j >= -1`.
/// The event `{Lfc <= t}` is `{T > j}`.
fn lfc_threshold<M: DiscreteModel>(null: &M, t: f64) -> i64 {
    if t >= 1.0 {
        -1
    } else {
        null.upper_quantile((t * (1.0 + TIE_RTOL)).min(1.0))
            .expect("t checked by caller")
    }
}

fn lfc_cdf<M0: DiscreteModel, M1: DiscreteModel>(null: &M0, alt: &M1, t: f64) -> f64 {
    alt.sf(lfc_threshold(null, t))
}

fn c_star<M: DiscreteModel>(null: &M, c: f64) -> f64 {
    let j = lfc_threshold(null, c);
    if j >= null.support_max() as i64 {
        0.0
    } else {
        null.sf(j)
    }
}

fn rand1_cdf<M0: DiscreteModel, M1: DiscreteModel>(null: &M0, alt: &M1, t: f64, c: f64) -> f64 {
    let s = c_star(null, c);
    if c == 0.0 || s == 0.0 {
        return t;
    }
    let above = alt.cdf(lfc_threshold(null, s));
    (t * above + lfc_cdf(null, alt, t * s)).clamp(0.0, 1.0)
}

fn pt_cdf<M0: DiscreteModel, M1: DiscreteModel>(null: &M0, alt: &M1, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    if t >= 1.0 {
        return Ok(1.0);
    }
    // y(t) = F*^{-1}(1 - t), the boundary atom the level t falls into.
    let y = null.upper_quantile(t)?;
    let excess = t - null.sf(y);
    let null_mass = null.pmf(y);
    let partial = if null_mass >= f64::MIN_POSITIVE {
        (excess / null_mass).clamp(0.0, 1.0) * alt.pmf(y)
    } else {
        let ratio = (alt.ln_pmf(y) - null.ln_pmf(y)).exp();
        (excess * ratio).min(alt.pmf(y))
    };
    let value = alt.sf(y) + partial;
    if value.is_finite() {
        Ok(value.clamp(0.0, 1.0))
    } else {
        Err(Error::Numerical(format!(
            "randomized UMP CDF not finite at t = {t}"
        )))
    }
}

fn rand2_cdf<M0: DiscreteModel, M1: DiscreteModel>(
    null: &M0,
    alt: &M1,
    t: f64,
    c: f64,
) -> Result<f64> {
    if c == 0.0 {
        return Ok(t);
    }
    let above = 1.0 - pt_cdf(null, alt, c)?;
    Ok((t * above + pt_cdf(null, alt, t * c)?).clamp(0.0, 1.0))
}

/// Outcome of [`check_validity`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidityReport {
    pub kind: PValueKind,
    pub c: f64,
    /// `max (P_theta(p <= t) - t)` over the grid; negative when strictly conservative.
    pub max_violation: f64,
    pub worst_theta: f64,
    pub worst_t: f64,
    pub passed: bool,
}

/// Evaluates `P_theta(p <= t) - t` over null parameters and levels.
pub fn check_validity(
    kind: PValueKind,
    problem: &OneSidedProblem,
    c: f64,
    theta_grid: &[f64],
    t_grid: &[f64],
) -> Result<ValidityReport> {
    if theta_grid.is_empty() || t_grid.is_empty() {
        return Err(Error::usage("validity grids must be nonempty"));
    }
    let mut report = ValidityReport {
        kind,
        c,
        max_violation: f64::NEG_INFINITY,
        worst_theta: f64::NAN,
        worst_t: f64::NAN,
        passed: false,
    };
    for &theta in theta_grid {
        if !problem.in_null(theta) || theta <= 0.0 || theta >= 1.0 {
            return Err(Error::domain(format!(
                "theta = {theta} is not an interior null parameter"
            )));
        }
        for &t in t_grid {
            let excess = problem.cdf(kind, theta, t, c)? - t;
            if excess > report.max_violation {
                report.max_violation = excess;
                report.worst_theta = theta;
                report.worst_t = t;
            }
        }
    }
    report.passed = report.max_violation <= VALIDITY_TOL;
    Ok(report)
}

/// Outcome of [`check_uniform_validity`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformValidityReport {
    /// `max (P(Lfc <= t) / P(Lfc <= tau) - t / tau)` over checked pairs.
    pub max_ratio_excess: f64,
    pub pairs_checked: usize,
    /// Largest decrease of `h(t) = P_theta(Pt <= t) / P_theta*(Pt <= t)`
    /// between consecutive grid points.
    pub max_h_drop: f64,
    pub ratio_passed: bool,
    pub h_monotone: bool,
}

impl UniformValidityReport {
    pub fn passed(&self) -> bool {
        self.ratio_passed && self.h_monotone
    }
}

/// Checks the ratio condition `P(p <= t) / P(p <= tau) <= t / tau` for the
/// `Lfc` p-value, and that `h(t)` is nondecreasing on `t_grid`.
///
/// The ratio bound is guaranteed for `tau` on the `Lfc` support (see
/// [`OneSidedProblem::lfc_support`]); between support points it can fail.
pub fn check_uniform_validity(
    problem: &OneSidedProblem,
    theta: f64,
    tau_grid: &[f64],
    t_grid: &[f64],
) -> Result<UniformValidityReport> {
    if !problem.in_null(theta) {
        return Err(Error::domain(format!("theta = {theta} is not in the null")));
    }
    let mut max_ratio_excess = f64::NEG_INFINITY;
    let mut pairs_checked = 0;
    for &tau in tau_grid {
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(Error::domain(format!("tau must lie in (0, 1], got {tau}")));
        }
        let at_tau = problem.p_lfc_cdf(theta, tau)?;
        if at_tau <= 0.0 {
            continue;
        }
        for &t in t_grid.iter().filter(|&&t| t >= 0.0 && t <= tau) {
            let ratio = problem.p_lfc_cdf(theta, t)? / at_tau;
            max_ratio_excess = max_ratio_excess.max(ratio - t / tau);
            pairs_checked += 1;
        }
    }

    let mut ts: Vec<f64> = t_grid
        .iter()
        .copied()
        .filter(|&t| t > 0.0 && t <= 1.0)
        .collect();
    ts.sort_by(f64::total_cmp);
    let mut max_h_drop: f64 = 0.0;
    let mut prev: Option<f64> = None;
    for t in ts {
        let denom = problem.pt_rand_cdf(problem.theta_star, t)?;
        if denom <= 0.0 {
            continue;
        }
        let h = problem.pt_rand_cdf(theta, t)? / denom;
        if let Some(p) = prev {
            max_h_drop = max_h_drop.max(p - h);
        }
        prev = Some(h);
    }

    Ok(UniformValidityReport {
        max_ratio_excess,
        pairs_checked,
        max_h_drop,
        ratio_passed: max_ratio_excess <= VALIDITY_TOL,
        h_monotone: max_h_drop <= 1e-9,
    })
}

/// `points` evenly spaced values covering `[0, 1]`.
pub fn unit_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![1.0],
        _ => (0..points)
            .map(|i| i as f64 / (points - 1) as f64)
            .collect(),
    }
}
