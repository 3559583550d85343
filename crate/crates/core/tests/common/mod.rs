//! Exact rational reference values.
//!
//! Binomial masses are computed in `BigRational` arithmetic and every p-value
//! CDF is obtained by enumerating the statistic's support and integrating the
//! uniform draws exactly (the conditional CDF given `T = k` is piecewise
//! linear in the draw).

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Exact value of a double.
pub fn from_f64(x: f64) -> Q {
    Q::from_float(x).expect("finite")
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().expect("representable")
}

fn clamp01(x: Q) -> Q {
    if x.is_negative() {
        Q::zero()
    } else if x > Q::one() {
        Q::one()
    } else {
        x
    }
}

/// `P(T = k)` for `k = 0..=n`.
pub fn binom_pmf(n: u64, theta: &Q) -> Vec<Q> {
    let one_minus = Q::one() - theta;
    let mut coef = BigInt::one();
    (0..=n)
        .map(|k| {
            if k > 0 {
                coef = coef.clone() * BigInt::from(n - k + 1) / BigInt::from(k);
            }
            Q::from_integer(coef.clone())
                * num_traits::pow(theta.clone(), k as usize)
                * num_traits::pow(one_minus.clone(), (n - k) as usize)
        })
        .collect()
}

/// `P(T <= k)` with the conventions `cdf(-1) = 0`, `cdf(n) = 1`.
pub fn binom_cdf(pmf: &[Q], k: i64) -> Q {
    if k < 0 {
        return Q::zero();
    }
    pmf.iter()
        .take(k as usize + 1)
        .fold(Q::zero(), |a, b| a + b)
}

pub fn binom_sf(pmf: &[Q], k: i64) -> Q {
    Q::one() - binom_cdf(pmf, k)
}

/// Upper-tail test with the null law at the boundary and the data law at `theta`.
pub struct Exact {
    pub null: Vec<Q>,
    pub alt: Vec<Q>,
    /// `null_sf[k + 1] = P*(T > k)` for `k = -1..=n`.
    null_sf: Vec<Q>,
}

impl Exact {
    pub fn new(n: u64, theta_star: &Q, theta: &Q) -> Self {
        let null = binom_pmf(n, theta_star);
        let null_sf = (-1..=n as i64).map(|k| binom_sf(&null, k)).collect();
        Self {
            null,
            alt: binom_pmf(n, theta),
            null_sf,
        }
    }

    fn sf(&self, k: i64) -> Q {
        self.null_sf[(k + 1) as usize].clone()
    }

    fn n(&self) -> i64 {
        self.null.len() as i64 - 1
    }

    pub fn p_lfc(&self, k: i64) -> Q {
        self.sf(k - 1)
    }

    pub fn p_pt(&self, k: i64, u: &Q) -> Q {
        self.sf(k) + u * &self.null[k as usize]
    }

    /// Largest value of `p_lfc` not above `c`, or 0.
    pub fn c_star(&self, c: &Q) -> Q {
        (0..=self.n())
            .map(|k| self.p_lfc(k))
            .filter(|p| p <= c)
            .max()
            .unwrap_or_else(Q::zero)
    }

    pub fn lfc_cdf(&self, t: &Q) -> Q {
        (0..=self.n())
            .filter(|&k| &self.p_lfc(k) <= t)
            .map(|k| self.alt[k as usize].clone())
            .fold(Q::zero(), |a, b| a + b)
    }

    pub fn rand1_cdf(&self, t: &Q, c: &Q) -> Q {
        let s = self.c_star(c);
        (0..=self.n())
            .map(|k| {
                let p = self.p_lfc(k);
                let cond = if c.is_zero() || s.is_zero() || p > s {
                    t.clone()
                } else if p / &s <= *t {
                    Q::one()
                } else {
                    Q::zero()
                };
                cond * &self.alt[k as usize]
            })
            .fold(Q::zero(), |a, b| a + b)
    }

    /// Lebesgue measure of `{u in (0,1) : p_pt(k, u) <= x}`.
    fn pt_measure(&self, k: i64, x: &Q) -> Q {
        let base = self.sf(k);
        let atom = &self.null[k as usize];
        if atom.is_zero() {
            return if &base <= x { Q::one() } else { Q::zero() };
        }
        clamp01((x - base) / atom)
    }

    pub fn pt_cdf(&self, t: &Q) -> Q {
        (0..=self.n())
            .map(|k| self.pt_measure(k, t) * &self.alt[k as usize])
            .fold(Q::zero(), |a, b| a + b)
    }

    pub fn rand2_cdf(&self, t: &Q, c: &Q) -> Q {
        if c.is_zero() {
            return t.clone();
        }
        if c.is_one() {
            return self.pt_cdf(t);
        }
        (0..=self.n())
            .map(|k| {
                // q < c maps to q / c; q >= c is replaced by an independent uniform.
                let below = self.pt_measure(k, &(t * c));
                let replaced = Q::one() - self.pt_measure(k, c);
                (below + t * replaced) * &self.alt[k as usize]
            })
            .fold(Q::zero(), |a, b| a + b)
    }
}
