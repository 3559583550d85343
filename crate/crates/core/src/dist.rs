//! Exact numerics for discrete models with ordered integer support.
//!
//! The binomial family is the only model shipped. Probabilities are
//! evaluated with Loader's saddle-point expansion of the pmf, and tail sums
//! always start from the tail nearer to `k` and walk away from the mode, so
//! tiny tail probabilities are never obtained as `1 - (something close to 1)`.
//!
//! Two generalized inverses are provided:
//!
//! * [`DiscreteModel::quantile`]: `inf { k : F(k) >= y }`, restricted to the
//!   support so that `quantile(0) == 0`.
//! * [`DiscreteModel::left_quantile`]: `sup { k : F(k-) <= y }` over the
//!   support, the inverse of the left-continuous version of `F`.

use crate::error::{check_probability, Error, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_5;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Relative size below which the remaining terms of a tail sum are dropped.
const TAIL_EPS: f64 = 1e-17;

/// A probability model on `{0, ..., support_max()}`.
///
/// Every method is total over `i64`: points outside the support have mass
/// zero, `cdf` is 0 below and 1 above the support.
pub trait DiscreteModel {
    fn support_max(&self) -> u64;

    /// Natural log of `P(T = k)`; `-inf` outside the support.
    fn ln_pmf(&self, k: i64) -> f64;

    /// `P(T <= k)`.
    fn cdf(&self, k: i64) -> f64;

    /// `P(T > k)`.
    fn sf(&self, k: i64) -> f64;

    fn pmf(&self, k: i64) -> f64 {
        self.ln_pmf(k).exp()
    }

    /// `F(k-) = P(T < k)`.
    fn cdf_left(&self, k: i64) -> f64 {
        self.cdf(k.saturating_sub(1))
    }

    /// Smallest `k` in the support with `F(k) >= y`. `quantile(0) == 0`.
    fn quantile(&self, y: f64) -> Result<i64> {
        check_probability("quantile level", y)?;
        if y == 0.0 {
            return Ok(0);
        }
        Ok(first_true(self.support_max(), |k| self.cdf(k) >= y))
    }

    /// Largest `k` in the support with `F(k-) <= y`.
    fn left_quantile(&self, y: f64) -> Result<i64> {
        check_probability("quantile level", y)?;
        // F(0-) = 0 <= y, so the result is never negative.
        Ok(first_true(self.support_max(), |k| self.cdf_left(k) > y) - 1)
    }

    /// Smallest `k` in the support with `P(T > k) <= t`.
    ///
    /// This is `quantile(1 - t)` evaluated through the survival function,
    /// which keeps full relative precision when `t` is tiny.
    fn upper_quantile(&self, t: f64) -> Result<i64> {
        check_probability("tail level", t)?;
        Ok(first_true(self.support_max(), |k| self.sf(k) <= t))
    }
}

/// Smallest `k` in `0..=max` where `pred` holds, or `max + 1` if none does.
/// `pred` must be monotone (false, ..., false, true, ..., true).
fn first_true(max: u64, pred: impl Fn(i64) -> bool) -> i64 {
    let (mut lo, mut hi) = (0_i64, max as i64 + 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// `Bin(n, theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Binomial {
    n: u64,
    theta: f64,
}

impl Binomial {
    pub fn new(n: u64, theta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("binomial size n must be at least 1"));
        }
        check_probability("theta", theta)?;
        Ok(Self { n, theta })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `floor((n + 1) * theta)`, clamped to the support.
    fn mode(&self) -> i64 {
        (((self.n + 1) as f64 * self.theta).floor() as i64).min(self.n as i64)
    }

    /// `cdf` at a real argument, by flooring.
    pub fn cdf_at(&self, x: f64) -> f64 {
        self.cdf(floor_to_i64(x))
    }

    /// `pmf` at a real argument, by flooring.
    pub fn pmf_at(&self, x: f64) -> f64 {
        self.pmf(floor_to_i64(x))
    }

    /// `sum_{j <= k} P(T = j)` for `0 <= k < mode`, summed from `k` downwards.
    fn lower_tail_sum(&self, k: i64) -> f64 {
        let (n, p, q) = (self.n as f64, self.theta, 1.0 - self.theta);
        let mut term = self.pmf(k);
        let mut sum = 0.0;
        let mut j = k;
        while term > 0.0 {
            sum += term;
            if j == 0 {
                break;
            }
            let jf = j as f64;
            let ratio = jf * q / ((n - jf + 1.0) * p);
            term *= ratio;
            j -= 1;
            if ratio < 1.0 && term / (1.0 - ratio) <= TAIL_EPS * sum {
                sum += term;
                break;
            }
        }
        sum
    }

    /// `sum_{j > k} P(T = j)` for `mode <= k < n`, summed from `k + 1` upwards.
    fn upper_tail_sum(&self, k: i64) -> f64 {
        let (n, p, q) = (self.n as f64, self.theta, 1.0 - self.theta);
        let last = self.n as i64;
        let mut j = k + 1;
        let mut term = self.pmf(j);
        let mut sum = 0.0;
        while term > 0.0 {
            sum += term;
            if j == last {
                break;
            }
            let jf = j as f64;
            let ratio = (n - jf) * p / ((jf + 1.0) * q);
            term *= ratio;
            j += 1;
            if ratio < 1.0 && term / (1.0 - ratio) <= TAIL_EPS * sum {
                sum += term;
                break;
            }
        }
        sum
    }
}

fn floor_to_i64(x: f64) -> i64 {
    if x.is_nan() {
        return i64::MIN;
    }
    x.floor().clamp(i64::MIN as f64, i64::MAX as f64) as i64
}

impl DiscreteModel for Binomial {
    fn support_max(&self) -> u64 {
        self.n
    }

    fn ln_pmf(&self, k: i64) -> f64 {
        if k < 0 || k as u64 > self.n {
            return f64::NEG_INFINITY;
        }
        ln_dbinom(k as u64, self.n, self.theta, 1.0 - self.theta)
    }

    fn cdf(&self, k: i64) -> f64 {
        if k < 0 {
            return 0.0;
        }
        if k as u64 >= self.n || self.theta == 0.0 {
            return 1.0;
        }
        if self.theta == 1.0 {
            return 0.0;
        }
        if k < self.mode() {
            self.lower_tail_sum(k)
        } else {
            1.0 - self.upper_tail_sum(k)
        }
    }

    fn sf(&self, k: i64) -> f64 {
        if k < 0 {
            return 1.0;
        }
        if k as u64 >= self.n || self.theta == 0.0 {
            return 0.0;
        }
        if self.theta == 1.0 {
            return 1.0;
        }
        if k >= self.mode() {
            self.upper_tail_sum(k)
        } else {
            1.0 - self.lower_tail_sum(k)
        }
    }
}

/// `ln(n!)` for `n <= 15`; every factorial in that range is exact in `f64`.
fn ln_small_factorial(n: u64) -> f64 {
    debug_assert!(n <= 15);
    (1..=n).map(|i| i as f64).product::<f64>().ln()
}

/// `ln(n!) - ((n + 1/2) ln n - n + ln sqrt(2 pi))`, the Stirling remainder.
fn stirlerr(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;

    let nf = n as f64;
    if n <= 15 {
        return ln_small_factorial(n) - (nf + 0.5) * nf.ln() + nf - LN_SQRT_2PI;
    }
    let nn = nf * nf;
    if n > 500 {
        (S0 - S1 / nn) / nf
    } else if n > 80 {
        (S0 - (S1 - S2 / nn) / nn) / nf
    } else if n > 35 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / nf
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / nf
    }
}

/// Deviance term `x ln(x / np) + np - x`, evaluated by series near `x = np`.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        if s.abs() < f64::MIN_POSITIVE {
            return s;
        }
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
    }
    x * (x / np).ln() + np - x
}

/// `ln P(T = x)` for `T ~ Bin(n, p)`, `q = 1 - p`, via Loader's expansion.
fn ln_dbinom(x: u64, n: u64, p: f64, q: f64) -> f64 {
    if p == 0.0 {
        return if x == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if q == 0.0 {
        return if x == n { 0.0 } else { f64::NEG_INFINITY };
    }
    let nf = n as f64;
    if x == 0 {
        return if p < 0.1 {
            -bd0(nf, nf * q) - nf * p
        } else {
            nf * q.ln()
        };
    }
    if x == n {
        return if q < 0.1 {
            -bd0(nf, nf * p) - nf * q
        } else {
            nf * p.ln()
        };
    }
    let xf = x as f64;
    let lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(xf, nf * p) - bd0(nf - xf, nf * q);
    let lf = LN_2PI + xf.ln() + (-xf / nf).ln_1p();
    lc - 0.5 * lf
}
