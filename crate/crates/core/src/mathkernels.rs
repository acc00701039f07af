//! Special functions and root finding shared by the closed forms.
//!
//! Only the first-order exponential integral is provided, together with its
//! exponentially scaled form `e^x E1(x)`, which is what the ergodic capacity
//! expression actually consumes. The scaled form never forms `e^x` for large
//! arguments, so it stays finite where the naive product overflows.

use serde::{Deserialize, Serialize};

use crate::error::{BracketSide, Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_CUTOFF: f64 = 1.0;
const CF_EPS: f64 = 1e-16;
const CF_TINY: f64 = 1e-300;
const CF_MAX_TERMS: usize = 10_000;

/// Stopping rule for [`bisect_increasing`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs_eps: f64,
    pub max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_eps: 1e-5,
            max_iter: 200,
        }
    }
}

impl Tolerance {
    pub fn new(abs_eps: f64, max_iter: usize) -> Result<Self> {
        let tol = Self { abs_eps, max_iter };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_eps > 0.0 && self.abs_eps.is_finite()) {
            return Err(Error::Config(format!(
                "tolerance abs_eps must be positive, got {}",
                self.abs_eps
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("tolerance max_iter must be >= 1".into()));
        }
        Ok(())
    }
}

fn check_positive(func: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(
            func,
            format!("argument must be finite and > 0, got {x}"),
        ))
    }
}

/// `E1(x) + ln x + gamma` by its power series; only used for `x <= 1`.
fn e1_series_tail(x: f64) -> f64 {
    // sum_{k>=1} (-1)^{k+1} x^k / (k * k!)
    let mut sum = 0.0;
    let mut term = 1.0; // x^k / k!
    for k in 1..200 {
        let kf = k as f64;
        term *= x / kf;
        let contrib = term / kf;
        if k % 2 == 1 {
            sum += contrib;
        } else {
            sum -= contrib;
        }
        if contrib < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// `e^x E1(x)` by the modified Lentz continued fraction; valid for `x > 1`.
fn scaled_e1_continued_fraction(x: f64) -> f64 {
    let mut b = x + 1.0;
    let mut c = 1.0 / CF_TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..CF_MAX_TERMS {
        let a = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

/// First-order exponential integral `E1(x) = ∫_x^∞ e^{-t}/t dt`.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    check_positive("exp_integral_e1", x)?;
    if x <= SERIES_CUTOFF {
        Ok(-EULER_GAMMA - x.ln() + e1_series_tail(x))
    } else {
        Ok(scaled_e1_continued_fraction(x) * (-x).exp())
    }
}

/// `e^x E1(x)`, evaluated without forming `e^x` for large `x`.
pub fn scaled_e1(x: f64) -> Result<f64> {
    check_positive("scaled_e1", x)?;
    if x <= SERIES_CUTOFF {
        Ok(x.exp() * (-EULER_GAMMA - x.ln() + e1_series_tail(x)))
    } else {
        Ok(scaled_e1_continued_fraction(x))
    }
}

/// Final bracket of a bisection run. `f(lo) <= target <= f(hi)` holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
}

impl Bracket {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Bisection on a monotone increasing `f`, keeping the full bracket.
///
/// Halving stops once the argument bracket is no wider than `abs_eps` and the
/// function values at its ends differ by at most `abs_eps * |target|`, or after
/// `max_iter` halvings, or when the bracket can no longer be split in `f64`.
pub fn bisect_bracket<F>(f: F, target: f64, lo: f64, hi: f64, tol: Tolerance) -> Result<Bracket>
where
    F: Fn(f64) -> f64,
{
    tol.validate()?;
    if !(lo.is_finite() && hi.is_finite() && target.is_finite()) {
        return Err(Error::domain(
            "bisect_increasing",
            "non-finite bracket or target",
        ));
    }
    if !(lo < hi) {
        return Err(Error::domain(
            "bisect_increasing",
            format!("bracket requires lo < hi, got [{lo}, {hi}]"),
        ));
    }
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if !(flo <= target) {
        return Err(Error::Bracket {
            side: BracketSide::Low,
            target,
            value: flo,
        });
    }
    if !(fhi >= target) {
        return Err(Error::Bracket {
            side: BracketSide::High,
            target,
            value: fhi,
        });
    }
    let (mut lo, mut hi) = (lo, hi);
    let value_eps = tol.abs_eps * target.abs();
    let mut iterations = 0;
    while iterations < tol.max_iter {
        if hi - lo <= tol.abs_eps && fhi - flo <= value_eps {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm < target {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        iterations += 1;
    }
    Ok(Bracket { lo, hi, iterations })
}

/// Solves `f(x) = target` for monotone increasing `f` on `[lo, hi]`.
///
/// Returns the midpoint of the final bracket (see [`bisect_bracket`]).
pub fn bisect_increasing<F>(f: F, target: f64, lo: f64, hi: f64, tol: Tolerance) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let b = bisect_bracket(f, target, lo, hi, tol)?;
    Ok(b.mid().clamp(lo, hi))
}
