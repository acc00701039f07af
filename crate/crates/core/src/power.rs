//! Outage-constrained power allocation for one HCU–LCU sharing pair.
//!
//! Under unit-mean exponential fading on both the LCU link and the HCU
//! interference link, the LCU outage has a closed form. Requiring it to stay
//! below `P_o` caps the HCU power by a function `f(P_l)` of the LCU power,
//! which is increasing above its zero crossing `P_l_min`. The capacity-optimal
//! operating point lies on that curve where it meets a power limit.

use serde::{Deserialize, Serialize};

use crate::channel::PairGains;
use crate::error::{Error, Result};
use crate::mathkernels::{bisect_bracket, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLimits {
    /// HCU power ceiling in watts.
    pub p_max_hcu: f64,
    /// LCU power ceiling in watts.
    pub p_max_lcu: f64,
    /// Noise power in watts.
    pub noise: f64,
}

impl PowerLimits {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("p_max_hcu", self.p_max_hcu),
            ("p_max_lcu", self.p_max_lcu),
            ("noise", self.noise),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!(
                    "power limit {name} must be > 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QosRequirements {
    /// LCU SINR threshold, linear.
    pub sinr_min_lcu: f64,
    /// Tolerable LCU outage probability.
    pub outage_max: f64,
    /// Minimum HCU capacity in bits/s/Hz.
    pub cap_min_hcu: f64,
}

impl QosRequirements {
    pub fn validate(&self) -> Result<()> {
        if !(self.sinr_min_lcu > 0.0 && self.sinr_min_lcu.is_finite()) {
            return Err(Error::Config(format!(
                "sinr_min_lcu must be > 0, got {}",
                self.sinr_min_lcu
            )));
        }
        if !(self.outage_max > 0.0 && self.outage_max < 1.0) {
            return Err(Error::Config(format!(
                "outage_max must lie in (0, 1), got {}",
                self.outage_max
            )));
        }
        if !(self.cap_min_hcu >= 0.0 && self.cap_min_hcu.is_finite()) {
            return Err(Error::Config(format!(
                "cap_min_hcu must be >= 0, got {}",
                self.cap_min_hcu
            )));
        }
        Ok(())
    }
}

/// Which limit the optimal point sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCase {
    /// LCU at its ceiling, HCU at `f(P_l_max)`.
    Scenario1,
    /// HCU at its ceiling, LCU at `f⁻¹(P_h_max)`.
    Scenario2,
    /// The LCU misses its reliability target even without interference.
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerAllocation {
    pub p_hcu: f64,
    pub p_lcu: f64,
    pub boundary_case: BoundaryCase,
}

impl PowerAllocation {
    pub fn infeasible() -> Self {
        Self {
            p_hcu: 0.0,
            p_lcu: 0.0,
            boundary_case: BoundaryCase::Infeasible,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.boundary_case != BoundaryCase::Infeasible
    }
}

fn check_nonnegative(func: &'static str, name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(
            func,
            format!("{name} must be finite and >= 0, got {v}"),
        ))
    }
}

/// Closed-form LCU outage probability with one HCU interferer.
pub fn outage_probability(
    p_h: f64,
    p_l: f64,
    gains: &PairGains,
    qos: &QosRequirements,
    noise: f64,
) -> Result<f64> {
    check_nonnegative("outage_probability", "p_h", p_h)?;
    check_nonnegative("outage_probability", "p_l", p_l)?;
    check_nonnegative("outage_probability", "noise", noise)?;
    let g0 = qos.sinr_min_lcu;
    if g0 <= 0.0 {
        return Ok(0.0);
    }
    if p_l == 0.0 {
        return Ok(1.0);
    }
    let signal = p_l * gains.a_jj;
    let interference = g0 * p_h * gains.a_ij;
    let keep = signal * (-g0 * noise / signal).exp() / (signal + interference);
    Ok((1.0 - keep).clamp(0.0, 1.0))
}

/// Largest HCU power compatible with the LCU outage target at LCU power `p_l`.
///
/// Negative below [`lcu_power_min`]; callers treat that as infeasible.
pub fn hcu_power_bound_f(
    p_l: f64,
    gains: &PairGains,
    qos: &QosRequirements,
    noise: f64,
) -> Result<f64> {
    if !(p_l > 0.0 && p_l.is_finite()) {
        return Err(Error::domain(
            "hcu_power_bound_f",
            format!("LCU power must be > 0, got {p_l}"),
        ));
    }
    let g0 = qos.sinr_min_lcu;
    let po = qos.outage_max;
    let b = g0 * noise / (p_l * gains.a_jj);
    // e^{-b}/(1-Po) - 1 written to keep precision near the zero crossing
    let margin = ((-b).exp_m1() + po) / (1.0 - po);
    Ok(gains.a_jj * p_l / (g0 * gains.a_ij) * margin)
}

/// Zero crossing of `f`: the least LCU power meeting the outage target alone.
pub fn lcu_power_min(gains: &PairGains, qos: &QosRequirements, noise: f64) -> f64 {
    -qos.sinr_min_lcu * noise / (gains.a_jj * (-qos.outage_max).ln_1p())
}

/// Inverse of `f` on `[P_l_min, p_l_cap]`; returns the upper end of the final
/// bisection bracket so that `f(result) >= target` (reliability kept).
pub fn inverse_hcu_power_bound(
    target: f64,
    p_l_cap: f64,
    gains: &PairGains,
    qos: &QosRequirements,
    noise: f64,
    tol: Tolerance,
) -> Result<f64> {
    let p_min = lcu_power_min(gains, qos, noise);
    let lo = p_min * (1.0 + 1e-12);
    if !(lo < p_l_cap) {
        return Err(Error::domain(
            "inverse_hcu_power_bound",
            format!("empty LCU power range [{lo}, {p_l_cap}]"),
        ));
    }
    let f = |p: f64| hcu_power_bound_f(p, gains, qos, noise).unwrap_or(f64::NEG_INFINITY);
    let bracket = bisect_bracket(f, target, lo, p_l_cap, tol)?;
    Ok(bracket.hi)
}

/// Boundary-optimal powers for one pair.
pub fn optimal_pair_powers(
    gains: &PairGains,
    limits: &PowerLimits,
    qos: &QosRequirements,
    tol: Tolerance,
) -> Result<PowerAllocation> {
    gains.validate()?;
    let noise = limits.noise;
    let p_min = lcu_power_min(gains, qos, noise);
    if !(p_min < limits.p_max_lcu) {
        return Ok(PowerAllocation::infeasible());
    }
    let hcu_at_lcu_max = hcu_power_bound_f(limits.p_max_lcu, gains, qos, noise)?;
    if hcu_at_lcu_max < limits.p_max_hcu {
        return Ok(PowerAllocation {
            p_hcu: hcu_at_lcu_max.max(0.0),
            p_lcu: limits.p_max_lcu,
            boundary_case: BoundaryCase::Scenario1,
        });
    }
    let p_lcu =
        inverse_hcu_power_bound(limits.p_max_hcu, limits.p_max_lcu, gains, qos, noise, tol)?;
    Ok(PowerAllocation {
        p_hcu: limits.p_max_hcu,
        p_lcu,
        boundary_case: BoundaryCase::Scenario2,
    })
}
