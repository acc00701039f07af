//! Large-scale link gains and RF unit conversions.
//!
//! A link's power gain is `L_p · D^{-φ} · χ` where `χ` is log-normal
//! shadowing. Small-scale fading is not part of the gain: it is unit-mean
//! exponential and enters only through its statistics (closed forms) or
//! through explicit draws in [`crate::montecarlo`]. The Doppler shift is
//! reported for inspection but never touches a gain, since carrier/Doppler
//! compensation leaves `|h(t)| = |h|`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Receiver/transmitter classes that select shadowing spread and exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinkClass {
    UavRbs,
    UavUav,
    UavHap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfParams {
    /// Linear path-loss constant `L_p` (gain at 1 m).
    pub pathloss_factor: f64,
    /// Exponent for UAV–RBS and UAV–UAV links.
    pub pathloss_exponent: f64,
    /// Exponent for UAV–HAP links.
    pub hap_pathloss_exponent: f64,
    pub carrier_freq: f64,
    /// Noise power `P_N` in watts.
    pub noise_power: f64,
    pub shadow_sigma_rbs_db: f64,
    pub shadow_sigma_uav_db: f64,
    pub shadow_sigma_hap_db: f64,
}

impl Default for RfParams {
    fn default() -> Self {
        let carrier_freq = 2e9;
        Self {
            pathloss_factor: free_space_factor(carrier_freq),
            pathloss_exponent: 3.0,
            hap_pathloss_exponent: 2.0,
            carrier_freq,
            noise_power: db_to_linear(-114.0, DbKind::MilliwattReferenced),
            shadow_sigma_rbs_db: 8.0,
            shadow_sigma_uav_db: 3.0,
            shadow_sigma_hap_db: 3.0,
        }
    }
}

impl RfParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("pathloss_factor", self.pathloss_factor),
            ("pathloss_exponent", self.pathloss_exponent),
            ("hap_pathloss_exponent", self.hap_pathloss_exponent),
            ("carrier_freq", self.carrier_freq),
            ("noise_power", self.noise_power),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!(
                    "rf.{name} must be positive, got {v}"
                )));
            }
        }
        let sigmas = [
            ("shadow_sigma_rbs_db", self.shadow_sigma_rbs_db),
            ("shadow_sigma_uav_db", self.shadow_sigma_uav_db),
            ("shadow_sigma_hap_db", self.shadow_sigma_hap_db),
        ];
        for (name, v) in sigmas {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("rf.{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_freq
    }

    pub fn shadow_sigma_db(&self, class: LinkClass) -> f64 {
        match class {
            LinkClass::UavRbs => self.shadow_sigma_rbs_db,
            LinkClass::UavUav => self.shadow_sigma_uav_db,
            LinkClass::UavHap => self.shadow_sigma_hap_db,
        }
    }

    pub fn exponent(&self, class: LinkClass) -> f64 {
        match class {
            LinkClass::UavHap => self.hap_pathloss_exponent,
            _ => self.pathloss_exponent,
        }
    }
}

/// Free-space gain at 1 m, `(λ / 4π)²`.
pub fn free_space_factor(carrier_freq: f64) -> f64 {
    let lambda = SPEED_OF_LIGHT / carrier_freq;
    (lambda / (4.0 * std::f64::consts::PI)).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NodePosition {
    pub x: f64,
    pub y: f64,
    pub altitude: f64,
    /// Ground speed in m/s.
    pub speed: f64,
    /// Heading in the horizontal plane, radians.
    pub heading: f64,
}

impl NodePosition {
    pub fn fixed(x: f64, y: f64, altitude: f64) -> Self {
        Self {
            x,
            y,
            altitude,
            speed: 0.0,
            heading: 0.0,
        }
    }

    pub fn distance_to(&self, other: &NodePosition) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.altitude - other.altitude;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// Angle between this node's velocity and the line of sight to `other`.
    pub fn los_angle_to(&self, other: &NodePosition) -> f64 {
        let d = self.distance_to(other);
        if d == 0.0 {
            return std::f64::consts::FRAC_PI_2;
        }
        let (ux, uy) = (self.heading.cos(), self.heading.sin());
        let cos = ((other.x - self.x) * ux + (other.y - self.y) * uy) / d;
        cos.clamp(-1.0, 1.0).acos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGain {
    pub alpha: f64,
    pub distance: f64,
    pub shadow: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DopplerInfo {
    pub doppler_shift: f64,
    pub angle: f64,
    pub wavelength: f64,
}

/// The six large-scale gains of one candidate HCU–LCU sharing pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairGains {
    /// LCU transmitter to LCU receiver.
    pub a_jj: f64,
    /// HCU to LCU receiver (interference).
    pub a_ij: f64,
    pub a_ir: f64,
    pub a_ih: f64,
    /// LCU transmitter to RBS (interference).
    pub a_jr: f64,
    /// LCU transmitter to HAP (interference).
    pub a_jh: f64,
}

impl PairGains {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("a_jj", self.a_jj),
            ("a_ij", self.a_ij),
            ("a_ir", self.a_ir),
            ("a_ih", self.a_ih),
            ("a_jr", self.a_jr),
            ("a_jh", self.a_jh),
        ];
        for (name, v) in all {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(
                    "PairGains",
                    format!("{name} must be > 0, got {v}"),
                ));
            }
        }
        Ok(())
    }
}

/// Direct gains of one HCU to the two receivers it can use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HcuGains {
    pub a_ir: f64,
    pub a_ih: f64,
}

/// Gains of one LCU pair: its own link and its leakage into RBS and HAP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LcuGains {
    pub a_jj: f64,
    pub a_jr: f64,
    pub a_jh: f64,
}

/// Every gain needed to evaluate all `I × J` candidate pairs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GainTable {
    pub hcu: Vec<HcuGains>,
    pub lcu: Vec<LcuGains>,
    /// Row-major `I × J` HCU-to-LCU-receiver interference gains.
    pub cross: Vec<f64>,
}

impl GainTable {
    pub fn new(hcu: Vec<HcuGains>, lcu: Vec<LcuGains>, cross: Vec<f64>) -> Result<Self> {
        if cross.len() != hcu.len() * lcu.len() {
            return Err(Error::Dimension(format!(
                "cross gains hold {} entries, expected {} x {}",
                cross.len(),
                hcu.len(),
                lcu.len()
            )));
        }
        Ok(Self { hcu, lcu, cross })
    }

    pub fn n_hcu(&self) -> usize {
        self.hcu.len()
    }

    pub fn n_lcu(&self) -> usize {
        self.lcu.len()
    }

    pub fn pair(&self, i: usize, j: usize) -> PairGains {
        let h = self.hcu[i];
        let l = self.lcu[j];
        PairGains {
            a_jj: l.a_jj,
            a_ij: self.cross[i * self.lcu.len() + j],
            a_ir: h.a_ir,
            a_ih: h.a_ih,
            a_jr: l.a_jr,
            a_jh: l.a_jh,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DbKind {
    PowerRatio,
    MilliwattReferenced,
}

/// dB to linear ratio, or dBm to watts.
pub fn db_to_linear(x: f64, kind: DbKind) -> f64 {
    match kind {
        DbKind::PowerRatio => 10f64.powf(x / 10.0),
        DbKind::MilliwattReferenced => 10f64.powf((x - 30.0) / 10.0),
    }
}

pub fn linear_to_db(x: f64, kind: DbKind) -> f64 {
    match kind {
        DbKind::PowerRatio => 10.0 * x.log10(),
        DbKind::MilliwattReferenced => 10.0 * x.log10() + 30.0,
    }
}

/// Path loss with log-normal shadowing for one link.
///
/// `z` is a unit-normal draw supplied by the caller; the shadowing factor is
/// `10^{σ z / 10}`.
pub fn large_scale_gain(
    tx: &NodePosition,
    rx: &NodePosition,
    rf: &RfParams,
    class: LinkClass,
    z: f64,
) -> Result<LinkGain> {
    let distance = tx.distance_to(rx);
    if !(distance > 0.0) {
        return Err(Error::DegenerateGeometry(format!(
            "coincident transmitter and receiver at ({}, {}, {})",
            tx.x, tx.y, tx.altitude
        )));
    }
    gain_at_distance(
        distance,
        rf.pathloss_factor,
        rf.exponent(class),
        rf.shadow_sigma_db(class),
        z,
    )
}

pub(crate) fn gain_at_distance(
    distance: f64,
    factor: f64,
    exponent: f64,
    sigma_db: f64,
    z: f64,
) -> Result<LinkGain> {
    if !(distance > 0.0) {
        return Err(Error::DegenerateGeometry(format!(
            "link distance {distance}"
        )));
    }
    let shadow = db_to_linear(sigma_db * z, DbKind::PowerRatio);
    Ok(LinkGain {
        alpha: factor * distance.powf(-exponent) * shadow,
        distance,
        shadow,
    })
}

pub fn doppler_shift(pos: &NodePosition, los_angle: f64, rf: &RfParams) -> DopplerInfo {
    let wavelength = rf.wavelength();
    DopplerInfo {
        doppler_shift: pos.speed / wavelength * los_angle.cos(),
        angle: los_angle,
        wavelength,
    }
}
