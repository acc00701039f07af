//! Scenario configuration and random scenario generation.
//!
//! A scenario is one RBS at the centre of a square area, one HAP vertically
//! above it, `I` HCUs placed uniformly at random (a Poisson process
//! conditioned on its count), and `J` LCU pairs. Each LCU pair is a receiver
//! placed uniformly at random and its lane neighbour, the transmitter, one
//! time headway ahead along a random straight-line heading. The gap is
//! exponential with mean `headway × speed`.
//!
//! Every random quantity comes from a stream keyed by the seed and the entity
//! it belongs to, so changing `J`, the speed or any RF parameter never
//! reshuffles the draws of unrelated entities. Sweeps therefore compare
//! methods and parameter values on common random numbers.

use std::f64::consts::TAU;
use std::path::Path;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::algorithms::{AllocationContext, MaxMinRefinement, MethodOptions, PairingObjective};
use crate::capacity::ConnectivityMode;
use crate::channel::{
    db_to_linear, doppler_shift, free_space_factor, gain_at_distance, large_scale_gain, DbKind,
    DopplerInfo, GainTable, HcuGains, LcuGains, LinkClass, NodePosition, RfParams,
};
use crate::energy::EnergyModel;
use crate::error::{Error, Result};
use crate::mathkernels::Tolerance;
use crate::montecarlo::keyed_rng;
use crate::power::{PowerLimits, QosRequirements};

/// 70 km/h in m/s.
pub const DEFAULT_SPEED_MPS: f64 = 70.0 / 3.6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub area_side_m: f64,
    pub rbs_height_m: f64,
    pub hap_altitude_m: f64,
    pub uav_altitude_m: f64,
    pub speed_mps: f64,
    /// Mean LCU pair gap is `headway_s × speed_mps`.
    pub headway_s: f64,
    /// Lower clamp on a drawn LCU pair gap.
    pub min_pair_spacing_m: f64,
    /// Replace every UAV–RBS distance by this value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rbs_distance_override_m: Option<f64>,
    /// Size of the UAV population the roles are drawn from; unlimited if absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub population: Option<usize>,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            area_side_m: 2000.0,
            rbs_height_m: 20.0,
            hap_altitude_m: 17_000.0,
            uav_altitude_m: 100.0,
            speed_mps: DEFAULT_SPEED_MPS,
            headway_s: 2.0,
            min_pair_spacing_m: 1.0,
            rbs_distance_override_m: None,
            population: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RfConfig {
    pub carrier_freq_hz: f64,
    /// Path-loss constant in dB; free space at 1 m for the carrier if absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pathloss_factor_db: Option<f64>,
    pub pathloss_exponent: f64,
    pub hap_pathloss_exponent: f64,
    pub noise_dbm: f64,
    pub shadow_sigma_rbs_db: f64,
    pub shadow_sigma_uav_db: f64,
    pub shadow_sigma_hap_db: f64,
    /// Multiply each link by `G_tx · G_rx / NF_rx`.
    pub fold_link_budget: bool,
    pub rbs_antenna_gain_dbi: f64,
    pub hap_antenna_gain_dbi: f64,
    pub uav_antenna_gain_dbi: f64,
    pub rbs_noise_figure_db: f64,
    pub hap_noise_figure_db: f64,
    pub uav_noise_figure_db: f64,
}

impl Default for RfConfig {
    fn default() -> Self {
        Self {
            carrier_freq_hz: 2e9,
            pathloss_factor_db: None,
            pathloss_exponent: 3.0,
            hap_pathloss_exponent: 2.0,
            noise_dbm: -114.0,
            shadow_sigma_rbs_db: 8.0,
            shadow_sigma_uav_db: 3.0,
            shadow_sigma_hap_db: 3.0,
            fold_link_budget: true,
            rbs_antenna_gain_dbi: 8.0,
            hap_antenna_gain_dbi: 8.0,
            uav_antenna_gain_dbi: 3.0,
            rbs_noise_figure_db: 5.0,
            hap_noise_figure_db: 3.0,
            uav_noise_figure_db: 9.0,
        }
    }
}

impl RfConfig {
    pub fn params(&self) -> RfParams {
        RfParams {
            pathloss_factor: self
                .pathloss_factor_db
                .map(|db| db_to_linear(db, DbKind::PowerRatio))
                .unwrap_or_else(|| free_space_factor(self.carrier_freq_hz)),
            pathloss_exponent: self.pathloss_exponent,
            hap_pathloss_exponent: self.hap_pathloss_exponent,
            carrier_freq: self.carrier_freq_hz,
            noise_power: db_to_linear(self.noise_dbm, DbKind::MilliwattReferenced),
            shadow_sigma_rbs_db: self.shadow_sigma_rbs_db,
            shadow_sigma_uav_db: self.shadow_sigma_uav_db,
            shadow_sigma_hap_db: self.shadow_sigma_hap_db,
        }
    }

    /// Linear factor `G_tx · G_rx / NF_rx` applied to a UAV-transmitted link
    /// of the given class, or 1 when folding is off.
    pub fn budget(&self, class: LinkClass) -> f64 {
        if !self.fold_link_budget {
            return 1.0;
        }
        let (g_rx, nf_rx) = match class {
            LinkClass::UavRbs => (self.rbs_antenna_gain_dbi, self.rbs_noise_figure_db),
            LinkClass::UavHap => (self.hap_antenna_gain_dbi, self.hap_noise_figure_db),
            LinkClass::UavUav => (self.uav_antenna_gain_dbi, self.uav_noise_figure_db),
        };
        db_to_linear(self.uav_antenna_gain_dbi + g_rx - nf_rx, DbKind::PowerRatio)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerConfig {
    pub p_max_hcu_dbm: f64,
    pub p_max_lcu_dbm: f64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self {
            p_max_hcu_dbm: 16.0,
            p_max_lcu_dbm: 22.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QosConfig {
    pub sinr_min_lcu_db: f64,
    pub outage_max: f64,
    /// Minimum HCU capacity (bits/s/Hz).
    pub cap_min_hcu: f64,
}

impl Default for QosConfig {
    fn default() -> Self {
        Self {
            sinr_min_lcu_db: 5.0,
            outage_max: 1e-3,
            cap_min_hcu: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub abs_eps: f64,
    pub max_iter: usize,
    pub objective: PairingObjective,
    pub refinement: MaxMinRefinement,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let tol = Tolerance::default();
        Self {
            abs_eps: tol.abs_eps,
            max_iter: tol.max_iter,
            objective: PairingObjective::default(),
            refinement: MaxMinRefinement::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyConfig {
    pub propulsion_w: f64,
    pub slot_s: f64,
    pub slots: usize,
    pub budget_j: f64,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        let m = EnergyModel::default();
        Self {
            propulsion_w: m.p_prop,
            slot_s: m.slot_duration,
            slots: m.horizon,
            budget_j: m.e_max,
        }
    }
}

impl EnergyConfig {
    pub fn model(&self) -> EnergyModel {
        EnergyModel {
            p_prop: self.propulsion_w,
            slot_duration: self.slot_s,
            horizon: self.slots,
            e_max: self.budget_j,
        }
    }
}

/// Everything that defines one run, in the units of the configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub n_hcu: usize,
    pub n_lcu_pairs: usize,
    pub mode: ConnectivityMode,
    pub geometry: GeometryConfig,
    pub rf: RfConfig,
    pub power: PowerConfig,
    pub qos: QosConfig,
    pub energy: EnergyConfig,
    pub solver: SolverConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            n_hcu: 20,
            n_lcu_pairs: 20,
            mode: ConnectivityMode::default(),
            geometry: GeometryConfig::default(),
            rf: RfConfig::default(),
            power: PowerConfig::default(),
            qos: QosConfig::default(),
            energy: EnergyConfig::default(),
            solver: SolverConfig::default(),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v}")))
    }
}

fn nonnegative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be >= 0, got {v}")))
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.geometry;
        positive("geometry.area_side_m", g.area_side_m)?;
        nonnegative("geometry.rbs_height_m", g.rbs_height_m)?;
        nonnegative("geometry.hap_altitude_m", g.hap_altitude_m)?;
        nonnegative("geometry.uav_altitude_m", g.uav_altitude_m)?;
        nonnegative("geometry.speed_mps", g.speed_mps)?;
        nonnegative("geometry.headway_s", g.headway_s)?;
        positive("geometry.min_pair_spacing_m", g.min_pair_spacing_m)?;
        if let Some(d) = g.rbs_distance_override_m {
            positive("geometry.rbs_distance_override_m", d)?;
        }
        let r = &self.rf;
        for (name, v) in [
            ("rf.noise_dbm", r.noise_dbm),
            ("rf.rbs_antenna_gain_dbi", r.rbs_antenna_gain_dbi),
            ("rf.hap_antenna_gain_dbi", r.hap_antenna_gain_dbi),
            ("rf.uav_antenna_gain_dbi", r.uav_antenna_gain_dbi),
            ("rf.rbs_noise_figure_db", r.rbs_noise_figure_db),
            ("rf.hap_noise_figure_db", r.hap_noise_figure_db),
            ("rf.uav_noise_figure_db", r.uav_noise_figure_db),
            ("power.p_max_hcu_dbm", self.power.p_max_hcu_dbm),
            ("power.p_max_lcu_dbm", self.power.p_max_lcu_dbm),
            ("qos.sinr_min_lcu_db", self.qos.sinr_min_lcu_db),
        ] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite, got {v}")));
            }
        }
        if let Some(db) = r.pathloss_factor_db {
            if !db.is_finite() {
                return Err(Error::Config(format!(
                    "rf.pathloss_factor_db must be finite, got {db}"
                )));
            }
        }
        self.rf_params().validate()?;
        self.limits().validate()?;
        self.qos_requirements().validate()?;
        self.tolerance().validate()?;
        self.energy.model().validate()?;
        Ok(())
    }

    pub fn rf_params(&self) -> RfParams {
        self.rf.params()
    }

    pub fn limits(&self) -> PowerLimits {
        PowerLimits {
            p_max_hcu: db_to_linear(self.power.p_max_hcu_dbm, DbKind::MilliwattReferenced),
            p_max_lcu: db_to_linear(self.power.p_max_lcu_dbm, DbKind::MilliwattReferenced),
            noise: self.rf_params().noise_power,
        }
    }

    pub fn qos_requirements(&self) -> QosRequirements {
        QosRequirements {
            sinr_min_lcu: db_to_linear(self.qos.sinr_min_lcu_db, DbKind::PowerRatio),
            outage_max: self.qos.outage_max,
            cap_min_hcu: self.qos.cap_min_hcu,
        }
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance {
            abs_eps: self.solver.abs_eps,
            max_iter: self.solver.max_iter,
        }
    }

    pub fn method_options(&self) -> MethodOptions {
        MethodOptions {
            objective: self.solver.objective,
            refinement: self.solver.refinement,
            seed: self.seed,
        }
    }

    /// Generates the scenario and prepares every allocation method on it.
    pub fn prepare(&self) -> Result<(ScenarioInstance, AllocationContext)> {
        let inst = generate(self)?;
        let ctx = AllocationContext::new(
            inst.gains.clone(),
            self.limits(),
            self.qos_requirements(),
            self.mode,
            self.tolerance(),
            self.energy.model(),
            self.method_options(),
        )?;
        Ok((inst, ctx))
    }
}

/// One generated scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioInstance {
    pub rbs: NodePosition,
    pub hap: NodePosition,
    pub hcu: Vec<NodePosition>,
    pub lcu_tx: Vec<NodePosition>,
    pub lcu_rx: Vec<NodePosition>,
    /// Horizontal gap of each LCU pair (m).
    pub pair_spacing: Vec<f64>,
    /// Doppler of each HCU's RBS link (informational).
    pub hcu_doppler: Vec<DopplerInfo>,
    pub gains: GainTable,
}

// stream tags
const POS_HCU: u64 = 1;
const POS_LCU: u64 = 2;
const SHADOW: u64 = 3;
// shadowing link kinds
const L_HCU_RBS: u64 = 0;
const L_HCU_HAP: u64 = 1;
const L_LCU_DIRECT: u64 = 2;
const L_LCU_RBS: u64 = 3;
const L_LCU_HAP: u64 = 4;
const L_CROSS: u64 = 5;

fn shadow_z(seed: u64, kind: u64, a: usize, b: usize) -> f64 {
    keyed_rng(seed, SHADOW << 8 | kind, a as u64, b as u64).sample(StandardNormal)
}

/// Generates node positions and all gains for a configuration.
pub fn generate(cfg: &ScenarioConfig) -> Result<ScenarioInstance> {
    cfg.validate()?;
    let (ni, nj) = (cfg.n_hcu, cfg.n_lcu_pairs);
    if let Some(pop) = cfg.geometry.population {
        let wanted = ni + 2 * nj;
        if wanted > pop {
            return Err(Error::InsufficientUavs {
                wanted,
                available: pop,
            });
        }
    }
    let g = &cfg.geometry;
    let rf = cfg.rf_params();
    let seed = cfg.seed;
    let side = g.area_side_m;
    let centre = side / 2.0;
    let rbs = NodePosition::fixed(centre, centre, g.rbs_height_m);
    let hap = NodePosition::fixed(centre, centre, g.hap_altitude_m);

    let place = |tag: u64, k: usize| {
        let mut rng = keyed_rng(seed, tag, k as u64, 0);
        let x = rng.random::<f64>() * side;
        let y = rng.random::<f64>() * side;
        let heading = rng.random::<f64>() * TAU;
        let gap_unit: f64 = rng.sample(Exp1);
        (
            NodePosition {
                x,
                y,
                altitude: g.uav_altitude_m,
                speed: g.speed_mps,
                heading,
            },
            gap_unit,
        )
    };
    let hcu: Vec<NodePosition> = (0..ni).map(|i| place(POS_HCU, i).0).collect();
    let mut lcu_rx = Vec::with_capacity(nj);
    let mut lcu_tx = Vec::with_capacity(nj);
    let mut pair_spacing = Vec::with_capacity(nj);
    for j in 0..nj {
        let (rx, gap_unit) = place(POS_LCU, j);
        let gap = (gap_unit * g.headway_s * g.speed_mps).max(g.min_pair_spacing_m);
        let tx = NodePosition {
            x: rx.x + gap * rx.heading.cos(),
            y: rx.y + gap * rx.heading.sin(),
            ..rx
        };
        lcu_rx.push(rx);
        lcu_tx.push(tx);
        pair_spacing.push(gap);
    }

    let link = |tx: &NodePosition, rx: &NodePosition, class: LinkClass, z: f64| -> Result<f64> {
        let lg = match (class, g.rbs_distance_override_m) {
            (LinkClass::UavRbs, Some(d)) => gain_at_distance(
                d,
                rf.pathloss_factor,
                rf.exponent(class),
                rf.shadow_sigma_db(class),
                z,
            )?,
            _ => large_scale_gain(tx, rx, &rf, class, z)?,
        };
        Ok(lg.alpha * cfg.rf.budget(class))
    };

    let hcu_gains = hcu
        .iter()
        .enumerate()
        .map(|(i, p)| {
            Ok(HcuGains {
                a_ir: link(p, &rbs, LinkClass::UavRbs, shadow_z(seed, L_HCU_RBS, i, 0))?,
                a_ih: link(p, &hap, LinkClass::UavHap, shadow_z(seed, L_HCU_HAP, i, 0))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let lcu_gains = (0..nj)
        .map(|j| {
            Ok(LcuGains {
                a_jj: link(
                    &lcu_tx[j],
                    &lcu_rx[j],
                    LinkClass::UavUav,
                    shadow_z(seed, L_LCU_DIRECT, j, 0),
                )?,
                a_jr: link(
                    &lcu_tx[j],
                    &rbs,
                    LinkClass::UavRbs,
                    shadow_z(seed, L_LCU_RBS, j, 0),
                )?,
                a_jh: link(
                    &lcu_tx[j],
                    &hap,
                    LinkClass::UavHap,
                    shadow_z(seed, L_LCU_HAP, j, 0),
                )?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cross = Vec::with_capacity(ni * nj);
    for (i, h) in hcu.iter().enumerate() {
        for (j, rx) in lcu_rx.iter().enumerate() {
            cross.push(link(
                h,
                rx,
                LinkClass::UavUav,
                shadow_z(seed, L_CROSS, i, j),
            )?);
        }
    }
    let hcu_doppler = hcu
        .iter()
        .map(|p| doppler_shift(p, p.los_angle_to(&rbs), &rf))
        .collect();

    Ok(ScenarioInstance {
        rbs,
        hap,
        hcu,
        lcu_tx,
        lcu_rx,
        pair_spacing,
        hcu_doppler,
        gains: GainTable::new(hcu_gains, lcu_gains, cross)?,
    })
}
