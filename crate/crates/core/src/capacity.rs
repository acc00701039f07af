//! Ergodic HCU capacity under spectrum sharing and the feasibility filter.
//!
//! With `W = ρU / (1 + ηV)` for independent unit exponentials `U`, `V`,
//!
//! ```text
//! E[log2(1 + W)] = ρ / ((ρ − η) ln 2) · [e^{1/ρ} E1(1/ρ) − e^{1/η} E1(1/η)]
//! ```
//!
//! The expression has a removable singularity at `ρ = η` and reduces to
//! `e^{1/ρ} E1(1/ρ) / ln 2` without interference.

use serde::{Deserialize, Serialize};

use crate::channel::{GainTable, PairGains};
use crate::error::{Error, Result};
use crate::mathkernels::{scaled_e1, Tolerance};
use crate::power::{optimal_pair_powers, PowerAllocation, PowerLimits, QosRequirements};

const SINGULAR_REL: f64 = 1e-6;
const DIFF_STEP_REL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityParams {
    /// Mean signal-to-noise ratio of the HCU.
    pub rho: f64,
    /// Mean interference-to-noise ratio from the sharing LCU.
    pub eta: f64,
}

/// How an HCU's two uplinks are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum ConnectivityMode {
    /// One evaluation with summed RBS and HAP gains.
    #[default]
    #[serde(rename = "mc-combined")]
    McCombined,
    /// Per-leg ergodic capacities, summed.
    #[serde(rename = "mc-sum")]
    McPerLinkSum,
    /// RBS link only.
    #[serde(rename = "sc")]
    ScRbsOnly,
}

impl ConnectivityMode {
    pub const ALL: [ConnectivityMode; 3] = [
        ConnectivityMode::McCombined,
        ConnectivityMode::McPerLinkSum,
        ConnectivityMode::ScRbsOnly,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            ConnectivityMode::McCombined => "mc-combined",
            ConnectivityMode::McPerLinkSum => "mc-sum",
            ConnectivityMode::ScRbsOnly => "sc",
        }
    }
}

impl std::str::FromStr for ConnectivityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mc-combined" => Ok(ConnectivityMode::McCombined),
            "mc-sum" => Ok(ConnectivityMode::McPerLinkSum),
            "sc" => Ok(ConnectivityMode::ScRbsOnly),
            other => Err(Error::Parse(format!(
                "unknown connectivity mode '{other}' (expected mc-combined, mc-sum or sc)"
            ))),
        }
    }
}

impl std::fmt::Display for ConnectivityMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// `s ↦ e^{1/s} E1(1/s)`, zero at `s = 0`.
fn scaled_e1_recip(s: f64) -> Result<f64> {
    let x = 1.0 / s;
    if !x.is_finite() {
        return Ok(0.0);
    }
    scaled_e1(x)
}

/// Closed-form ergodic capacity in bits/s/Hz.
pub fn ergodic_capacity_shared(params: CapacityParams) -> Result<f64> {
    let CapacityParams { rho, eta } = params;
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::domain(
            "ergodic_capacity_shared",
            format!("rho must be finite and > 0, got {rho}"),
        ));
    }
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::domain(
            "ergodic_capacity_shared",
            format!("eta must be finite and >= 0, got {eta}"),
        ));
    }
    let ln2 = std::f64::consts::LN_2;
    let h_eta = scaled_e1_recip(eta)?;
    if h_eta == 0.0 {
        return Ok(scaled_e1_recip(rho)? / ln2);
    }
    if (rho - eta).abs() <= SINGULAR_REL * rho.max(eta) {
        // removable singularity: rho / ln2 * d/ds[e^{1/s} E1(1/s)] at s = rho
        let step = DIFF_STEP_REL * rho;
        let deriv = (scaled_e1_recip(rho + step)? - scaled_e1_recip(rho - step)?) / (2.0 * step);
        return Ok(rho / ln2 * deriv);
    }
    let h_rho = scaled_e1_recip(rho)?;
    Ok(rho / ((rho - eta) * ln2) * (h_rho - h_eta))
}

fn leg_capacity(p_h: f64, a_signal: f64, p_l: f64, a_interf: f64, noise: f64) -> Result<f64> {
    let rho = p_h * a_signal / noise;
    if rho == 0.0 {
        return Ok(0.0);
    }
    let eta = p_l * a_interf / noise;
    ergodic_capacity_shared(CapacityParams { rho, eta })
}

/// HCU capacity when HCU power `p_h` shares its band with LCU power `p_l`.
pub fn pair_capacity(
    p_h: f64,
    p_l: f64,
    gains: &PairGains,
    noise: f64,
    mode: ConnectivityMode,
) -> Result<f64> {
    if !(p_h >= 0.0 && p_l >= 0.0) {
        return Err(Error::domain(
            "pair_capacity",
            format!("powers must be >= 0, got p_h={p_h}, p_l={p_l}"),
        ));
    }
    if !(noise > 0.0) {
        return Err(Error::domain(
            "pair_capacity",
            format!("noise must be > 0, got {noise}"),
        ));
    }
    match mode {
        ConnectivityMode::McCombined => leg_capacity(
            p_h,
            gains.a_ir + gains.a_ih,
            p_l,
            gains.a_jr + gains.a_jh,
            noise,
        ),
        ConnectivityMode::McPerLinkSum => {
            Ok(leg_capacity(p_h, gains.a_ir, p_l, gains.a_jr, noise)?
                + leg_capacity(p_h, gains.a_ih, p_l, gains.a_jh, noise)?)
        }
        ConnectivityMode::ScRbsOnly => leg_capacity(p_h, gains.a_ir, p_l, gains.a_jr, noise),
    }
}

/// Capacity of an HCU on its own orthogonal band (no sharing LCU).
pub fn solo_capacity(
    p_h: f64,
    a_ir: f64,
    a_ih: f64,
    noise: f64,
    mode: ConnectivityMode,
) -> Result<f64> {
    let gains = PairGains {
        a_jj: 1.0,
        a_ij: 1.0,
        a_ir,
        a_ih,
        a_jr: 0.0,
        a_jh: 0.0,
    };
    pair_capacity(p_h, 0.0, &gains, noise, mode)
}

/// Why a candidate pair was excluded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SentinelReason {
    /// Capacity at the optimal powers is below the HCU minimum.
    BelowMinimum { capacity: f64 },
    /// The LCU cannot meet its outage target even without interference.
    ReliabilityInfeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapacityCell {
    Feasible(f64),
    Excluded(SentinelReason),
}

impl CapacityCell {
    pub fn value(&self) -> Option<f64> {
        match self {
            CapacityCell::Feasible(c) => Some(*c),
            CapacityCell::Excluded(_) => None,
        }
    }
}

/// `I × J` optimal pair capacities with excluded entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityMatrix {
    pub i_count: usize,
    pub j_count: usize,
    pub cells: Vec<CapacityCell>,
}

impl CapacityMatrix {
    pub fn from_cells(i_count: usize, j_count: usize, cells: Vec<CapacityCell>) -> Result<Self> {
        if cells.len() != i_count * j_count {
            return Err(Error::Dimension(format!(
                "capacity matrix has {} cells, expected {i_count} x {j_count}",
                cells.len()
            )));
        }
        Ok(Self {
            i_count,
            j_count,
            cells,
        })
    }

    /// Builds a matrix from optional values; `None` marks an excluded cell.
    pub fn from_values(i_count: usize, j_count: usize, values: &[Option<f64>]) -> Result<Self> {
        let cells = values
            .iter()
            .map(|v| match v {
                Some(c) => CapacityCell::Feasible(*c),
                None => CapacityCell::Excluded(SentinelReason::ReliabilityInfeasible),
            })
            .collect();
        Self::from_cells(i_count, j_count, cells)
    }

    pub fn cell(&self, i: usize, j: usize) -> CapacityCell {
        self.cells[i * self.j_count + j]
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.cell(i, j).value()
    }

    pub fn feasible_count(&self) -> usize {
        self.cells.iter().filter(|c| c.value().is_some()).count()
    }

    /// Finite values as a row-major option grid.
    pub fn values(&self) -> Vec<Option<f64>> {
        self.cells.iter().map(|c| c.value()).collect()
    }
}

/// Optimal powers for every candidate pair, row-major `I × J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerGrid {
    pub i_count: usize,
    pub j_count: usize,
    pub allocations: Vec<PowerAllocation>,
}

impl PowerGrid {
    pub fn get(&self, i: usize, j: usize) -> PowerAllocation {
        self.allocations[i * self.j_count + j]
    }
}

fn evaluate_cell(
    gains: &PairGains,
    limits: &PowerLimits,
    qos: &QosRequirements,
    mode: ConnectivityMode,
    tol: Tolerance,
) -> Result<(CapacityCell, PowerAllocation)> {
    let alloc = optimal_pair_powers(gains, limits, qos, tol)?;
    if !alloc.is_feasible() {
        return Ok((
            CapacityCell::Excluded(SentinelReason::ReliabilityInfeasible),
            alloc,
        ));
    }
    let c = pair_capacity(alloc.p_hcu, alloc.p_lcu, gains, limits.noise, mode)?;
    let cell = if c < qos.cap_min_hcu {
        CapacityCell::Excluded(SentinelReason::BelowMinimum { capacity: c })
    } else {
        CapacityCell::Feasible(c)
    };
    Ok((cell, alloc))
}

/// Optimal powers and filtered capacities for all candidate pairs.
pub fn build_capacity_matrix(
    table: &GainTable,
    limits: &PowerLimits,
    qos: &QosRequirements,
    mode: ConnectivityMode,
    tol: Tolerance,
) -> Result<(CapacityMatrix, PowerGrid)> {
    limits.validate()?;
    qos.validate()?;
    let (ni, nj) = (table.n_hcu(), table.n_lcu());
    let eval_row = |i: usize| -> Result<Vec<(CapacityCell, PowerAllocation)>> {
        (0..nj)
            .map(|j| evaluate_cell(&table.pair(i, j), limits, qos, mode, tol))
            .collect()
    };
    #[cfg(feature = "parallel")]
    let rows: Result<Vec<_>> = {
        use rayon::prelude::*;
        (0..ni).into_par_iter().map(eval_row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Result<Vec<_>> = (0..ni).map(eval_row).collect();

    let (cells, allocations): (Vec<_>, Vec<_>) = rows?.into_iter().flatten().unzip();
    Ok((
        CapacityMatrix {
            i_count: ni,
            j_count: nj,
            cells,
        },
        PowerGrid {
            i_count: ni,
            j_count: nj,
            allocations,
        },
    ))
}
