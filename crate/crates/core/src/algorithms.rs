//! Sum-capacity and max-min allocation, plus the comparison baselines.
//!
//! The two optimizing algorithms work on a [`CapacityMatrix`] of optimal pair
//! capacities and the matching [`PowerGrid`]. HCUs left without a sharing LCU
//! keep their own band and contribute their interference-free capacity at
//! full power.
//!
//! The baselines ignore the reliability constraint: both UAVs of a pair
//! transmit at full power. Their results therefore record the closed-form LCU
//! outage of every pair and a "reliable" sum in which HCUs of violating pairs
//! count zero.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::assignment::{min_total_binary_cost, solve_assignment, AssignmentProblem, Objective};
use crate::capacity::{
    build_capacity_matrix, pair_capacity, solo_capacity, CapacityMatrix, ConnectivityMode,
    PowerGrid,
};
use crate::channel::GainTable;
use crate::energy::{check_constant_power, EnergyModel};
use crate::error::{Error, Result};
use crate::mathkernels::Tolerance;
use crate::montecarlo::keyed_rng;
use crate::power::{
    outage_probability, BoundaryCase, PowerAllocation, PowerLimits, QosRequirements,
};

/// Allocation methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodTag {
    /// Hungarian sum-capacity allocation with optimal powers.
    Algo1,
    /// Max-min allocation by threshold bisection.
    Algo2,
    /// Orthogonal bands, HCUs only.
    Baseline1,
    /// Global greedy pairing at full power.
    Baseline2,
    /// HCUs only at full power (same computation as baseline 1).
    Baseline3,
    /// Random pairing at full power.
    Baseline4,
    /// Sequential greedy pairing at full power.
    Baseline5,
}

impl MethodTag {
    pub const ALL: [MethodTag; 7] = [
        MethodTag::Algo1,
        MethodTag::Algo2,
        MethodTag::Baseline1,
        MethodTag::Baseline2,
        MethodTag::Baseline3,
        MethodTag::Baseline4,
        MethodTag::Baseline5,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            MethodTag::Algo1 => "algo1",
            MethodTag::Algo2 => "algo2",
            MethodTag::Baseline1 => "baseline1",
            MethodTag::Baseline2 => "baseline2",
            MethodTag::Baseline3 => "baseline3",
            MethodTag::Baseline4 => "baseline4",
            MethodTag::Baseline5 => "baseline5",
        }
    }

    /// Whether the method enforces the LCU outage target.
    pub fn enforces_reliability(&self) -> bool {
        matches!(self, MethodTag::Algo1 | MethodTag::Algo2)
    }

    /// Whether the method activates LCUs at all.
    pub fn shares_spectrum(&self) -> bool {
        !matches!(self, MethodTag::Baseline1 | MethodTag::Baseline3)
    }
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for MethodTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MethodTag::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| Error::Parse(format!("unknown method '{s}'")))
    }
}

/// What the sum-capacity algorithm maximizes among maximum-cardinality pairings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairingObjective {
    /// Σ over all HCUs, unpaired ones at interference-free capacity.
    #[default]
    TotalCapacity,
    /// Σ of the selected shared capacities only.
    SharedCapacity,
}

/// Which pairing the max-min algorithm returns once the threshold is found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaxMinRefinement {
    /// The pairing from the last feasible threshold check.
    #[default]
    LastFeasible,
    /// Best total capacity among pairings using only cells at or above the threshold.
    ProfitRefine,
}

/// One active HCU–LCU pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub hcu: usize,
    pub lcu: usize,
    pub powers: PowerAllocation,
    /// HCU capacity while sharing (bits/s/Hz).
    pub capacity: f64,
    /// Closed-form LCU outage at the allocated powers, when gains are known.
    pub outage: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationResult {
    pub method: MethodTag,
    /// Active pairs sorted by HCU index.
    pub pairs: Vec<PairRecord>,
    pub unpaired_hcu: Vec<usize>,
    pub unpaired_lcu: Vec<usize>,
    /// LCUs with no admissible partner at all.
    pub lcu_denied: Vec<usize>,
    /// Capacity of every HCU (bits/s/Hz).
    pub hcu_capacity: Vec<f64>,
    /// Transmit power of every HCU (W).
    pub hcu_power: Vec<f64>,
    /// Transmit power of every LCU transmitter (W); zero when inactive.
    pub lcu_power: Vec<f64>,
    pub sum_capacity: f64,
    /// Minimum over all HCUs; zero when there are none.
    pub min_capacity: f64,
    /// Sum with HCUs of outage-violating pairs counted as zero.
    pub reliable_sum_capacity: f64,
    /// Pairs whose LCU outage exceeds the target.
    pub violating_pairs: usize,
    /// `false` when the method could not place any admissible pair although LCUs exist.
    pub feasible: bool,
    /// Max-min threshold reached (algorithm 2 only).
    pub threshold: Option<f64>,
    pub energy_feasible_hcu: Vec<bool>,
    pub energy_feasible_lcu: Vec<bool>,
}

impl AllocationResult {
    fn assemble(
        method: MethodTag,
        n_lcu: usize,
        mut pairs: Vec<PairRecord>,
        unpaired_capacity: &[f64],
        p_max_hcu: f64,
        outage_max: Option<f64>,
    ) -> Self {
        pairs.sort_by_key(|p| p.hcu);
        let n_hcu = unpaired_capacity.len();
        let mut hcu_capacity = unpaired_capacity.to_vec();
        let mut hcu_power = vec![p_max_hcu; n_hcu];
        let mut lcu_power = vec![0.0; n_lcu];
        let mut hcu_used = vec![false; n_hcu];
        let mut lcu_used = vec![false; n_lcu];
        let mut reliable = hcu_capacity.clone();
        let mut violating_pairs = 0;
        for p in &pairs {
            hcu_capacity[p.hcu] = p.capacity;
            reliable[p.hcu] = p.capacity;
            hcu_power[p.hcu] = p.powers.p_hcu;
            lcu_power[p.lcu] = p.powers.p_lcu;
            hcu_used[p.hcu] = true;
            lcu_used[p.lcu] = true;
            if let (Some(out), Some(po)) = (p.outage, outage_max) {
                if out > po * (1.0 + 1e-9) {
                    violating_pairs += 1;
                    reliable[p.hcu] = 0.0;
                }
            }
        }
        let unused = |used: &[bool]| (0..used.len()).filter(|&k| !used[k]).collect::<Vec<_>>();
        let sum_capacity = hcu_capacity.iter().sum();
        let min_capacity = if n_hcu == 0 {
            0.0
        } else {
            hcu_capacity.iter().copied().fold(f64::INFINITY, f64::min)
        };
        Self {
            method,
            unpaired_hcu: unused(&hcu_used),
            unpaired_lcu: unused(&lcu_used),
            lcu_denied: Vec::new(),
            hcu_capacity,
            hcu_power,
            lcu_power,
            sum_capacity,
            min_capacity,
            reliable_sum_capacity: reliable.iter().sum(),
            violating_pairs,
            feasible: true,
            threshold: None,
            energy_feasible_hcu: vec![true; n_hcu],
            energy_feasible_lcu: vec![true; n_lcu],
            pairs,
        }
    }

    /// Flags every UAV whose constant transmit power over the horizon breaks
    /// its energy budget.
    pub fn apply_energy(&mut self, model: &EnergyModel) -> Result<()> {
        model.validate()?;
        let flags = |powers: &[f64]| -> Result<Vec<bool>> {
            powers
                .iter()
                .map(|&p| check_constant_power(model, p).map(|c| c.feasible))
                .collect()
        };
        self.energy_feasible_hcu = flags(&self.hcu_power)?;
        self.energy_feasible_lcu = flags(&self.lcu_power)?;
        Ok(())
    }

    pub fn pairing(&self) -> Vec<(usize, usize)> {
        self.pairs.iter().map(|p| (p.hcu, p.lcu)).collect()
    }
}

fn check_dims(matrix: &CapacityMatrix, powers: &PowerGrid, unpaired: &[f64]) -> Result<()> {
    if powers.i_count != matrix.i_count || powers.j_count != matrix.j_count {
        return Err(Error::Dimension(format!(
            "power grid {}x{} does not match capacity matrix {}x{}",
            powers.i_count, powers.j_count, matrix.i_count, matrix.j_count
        )));
    }
    if unpaired.len() != matrix.i_count {
        return Err(Error::Length {
            expected: matrix.i_count,
            got: unpaired.len(),
        });
    }
    Ok(())
}

/// LCUs whose every candidate cell is excluded.
fn denied_lcus(matrix: &CapacityMatrix) -> Vec<usize> {
    (0..matrix.j_count)
        .filter(|&j| (0..matrix.i_count).all(|i| matrix.get(i, j).is_none()))
        .collect()
}

fn shared_records(
    matrix: &CapacityMatrix,
    powers: &PowerGrid,
    pairs: &[(usize, usize)],
) -> Vec<PairRecord> {
    pairs
        .iter()
        .map(|&(i, j)| PairRecord {
            hcu: i,
            lcu: j,
            powers: powers.get(i, j),
            capacity: matrix.get(i, j).expect("pairs only use admissible cells"),
            outage: None,
        })
        .collect()
}

/// Full-power HCU power used for unpaired HCUs in assembled results.
fn unpaired_power(powers: &PowerGrid) -> f64 {
    powers
        .allocations
        .iter()
        .filter(|a| a.is_feasible())
        .map(|a| a.p_hcu)
        .fold(0.0, f64::max)
}

/// Maximum-cardinality pairing over admissible cells maximizing `profit`.
fn max_profit_pairing(
    matrix: &CapacityMatrix,
    admissible: impl Fn(usize, usize) -> bool,
    profit: impl Fn(usize, usize, f64) -> f64,
) -> Result<Vec<(usize, usize)>> {
    let (ni, nj) = (matrix.i_count, matrix.j_count);
    if ni == 0 || nj == 0 {
        return Ok(Vec::new());
    }
    let cells = (0..ni * nj)
        .map(|k| {
            let (i, j) = (k / nj, k % nj);
            matrix
                .get(i, j)
                .filter(|_| admissible(i, j))
                .map(|c| profit(i, j, c))
        })
        .collect();
    let problem = AssignmentProblem::new(ni, nj, cells, Objective::Maximize)?;
    Ok(solve_assignment(&problem)?.pairs)
}

/// Sum-capacity pairing: among pairings with the most admissible pairs, the
/// one maximizing the chosen objective.
pub fn algo1_pairing(
    matrix: &CapacityMatrix,
    unpaired_capacities: &[f64],
    objective: PairingObjective,
) -> Result<Vec<(usize, usize)>> {
    max_profit_pairing(
        matrix,
        |_, _| true,
        |i, _, c| match objective {
            PairingObjective::TotalCapacity => c - unpaired_capacities[i],
            PairingObjective::SharedCapacity => c,
        },
    )
}

/// Sum-capacity allocation over a prepared capacity matrix.
pub fn algo1_sum_capacity(
    matrix: &CapacityMatrix,
    powers: &PowerGrid,
    unpaired_capacities: &[f64],
    objective: PairingObjective,
) -> Result<AllocationResult> {
    check_dims(matrix, powers, unpaired_capacities)?;
    let pairs = algo1_pairing(matrix, unpaired_capacities, objective)?;
    let records = shared_records(matrix, powers, &pairs);
    let mut result = AllocationResult::assemble(
        MethodTag::Algo1,
        matrix.j_count,
        records,
        unpaired_capacities,
        unpaired_power(powers),
        None,
    );
    result.lcu_denied = denied_lcus(matrix);
    result.feasible = matrix.j_count == 0 || !result.pairs.is_empty();
    Ok(result)
}

/// Outcome of the max-min threshold search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxMinOutcome {
    pub pairs: Vec<(usize, usize)>,
    /// Largest feasible threshold; `None` when no admissible cell exists.
    pub threshold: Option<f64>,
    /// Number of threshold checks performed.
    pub checks: usize,
}

/// Max-min pairing by bisection over the sorted admissible capacities.
///
/// A threshold `g` is feasible when the cells with `C ≥ g` still admit as many
/// pairs as the admissible cells do overall. Each check runs the binary-cost
/// assignment: 1-cells are those below `g` or excluded, and `g` is feasible
/// iff the least number of 1-cells used equals `min(I, J)` minus that maximum
/// pair count (zero when a complete pairing exists).
pub fn algo2_pairing(
    matrix: &CapacityMatrix,
    unpaired_capacities: &[f64],
    refinement: MaxMinRefinement,
) -> Result<MaxMinOutcome> {
    let (ni, nj) = (matrix.i_count, matrix.j_count);
    let mut g: Vec<f64> = matrix.cells.iter().filter_map(|c| c.value()).collect();
    if g.is_empty() {
        return Ok(MaxMinOutcome {
            pairs: Vec::new(),
            threshold: None,
            checks: 0,
        });
    }
    g.sort_unstable_by(f64::total_cmp);
    g.dedup();

    let k_star = max_profit_pairing(matrix, |_, _| true, |_, _, _| 0.0)?.len();
    let delta0 = ni.min(nj) - k_star;

    let mut memo: Vec<Option<Option<Vec<(usize, usize)>>>> = vec![None; g.len()];
    let mut checks = 0;
    let mut check = |k: usize| -> Result<Option<Vec<(usize, usize)>>> {
        if let Some(hit) = &memo[k] {
            return Ok(hit.clone());
        }
        checks += 1;
        let ones: Vec<bool> = matrix
            .cells
            .iter()
            .map(|c| c.value().is_none_or(|v| v < g[k]))
            .collect();
        let (delta, pairs) = min_total_binary_cost(ni, nj, &ones)?;
        let verdict = (delta == delta0).then(|| {
            pairs
                .into_iter()
                .filter(|&(i, j)| !ones[i * nj + j])
                .collect()
        });
        memo[k] = Some(verdict.clone());
        Ok(verdict)
    };

    // the smallest value is always feasible: every admissible cell is a 0-cell
    let (mut lo, mut hi) = (0usize, g.len() - 1);
    let mut best = check(lo)?.expect("lowest threshold is feasible");
    if let Some(p) = check(hi)? {
        lo = hi;
        best = p;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match check(mid)? {
            Some(p) => {
                lo = mid;
                best = p;
            }
            None => hi = mid,
        }
    }
    let threshold = g[lo];
    let pairs = match refinement {
        MaxMinRefinement::LastFeasible => best,
        MaxMinRefinement::ProfitRefine => max_profit_pairing(
            matrix,
            |i, j| matrix.get(i, j).is_some_and(|c| c >= threshold),
            |i, _, c| c - unpaired_capacities[i],
        )?,
    };
    Ok(MaxMinOutcome {
        pairs,
        threshold: Some(threshold),
        checks,
    })
}

/// Max-min allocation over a prepared capacity matrix.
pub fn algo2_max_min(
    matrix: &CapacityMatrix,
    powers: &PowerGrid,
    unpaired_capacities: &[f64],
    refinement: MaxMinRefinement,
) -> Result<AllocationResult> {
    check_dims(matrix, powers, unpaired_capacities)?;
    let outcome = algo2_pairing(matrix, unpaired_capacities, refinement)?;
    let records = shared_records(matrix, powers, &outcome.pairs);
    let mut result = AllocationResult::assemble(
        MethodTag::Algo2,
        matrix.j_count,
        records,
        unpaired_capacities,
        unpaired_power(powers),
        None,
    );
    result.lcu_denied = denied_lcus(matrix);
    result.threshold = outcome.threshold;
    result.feasible = matrix.j_count == 0 || !result.pairs.is_empty();
    Ok(result)
}

/// Everything needed to run any method on one scenario.
#[derive(Debug, Clone)]
pub struct AllocationContext {
    pub gains: GainTable,
    pub limits: PowerLimits,
    pub qos: QosRequirements,
    pub mode: ConnectivityMode,
    pub tol: Tolerance,
    pub energy: EnergyModel,
    pub objective: PairingObjective,
    pub refinement: MaxMinRefinement,
    /// Seed for the random-pairing baseline.
    pub seed: u64,
    pub matrix: CapacityMatrix,
    pub powers: PowerGrid,
    /// Interference-free capacity of every HCU at full power.
    pub unpaired: Vec<f64>,
}

/// Method knobs that do not affect the capacity matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MethodOptions {
    pub objective: PairingObjective,
    pub refinement: MaxMinRefinement,
    pub seed: u64,
}

impl AllocationContext {
    pub fn new(
        gains: GainTable,
        limits: PowerLimits,
        qos: QosRequirements,
        mode: ConnectivityMode,
        tol: Tolerance,
        energy: EnergyModel,
        options: MethodOptions,
    ) -> Result<Self> {
        let (matrix, powers) = build_capacity_matrix(&gains, &limits, &qos, mode, tol)?;
        let unpaired = gains
            .hcu
            .iter()
            .map(|h| solo_capacity(limits.p_max_hcu, h.a_ir, h.a_ih, limits.noise, mode))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            gains,
            limits,
            qos,
            mode,
            tol,
            energy,
            objective: options.objective,
            refinement: options.refinement,
            seed: options.seed,
            matrix,
            powers,
            unpaired,
        })
    }

    pub fn n_hcu(&self) -> usize {
        self.gains.n_hcu()
    }

    pub fn n_lcu(&self) -> usize {
        self.gains.n_lcu()
    }

    fn full_power(&self) -> PowerAllocation {
        PowerAllocation {
            p_hcu: self.limits.p_max_hcu,
            p_lcu: self.limits.p_max_lcu,
            boundary_case: BoundaryCase::Infeasible,
        }
    }

    /// Capacities of every pair with both UAVs at full power, row-major.
    pub fn max_power_capacities(&self) -> Result<Vec<f64>> {
        let (ni, nj) = (self.n_hcu(), self.n_lcu());
        let mut out = Vec::with_capacity(ni * nj);
        for i in 0..ni {
            for j in 0..nj {
                out.push(pair_capacity(
                    self.limits.p_max_hcu,
                    self.limits.p_max_lcu,
                    &self.gains.pair(i, j),
                    self.limits.noise,
                    self.mode,
                )?);
            }
        }
        Ok(out)
    }

    fn annotate(&self, mut result: AllocationResult) -> Result<AllocationResult> {
        for p in &mut result.pairs {
            p.outage = Some(outage_probability(
                p.powers.p_hcu,
                p.powers.p_lcu,
                &self.gains.pair(p.hcu, p.lcu),
                &self.qos,
                self.limits.noise,
            )?);
        }
        let recomputed = AllocationResult::assemble(
            result.method,
            self.n_lcu(),
            result.pairs.clone(),
            &self.unpaired,
            self.limits.p_max_hcu,
            Some(self.qos.outage_max),
        );
        result.hcu_power = recomputed.hcu_power;
        result.reliable_sum_capacity = recomputed.reliable_sum_capacity;
        result.violating_pairs = recomputed.violating_pairs;
        result.apply_energy(&self.energy)?;
        Ok(result)
    }

    fn full_power_result(
        &self,
        method: MethodTag,
        pairs: &[(usize, usize)],
        caps: &[f64],
    ) -> Result<AllocationResult> {
        let nj = self.n_lcu();
        let records = pairs
            .iter()
            .map(|&(i, j)| PairRecord {
                hcu: i,
                lcu: j,
                powers: self.full_power(),
                capacity: caps[i * nj + j],
                outage: None,
            })
            .collect();
        let result = AllocationResult::assemble(
            method,
            nj,
            records,
            &self.unpaired,
            self.limits.p_max_hcu,
            Some(self.qos.outage_max),
        );
        self.annotate(result)
    }

    pub fn algo1(&self) -> Result<AllocationResult> {
        let r = algo1_sum_capacity(&self.matrix, &self.powers, &self.unpaired, self.objective)?;
        self.annotate(r)
    }

    pub fn algo2(&self) -> Result<AllocationResult> {
        let r = algo2_max_min(&self.matrix, &self.powers, &self.unpaired, self.refinement)?;
        self.annotate(r)
    }

    /// Orthogonal bands: every HCU alone at full power, no LCU active.
    pub fn baseline1(&self, method: MethodTag) -> Result<AllocationResult> {
        let result = AllocationResult::assemble(
            method,
            self.n_lcu(),
            Vec::new(),
            &self.unpaired,
            self.limits.p_max_hcu,
            Some(self.qos.outage_max),
        );
        self.annotate(result)
    }

    /// Global greedy: repeatedly take the largest full-power capacity among
    /// free HCUs and LCUs (ties by index).
    pub fn baseline2(&self) -> Result<AllocationResult> {
        let caps = self.max_power_capacities()?;
        let pairs = greedy_global(self.n_hcu(), self.n_lcu(), &caps);
        self.full_power_result(MethodTag::Baseline2, &pairs, &caps)
    }

    /// Uniformly random complete pairing, seeded.
    pub fn baseline4(&self) -> Result<AllocationResult> {
        let caps = self.max_power_capacities()?;
        let pairs = random_pairing(self.n_hcu(), self.n_lcu(), self.seed);
        self.full_power_result(MethodTag::Baseline4, &pairs, &caps)
    }

    /// HCUs in index order each take the best remaining LCU.
    pub fn baseline5(&self) -> Result<AllocationResult> {
        let caps = self.max_power_capacities()?;
        let pairs = greedy_sequential(self.n_hcu(), self.n_lcu(), &caps);
        self.full_power_result(MethodTag::Baseline5, &pairs, &caps)
    }

    pub fn run(&self, method: MethodTag) -> Result<AllocationResult> {
        match method {
            MethodTag::Algo1 => self.algo1(),
            MethodTag::Algo2 => self.algo2(),
            MethodTag::Baseline1 | MethodTag::Baseline3 => self.baseline1(method),
            MethodTag::Baseline2 => self.baseline2(),
            MethodTag::Baseline4 => self.baseline4(),
            MethodTag::Baseline5 => self.baseline5(),
        }
    }
}

/// Greedy by descending value over the whole `ni × nj` grid.
pub fn greedy_global(ni: usize, nj: usize, caps: &[f64]) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..ni * nj).collect();
    order.sort_by(|&a, &b| caps[b].total_cmp(&caps[a]).then(a.cmp(&b)));
    let (mut row_used, mut col_used) = (vec![false; ni], vec![false; nj]);
    let mut pairs = Vec::new();
    for k in order {
        let (i, j) = (k / nj, k % nj);
        if !row_used[i] && !col_used[j] {
            row_used[i] = true;
            col_used[j] = true;
            pairs.push((i, j));
        }
    }
    pairs.sort_unstable();
    pairs
}

/// Rows in index order, each taking its best free column (ties by index).
pub fn greedy_sequential(ni: usize, nj: usize, caps: &[f64]) -> Vec<(usize, usize)> {
    let mut col_used = vec![false; nj];
    let mut pairs = Vec::new();
    for i in 0..ni {
        let best = (0..nj).filter(|&j| !col_used[j]).max_by(|&a, &b| {
            caps[i * nj + a]
                .total_cmp(&caps[i * nj + b])
                .then(b.cmp(&a))
        });
        if let Some(j) = best {
            col_used[j] = true;
            pairs.push((i, j));
        }
    }
    pairs
}

/// Uniform random pairing of `min(ni, nj)` pairs.
pub fn random_pairing(ni: usize, nj: usize, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = keyed_rng(seed, 0xB4, ni as u64, nj as u64);
    let mut pairs: Vec<(usize, usize)> = if ni <= nj {
        let mut cols: Vec<usize> = (0..nj).collect();
        cols.shuffle(&mut rng);
        (0..ni).map(|i| (i, cols[i])).collect()
    } else {
        let mut rows: Vec<usize> = (0..ni).collect();
        rows.shuffle(&mut rng);
        (0..nj).map(|j| (rows[j], j)).collect()
    };
    pairs.sort_unstable();
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::CapacityCell;

    fn grid_for(matrix: &CapacityMatrix) -> PowerGrid {
        PowerGrid {
            i_count: matrix.i_count,
            j_count: matrix.j_count,
            allocations: vec![
                PowerAllocation {
                    p_hcu: 0.01,
                    p_lcu: 0.02,
                    boundary_case: BoundaryCase::Scenario2,
                };
                matrix.i_count * matrix.j_count
            ],
        }
    }

    fn matrix(rows: &[&[Option<f64>]]) -> CapacityMatrix {
        let vals: Vec<Option<f64>> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        CapacityMatrix::from_values(rows.len(), rows[0].len(), &vals).unwrap()
    }

    #[test]
    fn all_sentinel_matrix_leaves_everyone_unpaired() {
        let m = matrix(&[&[None, None], &[None, None]]);
        let free = [5.0, 6.0];
        let r =
            algo1_sum_capacity(&m, &grid_for(&m), &free, PairingObjective::TotalCapacity).unwrap();
        assert!(r.pairs.is_empty());
        assert_eq!(r.sum_capacity, 11.0);
        assert_eq!(r.min_capacity, 5.0);
        assert_eq!(r.lcu_denied, vec![0, 1]);
        assert!(!r.feasible);
        let r2 = algo2_max_min(&m, &grid_for(&m), &free, MaxMinRefinement::LastFeasible).unwrap();
        assert!(r2.pairs.is_empty());
        assert_eq!(r2.threshold, None);
    }

    #[test]
    fn single_cell() {
        let m = matrix(&[&[Some(2.0)]]);
        let r =
            algo1_sum_capacity(&m, &grid_for(&m), &[3.0], PairingObjective::TotalCapacity).unwrap();
        assert_eq!(r.pairing(), vec![(0, 0)]);
        assert_eq!(r.sum_capacity, 2.0);
    }

    #[test]
    fn max_min_two_by_two() {
        let m = matrix(&[&[Some(3.0), Some(1.0)], &[Some(2.0), Some(4.0)]]);
        let out = algo2_pairing(&m, &[9.0, 9.0], MaxMinRefinement::LastFeasible).unwrap();
        assert_eq!(out.pairs, vec![(0, 0), (1, 1)]);
        assert_eq!(out.threshold, Some(3.0));
    }

    #[test]
    fn max_min_uniform_value() {
        let m = matrix(&[&[Some(2.5); 3], &[Some(2.5); 3], &[Some(2.5); 3]]);
        let out = algo2_pairing(&m, &[9.0; 3], MaxMinRefinement::LastFeasible).unwrap();
        assert_eq!(out.pairs.len(), 3);
        assert_eq!(out.threshold, Some(2.5));
    }

    #[test]
    fn max_min_with_partial_cardinality() {
        // only one pair possible overall: column 1 is fully excluded
        let m = matrix(&[&[Some(1.0), None], &[Some(5.0), None]]);
        let out = algo2_pairing(&m, &[9.0, 9.0], MaxMinRefinement::LastFeasible).unwrap();
        assert_eq!(out.pairs, vec![(1, 0)]);
        assert_eq!(out.threshold, Some(5.0));
    }

    #[test]
    fn profit_refinement_keeps_threshold() {
        let m = matrix(&[&[Some(3.0), Some(3.0)], &[Some(3.0), Some(8.0)]]);
        let out = algo2_pairing(&m, &[9.0, 9.0], MaxMinRefinement::ProfitRefine).unwrap();
        assert_eq!(out.threshold, Some(3.0));
        assert_eq!(out.pairs, vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn rectangular_total_objective_prefers_cheap_sacrifice() {
        // two HCUs, one LCU: pairing HCU 1 costs 1, pairing HCU 0 costs 4
        let m = matrix(&[&[Some(6.0)], &[Some(4.0)]]);
        let free = [10.0, 5.0];
        let total = algo1_pairing(&m, &free, PairingObjective::TotalCapacity).unwrap();
        assert_eq!(total, vec![(1, 0)]);
        let shared = algo1_pairing(&m, &free, PairingObjective::SharedCapacity).unwrap();
        assert_eq!(shared, vec![(0, 0)]);
    }

    #[test]
    fn below_minimum_reason_is_excluded() {
        let cells = vec![
            CapacityCell::Excluded(crate::capacity::SentinelReason::BelowMinimum { capacity: 0.1 }),
            CapacityCell::Feasible(1.0),
        ];
        let m = CapacityMatrix::from_cells(1, 2, cells).unwrap();
        let r =
            algo1_sum_capacity(&m, &grid_for(&m), &[2.0], PairingObjective::TotalCapacity).unwrap();
        assert_eq!(r.pairing(), vec![(0, 1)]);
        assert!(r.lcu_denied.contains(&0));
    }

    #[test]
    fn dimension_checks() {
        let m = matrix(&[&[Some(1.0)]]);
        assert!(
            algo1_sum_capacity(&m, &grid_for(&m), &[], PairingObjective::TotalCapacity).is_err()
        );
    }

    #[test]
    fn greedy_helpers() {
        let caps = [1.0, 9.0, 8.0, 7.0];
        assert_eq!(greedy_global(2, 2, &caps), vec![(0, 1), (1, 0)]);
        assert_eq!(greedy_sequential(2, 2, &caps), vec![(0, 1), (1, 0)]);
        let caps = [5.0, 4.0, 9.0, 1.0];
        assert_eq!(greedy_global(2, 2, &caps), vec![(0, 1), (1, 0)]);
        assert_eq!(greedy_sequential(2, 2, &caps), vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn random_pairing_is_seeded_and_complete() {
        let a = random_pairing(5, 7, 11);
        assert_eq!(a, random_pairing(5, 7, 11));
        assert_eq!(a.len(), 5);
        let mut cols: Vec<usize> = a.iter().map(|p| p.1).collect();
        cols.sort_unstable();
        cols.dedup();
        assert_eq!(cols.len(), 5);
        assert_eq!(random_pairing(1, 1, 3), vec![(0, 0)]);
        assert_eq!(random_pairing(4, 2, 3).len(), 2);
    }

    #[test]
    fn method_tags_round_trip() {
        for m in MethodTag::ALL {
            assert_eq!(m.tag().parse::<MethodTag>().unwrap(), m);
        }
        assert!("algo9".parse::<MethodTag>().is_err());
    }
}
