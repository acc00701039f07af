//! Parameter sweeps, CSV output, and the validation / Monte Carlo reports
//! behind the command-line tool.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algorithms::{algo2_pairing, AllocationResult, MaxMinRefinement, MethodTag};
use crate::assignment::{solve_assignment, AssignmentProblem, Objective};
use crate::capacity::{pair_capacity, CapacityMatrix, ConnectivityMode};
use crate::channel::PairGains;
use crate::error::{Error, Result};
use crate::mathkernels::{exp_integral_e1, Tolerance};
use crate::montecarlo::{
    empirical_capacity, empirical_capacity_two_leg, empirical_outage_on_link, keyed_rng,
    SamplingConfig,
};
use crate::power::{
    hcu_power_bound_f, optimal_pair_powers, outage_probability, PowerLimits, QosRequirements,
};
use crate::scenario::ScenarioConfig;

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// `J / I` with `I` fixed at the base value; `J = round(ratio · I)`.
    JiRatio,
    /// LCU outage target `P_o`.
    OutagePo,
    /// UAV speed in m/s.
    Speed,
    /// LCU SINR threshold in dB.
    SinrThreshold,
    /// Both maximum transmit powers, in dBm.
    MaxPower,
}

impl SweepParameter {
    pub fn tag(&self) -> &'static str {
        match self {
            SweepParameter::JiRatio => "ji_ratio",
            SweepParameter::OutagePo => "outage_po",
            SweepParameter::Speed => "speed",
            SweepParameter::SinrThreshold => "sinr_threshold",
            SweepParameter::MaxPower => "max_power",
        }
    }

    /// Returns `base` with this parameter set to `value`.
    pub fn apply(&self, base: &ScenarioConfig, value: f64) -> ScenarioConfig {
        let mut cfg = base.clone();
        match self {
            SweepParameter::JiRatio => {
                cfg.n_lcu_pairs = (value * base.n_hcu as f64).round() as usize
            }
            SweepParameter::OutagePo => cfg.qos.outage_max = value,
            SweepParameter::Speed => cfg.geometry.speed_mps = value,
            SweepParameter::SinrThreshold => cfg.qos.sinr_min_lcu_db = value,
            SweepParameter::MaxPower => {
                cfg.power.p_max_hcu_dbm = value;
                cfg.power.p_max_lcu_dbm = value;
            }
        }
        cfg
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            SweepParameter::JiRatio,
            SweepParameter::OutagePo,
            SweepParameter::Speed,
            SweepParameter::SinrThreshold,
            SweepParameter::MaxPower,
        ]
        .into_iter()
        .find(|p| p.tag() == s)
        .ok_or_else(|| Error::Parse(format!("unknown sweep parameter '{s}'")))
    }
}

fn default_methods() -> Vec<MethodTag> {
    vec![
        MethodTag::Algo1,
        MethodTag::Algo2,
        MethodTag::Baseline1,
        MethodTag::Baseline2,
    ]
}

fn default_n_seeds() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    #[serde(default = "default_methods")]
    pub methods: Vec<MethodTag>,
    /// Connectivity modes to evaluate; the base mode if empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<ConnectivityMode>,
    #[serde(default = "default_n_seeds")]
    pub n_seeds: usize,
    /// Monte Carlo samples per active pair for the outage column; 0 uses the
    /// closed form.
    #[serde(default)]
    pub samples: usize,
    #[serde(default)]
    pub base: ScenarioConfig,
}

impl SweepSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config("sweep values must not be empty".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) || self.values.windows(2).any(|w| w[0] > w[1])
        {
            return Err(Error::Config(
                "sweep values must be finite and sorted ascending".into(),
            ));
        }
        if self.n_seeds == 0 {
            return Err(Error::Config("n_seeds must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("at least one method is required".into()));
        }
        for &v in &self.values {
            self.parameter.apply(&self.base, v).validate()?;
        }
        Ok(())
    }

    fn modes(&self) -> Vec<ConnectivityMode> {
        if self.modes.is_empty() {
            vec![self.base.mode]
        } else {
            self.modes.clone()
        }
    }
}

/// Per-seed statistics of one method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedMetrics {
    pub sum_capacity: f64,
    pub min_capacity: f64,
    pub reliable_sum_capacity: f64,
    /// Mean LCU outage over active pairs; `None` without active pairs.
    pub mean_outage: Option<f64>,
    pub active_pairs: usize,
    pub violating_pairs: usize,
}

/// Mean of per-seed values with a normal-approximation 95% half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub ci95: f64,
    pub n: usize,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                ci95: f64::NAN,
                n,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let ci95 = if n > 1 {
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            1.96 * (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, ci95, n }
    }
}

/// One CSV record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: String,
    pub value: f64,
    pub method: String,
    pub mode: String,
    pub n_hcu: usize,
    pub n_lcu_pairs: usize,
    pub n_seeds: usize,
    pub failures: usize,
    pub sum_capacity: f64,
    pub sum_capacity_ci95: f64,
    pub min_capacity: f64,
    pub min_capacity_ci95: f64,
    pub reliable_sum_capacity: f64,
    pub reliable_sum_capacity_ci95: f64,
    /// Empty when no method run had an active pair.
    pub lcu_outage: Option<f64>,
    pub lcu_outage_ci95: Option<f64>,
    pub active_pairs: f64,
    pub violating_pairs: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Messages for seeds that failed; those seeds are left out of the means.
    pub failures: Vec<String>,
}

/// Outage of each active pair, either closed-form or sampled.
fn pair_outages(
    result: &AllocationResult,
    gains: &crate::channel::GainTable,
    qos: &QosRequirements,
    noise: f64,
    samples: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    result
        .pairs
        .iter()
        .map(|p| {
            if samples == 0 {
                return Ok(p.outage.expect("context annotates every pair"));
            }
            let cfg = SamplingConfig::new(samples, seed);
            let link = (p.hcu as u64) << 32 | p.lcu as u64;
            Ok(empirical_outage_on_link(
                p.powers.p_hcu,
                p.powers.p_lcu,
                &gains.pair(p.hcu, p.lcu),
                qos,
                noise,
                &cfg,
                link,
            )?
            .value)
        })
        .collect()
}

/// Runs every method on one scenario configuration.
pub fn evaluate_methods(
    cfg: &ScenarioConfig,
    methods: &[MethodTag],
    samples: usize,
) -> Result<Vec<SeedMetrics>> {
    let (_, ctx) = cfg.prepare()?;
    methods
        .iter()
        .map(|&m| {
            let r = ctx.run(m)?;
            let outages = pair_outages(
                &r,
                &ctx.gains,
                &ctx.qos,
                ctx.limits.noise,
                samples,
                cfg.seed,
            )?;
            Ok(SeedMetrics {
                sum_capacity: r.sum_capacity,
                min_capacity: r.min_capacity,
                reliable_sum_capacity: r.reliable_sum_capacity,
                mean_outage: (!outages.is_empty())
                    .then(|| outages.iter().sum::<f64>() / outages.len() as f64),
                active_pairs: r.pairs.len(),
                violating_pairs: r.violating_pairs,
            })
        })
        .collect()
}

/// Runs the sweep; seeds are `base.seed, base.seed + 1, …`.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let modes = spec.modes();
    // one job per (value, mode, seed), in output order
    let jobs: Vec<(usize, usize, u64)> = (0..spec.values.len())
        .flat_map(|v| {
            (0..modes.len()).flat_map(move |m| (0..spec.n_seeds as u64).map(move |s| (v, m, s)))
        })
        .collect();
    let run = |&(v, m, s): &(usize, usize, u64)| {
        let mut cfg = spec.parameter.apply(&spec.base, spec.values[v]);
        cfg.mode = modes[m];
        cfg.seed = spec.base.seed.wrapping_add(s);
        evaluate_methods(&cfg, &spec.methods, spec.samples).map_err(|e| {
            format!(
                "{}={} mode={} seed={}: {} error: {e}",
                spec.parameter,
                spec.values[v],
                modes[m].tag(),
                cfg.seed,
                e.category()
            )
        })
    };
    #[cfg(feature = "parallel")]
    let outcomes: Vec<std::result::Result<Vec<SeedMetrics>, String>> = {
        use rayon::prelude::*;
        jobs.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<std::result::Result<Vec<SeedMetrics>, String>> =
        jobs.iter().map(run).collect();

    let mut result = SweepResult::default();
    let per_group = spec.n_seeds;
    for (g, chunk) in outcomes.chunks(per_group).enumerate() {
        let (v, m) = (g / modes.len(), g % modes.len());
        let cfg = spec.parameter.apply(&spec.base, spec.values[v]);
        let ok: Vec<&Vec<SeedMetrics>> = chunk.iter().filter_map(|o| o.as_ref().ok()).collect();
        result
            .failures
            .extend(chunk.iter().filter_map(|o| o.as_ref().err().cloned()));
        for (k, method) in spec.methods.iter().enumerate() {
            let col = |f: &dyn Fn(&SeedMetrics) -> Option<f64>| -> Summary {
                Summary::of(&ok.iter().filter_map(|s| f(&s[k])).collect::<Vec<_>>())
            };
            let sum = col(&|s| Some(s.sum_capacity));
            let min = col(&|s| Some(s.min_capacity));
            let rel = col(&|s| Some(s.reliable_sum_capacity));
            let out = col(&|s| s.mean_outage);
            let pairs = col(&|s| Some(s.active_pairs as f64));
            let viol = col(&|s| Some(s.violating_pairs as f64));
            result.rows.push(SweepRow {
                parameter: spec.parameter.tag().to_string(),
                value: spec.values[v],
                method: method.tag().to_string(),
                mode: modes[m].tag().to_string(),
                n_hcu: cfg.n_hcu,
                n_lcu_pairs: cfg.n_lcu_pairs,
                n_seeds: ok.len(),
                failures: chunk.len() - ok.len(),
                sum_capacity: sum.mean,
                sum_capacity_ci95: sum.ci95,
                min_capacity: min.mean,
                min_capacity_ci95: min.ci95,
                reliable_sum_capacity: rel.mean,
                reliable_sum_capacity_ci95: rel.ci95,
                lcu_outage: (out.n > 0).then_some(out.mean),
                lcu_outage_ci95: (out.n > 0).then_some(out.ci95),
                active_pairs: pairs.mean,
                violating_pairs: viol.mean,
            });
        }
    }
    Ok(result)
}

/// Column order of the CSV output.
pub const CSV_HEADER: [&str; 18] = [
    "parameter",
    "value",
    "method",
    "mode",
    "n_hcu",
    "n_lcu_pairs",
    "n_seeds",
    "failures",
    "sum_capacity",
    "sum_capacity_ci95",
    "min_capacity",
    "min_capacity_ci95",
    "reliable_sum_capacity",
    "reliable_sum_capacity_ci95",
    "lcu_outage",
    "lcu_outage_ci95",
    "active_pairs",
    "violating_pairs",
];

pub fn write_csv<W: Write>(result: &SweepResult, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for row in &result.rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(result, std::io::BufWriter::new(file))
}

pub fn read_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize()
        .collect::<std::result::Result<Vec<SweepRow>, _>>()?)
}

// ---------------------------------------------------------------------------
// Oracles

/// Calls `visit` with every injective map of `min(rows, cols)` items of the
/// shorter side into the longer side (as `(row, col)` pairs).
pub fn for_each_full_matching(rows: usize, cols: usize, mut visit: impl FnMut(&[(usize, usize)])) {
    fn rec(
        depth: usize,
        short: usize,
        long: usize,
        transposed: bool,
        used: &mut Vec<bool>,
        acc: &mut Vec<(usize, usize)>,
        visit: &mut dyn FnMut(&[(usize, usize)]),
    ) {
        if depth == short {
            visit(acc);
            return;
        }
        for c in 0..long {
            if !used[c] {
                used[c] = true;
                acc.push(if transposed { (c, depth) } else { (depth, c) });
                rec(depth + 1, short, long, transposed, used, acc, visit);
                acc.pop();
                used[c] = false;
            }
        }
    }
    let transposed = rows > cols;
    let (short, long) = if transposed {
        (cols, rows)
    } else {
        (rows, cols)
    };
    rec(
        0,
        short,
        long,
        transposed,
        &mut vec![false; long],
        &mut Vec::new(),
        &mut visit,
    );
}

/// Best `(cardinality, value)` over all matchings avoiding `None` cells, by
/// enumeration: most pairs first, then best objective.
pub fn brute_force_assignment(
    rows: usize,
    cols: usize,
    cells: &[Option<f64>],
    maximize: bool,
) -> (usize, f64) {
    let mut best: Option<(usize, f64)> = None;
    for_each_full_matching(rows, cols, |m| {
        let kept: Vec<f64> = m.iter().filter_map(|&(r, c)| cells[r * cols + c]).collect();
        let card = kept.len();
        let val: f64 = kept.iter().sum();
        let better = match best {
            None => true,
            Some((bc, bv)) => {
                card > bc || (card == bc && if maximize { val > bv } else { val < bv })
            }
        };
        if better {
            best = Some((card, val));
        }
    });
    best.unwrap_or((0, 0.0))
}

/// Largest achievable minimum over maximum-cardinality matchings.
pub fn brute_force_max_min(rows: usize, cols: usize, cells: &[Option<f64>]) -> Option<f64> {
    let mut best: Option<(usize, f64)> = None;
    for_each_full_matching(rows, cols, |m| {
        let kept: Vec<f64> = m.iter().filter_map(|&(r, c)| cells[r * cols + c]).collect();
        if kept.is_empty() {
            return;
        }
        let card = kept.len();
        let mn = kept.iter().copied().fold(f64::INFINITY, f64::min);
        let better = match best {
            None => true,
            Some((bc, bv)) => card > bc || (card == bc && mn > bv),
        };
        if better {
            best = Some((card, mn));
        }
    });
    best.map(|b| b.1)
}

/// Best pair capacity over an `n × n` power grid subject to the outage target.
pub fn grid_search_pair(
    gains: &PairGains,
    limits: &PowerLimits,
    qos: &QosRequirements,
    mode: ConnectivityMode,
    n: usize,
) -> Result<Option<f64>> {
    let mut best: Option<f64> = None;
    for a in 0..=n {
        let p_l = limits.p_max_lcu * a as f64 / n as f64;
        if p_l == 0.0 {
            continue;
        }
        for b in 0..=n {
            let p_h = limits.p_max_hcu * b as f64 / n as f64;
            if outage_probability(p_h, p_l, gains, qos, limits.noise)? <= qos.outage_max {
                let c = pair_capacity(p_h, p_l, gains, limits.noise, mode)?;
                best = Some(best.map_or(c, |x: f64| x.max(c)));
            }
        }
    }
    Ok(best)
}

/// Adaptive Simpson quadrature of `∫_x^∞ e^{-t}/t dt`, via `t = x + u/(1-u)`.
pub fn e1_by_quadrature(x: f64) -> f64 {
    fn simpson(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
            return left + right + (left + right - whole) / 15.0;
        }
        // never ask for less than rounding noise, or the recursion cannot stop
        let child = (eps / 2.0).max(4.0 * f64::EPSILON * (left + right).abs());
        simpson(f, a, m, fa, flm, fm, left, child, depth - 1)
            + simpson(f, m, b, fm, frm, fb, right, child, depth - 1)
    }
    // substitute t = x·e^s to tame the 1/t behaviour: ∫_0^∞ e^{-x e^s} ds
    let f = move |s: f64| (-x * s.exp()).exp();
    let upper = ((50.0f64 / x).ln()).max(1.0) + 5.0;
    let (a, b) = (0.0, upper);
    let (fa, fb) = (f(a), f(b));
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // E1(x) is of order e^{-x}/(x + 1); ask for ~1e-14 relative accuracy
    let eps = 1e-14 * (-x).exp() / (x + 1.0);
    simpson(&f, a, b, fa, fm, fb, whole, eps, 40)
}

// ---------------------------------------------------------------------------
// Validation report

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<CheckOutcome>,
}

impl Report {
    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(CheckOutcome {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "[{}] {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        writeln!(f, "{passed}/{} checks passed", self.checks.len())
    }
}

fn random_grid(rng: &mut impl Rng, rows: usize, cols: usize, p_forbidden: f64) -> Vec<Option<f64>> {
    (0..rows * cols)
        .map(|_| {
            let forbid = rng.random::<f64>() < p_forbidden;
            let v = rng.random::<f64>();
            (!forbid).then_some(v)
        })
        .collect()
}

/// Small-instance oracle suite plus invariant checks on the given scenario.
pub fn run_validation(cfg: &ScenarioConfig) -> Result<Report> {
    let mut report = Report::default();
    let mut rng = keyed_rng(cfg.seed, 0x7A1D, 0, 0);

    // special function against quadrature
    let worst = [0.01, 0.1, 1.0, 5.0, 20.0]
        .iter()
        .map(|&x| Ok(((exp_integral_e1(x)? - e1_by_quadrature(x)) / e1_by_quadrature(x)).abs()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    report.push(
        "e1-vs-quadrature",
        worst < 1e-9,
        format!("max relative error {worst:.3e}"),
    );

    // assignment against enumeration
    let mut mismatches = 0;
    let mut total = 0;
    for size in 1..=5 {
        for _ in 0..20 {
            let cols = size + (rng.random::<u32>() % 2) as usize;
            let cells = random_grid(&mut rng, size, cols, 0.2);
            let problem = AssignmentProblem::new(size, cols, cells.clone(), Objective::Maximize)?;
            let got = solve_assignment(&problem)?;
            let (card, val) = brute_force_assignment(size, cols, &cells, true);
            total += 1;
            if got.pairs.len() != card || (got.objective_value - val).abs() > 1e-9 {
                mismatches += 1;
            }
        }
    }
    report.push(
        "hungarian-vs-enumeration",
        mismatches == 0,
        format!("{mismatches}/{total} mismatches"),
    );

    // max-min against enumeration
    let mut mismatches = 0;
    for _ in 0..30 {
        let cells = random_grid(&mut rng, 4, 4, 0.2);
        let m = CapacityMatrix::from_values(4, 4, &cells)?;
        let got = algo2_pairing(&m, &[f64::INFINITY; 4], MaxMinRefinement::LastFeasible)?;
        let achieved = got
            .pairs
            .iter()
            .filter_map(|&(i, j)| m.get(i, j))
            .fold(None, |acc: Option<f64>, v| {
                Some(acc.map_or(v, |a| a.min(v)))
            });
        if achieved != brute_force_max_min(4, 4, &cells) {
            mismatches += 1;
        }
    }
    report.push(
        "max-min-vs-enumeration",
        mismatches == 0,
        format!("{mismatches}/30 mismatches"),
    );

    // the configured scenario
    let (inst, ctx) = cfg.prepare()?;
    let tol = Tolerance::default();
    let mut worst_gap = 0.0f64;
    let mut checked = 0;
    for k in 0..inst.gains.n_hcu().min(inst.gains.n_lcu()).min(5) {
        let g = inst.gains.pair(k, k);
        let alloc = optimal_pair_powers(&g, &ctx.limits, &ctx.qos, tol)?;
        if !alloc.is_feasible() {
            continue;
        }
        let closed = pair_capacity(alloc.p_hcu, alloc.p_lcu, &g, ctx.limits.noise, ctx.mode)?;
        if let Some(grid) = grid_search_pair(&g, &ctx.limits, &ctx.qos, ctx.mode, 200)? {
            worst_gap = worst_gap.max((grid - closed) / closed.max(1e-300));
            checked += 1;
        }
    }
    report.push(
        "power-vs-grid-search",
        worst_gap <= 0.005,
        format!(
            "{checked} pairs, grid exceeds closed form by at most {:.3}%",
            100.0 * worst_gap
        ),
    );

    let a1 = ctx.algo1()?;
    let a2 = ctx.algo2()?;
    report.push(
        "algo1-sum-dominates",
        a1.sum_capacity >= a2.sum_capacity - 1e-9 * a1.sum_capacity.abs(),
        format!(
            "algo1 {:.6} vs algo2 {:.6}",
            a1.sum_capacity, a2.sum_capacity
        ),
    );
    report.push(
        "algo2-min-dominates",
        a2.min_capacity >= a1.min_capacity - 1e-9 * a2.min_capacity.abs(),
        format!(
            "algo2 {:.6} vs algo1 {:.6}",
            a2.min_capacity, a1.min_capacity
        ),
    );
    let worst_outage = a1
        .pairs
        .iter()
        .chain(&a2.pairs)
        .filter_map(|p| p.outage)
        .fold(0.0, f64::max);
    report.push(
        "closed-form-reliability",
        worst_outage <= ctx.qos.outage_max + 1e-9,
        format!(
            "max pair outage {worst_outage:.3e} vs target {:.3e}",
            ctx.qos.outage_max
        ),
    );
    let filter_ok = ctx
        .matrix
        .cells
        .iter()
        .all(|c| c.value().is_none_or(|v| v >= ctx.qos.cap_min_hcu));
    report.push(
        "capacity-filter",
        filter_ok,
        format!(
            "{} of {} cells admissible",
            ctx.matrix.feasible_count(),
            ctx.matrix.cells.len()
        ),
    );
    let f_ok = (0..inst.gains.n_lcu().min(5)).all(|j| {
        let g = inst
            .gains
            .pair(0.min(inst.gains.n_hcu().saturating_sub(1)), j);
        let p_min = crate::power::lcu_power_min(&g, &ctx.qos, ctx.limits.noise);
        hcu_power_bound_f(p_min, &g, &ctx.qos, ctx.limits.noise)
            .map(|f| f.abs() <= 1e-9 * g.a_jj * p_min / (ctx.qos.sinr_min_lcu * g.a_ij))
            .unwrap_or(false)
    }) || inst.gains.n_hcu() == 0;
    report.push(
        "f-zero-crossing",
        f_ok,
        "f(p_min) = 0 on sampled pairs".into(),
    );
    Ok(report)
}

// ---------------------------------------------------------------------------
// Monte Carlo report

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McPairCheck {
    pub hcu: usize,
    pub lcu: usize,
    pub outage_closed: f64,
    pub outage_mc: f64,
    pub outage_se: f64,
    pub capacity_closed: f64,
    pub capacity_mc: f64,
    pub capacity_se: f64,
    pub outage_agrees: bool,
    pub capacity_agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub samples: usize,
    pub z: f64,
    pub pairs: Vec<McPairCheck>,
}

impl McReport {
    pub fn disagreements(&self) -> usize {
        self.pairs
            .iter()
            .filter(|p| !(p.outage_agrees && p.capacity_agrees))
            .count()
    }
}

impl fmt::Display for McReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>4} {:>4} {:>12} {:>12} {:>10} {:>10} {:>10} {:>9}",
            "hcu", "lcu", "outage", "outage_mc", "cap", "cap_mc", "cap_se", "agree"
        )?;
        for p in &self.pairs {
            writeln!(
                f,
                "{:>4} {:>4} {:>12.4e} {:>12.4e} {:>10.5} {:>10.5} {:>10.2e} {:>9}",
                p.hcu,
                p.lcu,
                p.outage_closed,
                p.outage_mc,
                p.capacity_closed,
                p.capacity_mc,
                p.capacity_se,
                p.outage_agrees && p.capacity_agrees
            )?;
        }
        writeln!(
            f,
            "{} pairs, {} outside {} standard errors (capacity tolerance max(1%, {} SE)), {} samples each",
            self.pairs.len(),
            self.disagreements(),
            self.z,
            self.z,
            self.samples
        )
    }
}

/// Sampled ergodic capacity for the given powers and connectivity mode.
pub fn empirical_pair_capacity(
    p_h: f64,
    p_l: f64,
    gains: &PairGains,
    noise: f64,
    mode: ConnectivityMode,
    cfg: &SamplingConfig,
) -> Result<crate::montecarlo::Estimate> {
    let leg = |a_s: f64, a_i: f64| (p_h * a_s / noise, p_l * a_i / noise);
    match mode {
        ConnectivityMode::McCombined => {
            let (rho, eta) = leg(gains.a_ir + gains.a_ih, gains.a_jr + gains.a_jh);
            empirical_capacity(rho, eta, cfg)
        }
        ConnectivityMode::McPerLinkSum => empirical_capacity_two_leg(
            leg(gains.a_ir, gains.a_jr),
            leg(gains.a_ih, gains.a_jh),
            cfg,
        ),
        ConnectivityMode::ScRbsOnly => {
            let (rho, eta) = leg(gains.a_ir, gains.a_jr);
            empirical_capacity(rho, eta, cfg)
        }
    }
}

/// Closed forms versus sampling for every pair chosen by the sum-capacity
/// algorithm on the configured scenario.
pub fn run_mc_check(cfg: &ScenarioConfig, samples: usize) -> Result<McReport> {
    let (_, ctx) = cfg.prepare()?;
    let alloc = ctx.algo1()?;
    let sampling = SamplingConfig::new(samples, cfg.seed);
    let z = sampling.confidence_z;
    let pairs = alloc
        .pairs
        .iter()
        .map(|p| {
            let g = ctx.gains.pair(p.hcu, p.lcu);
            let link = (p.hcu as u64) << 32 | p.lcu as u64;
            let out = empirical_outage_on_link(
                p.powers.p_hcu,
                p.powers.p_lcu,
                &g,
                &ctx.qos,
                ctx.limits.noise,
                &sampling,
                link,
            )?;
            let cap = empirical_pair_capacity(
                p.powers.p_hcu,
                p.powers.p_lcu,
                &g,
                ctx.limits.noise,
                ctx.mode,
                &sampling,
            )?;
            let closed_out = p.outage.expect("annotated");
            Ok(McPairCheck {
                hcu: p.hcu,
                lcu: p.lcu,
                outage_closed: closed_out,
                outage_mc: out.value,
                outage_se: out.std_error,
                capacity_closed: p.capacity,
                capacity_mc: cap.value,
                capacity_se: cap.std_error,
                outage_agrees: (out.value - closed_out).abs()
                    <= z * out.std_error.max(binomial_se(closed_out, samples)),
                capacity_agrees: (cap.value - p.capacity).abs()
                    <= (0.01 * p.capacity).max(z * cap.std_error),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(McReport { samples, z, pairs })
}

/// Binomial standard error of a proportion `p` estimated from `n` draws.
pub fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> SweepSpec {
        SweepSpec {
            parameter: SweepParameter::OutagePo,
            values: vec![1e-3, 1e-2],
            methods: vec![MethodTag::Algo1, MethodTag::Baseline1],
            modes: vec![],
            n_seeds: 2,
            samples: 0,
            base: ScenarioConfig {
                n_hcu: 4,
                n_lcu_pairs: 4,
                ..Default::default()
            },
        }
    }

    #[test]
    fn sweep_shape_and_csv_round_trip() {
        let spec = small_spec();
        let res = run_sweep(&spec).unwrap();
        assert_eq!(res.rows.len(), 4);
        assert!(res.failures.is_empty());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        emit_csv(&res, &path).unwrap();
        let back = read_csv(&path).unwrap();
        assert_eq!(back, res.rows);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.ends_with('\n'));
        assert!(text
            .lines()
            .all(|l| l.split(',').count() == CSV_HEADER.len()));
    }

    #[test]
    fn empty_result_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&SweepResult::default(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), CSV_HEADER.join(",") + "\n");
    }

    #[test]
    fn single_point_matches_direct_run() {
        let mut spec = small_spec();
        spec.values = vec![1e-3];
        spec.n_seeds = 1;
        spec.methods = vec![MethodTag::Algo1];
        let res = run_sweep(&spec).unwrap();
        let (_, ctx) = spec.base.prepare().unwrap();
        let direct = ctx.algo1().unwrap();
        assert_eq!(res.rows[0].sum_capacity, direct.sum_capacity);
        assert_eq!(res.rows[0].min_capacity, direct.min_capacity);
    }

    #[test]
    fn spec_validation() {
        let mut spec = small_spec();
        spec.values = vec![2.0, 1.0];
        assert!(spec.validate().is_err());
        spec.values = vec![];
        assert!(spec.validate().is_err());
        let mut spec = small_spec();
        spec.n_seeds = 0;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn spec_toml_round_trip() {
        let spec = small_spec();
        let text = spec.to_toml_string().unwrap();
        assert_eq!(SweepSpec::from_toml_str(&text).unwrap(), spec);
    }

    #[test]
    fn ji_ratio_varies_lcu_count() {
        let base = ScenarioConfig::default();
        assert_eq!(SweepParameter::JiRatio.apply(&base, 0.6).n_lcu_pairs, 12);
        assert_eq!(SweepParameter::JiRatio.apply(&base, 0.6).n_hcu, 20);
    }

    #[test]
    fn quadrature_oracle() {
        assert!((e1_by_quadrature(1.0) - 0.219_383_934_395_520_3).abs() < 1e-12);
    }

    #[test]
    fn enumeration_counts() {
        let mut n = 0;
        for_each_full_matching(3, 4, |_| n += 1);
        assert_eq!(n, 24);
        let mut n = 0;
        for_each_full_matching(4, 2, |_| n += 1);
        assert_eq!(n, 12);
    }

    #[test]
    fn validation_passes_on_default() {
        let cfg = ScenarioConfig {
            n_hcu: 6,
            n_lcu_pairs: 6,
            ..Default::default()
        };
        let r = run_validation(&cfg).unwrap();
        assert!(r.all_passed(), "{r}");
    }
}
