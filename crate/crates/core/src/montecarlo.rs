//! Sampling oracles for the closed forms.
//!
//! Every estimator draws unit-mean exponential fading from counter-keyed
//! ChaCha streams: the stream for a chunk of samples is derived from
//! `(seed, link id, chunk index)`, and per-chunk partial sums are combined in
//! chunk order. Serial and parallel runs therefore agree bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::channel::PairGains;
use crate::error::{Error, Result};
use crate::power::QosRequirements;

const CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub confidence_z: f64,
}

impl SamplingConfig {
    pub fn new(n_samples: usize, seed: u64) -> Self {
        Self {
            n_samples,
            seed,
            confidence_z: 3.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::Config("n_samples must be >= 1".into()));
        }
        Ok(())
    }
}

/// A statistic with the standard error of its estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    /// Whether `reference` lies within `z` standard errors.
    pub fn agrees_with(&self, reference: f64, z: f64) -> bool {
        (self.value - reference).abs() <= z * self.std_error
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic stream keyed by `(seed, a, b, c)`.
pub fn keyed_rng(seed: u64, a: u64, b: u64, c: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut h = splitmix64(seed);
    for (k, part) in [a, b, c, 0x5EED].into_iter().enumerate() {
        h = splitmix64(h ^ part);
        key[k * 8..(k + 1) * 8].copy_from_slice(&h.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Unit-mean exponential variate.
pub fn fading_draw<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Exp1)
}

/// Runs `body` over chunks of the sample range and folds the partial results
/// in chunk order.
fn chunked<T, F>(cfg: &SamplingConfig, link_id: u64, body: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    let n_chunks = cfg.n_samples.div_ceil(CHUNK);
    let run = |k: usize| {
        let len = CHUNK.min(cfg.n_samples - k * CHUNK);
        let mut rng = keyed_rng(cfg.seed, link_id, k as u64, 0);
        body(&mut rng, len)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n_chunks).into_par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n_chunks).map(run).collect()
    }
}

/// Link id used when a caller does not distinguish streams.
pub const DEFAULT_LINK: u64 = 0;

/// Empirical LCU outage `Pr{γ ≤ γ0}` with the binomial standard error.
pub fn empirical_outage(
    p_h: f64,
    p_l: f64,
    gains: &PairGains,
    qos: &QosRequirements,
    noise: f64,
    cfg: &SamplingConfig,
) -> Result<Estimate> {
    empirical_outage_on_link(p_h, p_l, gains, qos, noise, cfg, DEFAULT_LINK)
}

pub fn empirical_outage_on_link(
    p_h: f64,
    p_l: f64,
    gains: &PairGains,
    qos: &QosRequirements,
    noise: f64,
    cfg: &SamplingConfig,
    link_id: u64,
) -> Result<Estimate> {
    cfg.validate()?;
    let g0 = qos.sinr_min_lcu;
    let signal = p_l * gains.a_jj;
    let interf = p_h * gains.a_ij;
    let counts = chunked(cfg, link_id, |rng, len| {
        let mut hits = 0u64;
        for _ in 0..len {
            let g_jj = fading_draw(rng);
            let g_ij = fading_draw(rng);
            let sinr = signal * g_jj / (noise + interf * g_ij);
            if sinr <= g0 && g0 > 0.0 {
                hits += 1;
            }
        }
        hits
    });
    let n = cfg.n_samples as f64;
    let p = counts.iter().sum::<u64>() as f64 / n;
    Ok(Estimate {
        value: p,
        std_error: (p * (1.0 - p) / n).sqrt(),
    })
}

/// Sample mean of `log2(1 + ρU/(1 + ηV))` with the standard error of the mean.
pub fn empirical_capacity(rho: f64, eta: f64, cfg: &SamplingConfig) -> Result<Estimate> {
    cfg.validate()?;
    if !(rho >= 0.0 && eta >= 0.0) {
        return Err(Error::domain(
            "empirical_capacity",
            "rho and eta must be >= 0",
        ));
    }
    let sums = chunked(cfg, DEFAULT_LINK, |rng, len| {
        let (mut s, mut s2) = (0.0f64, 0.0f64);
        for _ in 0..len {
            let u = fading_draw(rng);
            let v = fading_draw(rng);
            let c = (rho * u / (1.0 + eta * v)).ln_1p() / std::f64::consts::LN_2;
            s += c;
            s2 += c * c;
        }
        (s, s2)
    });
    Ok(mean_and_se(&sums, cfg.n_samples))
}

/// Two independent legs (RBS and HAP), each with its own fading, summed.
pub fn empirical_capacity_two_leg(
    rbs: (f64, f64),
    hap: (f64, f64),
    cfg: &SamplingConfig,
) -> Result<Estimate> {
    cfg.validate()?;
    let leg = |rho: f64, eta: f64, u: f64, v: f64| {
        (rho * u / (1.0 + eta * v)).ln_1p() / std::f64::consts::LN_2
    };
    let sums = chunked(cfg, DEFAULT_LINK, |rng, len| {
        let (mut s, mut s2) = (0.0f64, 0.0f64);
        for _ in 0..len {
            let c = leg(rbs.0, rbs.1, fading_draw(rng), fading_draw(rng))
                + leg(hap.0, hap.1, fading_draw(rng), fading_draw(rng));
            s += c;
            s2 += c * c;
        }
        (s, s2)
    });
    Ok(mean_and_se(&sums, cfg.n_samples))
}

fn mean_and_se(sums: &[(f64, f64)], n: usize) -> Estimate {
    let (s, s2) = sums
        .iter()
        .fold((0.0, 0.0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
    let nf = n as f64;
    let mean = s / nf;
    let var = if n > 1 {
        ((s2 - nf * mean * mean) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    Estimate {
        value: mean,
        std_error: (var / nf).sqrt(),
    }
}

/// Draws of `W = ρU / (1 + ηV)`, in stream order.
pub fn sample_w(rho: f64, eta: f64, cfg: &SamplingConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let parts = chunked(cfg, DEFAULT_LINK, |rng, len| {
        (0..len)
            .map(|_| {
                let u = fading_draw(rng);
                let v = fading_draw(rng);
                rho * u / (1.0 + eta * v)
            })
            .collect::<Vec<_>>()
    });
    Ok(parts.concat())
}

/// Closed-form CDF of `W`.
pub fn cdf_w(rho: f64, eta: f64, w: f64) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    1.0 - (-w / rho).exp() * rho / (rho + eta * w)
}

/// Empirical CDF of `W` at each grid point.
pub fn empirical_cdf_w(rho: f64, eta: f64, cfg: &SamplingConfig, grid: &[f64]) -> Result<Vec<f64>> {
    let mut w = sample_w(rho, eta, cfg)?;
    w.sort_unstable_by(f64::total_cmp);
    let n = w.len() as f64;
    Ok(grid
        .iter()
        .map(|&x| w.partition_point(|&s| s <= x) as f64 / n)
        .collect())
}

/// Kolmogorov–Smirnov distance between the samples and the closed-form CDF.
pub fn ks_distance_w(rho: f64, eta: f64, cfg: &SamplingConfig) -> Result<f64> {
    let mut w = sample_w(rho, eta, cfg)?;
    w.sort_unstable_by(f64::total_cmp);
    let n = w.len() as f64;
    Ok(w.iter().enumerate().fold(0.0f64, |d, (k, &x)| {
        let f = cdf_w(rho, eta, x);
        let above = (k as f64 + 1.0) / n - f;
        let below = f - k as f64 / n;
        d.max(above).max(below)
    }))
}
