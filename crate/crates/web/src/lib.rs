//! Browser bindings for the uavshare solver.
//!
//! Three entry points are exported: allocate a whole scenario from a TOML
//! configuration, evaluate the shared-band ergodic capacity, and evaluate the
//! LCU outage probability of one sharing pair. Results cross the boundary as
//! JSON strings or plain numbers.

use wasm_bindgen::prelude::*;

use uavshare::algorithms::MethodTag;
use uavshare::capacity::{ergodic_capacity_shared, CapacityParams};
use uavshare::channel::{db_to_linear, DbKind, PairGains};
use uavshare::power::{outage_probability, QosRequirements};
use uavshare::scenario::ScenarioConfig;

fn js_err(e: uavshare::Error) -> JsError {
    JsError::new(&format!("{} error: {e}", e.category()))
}

/// Runs the listed methods (comma-separated tags, empty for all) on the
/// scenario described by `config_toml` and returns the results as JSON.
pub fn allocate_json(config_toml: &str, methods: &str) -> uavshare::Result<String> {
    let cfg = ScenarioConfig::from_toml_str(config_toml)?;
    let methods: Vec<MethodTag> = if methods.trim().is_empty() {
        MethodTag::ALL.to_vec()
    } else {
        methods
            .split(',')
            .map(|m| m.trim().parse())
            .collect::<uavshare::Result<_>>()?
    };
    let (_, ctx) = cfg.prepare()?;
    let results = methods.iter().map(|&m| ctx.run(m)).collect::<uavshare::Result<Vec<_>>>()?;
    let doc = serde_json::json!({
        "seed": cfg.seed,
        "mode": cfg.mode,
        "n_hcu": cfg.n_hcu,
        "n_lcu_pairs": cfg.n_lcu_pairs,
        "admissible_cells": ctx.matrix.feasible_count(),
        "results": results,
    });
    serde_json::to_string(&doc).map_err(|e| uavshare::Error::Parse(e.to_string()))
}

#[wasm_bindgen]
pub fn allocate(config_toml: &str, methods: &str) -> Result<String, JsError> {
    allocate_json(config_toml, methods).map_err(js_err)
}

/// `E[log2(1 + ρU/(1 + ηV))]` with the mean SNR and INR given in dB.
#[wasm_bindgen]
pub fn shared_capacity(snr_db: f64, inr_db: f64) -> Result<f64, JsError> {
    ergodic_capacity_shared(CapacityParams {
        rho: db_to_linear(snr_db, DbKind::PowerRatio),
        eta: db_to_linear(inr_db, DbKind::PowerRatio),
    })
    .map_err(js_err)
}

/// LCU outage probability for mean LCU SNR and mean HCU interference-to-noise
/// ratio (both dB) at an SINR threshold in dB.
#[wasm_bindgen]
pub fn lcu_outage(snr_db: f64, inr_db: f64, threshold_db: f64) -> Result<f64, JsError> {
    // unit noise: powers carry the ratios, gains are one
    let gains = PairGains {
        a_jj: 1.0,
        a_ij: 1.0,
        a_ir: 1.0,
        a_ih: 1.0,
        a_jr: 1.0,
        a_jh: 1.0,
    };
    let qos = QosRequirements {
        sinr_min_lcu: db_to_linear(threshold_db, DbKind::PowerRatio),
        outage_max: 0.5,
        cap_min_hcu: 0.0,
    };
    outage_probability(
        db_to_linear(inr_db, DbKind::PowerRatio),
        db_to_linear(snr_db, DbKind::PowerRatio),
        &gains,
        &qos,
        1.0,
    )
    .map_err(js_err)
}
