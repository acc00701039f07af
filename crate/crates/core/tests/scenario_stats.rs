//! Statistical properties of generated scenarios.

use uavshare::channel::{linear_to_db, DbKind, LinkClass};
use uavshare::scenario::{generate, ScenarioConfig, DEFAULT_SPEED_MPS};
use uavshare::Error;

fn spacings(speed: f64, scenarios: u64) -> Vec<f64> {
    (1..=scenarios)
        .flat_map(|seed| {
            let mut cfg = ScenarioConfig {
                seed,
                n_hcu: 1,
                n_lcu_pairs: 50,
                ..ScenarioConfig::default()
            };
            cfg.geometry.speed_mps = speed;
            generate(&cfg).unwrap().pair_spacing
        })
        .collect()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

#[test]
fn pair_spacing_mean_is_headway_times_speed() {
    let s = spacings(DEFAULT_SPEED_MPS, 400);
    let want = 2.0 * DEFAULT_SPEED_MPS; // ≈ 38.9 m
    assert!((mean(&s) - want).abs() < 0.05 * want, "mean {}", mean(&s));
    assert!(s.iter().all(|&g| g >= 1.0));
}

#[test]
fn doubling_speed_doubles_spacing() {
    let slow = mean(&spacings(DEFAULT_SPEED_MPS, 200));
    let fast = mean(&spacings(2.0 * DEFAULT_SPEED_MPS, 200));
    assert!((fast / slow - 2.0).abs() < 0.02, "ratio {}", fast / slow);
}

#[test]
fn rbs_shadowing_has_configured_spread() {
    let mut cfg = ScenarioConfig {
        seed: 5,
        n_hcu: 20_000,
        n_lcu_pairs: 0,
        ..ScenarioConfig::default()
    };
    cfg.geometry.rbs_distance_override_m = Some(500.0);
    let inst = generate(&cfg).unwrap();
    let db: Vec<f64> = inst.gains.hcu.iter().map(|h| linear_to_db(h.a_ir, DbKind::PowerRatio)).collect();
    let rf = cfg.rf_params();
    let median = linear_to_db(
        rf.pathloss_factor * 500f64.powf(-rf.pathloss_exponent) * cfg.rf.budget(LinkClass::UavRbs),
        DbKind::PowerRatio,
    );
    assert!((std_dev(&db) - 8.0).abs() < 0.15, "sigma {}", std_dev(&db));
    assert!((mean(&db) - median).abs() < 0.2, "mean {} vs {median}", mean(&db));
}

#[test]
fn hap_links_are_stronger_than_distant_rbs_links() {
    // 17 km with exponent 2 beats about 1 km with exponent 3 on average
    let inst = generate(&ScenarioConfig::default()).unwrap();
    let hap = mean(&inst.gains.hcu.iter().map(|h| linear_to_db(h.a_ih, DbKind::PowerRatio)).collect::<Vec<_>>());
    let rbs = mean(&inst.gains.hcu.iter().map(|h| linear_to_db(h.a_ir, DbKind::PowerRatio)).collect::<Vec<_>>());
    assert!(hap > rbs, "hap {hap} dB, rbs {rbs} dB");
}

#[test]
fn entity_streams_are_common_across_sizes() {
    let small = generate(&ScenarioConfig {
        n_hcu: 5,
        n_lcu_pairs: 3,
        ..ScenarioConfig::default()
    })
    .unwrap();
    let large = generate(&ScenarioConfig {
        n_hcu: 8,
        n_lcu_pairs: 10,
        ..ScenarioConfig::default()
    })
    .unwrap();
    assert_eq!(small.hcu[..], large.hcu[..5]);
    assert_eq!(small.gains.hcu[..], large.gains.hcu[..5]);
    assert_eq!(small.lcu_tx[..], large.lcu_tx[..3]);
    assert_eq!(small.gains.lcu[..], large.gains.lcu[..3]);
    for i in 0..5 {
        for j in 0..3 {
            assert_eq!(small.gains.pair(i, j), large.gains.pair(i, j));
        }
    }
}

#[test]
fn speed_moves_only_lcu_transmitters() {
    let base = ScenarioConfig::default();
    let mut fast = base.clone();
    fast.geometry.speed_mps *= 3.0;
    let (a, b) = (generate(&base).unwrap(), generate(&fast).unwrap());
    assert_eq!(a.gains.hcu, b.gains.hcu);
    assert_eq!(
        a.hcu.iter().map(|p| (p.x, p.y)).collect::<Vec<_>>(),
        b.hcu.iter().map(|p| (p.x, p.y)).collect::<Vec<_>>()
    );
    assert_eq!(
        a.lcu_rx.iter().map(|p| (p.x, p.y)).collect::<Vec<_>>(),
        b.lcu_rx.iter().map(|p| (p.x, p.y)).collect::<Vec<_>>()
    );
    // Doppler is reported but does not enter the gains
    assert!(b.hcu_doppler[0].doppler_shift.abs() >= a.hcu_doppler[0].doppler_shift.abs());
}

#[test]
fn generation_is_reproducible() {
    let cfg = ScenarioConfig {
        seed: 99,
        ..ScenarioConfig::default()
    };
    assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
    let other = ScenarioConfig { seed: 100, ..cfg.clone() };
    assert_ne!(generate(&cfg).unwrap().gains, generate(&other).unwrap().gains);
}

#[test]
fn population_limit_is_enforced() {
    let mut cfg = ScenarioConfig {
        n_hcu: 10,
        n_lcu_pairs: 10,
        ..ScenarioConfig::default()
    };
    cfg.geometry.population = Some(29);
    assert!(matches!(generate(&cfg), Err(Error::InsufficientUavs { wanted: 30, available: 29 })));
    cfg.geometry.population = Some(30);
    assert!(generate(&cfg).is_ok());
}

#[test]
fn nodes_stay_at_configured_heights() {
    let inst = generate(&ScenarioConfig::default()).unwrap();
    assert_eq!(inst.rbs.altitude, 20.0);
    assert_eq!(inst.hap.altitude, 17_000.0);
    assert!(inst.hcu.iter().chain(&inst.lcu_rx).chain(&inst.lcu_tx).all(|p| p.altitude == 100.0));
    assert!(inst.hcu.iter().all(|p| (0.0..=2000.0).contains(&p.x) && (0.0..=2000.0).contains(&p.y)));
}
