//! End-to-end invariants of every allocation method on generated scenarios.

use std::collections::BTreeSet;

use uavshare::algorithms::MethodTag;
use uavshare::capacity::ConnectivityMode;
use uavshare::scenario::ScenarioConfig;

fn configs() -> impl Iterator<Item = ScenarioConfig> {
    (1..=15u64).flat_map(|seed| {
        [(20, 20), (20, 6), (8, 15)].into_iter().map(move |(i, j)| ScenarioConfig {
            seed,
            n_hcu: i,
            n_lcu_pairs: j,
            mode: ConnectivityMode::ALL[seed as usize % 3],
            ..ScenarioConfig::default()
        })
    })
}

#[test]
fn results_are_well_formed() {
    for cfg in configs() {
        let (_, ctx) = cfg.prepare().unwrap();
        for method in MethodTag::ALL {
            let r = ctx.run(method).unwrap();
            let hcus: BTreeSet<usize> = r.pairs.iter().map(|p| p.hcu).collect();
            let lcus: BTreeSet<usize> = r.pairs.iter().map(|p| p.lcu).collect();
            assert_eq!(hcus.len(), r.pairs.len(), "{method}: HCU reused");
            assert_eq!(lcus.len(), r.pairs.len(), "{method}: LCU reused");
            assert_eq!(r.unpaired_hcu.len() + r.pairs.len(), cfg.n_hcu);
            assert_eq!(r.unpaired_lcu.len() + r.pairs.len(), cfg.n_lcu_pairs);
            assert!((r.sum_capacity - r.hcu_capacity.iter().sum::<f64>()).abs() < 1e-9);
            let min = r.hcu_capacity.iter().copied().fold(f64::INFINITY, f64::min);
            assert_eq!(r.min_capacity, min);
            assert!(r.reliable_sum_capacity <= r.sum_capacity + 1e-12);
            for &i in &r.unpaired_hcu {
                assert_eq!(r.hcu_capacity[i], ctx.unpaired[i], "{method}: unpaired HCU keeps its own band");
            }
            for p in &r.pairs {
                assert!(p.powers.p_hcu <= ctx.limits.p_max_hcu && p.powers.p_lcu <= ctx.limits.p_max_lcu);
                assert!(p.outage.is_some());
            }
            if !method.shares_spectrum() {
                assert!(r.pairs.is_empty());
                assert_eq!(r.sum_capacity, ctx.unpaired.iter().sum::<f64>());
            }
        }
    }
}

#[test]
fn proposed_methods_only_use_admissible_reliable_pairs() {
    for cfg in configs() {
        let (_, ctx) = cfg.prepare().unwrap();
        for method in [MethodTag::Algo1, MethodTag::Algo2] {
            let r = ctx.run(method).unwrap();
            assert_eq!(r.violating_pairs, 0);
            assert_eq!(r.reliable_sum_capacity, r.sum_capacity);
            for p in &r.pairs {
                let c = ctx.matrix.get(p.hcu, p.lcu).expect("admissible cell");
                assert_eq!(c, p.capacity);
                assert!(c >= ctx.qos.cap_min_hcu);
                assert!(p.outage.unwrap() <= ctx.qos.outage_max * (1.0 + 1e-9));
            }
        }
    }
}

#[test]
fn proposed_methods_dominate_each_other_in_their_own_metric() {
    for cfg in configs() {
        let (_, ctx) = cfg.prepare().unwrap();
        let (a1, a2) = (ctx.algo1().unwrap(), ctx.algo2().unwrap());
        assert!(a1.sum_capacity >= a2.sum_capacity - 1e-9 * a1.sum_capacity);
        assert!(a2.min_capacity >= a1.min_capacity - 1e-9 * a2.min_capacity);
        // both serve the same number of LCUs
        assert_eq!(a1.pairs.len(), a2.pairs.len());
    }
}

#[test]
fn full_power_baselines_transmit_at_the_ceiling() {
    let (_, ctx) = ScenarioConfig::default().prepare().unwrap();
    for method in [MethodTag::Baseline2, MethodTag::Baseline4, MethodTag::Baseline5] {
        let r = ctx.run(method).unwrap();
        assert_eq!(r.pairs.len(), ctx.n_hcu().min(ctx.n_lcu()));
        for p in &r.pairs {
            assert_eq!(p.powers.p_hcu, ctx.limits.p_max_hcu);
            assert_eq!(p.powers.p_lcu, ctx.limits.p_max_lcu);
        }
    }
    let b1 = ctx.run(MethodTag::Baseline1).unwrap();
    let b3 = ctx.run(MethodTag::Baseline3).unwrap();
    assert_eq!(b1.sum_capacity, b3.sum_capacity);
}

#[test]
fn energy_flags_follow_the_budget() {
    let mut cfg = ScenarioConfig::default();
    let (_, ctx) = cfg.prepare().unwrap();
    let r = ctx.algo1().unwrap();
    assert!(r.energy_feasible_hcu.iter().chain(&r.energy_feasible_lcu).all(|&f| f));
    // a budget just above pure propulsion energy rejects every transmitting UAV
    cfg.energy.budget_j = cfg.energy.propulsion_w * cfg.energy.slot_s * cfg.energy.slots as f64 + 1e-3;
    let (_, tight) = cfg.prepare().unwrap();
    let r = tight.algo1().unwrap();
    assert!(r.energy_feasible_hcu.iter().all(|&f| !f));
    for (j, &p) in r.lcu_power.iter().enumerate() {
        assert_eq!(r.energy_feasible_lcu[j], p == 0.0 || p * cfg.energy.slot_s * cfg.energy.slots as f64 <= 1e-3);
    }
}

#[test]
fn methods_are_deterministic() {
    let cfg = ScenarioConfig {
        seed: 4,
        ..ScenarioConfig::default()
    };
    let (_, a) = cfg.prepare().unwrap();
    let (_, b) = cfg.prepare().unwrap();
    for method in MethodTag::ALL {
        assert_eq!(a.run(method).unwrap(), b.run(method).unwrap());
    }
}
