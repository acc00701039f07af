//! Property-based invariants.

use proptest::prelude::*;

use uavshare::assignment::{solve_assignment, AssignmentProblem, Objective};
use uavshare::capacity::{ergodic_capacity_shared, pair_capacity, CapacityParams, ConnectivityMode};
use uavshare::channel::{db_to_linear, linear_to_db, DbKind, PairGains};
use uavshare::energy::{check_constant_power, total_energy, EnergyModel};
use uavshare::experiments::brute_force_assignment;
use uavshare::mathkernels::{exp_integral_e1, Tolerance};
use uavshare::power::{
    hcu_power_bound_f, lcu_power_min, optimal_pair_powers, outage_probability, BoundaryCase, PowerLimits,
    QosRequirements,
};
use uavshare::scenario::ScenarioConfig;

fn log_range(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

prop_compose! {
    fn pair_gains()(
        a_jj in log_range(1e-12, 1e-7),
        a_ij in log_range(1e-14, 1e-9),
        a_ir in log_range(1e-14, 1e-9),
        a_ih in log_range(1e-14, 1e-9),
        a_jr in log_range(1e-15, 1e-10),
        a_jh in log_range(1e-15, 1e-10),
    ) -> PairGains {
        PairGains { a_jj, a_ij, a_ir, a_ih, a_jr, a_jh }
    }
}

prop_compose! {
    fn qos()(g0_db in 0.0f64..15.0, po in log_range(1e-4, 0.2)) -> QosRequirements {
        QosRequirements { sinr_min_lcu: db_to_linear(g0_db, DbKind::PowerRatio), outage_max: po, cap_min_hcu: 0.0 }
    }
}

fn limits() -> PowerLimits {
    PowerLimits {
        p_max_hcu: db_to_linear(16.0, DbKind::MilliwattReferenced),
        p_max_lcu: db_to_linear(22.0, DbKind::MilliwattReferenced),
        noise: db_to_linear(-114.0, DbKind::MilliwattReferenced),
    }
}

fn cells_strategy(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Option<f64>>> {
    prop::collection::vec(prop::option::weighted(0.75, 0.0f64..100.0), rows * cols)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn e1_positive_and_decreasing(x in log_range(1e-6, 700.0), step in 1.0001f64..3.0) {
        let a = exp_integral_e1(x).unwrap();
        let b = exp_integral_e1(x * step).unwrap();
        prop_assert!(a > 0.0);
        prop_assert!(b < a);
    }

    #[test]
    fn capacity_monotone_in_snr_and_inr(
        rho in log_range(1e-3, 1e5),
        eta in log_range(1e-3, 1e5),
        k in 1.01f64..10.0,
    ) {
        let c = ergodic_capacity_shared(CapacityParams { rho, eta }).unwrap();
        let more_signal = ergodic_capacity_shared(CapacityParams { rho: rho * k, eta }).unwrap();
        let more_interference = ergodic_capacity_shared(CapacityParams { rho, eta: eta * k }).unwrap();
        prop_assert!(c > 0.0);
        prop_assert!(more_signal > c);
        prop_assert!(more_interference < c);
        // interference never helps
        let free = ergodic_capacity_shared(CapacityParams { rho, eta: 0.0 }).unwrap();
        prop_assert!(c <= free);
    }

    #[test]
    fn outage_monotone_in_powers(g in pair_gains(), q in qos(), ph in log_range(1e-6, 0.04), pl in log_range(1e-6, 0.16)) {
        let n = limits().noise;
        let base = outage_probability(ph, pl, &g, &q, n).unwrap();
        prop_assert!((0.0..=1.0).contains(&base));
        prop_assert!(outage_probability(ph * 2.0, pl, &g, &q, n).unwrap() >= base);
        prop_assert!(outage_probability(ph, pl * 2.0, &g, &q, n).unwrap() <= base);
    }

    #[test]
    fn bound_increasing_above_zero_crossing(g in pair_gains(), q in qos(), k in 1.0001f64..1e3) {
        let n = limits().noise;
        let p_min = lcu_power_min(&g, &q, n);
        let a = hcu_power_bound_f(p_min * k, &g, &q, n).unwrap();
        let b = hcu_power_bound_f(p_min * k * 1.01, &g, &q, n).unwrap();
        prop_assert!(a > 0.0);
        prop_assert!(b > a);
        // on the curve the outage equals the target
        let out = outage_probability(a, p_min * k, &g, &q, n).unwrap();
        prop_assert!((out - q.outage_max).abs() <= 1e-9 * q.outage_max.max(1e-300) + 1e-15);
    }

    #[test]
    fn allocation_is_reliable_and_on_a_boundary(g in pair_gains(), q in qos()) {
        let l = limits();
        let a = optimal_pair_powers(&g, &l, &q, Tolerance::default()).unwrap();
        match a.boundary_case {
            BoundaryCase::Infeasible => prop_assert!(lcu_power_min(&g, &q, l.noise) >= l.p_max_lcu),
            BoundaryCase::Scenario1 => prop_assert_eq!(a.p_lcu, l.p_max_lcu),
            BoundaryCase::Scenario2 => prop_assert_eq!(a.p_hcu, l.p_max_hcu),
        }
        if a.is_feasible() {
            prop_assert!(a.p_hcu <= l.p_max_hcu && a.p_lcu <= l.p_max_lcu);
            let out = outage_probability(a.p_hcu, a.p_lcu, &g, &q, l.noise).unwrap();
            prop_assert!(out <= q.outage_max * (1.0 + 1e-9));
        }
    }

    #[test]
    fn multi_connectivity_never_hurts_at_equal_powers(g in pair_gains(), ph in log_range(1e-4, 0.04)) {
        // the per-leg sum adds a non-negative HAP leg to the RBS leg
        let n = limits().noise;
        let sc = pair_capacity(ph, 0.0, &g, n, ConnectivityMode::ScRbsOnly).unwrap();
        let sum = pair_capacity(ph, 0.0, &g, n, ConnectivityMode::McPerLinkSum).unwrap();
        let comb = pair_capacity(ph, 0.0, &g, n, ConnectivityMode::McCombined).unwrap();
        prop_assert!(sum >= sc);
        prop_assert!(comb >= sc);
    }

    #[test]
    fn db_round_trip(x in -200.0f64..200.0) {
        for kind in [DbKind::PowerRatio, DbKind::MilliwattReferenced] {
            let back = linear_to_db(db_to_linear(x, kind), kind);
            prop_assert!((back - x).abs() < 1e-9);
        }
    }

    #[test]
    fn energy_is_additive(p in prop::collection::vec(0.0f64..1.0, 1..50), prop_w in 1.0f64..200.0) {
        let model = EnergyModel { p_prop: prop_w, slot_duration: 0.5, horizon: p.len(), e_max: 1e9 };
        let total = total_energy(&model, &p).unwrap();
        let want: f64 = p.iter().map(|x| (x + prop_w) * 0.5).sum();
        prop_assert!((total - want).abs() <= 1e-9 * want);
        let c = check_constant_power(&model, 0.1).unwrap();
        prop_assert!(c.feasible);
        prop_assert!((c.slack - (model.e_max - c.total)).abs() < 1e-6);
    }

    #[test]
    fn assignment_matches_enumeration(
        (rows, cols, cells) in (1usize..6, 1usize..6).prop_flat_map(|(r, c)| (Just(r), Just(c), cells_strategy(r, c)))
    ) {
        for objective in [Objective::Maximize, Objective::Minimize] {
            let got = solve_assignment(&AssignmentProblem::new(rows, cols, cells.clone(), objective).unwrap()).unwrap();
            let (card, val) = brute_force_assignment(rows, cols, &cells, objective == Objective::Maximize);
            let got_val: f64 = got.pairs.iter().map(|&(r, c)| cells[r * cols + c].unwrap()).sum();
            prop_assert_eq!(got.pairs.len(), card);
            prop_assert!((got_val - val).abs() < 1e-9);
        }
    }

    #[test]
    fn config_round_trips(seed in any::<u64>(), n_hcu in 1usize..50, n_lcu in 0usize..50, po in log_range(1e-5, 0.5), g0 in -5.0f64..20.0) {
        let mut cfg = ScenarioConfig { seed, n_hcu, n_lcu_pairs: n_lcu, ..ScenarioConfig::default() };
        cfg.qos.outage_max = po;
        cfg.qos.sinr_min_lcu_db = g0;
        let back = ScenarioConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
