mod common;

use ehsched::model::CapMode;
use ehsched::oracle::{bisection_waterfill, grid_optimal_full, grid_optimal_relaxed, GridSpec};
use ehsched::pa::{compute_weights, pa_allocate, pa_trace, reallocate, waterfill_window, WeightedSlots};
use proptest::prelude::*;

fn weights_strategy(max_len: usize) -> impl Strategy<Value = WeightedSlots> {
    prop::collection::vec(0.01f64..5.0, 1..=max_len).prop_map(WeightedSlots::new)
}

proptest! {
    #[test]
    fn waterfill_satisfies_kkt(w in weights_strategy(8), budget in 0.0f64..50.0, a in 0usize..8, b in 0usize..8) {
        let (a, b) = (a % w.len(), b % w.len());
        let (lo, hi) = (a.min(b), a.max(b));
        let window = lo..hi + 1;
        let fill = waterfill_window(&w, window.clone(), budget).unwrap();
        let total: f64 = fill.power.iter().sum();
        prop_assert!((total - budget).abs() <= 1e-9 * budget.max(1.0));
        for (i, q) in window.clone().enumerate() {
            let p = fill.power[i];
            prop_assert!(p >= 0.0);
            if p > 0.0 {
                prop_assert!((w.level(q, p) - fill.level).abs() <= 1e-9 * fill.level);
            } else {
                // Unpowered slots sit at or above the water line.
                prop_assert!(w.gamma[q] >= fill.level - 1e-9 * fill.level);
            }
        }
        let q_star = window.start + fill.last_active;
        for (i, q) in window.clone().enumerate() {
            if fill.power[i] > 0.0 {
                prop_assert!(w.gamma[q] <= w.gamma[q_star]);
            }
        }
    }

    #[test]
    fn reallocation_respects_cumulative_budgets(
        alpha in prop::collection::vec(0.01f64..2.0, 1..7),
        initial in 0.0f64..10.0,
        arrivals in prop::collection::vec(0.0f64..10.0, 7),
    ) {
        let w = WeightedSlots::new(alpha);
        let n = w.len();
        let trace = reallocate(&w, initial, &arrivals).unwrap();
        let p = trace.allocation();
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        let mut budget = initial;
        let mut used = 0.0;
        for l in 0..n {
            used += p[l];
            prop_assert!(used <= budget * (1.0 + 1e-9) + 1e-12, "prefix {l}: {used} > {budget}");
            budget += arrivals[l];
        }
        let total: f64 = initial + arrivals[..n - 1].iter().sum::<f64>();
        prop_assert!((used - total).abs() <= 1e-9 * total.max(1.0));

        // Levels of powered slots never decrease over time.
        let levels: Vec<f64> = (0..n).filter(|&q| p[q] > 0.0).map(|q| w.level(q, p[q])).collect();
        for pair in levels.windows(2) {
            prop_assert!(pair[1] >= pair[0] * (1.0 - 1e-9), "{levels:?}");
        }

        // Slots before each accepted window keep their previous allocation exactly.
        for k in 1..n {
            let r = trace.window_start[k];
            prop_assert_eq!(&trace.stages[k][..r], &trace.stages[k - 1][..r]);
        }
    }
}

#[test]
fn bisection_agrees_with_segment_walk() {
    let mut rng = common::rng(21);
    use rand::Rng;
    for _ in 0..1000 {
        let len = rng.random_range(1..8);
        let alpha: Vec<f64> = (0..len).map(|_| rng.random_range(0.01..5.0)).collect();
        let w = WeightedSlots::new(alpha);
        let budget = rng.random_range(0.0..40.0);
        let walk = waterfill_window(&w, 0..len, budget).unwrap();
        let bis = bisection_waterfill(&w, 0..len, budget, 1e-10).unwrap();
        common::assert_close(&walk.power, &bis.power, 1e-8);
    }
}

#[test]
fn reallocation_is_optimal_on_small_instances() {
    let grid = GridSpec::new(1e-2, 3).unwrap();
    let mut rng = common::rng(31);
    for i in 0..120 {
        let cfg = common::random_instance(&mut rng, 1 + i % 3);
        let w = compute_weights(&cfg);
        let pa = pa_allocate(&cfg).unwrap();
        let oracle = grid_optimal_relaxed(&cfg, grid).unwrap();
        let u_pa = w.utility(&pa.power);
        assert!(
            u_pa >= oracle.utility - grid.resolution,
            "instance {i}: {u_pa} < {}",
            oracle.utility
        );
        assert!(u_pa <= oracle.utility + grid.resolution, "instance {i}");
        // The oracle is restricted to a grid, so it cannot beat the true optimum.
        assert!(oracle.utility <= u_pa + 1e-9, "instance {i}: oracle beats allocator");
    }
}

#[test]
fn reallocation_is_optimal_on_four_slots() {
    let grid = GridSpec::new(5e-2, 4).unwrap();
    let mut rng = common::rng(32);
    for i in 0..15 {
        let mut cfg = common::random_instance(&mut rng, 4);
        cfg.initial_energy = cfg.initial_energy.min(2.0);
        for e in &mut cfg.energy_arrivals {
            *e = e.min(2.0);
        }
        let w = compute_weights(&cfg);
        let u_pa = w.utility(&pa_allocate(&cfg).unwrap().power);
        let oracle = grid_optimal_relaxed(&cfg, grid).unwrap();
        assert!(oracle.utility <= u_pa + 1e-9, "instance {i}: oracle beats allocator");
    }
}

#[test]
fn leading_dark_slots_match_oracle() {
    // No initial energy leaves slot 1 unpowered, exercising the empty-prefix break test.
    let grid = GridSpec::new(1e-2, 3).unwrap();
    let mut rng = common::rng(33);
    for i in 0..30 {
        let mut cfg = common::random_instance(&mut rng, 3);
        cfg.initial_energy = 0.0;
        let trace = pa_trace(&cfg).unwrap();
        assert_eq!(trace.stages[0], vec![0.0]);
        let w = compute_weights(&cfg);
        let u_pa = w.utility(trace.allocation());
        let oracle = grid_optimal_relaxed(&cfg, grid).unwrap();
        assert!(oracle.utility <= u_pa + 1e-9, "instance {i}");
        assert!(u_pa - oracle.utility <= grid.resolution, "instance {i}");
    }
}

#[test]
fn lower_bound_sits_below_full_oracle() {
    let grid = GridSpec::new(2e-2, 3).unwrap();
    let mut rng = common::rng(34);
    for i in 0..40 {
        let cfg = common::random_instance(&mut rng, 1 + i % 3);
        let pa = pa_allocate(&cfg).unwrap();
        let full = grid_optimal_full(&cfg, grid, CapMode::Full).unwrap();
        assert!(pa.objective <= full.schedule.objective + 1e-9, "instance {i}");
    }
}

#[test]
fn refining_the_grid_never_hurts_much() {
    let mut rng = common::rng(35);
    for _ in 0..10 {
        let cfg = common::random_instance(&mut rng, 3);
        let coarse = GridSpec::new(4e-2, 3).unwrap();
        let fine = GridSpec::new(2e-2, 3).unwrap();
        let a = grid_optimal_full(&cfg, coarse, CapMode::Full)
            .unwrap()
            .schedule
            .objective;
        let b = grid_optimal_full(&cfg, fine, CapMode::Full).unwrap().schedule.objective;
        assert!(b <= a + coarse.resolution);
    }
}
