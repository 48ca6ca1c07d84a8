mod common;

use ehsched::bounds::{assemble_bounds, classify_relaxed, classify_relaxed_problem, RelaxedOptimality};
use ehsched::experiments::{fig3_config, fig4_config, fig5_config};
use ehsched::greedy::greedy_allocate_relaxed;
use ehsched::model::CapMode;
use ehsched::oracle::{grid_optimal_full, grid_optimal_relaxed, GridSpec};
use ehsched::pa::{compute_weights, pa_allocate};

#[test]
fn bounds_sandwich_the_oracle() {
    let grid = GridSpec::new(2e-2, 3).unwrap();
    let mut rng = common::rng(41);
    for i in 0..60 {
        let cfg = common::random_instance(&mut rng, 1 + i % 3);
        let report = assemble_bounds(&cfg).unwrap();
        let opt = grid_optimal_full(&cfg, grid, CapMode::Full).unwrap().schedule.objective;
        assert!(
            report.lower <= opt + 1e-9,
            "instance {i}: lower {} > {opt}",
            report.lower
        );
        assert!(
            opt <= report.upper + 1e-9,
            "instance {i}: {opt} > upper {}",
            report.upper
        );
        assert!(report.gap >= -1e-12);
    }
}

#[test]
fn certified_bounds_are_tight() {
    let grid = GridSpec::new(2e-2, 3).unwrap();
    let mut rng = common::rng(42);
    let (mut upper_seen, mut lower_seen) = (0, 0);
    for i in 0..80 {
        let cfg = if i % 2 == 0 {
            common::energy_rich_instance(&mut rng, 1 + i % 3)
        } else {
            common::energy_starved_instance(&mut rng, 1 + i % 3)
        };
        let report = assemble_bounds(&cfg).unwrap();
        if !report.upper_exact() && !report.lower_exact() {
            continue;
        }
        let opt = grid_optimal_full(&cfg, grid, CapMode::Full).unwrap().schedule.objective;
        if report.upper_exact() {
            upper_seen += 1;
            assert!((report.upper - opt).abs() <= grid.resolution, "instance {i}");
        }
        if report.lower_exact() {
            lower_seen += 1;
            assert!((report.lower - opt).abs() <= grid.resolution, "instance {i}");
        }
    }
    assert!(upper_seen >= 20 && lower_seen >= 10, "{upper_seen} / {lower_seen}");
}

#[test]
fn energy_limited_sweep_reports_energy_binding_on_greedy() {
    for mean in [4.0, 9.0, 16.0] {
        let report = assemble_bounds(&fig4_config(mean)).unwrap();
        assert!(report.energy_binds_on_greedy, "E = {mean}");
        assert!(!report.greedy_certified);
        assert!(report.lower <= report.upper);
    }
}

#[test]
fn quoted_sweeps_keep_lower_below_upper() {
    for cfg in [fig3_config(0.3), fig3_config(0.9), fig5_config(4.0)] {
        let report = assemble_bounds(&cfg).unwrap();
        assert!(report.lower <= report.upper + 1e-12);
    }
}

#[test]
fn relaxed_classification_matches_relaxed_oracle() {
    let grid = GridSpec::new(1e-2, 3).unwrap();
    let mut rng = common::rng(43);
    for i in 0..60 {
        let mut cfg = if i % 2 == 0 {
            common::energy_rich_instance(&mut rng, 1 + i % 3)
        } else {
            common::energy_starved_instance(&mut rng, 1 + i % 3)
        };
        cfg.interference = None;
        match classify_relaxed_problem(&cfg).unwrap() {
            RelaxedOptimality::GreedyOptimal => {
                let (g, _) = greedy_allocate_relaxed(&cfg).unwrap();
                let opt = grid_optimal_full(&cfg, grid, CapMode::Relaxed)
                    .unwrap()
                    .schedule
                    .objective;
                assert!((g.objective - opt).abs() <= grid.resolution, "instance {i}");
            }
            RelaxedOptimality::ReallocationOptimal => {
                let w = compute_weights(&cfg);
                let u = w.utility(&pa_allocate(&cfg).unwrap().power);
                let opt = grid_optimal_relaxed(&cfg, grid).unwrap().utility;
                assert!((u - opt).abs() <= grid.resolution, "instance {i}");
            }
            RelaxedOptimality::Neither => {}
        }
    }
}

#[test]
fn classification_labels_are_stable() {
    let (_, profile) = greedy_allocate_relaxed(&fig4_config(9.0)).unwrap();
    assert_eq!(classify_relaxed(&profile), RelaxedOptimality::ReallocationOptimal);
    assert_eq!(RelaxedOptimality::GreedyOptimal.as_str(), "greedy-optimal");
    assert_eq!(RelaxedOptimality::ReallocationOptimal.as_str(), "pa-optimal");
    assert_eq!(RelaxedOptimality::Neither.as_str(), "neither");
}
