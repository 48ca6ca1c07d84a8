#![allow(dead_code)]

use ehsched::model::{InterferenceLimit, ScenarioConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn isr_limit(caps: Vec<f64>) -> InterferenceLimit {
    let n = caps.len();
    InterferenceLimit {
        rho: 1.0,
        p0: 1.0,
        g11: caps,
        g21: vec![1.0; n],
    }
}

fn uniform(rng: &mut impl Rng, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Small positive instance with moderate caps, suitable for grid oracles.
pub fn random_instance(rng: &mut impl Rng, slots: usize) -> ScenarioConfig {
    let alpha = uniform(rng, 0.05, 1.0, slots);
    let ea0 = rng.random_range(0.1..4.0);
    let ea = uniform(rng, 0.0, 4.0, slots);
    let da = uniform(rng, 0.0, 2.0, slots);
    let q0 = rng.random_range(0.0..2.0);
    let isr = uniform(rng, 0.5, 6.0, slots);
    ScenarioConfig::effective(alpha, ea0, ea, da, q0).with_interference(isr_limit(isr))
}

/// Energy far exceeds every ISR and queue-emptying cap.
pub fn energy_rich_instance(rng: &mut impl Rng, slots: usize) -> ScenarioConfig {
    let mut cfg = random_instance(rng, slots);
    cfg.initial_energy = 1e6;
    cfg.energy_arrivals = vec![1e6; slots];
    cfg
}

/// Little energy against a long backlog and loose ISR caps.
pub fn energy_starved_instance(rng: &mut impl Rng, slots: usize) -> ScenarioConfig {
    let alpha = uniform(rng, 0.05, 1.0, slots);
    let ea0 = rng.random_range(0.1..3.0);
    let ea = uniform(rng, 0.0, 3.0, slots);
    let da = uniform(rng, 0.0, 2.0, slots);
    let q0 = rng.random_range(4.0..8.0);
    let isr = vec![50.0; slots];
    ScenarioConfig::effective(alpha, ea0, ea, da, q0).with_interference(isr_limit(isr))
}

pub fn assert_close(got: &[f64], want: &[f64], tol: f64) {
    assert_eq!(got.len(), want.len(), "{got:?} vs {want:?}");
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() <= tol, "{got:?} vs {want:?} (tol {tol})");
    }
}
