//! Online greedy allocation: every slot transmits at its binding cap.
//!
//! The greedy schedule is feasible, so its average buffer length upper-bounds
//! the optimum. It is exactly optimal whenever the battery never binds along
//! its own trajectory (see [`greedy_optimality_check`]).

use crate::error::{Error, Result};
use crate::model::{rate, CapMode, ConstraintProfile, RateCheck, ScenarioConfig, Schedule, SlotCaps};

/// Greedy against `min(E/tau, ISR cap, rate cap)`. Requires interference data.
pub fn greedy_allocate(cfg: &ScenarioConfig) -> Result<(Schedule, ConstraintProfile)> {
    if cfg.interference.is_none() {
        return Err(Error::MissingInterferenceData);
    }
    run(cfg, CapMode::Full)
}

/// Greedy against `min(E/tau, rate cap)`; never reads the ISR data.
pub fn greedy_allocate_relaxed(cfg: &ScenarioConfig) -> Result<(Schedule, ConstraintProfile)> {
    run(cfg, CapMode::Relaxed)
}

/// Greedy under an explicit cap set.
pub fn greedy_with_mode(cfg: &ScenarioConfig, mode: CapMode) -> Result<(Schedule, ConstraintProfile)> {
    match mode {
        CapMode::Full => greedy_allocate(cfg),
        CapMode::Relaxed => greedy_allocate_relaxed(cfg),
    }
}

fn run(cfg: &ScenarioConfig, mode: CapMode) -> Result<(Schedule, ConstraintProfile)> {
    cfg.validate()?;
    let mut state = cfg.initial_state();
    let mut power = Vec::with_capacity(cfg.slots());
    let mut profile = ConstraintProfile::default();
    for n in 0..cfg.slots() {
        let caps = match mode {
            CapMode::Full => cfg.caps(n, state),
            // Relaxed runs must not touch the ISR data at all.
            CapMode::Relaxed => SlotCaps::new(n, state.energy / cfg.tau, f64::INFINITY, cfg.rate_cap(n, state.queue)),
        };
        // The rate cap is never negative on a greedy path since R <= Q keeps Q >= 0.
        let p = caps.cap(mode).max(0.0);
        state = cfg.step(n, state, p, RateCheck::Strict)?;
        power.push(p);
        profile.slots.push(caps);
    }
    Ok((Schedule::evaluate(cfg, power)?, profile))
}

/// Per-slot outcome of the greedy-optimality condition.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyCondition {
    /// `E[n]/tau >= min(ISR cap, rate cap)` at each realized state.
    pub per_slot: Vec<bool>,
    /// Rate achievable at the ISR cap, `log(alpha * ISR cap + 1)`.
    pub isr_rate: Vec<f64>,
    pub holds: bool,
}

/// Evaluates the sufficient condition for greedy optimality on a greedy
/// trajectory's constraint profile: the battery never binds, i.e. each slot
/// has `E[n]/tau >= min(ISR cap, rate cap)`.
pub fn greedy_optimality_check(cfg: &ScenarioConfig, profile: &ConstraintProfile) -> GreedyCondition {
    let per_slot: Vec<bool> = profile.slots.iter().map(|c| c.energy >= c.isr.min(c.rate)).collect();
    let isr_rate = profile.slots.iter().map(|c| isr_limited_rate(cfg, c.slot)).collect();
    let holds = per_slot.iter().all(|&b| b);
    GreedyCondition {
        per_slot,
        isr_rate,
        holds,
    }
}

/// Largest rate the ISR limit allows in `slot`; infinite when unconstrained.
pub fn isr_limited_rate(cfg: &ScenarioConfig, slot: usize) -> f64 {
    let cap = cfg.isr_cap(slot);
    if cap.is_infinite() {
        return f64::INFINITY;
    }
    rate(cap, cfg.alpha(slot), cfg.log_base).unwrap_or(f64::NAN)
}
