//! Upper/lower bound assembly and optimality certificates.

use serde::Serialize;

use crate::error::Result;
use crate::greedy::{greedy_allocate, greedy_allocate_relaxed, greedy_optimality_check};
use crate::model::{CapMode, ConstraintProfile, ScenarioConfig, Schedule, SlotState};
use crate::pa::{pa_allocate, pa_objective};

/// Which allocator is exact for the problem without ISR data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelaxedOptimality {
    /// Battery covers the queue-emptying power in every slot.
    GreedyOptimal,
    /// Battery falls short of the queue-emptying power in every slot.
    ReallocationOptimal,
    Neither,
}

impl RelaxedOptimality {
    pub fn as_str(&self) -> &'static str {
        match self {
            RelaxedOptimality::GreedyOptimal => "greedy-optimal",
            RelaxedOptimality::ReallocationOptimal => "pa-optimal",
            RelaxedOptimality::Neither => "neither",
        }
    }
}

/// Optimality conditions evaluated on states reached without transmitting,
/// i.e. from the exogenous arrival traces alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IdleConditions {
    pub greedy_condition: bool,
    pub energy_binding: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    /// Greedy average buffer length.
    pub upper: f64,
    /// Re-allocation average buffer length (unclamped).
    pub lower: f64,
    pub gap: f64,
    /// Greedy condition holds along the greedy trajectory.
    pub greedy_certified: bool,
    /// Battery binds in every slot along the re-allocation trajectory.
    pub energy_binds: bool,
    /// Battery binds in every slot along the greedy trajectory.
    pub energy_binds_on_greedy: bool,
    pub idle: IdleConditions,
    pub relaxed_case: RelaxedOptimality,
    /// Caps along the greedy trajectory.
    pub per_slot: ConstraintProfile,
}

impl BoundReport {
    /// The upper bound is the optimum.
    pub fn upper_exact(&self) -> bool {
        self.greedy_certified
    }

    /// The lower bound is the optimum (the re-allocation is feasible).
    pub fn lower_exact(&self) -> bool {
        self.energy_binds
    }
}

/// Runs both allocators on `cfg` and certifies whichever bound is exact.
pub fn assemble_bounds(cfg: &ScenarioConfig) -> Result<BoundReport> {
    let (greedy, profile) = greedy_allocate(cfg)?;
    let pa = pa_allocate(cfg)?;
    let lower = pa_objective(cfg, &pa).lower_bound;
    let greedy_certified = greedy_optimality_check(cfg, &profile).holds;
    let energy_binds = energy_binds_everywhere(&ConstraintProfile::along(cfg, &pa));
    let energy_binds_on_greedy = energy_binds_everywhere(&profile);
    Ok(BoundReport {
        upper: greedy.objective,
        lower,
        gap: greedy.objective - lower,
        greedy_certified,
        energy_binds,
        energy_binds_on_greedy,
        idle: idle_conditions(cfg),
        relaxed_case: classify_relaxed_problem(cfg)?,
        per_slot: profile,
    })
}

/// `E[n]/tau <= min(ISR cap, rate cap)` in every slot of `profile`.
pub fn energy_binds_everywhere(profile: &ConstraintProfile) -> bool {
    profile.slots.iter().all(|c| c.energy <= c.isr.min(c.rate))
}

/// Classifies the relaxed (no ISR data) problem from the relaxed greedy
/// trajectory's caps.
pub fn classify_relaxed_problem(cfg: &ScenarioConfig) -> Result<RelaxedOptimality> {
    let (_, profile) = greedy_allocate_relaxed(cfg)?;
    Ok(classify_relaxed(&profile))
}

pub fn classify_relaxed(profile: &ConstraintProfile) -> RelaxedOptimality {
    if profile.slots.iter().all(|c| c.energy >= c.rate) {
        RelaxedOptimality::GreedyOptimal
    } else if profile.slots.iter().all(|c| c.energy < c.rate) {
        RelaxedOptimality::ReallocationOptimal
    } else {
        RelaxedOptimality::Neither
    }
}

/// Both conditions evaluated on the idle trajectory, where the battery and
/// queue only accumulate arrivals.
pub fn idle_conditions(cfg: &ScenarioConfig) -> IdleConditions {
    let idle = idle_profile(cfg);
    IdleConditions {
        greedy_condition: idle.slots.iter().all(|c| c.energy >= c.isr.min(c.rate)),
        energy_binding: energy_binds_everywhere(&idle),
    }
}

fn idle_profile(cfg: &ScenarioConfig) -> ConstraintProfile {
    let mut state = cfg.initial_state();
    let mut profile = ConstraintProfile::default();
    for n in 0..cfg.slots() {
        profile.slots.push(cfg.caps(n, state));
        state = SlotState {
            energy: state.energy + cfg.energy_arrivals[n],
            queue: state.queue + cfg.data_arrivals[n],
        };
    }
    profile
}

/// Caps along `schedule` under `mode`, for reporting.
pub fn profile_for(cfg: &ScenarioConfig, schedule: &Schedule, mode: CapMode) -> ConstraintProfile {
    let mut profile = ConstraintProfile::along(cfg, schedule);
    if mode == CapMode::Relaxed {
        for c in &mut profile.slots {
            c.isr = f64::INFINITY;
        }
    }
    profile
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CapKind, InterferenceLimit};

    fn wide_isr(n: usize) -> InterferenceLimit {
        InterferenceLimit {
            rho: 1.0,
            p0: 1.0,
            g11: vec![1e3; n],
            g21: vec![1.0; n],
        }
    }

    #[test]
    fn abundant_energy_certifies_the_upper_bound() {
        let cfg = ScenarioConfig::effective(vec![0.3, 0.5, 0.2], 1e9, vec![1e9; 3], vec![1.0, 2.0, 1.0], 1.5)
            .with_interference(wide_isr(3));
        let report = assemble_bounds(&cfg).unwrap();
        assert!(report.greedy_certified && report.upper_exact());
        assert!(report.gap >= -1e-9);
        assert_eq!(report.relaxed_case, RelaxedOptimality::GreedyOptimal);
    }

    #[test]
    fn drained_battery_and_huge_backlog_favour_reallocation() {
        let cfg = ScenarioConfig::effective(vec![0.3, 0.5, 0.2], 2.0, vec![0.0; 3], vec![0.0; 3], 50.0);
        assert_eq!(
            classify_relaxed_problem(&cfg).unwrap(),
            RelaxedOptimality::ReallocationOptimal
        );
    }

    #[test]
    fn alternating_caps_classify_as_neither() {
        // Slot 1 empties a short queue; slot 2 then faces a big arrival with a drained battery.
        let cfg = ScenarioConfig::effective(vec![0.5, 0.5], 100.0, vec![0.0, 0.0], vec![40.0, 0.0], 1.0);
        let (_, profile) = greedy_allocate_relaxed(&cfg).unwrap();
        assert_eq!(profile.active(CapMode::Relaxed), vec![CapKind::Rate, CapKind::Energy]);
        assert_eq!(classify_relaxed(&profile), RelaxedOptimality::Neither);
    }

    #[test]
    fn idle_conditions_read_only_arrivals() {
        let cfg = ScenarioConfig::effective(vec![0.5], 0.0, vec![3.0], vec![2.0], 1.0).with_interference(wide_isr(1));
        let idle = idle_conditions(&cfg);
        assert!(idle.energy_binding);
        assert!(!idle.greedy_condition);
    }
}
