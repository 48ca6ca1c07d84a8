//! Brute-force reference solvers for small horizons.
//!
//! These exist to check the allocators, so they share nothing with them beyond
//! the system model: the grids enumerate candidate schedules directly and the
//! water-filler bisects on the level instead of walking sorted base levels.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::model::{CapMode, ScenarioConfig, Schedule, SlotCaps, SlotState};
use crate::pa::{WaterfillResult, WeightedSlots};

/// Largest horizon any oracle will enumerate.
pub const MAX_ORACLE_SLOTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Grid step, in power units.
    pub resolution: f64,
    /// Largest horizon accepted; at most [`MAX_ORACLE_SLOTS`].
    pub max_slots: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            resolution: 1e-2,
            max_slots: 3,
        }
    }
}

impl GridSpec {
    pub fn new(resolution: f64, max_slots: usize) -> Result<Self> {
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "grid resolution must be positive, got {resolution}"
            )));
        }
        if max_slots > MAX_ORACLE_SLOTS {
            return Err(Error::InvalidConfig(format!(
                "oracle horizon limit {max_slots} exceeds {MAX_ORACLE_SLOTS}"
            )));
        }
        Ok(Self { resolution, max_slots })
    }

    fn admit(&self, cfg: &ScenarioConfig) -> Result<()> {
        cfg.validate()?;
        if cfg.slots() > self.max_slots {
            return Err(Error::OracleRefused {
                slots: cfg.slots(),
                max_slots: self.max_slots,
            });
        }
        Ok(())
    }

    /// Grid points in `[lo, hi]`, always including both endpoints.
    fn points(&self, lo: f64, hi: f64) -> impl Iterator<Item = f64> + '_ {
        let first = (lo / self.resolution).ceil() as u64;
        let last = (hi / self.resolution).floor() as u64;
        std::iter::once(lo)
            .chain(
                (first..=last)
                    .map(move |j| j as f64 * self.resolution)
                    .filter(move |&v| v > lo && v < hi),
            )
            .chain((hi > lo).then_some(hi))
    }
}

/// Best schedule found by an oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub schedule: Schedule,
    /// `sum beta_n * ln(alpha_n * P[n] + 1)` of the schedule.
    pub utility: f64,
}

/// Exhaustive search over the cumulative-budget polytope with battery-only
/// constraints.
///
/// Prefix sums `S_l = P[1] + ... + P[l]` are enumerated on the grid between
/// `S_{l-1}` and the energy harvested before slot `l + 1`. The full budget is
/// always spent because the utility is increasing in every slot's power.
pub fn grid_optimal_relaxed(cfg: &ScenarioConfig, grid: GridSpec) -> Result<OracleSolution> {
    grid.admit(cfg)?;
    let n = cfg.slots();
    let weights = WeightedSlots::new(cfg.alphas());
    let mut budgets = Vec::with_capacity(n);
    let mut acc = cfg.initial_energy / cfg.tau;
    for l in 0..n {
        budgets.push(acc);
        acc += cfg.energy_arrivals[l] / cfg.tau;
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut prefix = vec![0.0; n];
    search_prefix(&grid, &weights, &budgets, 0, 0.0, &mut prefix, &mut best);
    let (utility, power) = best.expect("the zero-then-full schedule is always enumerated");
    Ok(OracleSolution {
        schedule: Schedule::evaluate(cfg, power)?,
        utility,
    })
}

fn search_prefix(
    grid: &GridSpec,
    weights: &WeightedSlots,
    budgets: &[f64],
    slot: usize,
    prev: f64,
    prefix: &mut [f64],
    best: &mut Option<(f64, Vec<f64>)>,
) {
    let n = budgets.len();
    if slot == n - 1 {
        prefix[slot] = budgets[slot].max(prev);
        let power: Vec<f64> = (0..n)
            .map(|i| {
                if i == 0 {
                    prefix[0]
                } else {
                    (prefix[i] - prefix[i - 1]).max(0.0)
                }
            })
            .collect();
        let u = weights.utility(&power);
        // Strict improvement keeps the lexicographically first optimum.
        if best.as_ref().is_none_or(|(b, _)| u > *b) {
            *best = Some((u, power));
        }
        return;
    }
    let points: Vec<f64> = grid.points(prev, budgets[slot].max(prev)).collect();
    for s in points {
        prefix[slot] = s;
        search_prefix(grid, weights, budgets, slot + 1, s, prefix, best);
    }
}

/// Exhaustive search for the problem with state-dependent caps.
///
/// Each slot's power ranges over the grid on `[0, cap]` plus the cap itself,
/// where the cap is recomputed from the battery and queue reached along the
/// branch. The last slot always transmits at its cap, since nothing follows it.
pub fn grid_optimal_full(cfg: &ScenarioConfig, grid: GridSpec, mode: CapMode) -> Result<OracleSolution> {
    grid.admit(cfg)?;
    if mode == CapMode::Full && cfg.interference.is_none() {
        return Err(Error::MissingInterferenceData);
    }
    let ctx = Branch {
        cfg,
        grid: &grid,
        mode,
        ln_base: cfg.log_base.ln(),
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut path = Vec::with_capacity(cfg.slots());
    ctx.descend(0, cfg.initial_state(), cfg.initial_queue, &mut path, &mut best);
    let (_, power) = best.expect("the idle schedule is always enumerated");
    let weights = WeightedSlots::new(cfg.alphas());
    let utility = weights.utility(&power);
    Ok(OracleSolution {
        schedule: Schedule::evaluate(cfg, power)?,
        utility,
    })
}

struct Branch<'a> {
    cfg: &'a ScenarioConfig,
    grid: &'a GridSpec,
    mode: CapMode,
    ln_base: f64,
}

impl Branch<'_> {
    fn cap(&self, slot: usize, state: SlotState) -> f64 {
        let isr = match self.mode {
            CapMode::Full => self.cfg.isr_cap(slot),
            CapMode::Relaxed => f64::INFINITY,
        };
        let caps = SlotCaps::new(
            slot,
            state.energy / self.cfg.tau,
            isr,
            self.cfg.rate_cap(slot, state.queue),
        );
        caps.cap(self.mode).max(0.0)
    }

    fn advance(&self, slot: usize, state: SlotState, power: f64) -> SlotState {
        let r = (self.cfg.alpha(slot) * power).ln_1p() / self.ln_base;
        SlotState {
            energy: state.energy - power * self.cfg.tau + self.cfg.energy_arrivals[slot],
            queue: state.queue - r + self.cfg.data_arrivals[slot],
        }
    }

    fn descend(
        &self,
        slot: usize,
        state: SlotState,
        queue_sum: f64,
        path: &mut Vec<f64>,
        best: &mut Option<(f64, Vec<f64>)>,
    ) {
        let n = self.cfg.slots();
        let cap = self.cap(slot, state);
        if slot == n - 1 {
            let last = self.advance(slot, state, cap);
            let total = queue_sum + last.queue;
            if best.as_ref().is_none_or(|(b, _)| total < *b) {
                path.push(cap);
                *best = Some((total, path.clone()));
                path.pop();
            }
            return;
        }
        let points: Vec<f64> = self.grid.points(0.0, cap).collect();
        for p in points {
            let next = self.advance(slot, state, p);
            path.push(p);
            self.descend(slot + 1, next, queue_sum + next.queue, path, best);
            path.pop();
        }
    }
}

/// Water-fills `budget` over `window` by bisecting on the common level.
///
/// The level lies in `[min gamma, min gamma + budget / min beta]`; bisection
/// stops once the allocated total is within `tol` of the budget.
pub fn bisection_waterfill(
    slots: &WeightedSlots,
    window: Range<usize>,
    budget: f64,
    tol: f64,
) -> Result<WaterfillResult> {
    if budget.is_nan() || budget < 0.0 {
        return Err(Error::NegativeBudget(budget));
    }
    assert!(
        !window.is_empty() && window.end <= slots.len(),
        "window {window:?} out of range"
    );
    let alloc = |level: f64| -> Vec<f64> {
        window
            .clone()
            .map(|q| (slots.beta[q] * level - 1.0 / slots.alpha[q]).max(0.0))
            .collect()
    };
    let min_gamma = window.clone().map(|q| slots.gamma[q]).fold(f64::INFINITY, f64::min);
    let min_beta = window.clone().map(|q| slots.beta[q]).fold(f64::INFINITY, f64::min);
    let mut lo = min_gamma;
    let mut hi = min_gamma + budget / min_beta;
    let mut level = lo;
    for _ in 0..2000 {
        let total: f64 = alloc(level).iter().sum();
        if (total - budget).abs() <= tol {
            break;
        }
        if total > budget {
            hi = level;
        } else {
            lo = level;
        }
        let mid = 0.5 * (lo + hi);
        if mid == level {
            break;
        }
        level = mid;
    }
    let power = alloc(level);
    let last_active = window
        .clone()
        .filter(|&q| power[q - window.start] > 0.0)
        .max_by(|&a, &b| slots.gamma[a].total_cmp(&slots.gamma[b]))
        .map_or(0, |q| q - window.start);
    Ok(WaterfillResult {
        power,
        last_active,
        level,
    })
}
