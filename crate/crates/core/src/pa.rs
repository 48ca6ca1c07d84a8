//! Offline power re-allocation under cumulative energy budgets.
//!
//! Minimizing the average buffer length with only the battery constraint is
//! equivalent to
//!
//! ```text
//! maximize   sum_n beta_n * log(alpha_n * P[n] + 1)
//! subject to P[n] >= 0,  sum_{n<=l} P[n] <= Ea0 + sum_{n<l} Ea[n]   for every l
//! ```
//!
//! with `beta_n = (N + 1 - n) / N`. The solver processes slots in time order.
//! When slot `k` joins, the newly harvested energy is first given to slot `k`
//! alone; if that leaves slot `k` with a lower water level than the latest
//! powered slot before it, the window is widened backwards one slot at a time
//! and re-water-filled until the levels are ordered. Energy therefore only
//! ever moves forward in time.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::model::{ScenarioConfig, Schedule};

/// Per-slot coefficients of the weighted log-utility problem.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSlots {
    /// Per-watt effective SNR.
    pub alpha: Vec<f64>,
    /// Weight `(N + 1 - n) / N` of slot `n` (1-based).
    pub beta: Vec<f64>,
    /// Base water level `1 / (alpha * beta)`.
    pub gamma: Vec<f64>,
}

impl WeightedSlots {
    pub fn new(alpha: Vec<f64>) -> Self {
        let n = alpha.len();
        let beta: Vec<f64> = (0..n).map(|i| (n - i) as f64 / n as f64).collect();
        let gamma = alpha.iter().zip(&beta).map(|(a, b)| 1.0 / (a * b)).collect();
        Self { alpha, beta, gamma }
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// Water level `P/beta + gamma` of slot `slot` at power `power`.
    pub fn level(&self, slot: usize, power: f64) -> f64 {
        power / self.beta[slot] + self.gamma[slot]
    }

    /// `sum beta_n * ln(alpha_n * P[n] + 1)`.
    pub fn utility(&self, power: &[f64]) -> f64 {
        power
            .iter()
            .enumerate()
            .map(|(n, &p)| self.beta[n] * (self.alpha[n] * p).ln_1p())
            .sum()
    }
}

pub fn compute_weights(cfg: &ScenarioConfig) -> WeightedSlots {
    WeightedSlots::new(cfg.alphas())
}

/// Water-filled allocation over a window of slots.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterfillResult {
    /// Allocation for each slot of the window, in time order.
    pub power: Vec<f64>,
    /// Window-relative index of the powered slot with the largest base level.
    pub last_active: usize,
    /// Common level `P/beta + gamma` of every powered slot.
    pub level: f64,
}

/// Splits `budget` over `window` to maximize the weighted log-utility.
///
/// The window is walked in ascending `gamma` order: the level is raised from
/// one base level to the next while the budget lasts, and the remainder is
/// spread over the powered prefix in proportion to `beta`.
pub fn waterfill_window(slots: &WeightedSlots, window: Range<usize>, budget: f64) -> Result<WaterfillResult> {
    if budget.is_nan() || budget < 0.0 {
        return Err(Error::NegativeBudget(budget));
    }
    assert!(
        !window.is_empty() && window.end <= slots.len(),
        "window {window:?} out of range"
    );
    let mut order: Vec<usize> = window.clone().collect();
    order.sort_by(|&a, &b| slots.gamma[a].total_cmp(&slots.gamma[b]).then(a.cmp(&b)));

    let mut remaining = budget;
    let mut weight = 0.0;
    let mut top = 0;
    let mut level = slots.gamma[order[0]];
    for (j, &q) in order.iter().enumerate() {
        weight += slots.beta[q];
        top = j;
        let next = order.get(j + 1).map_or(f64::INFINITY, |&n| slots.gamma[n]);
        let to_next = (next - slots.gamma[q]) * weight;
        if remaining > to_next {
            remaining -= to_next;
        } else {
            level = slots.gamma[q] + remaining / weight;
            break;
        }
    }

    let mut power = vec![0.0; window.len()];
    for &q in &order[..=top] {
        power[q - window.start] = ((level - slots.gamma[q]) * slots.beta[q]).max(0.0);
    }
    Ok(WaterfillResult {
        power,
        last_active: order[top] - window.start,
        level,
    })
}

/// Every intermediate allocation of the re-allocation recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct ReallocationTrace {
    /// `stages[k]` allocates slots `0..=k` using energy that arrived before slot `k`.
    pub stages: Vec<Vec<f64>>,
    /// First slot of the window re-water-filled at each stage.
    pub window_start: Vec<usize>,
}

impl ReallocationTrace {
    pub fn allocation(&self) -> &[f64] {
        self.stages.last().map_or(&[], Vec::as_slice)
    }
}

/// Runs the staged re-allocation with budgets expressed in power units.
///
/// `initial` is available to the first slot; `arrivals[k]` becomes available
/// from slot `k + 1` on. Only the first `slots.len() - 1` arrivals are read.
pub fn reallocate(slots: &WeightedSlots, initial: f64, arrivals: &[f64]) -> Result<ReallocationTrace> {
    let horizon = slots.len();
    if horizon == 0 {
        return Ok(ReallocationTrace {
            stages: Vec::new(),
            window_start: Vec::new(),
        });
    }
    if initial.is_nan() || initial < 0.0 {
        return Err(Error::NegativeBudget(initial));
    }
    let mut current = vec![initial];
    let mut stages = vec![current.clone()];
    let mut window_start = vec![0];

    for k in 1..horizon {
        let fresh = arrivals[k - 1];
        if fresh.is_nan() || fresh < 0.0 {
            return Err(Error::NegativeBudget(fresh));
        }
        let mut accepted = None;
        for r in (0..=k).rev() {
            let budget = current[r..k].iter().sum::<f64>() + fresh;
            let fill = waterfill_window(slots, r..k + 1, budget)?;
            // Widening stops once the window sits at or above the last powered
            // slot before it; an unpowered prefix cannot donate energy.
            let ordered = match current[..r].iter().rposition(|&p| p > 0.0) {
                Some(qe) => fill.level >= slots.level(qe, current[qe]),
                None => true,
            };
            if ordered {
                accepted = Some((r, fill));
                break;
            }
        }
        let (r, fill) = accepted.expect("the full window is always accepted");
        let mut next = current[..r].to_vec();
        next.extend_from_slice(&fill.power);
        current = next;
        stages.push(current.clone());
        window_start.push(r);
    }
    Ok(ReallocationTrace { stages, window_start })
}

/// Full re-allocation trace for a scenario, converting energies to power units.
pub fn pa_trace(cfg: &ScenarioConfig) -> Result<ReallocationTrace> {
    cfg.validate()?;
    let arrivals: Vec<f64> = cfg.energy_arrivals.iter().map(|e| e / cfg.tau).collect();
    reallocate(&compute_weights(cfg), cfg.initial_energy / cfg.tau, &arrivals)
}

/// Re-allocation schedule with unclamped rates and queue.
pub fn pa_allocate(cfg: &ScenarioConfig) -> Result<Schedule> {
    let trace = pa_trace(cfg)?;
    Schedule::evaluate(cfg, trace.allocation().to_vec())
}

/// Lower bound on the average buffer length and its clamped counterpart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaBound {
    /// Average buffer length with unclamped rates; a lower bound on the optimum.
    pub lower_bound: f64,
    /// Diagnostic only: the same powers simulated with `R[n] <- min(R[n], Q[n])`.
    pub clamped: f64,
}

pub fn pa_objective(cfg: &ScenarioConfig, schedule: &Schedule) -> PaBound {
    PaBound {
        lower_bound: schedule.objective,
        clamped: clamped_objective(cfg, &schedule.power),
    }
}

/// Average buffer length when each slot's rate is clipped to its queue.
pub fn clamped_objective(cfg: &ScenarioConfig, power: &[f64]) -> f64 {
    let mut q = cfg.initial_queue;
    let mut total = q;
    for (n, &p) in power.iter().enumerate() {
        let r = cfg.rate(n, p).unwrap_or(0.0).min(q.max(0.0));
        q = q - r + cfg.data_arrivals[n];
        total += q;
    }
    total / power.len().max(1) as f64
}
