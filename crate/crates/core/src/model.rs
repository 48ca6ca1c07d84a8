//! Slot-level system model of the secondary link.
//!
//! Each slot `n` the secondary transmitter draws power `P[n]` from its battery,
//! sends `log_B(alpha_n * P[n] + 1)` data units, and then receives the energy
//! `Ea[n]` and data `Da[n]` that arrived during the slot:
//!
//! ```text
//! E[n+1] = E[n] - P[n] * tau + Ea[n]
//! Q[n+1] = Q[n] - R[n] + Da[n]
//! ```
//!
//! Slots are 0-based in code. The configured initial battery and queue are the
//! state at the start of the first slot.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Natural logarithm base; every published value assumes it.
pub const DEFAULT_LOG_BASE: f64 = std::f64::consts::E;

/// Relative slack granted when checking `P * tau <= E`.
pub const ENERGY_SLACK: f64 = 1e-9;

/// How the secondary link's per-watt SNR `alpha_n` is obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum LinkGains {
    /// `alpha_n = g22[n] / (P0 * g12[n] + N0)`.
    Physical {
        p0: f64,
        n0: f64,
        g12: Vec<f64>,
        g22: Vec<f64>,
    },
    /// `alpha_n` supplied directly.
    Effective { alpha: Vec<f64> },
}

/// Primary-user data needed for the interference-to-signal ratio cap.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceLimit {
    pub rho: f64,
    pub p0: f64,
    pub g11: Vec<f64>,
    pub g21: Vec<f64>,
}

impl InterferenceLimit {
    /// Largest power keeping `P * g21 / (P0 * g11) <= rho`. Unbounded when `g21 = 0`.
    pub fn power_cap(&self, slot: usize) -> f64 {
        let g21 = self.g21[slot];
        if g21 == 0.0 {
            f64::INFINITY
        } else {
            self.rho * self.p0 * self.g11[slot] / g21
        }
    }

    /// Whether `power` keeps the ISR at or below `rho`, with relative slack.
    pub fn admits(&self, slot: usize, power: f64) -> bool {
        let ratio = power * self.g21[slot] / (self.p0 * self.g11[slot]);
        ratio <= self.rho * (1.0 + ENERGY_SLACK) + f64::MIN_POSITIVE
    }
}

/// A complete problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Slot duration in seconds.
    pub tau: f64,
    pub link: LinkGains,
    /// `None` when the primary user's private data is unavailable.
    pub interference: Option<InterferenceLimit>,
    /// Battery energy at the start of the first slot.
    pub initial_energy: f64,
    /// `energy_arrivals[n]` lands at the end of slot `n`.
    pub energy_arrivals: Vec<f64>,
    /// `data_arrivals[n]` lands at the end of slot `n`.
    pub data_arrivals: Vec<f64>,
    /// Queue length at the start of the first slot.
    pub initial_queue: f64,
    pub log_base: f64,
}

impl ScenarioConfig {
    /// Instance with `alpha` given directly, `tau = 1`, natural log, and no ISR data.
    pub fn effective(
        alpha: Vec<f64>,
        initial_energy: f64,
        energy_arrivals: Vec<f64>,
        data_arrivals: Vec<f64>,
        initial_queue: f64,
    ) -> Self {
        Self {
            tau: 1.0,
            link: LinkGains::Effective { alpha },
            interference: None,
            initial_energy,
            energy_arrivals,
            data_arrivals,
            initial_queue,
            log_base: DEFAULT_LOG_BASE,
        }
    }

    pub fn with_interference(mut self, limit: InterferenceLimit) -> Self {
        self.interference = Some(limit);
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_log_base(mut self, log_base: f64) -> Self {
        self.log_base = log_base;
        self
    }

    /// Horizon length `N`.
    pub fn slots(&self) -> usize {
        self.energy_arrivals.len()
    }

    /// Per-watt effective SNR of slot `slot`.
    pub fn alpha(&self, slot: usize) -> f64 {
        match &self.link {
            LinkGains::Physical { p0, n0, g12, g22 } => effective_snr(g22[slot], g12[slot], *p0, *n0),
            LinkGains::Effective { alpha } => alpha[slot],
        }
    }

    pub fn alphas(&self) -> Vec<f64> {
        (0..self.slots()).map(|n| self.alpha(n)).collect()
    }

    pub fn isr_cap(&self, slot: usize) -> f64 {
        self.interference
            .as_ref()
            .map_or(f64::INFINITY, |lim| lim.power_cap(slot))
    }

    pub fn initial_state(&self) -> SlotState {
        SlotState {
            energy: self.initial_energy,
            queue: self.initial_queue,
        }
    }

    /// Rate law for slot `slot`.
    pub fn rate(&self, slot: usize, power: f64) -> Result<f64> {
        rate(power, self.alpha(slot), self.log_base)
    }

    /// Power that empties a queue of length `queue` in slot `slot`.
    ///
    /// Evaluated by formula, so a negative queue (possible on relaxed
    /// trajectories) yields a negative cap rather than an error.
    pub fn rate_cap(&self, slot: usize, queue: f64) -> f64 {
        (queue * self.log_base.ln()).exp_m1() / self.alpha(slot)
    }

    /// The three per-slot power caps at `state`.
    pub fn caps(&self, slot: usize, state: SlotState) -> SlotCaps {
        SlotCaps::new(
            slot,
            state.energy / self.tau,
            self.isr_cap(slot),
            self.rate_cap(slot, state.queue),
        )
    }

    /// Advances the battery and queue across slot `slot` at transmit power `power`.
    pub fn step(&self, slot: usize, state: SlotState, power: f64, check: RateCheck) -> Result<SlotState> {
        self.check_slot(slot)?;
        let r = self.rate(slot, power)?;
        let needed = power * self.tau;
        if needed > state.energy + ENERGY_SLACK * state.energy.abs().max(1.0) {
            return Err(Error::InfeasibleEnergy {
                slot,
                power,
                needed,
                available: state.energy,
            });
        }
        if check == RateCheck::Strict && r > state.queue + ENERGY_SLACK * state.queue.abs().max(1.0) {
            return Err(Error::InfeasibleRate {
                slot,
                rate: r,
                queue: state.queue,
            });
        }
        Ok(SlotState {
            energy: state.energy - needed + self.energy_arrivals[slot],
            queue: state.queue - r + self.data_arrivals[slot],
        })
    }

    fn check_slot(&self, slot: usize) -> Result<()> {
        if slot < self.slots() {
            Ok(())
        } else {
            Err(Error::SlotOutOfRange {
                slot,
                horizon: self.slots(),
            })
        }
    }

    /// Checks every structural and sign invariant of the instance.
    pub fn validate(&self) -> Result<()> {
        let n = self.slots();
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if n == 0 {
            return bad("horizon must contain at least one slot".into());
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad(format!("tau must be positive, got {}", self.tau));
        }
        if !(self.log_base > 1.0 && self.log_base.is_finite()) {
            return bad(format!("log_base must exceed 1, got {}", self.log_base));
        }
        check_scalar("Ea0", self.initial_energy)?;
        check_scalar("Q0", self.initial_queue)?;
        check_trace("Ea", &self.energy_arrivals, n, false)?;
        check_trace("Da", &self.data_arrivals, n, false)?;
        match &self.link {
            LinkGains::Physical { p0, n0, g12, g22 } => {
                check_scalar("P0", *p0)?;
                check_scalar("N0", *n0)?;
                check_trace("g12", g12, n, false)?;
                check_trace("g22", g22, n, true)?;
                if let Some(slot) = g12.iter().position(|&g| p0 * g + n0 <= 0.0) {
                    return bad(format!("P0*g12 + N0 must be positive (slot {})", slot + 1));
                }
            }
            LinkGains::Effective { alpha } => check_trace("alpha", alpha, n, true)?,
        }
        if let Some(lim) = &self.interference {
            check_scalar("rho", lim.rho)?;
            check_scalar("P0", lim.p0)?;
            check_trace("g11", &lim.g11, n, true)?;
            check_trace("g21", &lim.g21, n, false)?;
            if lim.p0 <= 0.0 {
                return bad("P0 must be positive when the ISR limit is in force".into());
            }
        }
        Ok(())
    }
}

fn check_scalar(name: &str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "{name} must be finite and non-negative, got {value}"
        )))
    }
}

fn check_trace(name: &str, trace: &[f64], len: usize, positive: bool) -> Result<()> {
    if trace.len() != len {
        return Err(Error::InvalidConfig(format!(
            "trace length mismatch: {name} has {} entries, expected {len}",
            trace.len()
        )));
    }
    for (i, &v) in trace.iter().enumerate() {
        let ok = v.is_finite() && if positive { v > 0.0 } else { v >= 0.0 };
        if !ok {
            let want = if positive { "positive" } else { "non-negative" };
            return Err(Error::InvalidConfig(format!(
                "{name}[{}] must be {want}, got {v}",
                i + 1
            )));
        }
    }
    Ok(())
}

/// `g22 / (P0 * g12 + N0)`.
pub fn effective_snr(g22: f64, g12: f64, p0: f64, n0: f64) -> f64 {
    g22 / (p0 * g12 + n0)
}

/// Data sent in one slot at power `power`: `log_base(alpha * power + 1)`.
pub fn rate(power: f64, alpha: f64, log_base: f64) -> Result<f64> {
    if power.is_nan() || power < 0.0 {
        return Err(Error::NegativePower(power));
    }
    Ok((alpha * power).ln_1p() / log_base.ln())
}

/// Power needed to send `rate` data units: `(B^rate - 1) / alpha`.
pub fn inverse_rate(rate: f64, alpha: f64, log_base: f64) -> Result<f64> {
    if rate.is_nan() || rate < 0.0 {
        return Err(Error::NegativeRate(rate));
    }
    Ok((rate * log_base.ln()).exp_m1() / alpha)
}

/// Average buffer length `(1/N) * sum Q[n]` over the `N + 1` queue samples.
pub fn objective(queue: &[f64]) -> f64 {
    debug_assert!(queue.len() >= 2, "queue trajectory needs N + 1 >= 2 entries");
    let slots = queue.len().saturating_sub(1).max(1);
    queue.iter().sum::<f64>() / slots as f64
}

/// Whether `step` rejects rates above the queue length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateCheck {
    Strict,
    Lenient,
}

/// Battery energy and queue length at the start of a slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlotState {
    pub energy: f64,
    pub queue: f64,
}

/// Which of the per-slot caps is binding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CapKind {
    Energy,
    Isr,
    Rate,
}

impl fmt::Display for CapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CapKind::Energy => "energy",
            CapKind::Isr => "isr",
            CapKind::Rate => "rate",
        })
    }
}

/// Which constraint set a cap or schedule is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapMode {
    /// Energy, ISR and rate caps.
    Full,
    /// Energy and rate caps only (no primary-user data).
    Relaxed,
}

/// Power caps of one slot at a given state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlotCaps {
    pub slot: usize,
    /// `E[n] / tau`.
    pub energy: f64,
    /// `rho * P0 * g11[n] / g21[n]`, infinite without ISR data or when `g21 = 0`.
    pub isr: f64,
    /// `(B^Q[n] - 1) / alpha_n`.
    pub rate: f64,
    /// `min(energy, isr, rate)`.
    pub merged: f64,
    pub active: CapKind,
    /// `min(energy, rate)`.
    pub relaxed: f64,
    pub relaxed_active: CapKind,
}

impl SlotCaps {
    /// Ties resolve energy, then ISR, then rate.
    pub fn new(slot: usize, energy: f64, isr: f64, rate: f64) -> Self {
        let active = if energy <= isr && energy <= rate {
            CapKind::Energy
        } else if isr <= rate {
            CapKind::Isr
        } else {
            CapKind::Rate
        };
        let relaxed_active = if energy <= rate { CapKind::Energy } else { CapKind::Rate };
        let merged = match active {
            CapKind::Energy => energy,
            CapKind::Isr => isr,
            CapKind::Rate => rate,
        };
        let relaxed = match relaxed_active {
            CapKind::Energy => energy,
            _ => rate,
        };
        Self {
            slot,
            energy,
            isr,
            rate,
            merged,
            active,
            relaxed,
            relaxed_active,
        }
    }

    pub fn cap(&self, mode: CapMode) -> f64 {
        match mode {
            CapMode::Full => self.merged,
            CapMode::Relaxed => self.relaxed,
        }
    }

    pub fn active_for(&self, mode: CapMode) -> CapKind {
        match mode {
            CapMode::Full => self.active,
            CapMode::Relaxed => self.relaxed_active,
        }
    }
}

/// Per-slot caps along one trajectory.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ConstraintProfile {
    pub slots: Vec<SlotCaps>,
}

impl ConstraintProfile {
    /// Caps evaluated at every realized state of `schedule`.
    pub fn along(cfg: &ScenarioConfig, schedule: &Schedule) -> Self {
        let slots = (0..cfg.slots())
            .map(|n| {
                let state = SlotState {
                    energy: schedule.battery[n],
                    queue: schedule.queue[n],
                };
                cfg.caps(n, state)
            })
            .collect();
        Self { slots }
    }

    pub fn active(&self, mode: CapMode) -> Vec<CapKind> {
        self.slots.iter().map(|c| c.active_for(mode)).collect()
    }
}

/// A power vector with its derived rates, queue and battery trajectories.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schedule {
    pub power: Vec<f64>,
    pub rate: Vec<f64>,
    /// `Q[1..=N+1]`.
    pub queue: Vec<f64>,
    /// `E[1..=N+1]`.
    pub battery: Vec<f64>,
    pub objective: f64,
}

impl Schedule {
    /// Simulates `power` through the battery and queue dynamics.
    ///
    /// Battery feasibility is enforced; rates are not clamped to the queue, so
    /// the queue may go negative for schedules that ignore the rate cap.
    pub fn evaluate(cfg: &ScenarioConfig, power: Vec<f64>) -> Result<Self> {
        if power.len() != cfg.slots() {
            return Err(Error::InvalidConfig(format!(
                "schedule has {} slots, scenario has {}",
                power.len(),
                cfg.slots()
            )));
        }
        let mut state = cfg.initial_state();
        let mut rate = Vec::with_capacity(power.len());
        let mut queue = vec![state.queue];
        let mut battery = vec![state.energy];
        for (n, &p) in power.iter().enumerate() {
            rate.push(cfg.rate(n, p)?);
            state = cfg.step(n, state, p, RateCheck::Lenient)?;
            queue.push(state.queue);
            battery.push(state.energy);
        }
        let objective = objective(&queue);
        Ok(Self {
            power,
            rate,
            queue,
            battery,
            objective,
        })
    }

    /// Rebuilds the queue trajectory from the stored rates.
    pub fn replay_queue(&self, cfg: &ScenarioConfig) -> Vec<f64> {
        let mut q = cfg.initial_queue;
        let mut out = vec![q];
        for (r, d) in self.rate.iter().zip(&cfg.data_arrivals) {
            q = q - r + d;
            out.push(q);
        }
        out
    }
}
