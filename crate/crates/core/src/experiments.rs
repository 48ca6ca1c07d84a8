//! Canned scenarios and parameter sweeps for the published experiments.
//!
//! All figure scenarios share three slots, `tau = 1`, `rho = 0.1` and
//! `P0 * g11 / g21 = [100, 420, 200]`. The published setups fix `alpha`
//! directly, so the link is configured in effective form, and the ISR ratio
//! is encoded as `P0 = 1`, `g21 = 1`, `g11 = [100, 420, 200]`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::greedy::greedy_with_mode;
use crate::model::{CapMode, ConstraintProfile, InterferenceLimit, LinkGains, ScenarioConfig, Schedule};
use crate::pa::{clamped_objective, pa_allocate, pa_trace, ReallocationTrace};

const ISR_POWER_RATIO: [f64; 3] = [100.0, 420.0, 200.0];
const RHO: f64 = 0.1;

pub fn default_interference() -> InterferenceLimit {
    InterferenceLimit {
        rho: RHO,
        p0: 1.0,
        g11: ISR_POWER_RATIO.to_vec(),
        g21: vec![1.0; 3],
    }
}

/// Numerical example 1 or 2: three slots, `Ea0 = 1`, `Ea = [1, 2, 1]`.
///
/// The examples say nothing about traffic, so the queue starts and stays empty.
pub fn example_config(id: u32) -> Result<ScenarioConfig> {
    let alpha = match id {
        1 => vec![1.0 / 12.0, 1.0 / 7.0, 0.5],
        2 => vec![0.1, 0.2, 1.0 / 6.0],
        other => return Err(Error::UnknownExample(other)),
    };
    Ok(ScenarioConfig::effective(
        alpha,
        1.0,
        vec![1.0, 2.0, 1.0],
        vec![0.0; 3],
        0.0,
    ))
}

/// Channel-quality sweep: `alpha = [1/80, 1/30, alpha3]`.
pub fn fig3_config(alpha3: f64) -> ScenarioConfig {
    ScenarioConfig::effective(
        vec![1.0 / 80.0, 1.0 / 30.0, alpha3],
        12.0,
        vec![20.0, 25.0, 18.0],
        vec![1.0, 1.0, 3.0],
        1.0,
    )
    .with_interference(default_interference())
}

/// Energy sweep: `Ea0 = E/4`, `Ea = [E/4, E/2, 0]`.
pub fn fig4_config(mean_energy: f64) -> ScenarioConfig {
    ScenarioConfig::effective(
        vec![1.0 / 15.0, 1.0 / 16.0, 0.8],
        mean_energy / 4.0,
        vec![mean_energy / 4.0, mean_energy / 2.0, 0.0],
        vec![1.0, 2.0, 5.0],
        2.0,
    )
    .with_interference(default_interference())
}

/// Traffic sweep: `Da = [0.3, 0.2, 0.5] * D`.
pub fn fig5_config(mean_data: f64) -> ScenarioConfig {
    ScenarioConfig::effective(
        vec![1.0 / 15.0, 1.0 / 3.0, 0.5],
        8.0,
        vec![12.0, 10.0, 1.0],
        vec![0.3 * mean_data, 0.2 * mean_data, 0.5 * mean_data],
        0.0,
    )
    .with_interference(default_interference())
}

pub fn fig3_default_values() -> Vec<f64> {
    (1..=10).map(|i| i as f64 / 10.0).collect()
}

pub fn fig4_default_values() -> Vec<f64> {
    (2..=12).map(|i| 2.0 * i as f64).collect()
}

pub fn fig5_default_values() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 2.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Greedy,
    GreedyRelaxed,
    Pa,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Greedy, Algorithm::GreedyRelaxed, Algorithm::Pa];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::GreedyRelaxed => "greedy-relaxed",
            Algorithm::Pa => "pa",
        }
    }

    /// Cap set used to report this algorithm's binding constraints.
    pub fn cap_mode(&self, cfg: &ScenarioConfig) -> CapMode {
        match self {
            Algorithm::Greedy => CapMode::Full,
            Algorithm::GreedyRelaxed => CapMode::Relaxed,
            Algorithm::Pa if cfg.interference.is_some() => CapMode::Full,
            Algorithm::Pa => CapMode::Relaxed,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm `{s}`")))
    }
}

/// One algorithm's result on one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmRun {
    pub algorithm: Algorithm,
    pub schedule: Schedule,
    /// Caps along this algorithm's own trajectory.
    pub profile: ConstraintProfile,
    pub mode: CapMode,
    /// Re-allocation only: objective with rates clipped to the queue.
    pub clamped_objective: Option<f64>,
}

pub fn run_algorithm(cfg: &ScenarioConfig, algorithm: Algorithm) -> Result<AlgorithmRun> {
    let mode = algorithm.cap_mode(cfg);
    let (schedule, profile, clamped) = match algorithm {
        Algorithm::Greedy | Algorithm::GreedyRelaxed => {
            let (schedule, profile) = greedy_with_mode(cfg, mode)?;
            (schedule, profile, None)
        }
        Algorithm::Pa => {
            let schedule = pa_allocate(cfg)?;
            let profile = crate::bounds::profile_for(cfg, &schedule, mode);
            let clamped = clamped_objective(cfg, &schedule.power);
            (schedule, profile, Some(clamped))
        }
    };
    Ok(AlgorithmRun {
        algorithm,
        schedule,
        profile,
        mode,
        clamped_objective: clamped,
    })
}

/// Scenario parameter varied by a sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepParameter {
    /// `alpha` of one slot (0-based).
    Alpha { slot: usize },
    /// Total harvested energy, split as `initial * v` up front and `shares[n] * v` after slot `n`.
    MeanEnergy { initial: f64, shares: Vec<f64> },
    /// Total data arrival, split as `shares[n] * v`.
    MeanData { shares: Vec<f64> },
}

impl SweepParameter {
    /// Resolves `alpha[k]` (1-based), `mean_energy` or `mean_data` against `base`.
    ///
    /// Energy and data shares are the base trace's fractions of its own total.
    pub fn parse(name: &str, base: &ScenarioConfig) -> Result<Self> {
        let unresolvable = || Error::InvalidConfig(format!("sweep parameter `{name}` does not resolve"));
        if let Some(idx) = name.strip_prefix("alpha[").and_then(|s| s.strip_suffix(']')) {
            let k: usize = idx.trim().parse().map_err(|_| unresolvable())?;
            if k == 0 || k > base.slots() {
                return Err(unresolvable());
            }
            return Ok(SweepParameter::Alpha { slot: k - 1 });
        }
        match name {
            "mean_energy" => {
                let total = base.initial_energy + base.energy_arrivals.iter().sum::<f64>();
                if total <= 0.0 {
                    return Err(unresolvable());
                }
                Ok(SweepParameter::MeanEnergy {
                    initial: base.initial_energy / total,
                    shares: base.energy_arrivals.iter().map(|e| e / total).collect(),
                })
            }
            "mean_data" => {
                let total: f64 = base.data_arrivals.iter().sum();
                if total <= 0.0 {
                    return Err(unresolvable());
                }
                Ok(SweepParameter::MeanData {
                    shares: base.data_arrivals.iter().map(|d| d / total).collect(),
                })
            }
            _ => Err(unresolvable()),
        }
    }

    pub fn apply(&self, base: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut cfg = base.clone();
        match self {
            SweepParameter::Alpha { slot } => {
                let mut alpha = cfg.alphas();
                let horizon = alpha.len();
                *alpha
                    .get_mut(*slot)
                    .ok_or(Error::SlotOutOfRange { slot: *slot, horizon })? = value;
                cfg.link = LinkGains::Effective { alpha };
            }
            SweepParameter::MeanEnergy { initial, shares } => {
                cfg.initial_energy = initial * value;
                cfg.energy_arrivals = shares.iter().map(|s| s * value).collect();
            }
            SweepParameter::MeanData { shares } => {
                cfg.data_arrivals = shares.iter().map(|s| s * value).collect();
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn label(&self) -> String {
        match self {
            SweepParameter::Alpha { slot } => format!("alpha[{}]", slot + 1),
            SweepParameter::MeanEnergy { .. } => "mean_energy".into(),
            SweepParameter::MeanData { .. } => "mean_data".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: ScenarioConfig,
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub config: ScenarioConfig,
    pub runs: Vec<AlgorithmRun>,
}

impl SweepPoint {
    pub fn run(&self, algorithm: Algorithm) -> Option<&AlgorithmRun> {
        self.runs.iter().find(|r| r.algorithm == algorithm)
    }

    pub fn objective(&self, algorithm: Algorithm) -> Option<f64> {
        self.run(algorithm).map(|r| r.schedule.objective)
    }

    pub fn power(&self, algorithm: Algorithm) -> Option<&[f64]> {
        self.run(algorithm).map(|r| r.schedule.power.as_slice())
    }
}

/// Evaluates every sweep point in input order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepPoint>> {
    spec.values
        .iter()
        .map(|&value| {
            let config = spec.parameter.apply(&spec.base, value)?;
            let runs = spec
                .algorithms
                .iter()
                .map(|&alg| run_algorithm(&config, alg))
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepPoint { value, config, runs })
        })
        .collect()
}

/// Stage-by-stage allocations of a numerical example.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleTrace {
    pub id: u32,
    pub config: ScenarioConfig,
    pub trace: ReallocationTrace,
}

pub fn run_example(id: u32) -> Result<ExampleTrace> {
    let config = example_config(id)?;
    let trace = pa_trace(&config)?;
    Ok(ExampleTrace { id, config, trace })
}

const FIGURE_ALGORITHMS: [Algorithm; 2] = [Algorithm::Greedy, Algorithm::Pa];

pub fn fig3_sweep(values: Vec<f64>) -> SweepSpec {
    SweepSpec {
        base: fig3_config(0.5),
        parameter: SweepParameter::Alpha { slot: 2 },
        values,
        algorithms: FIGURE_ALGORITHMS.to_vec(),
    }
}

pub fn fig4_sweep(values: Vec<f64>) -> SweepSpec {
    let base = fig4_config(1.0);
    SweepSpec {
        parameter: SweepParameter::MeanEnergy {
            initial: base.initial_energy,
            shares: base.energy_arrivals.clone(),
        },
        base,
        values,
        algorithms: FIGURE_ALGORITHMS.to_vec(),
    }
}

pub fn fig5_sweep(values: Vec<f64>) -> SweepSpec {
    let base = fig5_config(1.0);
    SweepSpec {
        parameter: SweepParameter::MeanData {
            shares: base.data_arrivals.clone(),
        },
        base,
        values,
        algorithms: FIGURE_ALGORITHMS.to_vec(),
    }
}

pub fn run_fig3(alpha3_values: &[f64]) -> Result<Vec<SweepPoint>> {
    run_sweep(&fig3_sweep(alpha3_values.to_vec()))
}

pub fn run_fig4(mean_energy_values: &[f64]) -> Result<Vec<SweepPoint>> {
    run_sweep(&fig4_sweep(mean_energy_values.to_vec()))
}

pub fn run_fig5(mean_data_values: &[f64]) -> Result<Vec<SweepPoint>> {
    run_sweep(&fig5_sweep(mean_data_values.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_example_is_rejected() {
        assert_eq!(run_example(3).unwrap_err(), Error::UnknownExample(3));
    }

    #[test]
    fn sweep_parameters_reproduce_figure_configs() {
        let p = SweepParameter::parse("mean_energy", &fig4_config(1.0)).unwrap();
        assert_eq!(p.apply(&fig4_config(1.0), 16.0).unwrap(), fig4_config(16.0));
        let p = SweepParameter::parse("mean_data", &fig5_config(1.0)).unwrap();
        let got = p.apply(&fig5_config(1.0), 4.0).unwrap();
        for (g, w) in got.data_arrivals.iter().zip(&fig5_config(4.0).data_arrivals) {
            assert!((g - w).abs() < 1e-12);
        }
        let p = SweepParameter::parse("alpha[3]", &fig3_config(0.5)).unwrap();
        assert_eq!(p, SweepParameter::Alpha { slot: 2 });
        assert_eq!(p.apply(&fig3_config(0.5), 0.9).unwrap(), fig3_config(0.9));
        assert!(SweepParameter::parse("alpha[4]", &fig3_config(0.5)).is_err());
        assert!(SweepParameter::parse("beta", &fig3_config(0.5)).is_err());
    }

    #[test]
    fn empty_sweep_yields_no_points() {
        assert!(run_fig3(&[]).unwrap().is_empty());
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("optimal".parse::<Algorithm>().is_err());
    }
}
