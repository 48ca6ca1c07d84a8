//! Command dispatch shared by the `ehsched` binary and its tests.

pub mod config;
pub mod output;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use thiserror::Error;

use crate::bounds::assemble_bounds;
use crate::error::Error;
use crate::experiments::{
    fig3_default_values, fig3_sweep, fig4_default_values, fig4_sweep, fig5_default_values, fig5_sweep, run_algorithm,
    run_example, run_sweep, Algorithm, SweepSpec,
};
use crate::model::{CapMode, ScenarioConfig, Schedule};
use crate::oracle::{grid_optimal_full, grid_optimal_relaxed, GridSpec, MAX_ORACLE_SLOTS};

pub use config::{parse_config, to_toml, ConfigError, ParsedConfig};
pub use output::{Format, Row, RowWriter};

use output::{run_rows, Cell};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Run,
    Example(u32),
    Fig3,
    Fig4,
    Fig5,
    OracleCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlgoSelect {
    Greedy,
    GreedyRelaxed,
    Pa,
    #[default]
    All,
}

impl AlgoSelect {
    pub fn algorithms(&self) -> Vec<Algorithm> {
        match self {
            AlgoSelect::Greedy => vec![Algorithm::Greedy],
            AlgoSelect::GreedyRelaxed => vec![Algorithm::GreedyRelaxed],
            AlgoSelect::Pa => vec![Algorithm::Pa],
            AlgoSelect::All => Algorithm::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRequest {
    pub command: Command,
    pub config_path: Option<PathBuf>,
    pub algorithm: AlgoSelect,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub oracle_resolution: f64,
    pub log_base: Option<f64>,
    /// Sweep points for the figure commands; `None` selects the defaults.
    pub values: Option<Vec<f64>>,
}

impl RunRequest {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            config_path: None,
            algorithm: AlgoSelect::All,
            output: None,
            format: Format::Csv,
            oracle_resolution: GridSpec::default().resolution,
            log_base: None,
            values: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("{0}")]
    OracleRefused(String),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::OracleRefused(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InfeasibleEnergy { .. } | Error::InfeasibleRate { .. } => CliError::Infeasible(e.to_string()),
            Error::OracleRefused { .. } => CliError::OracleRefused(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

/// Executes `req`, writing rows to `req.output` or to `out`.
pub fn run(req: &RunRequest, out: &mut dyn Write) -> Result<(), CliError> {
    let rows = collect_rows(req)?;
    match &req.output {
        Some(path) => {
            let mut file = io::BufWriter::new(fs::File::create(path)?);
            emit(req.format, &rows, &mut file)
        }
        None => emit(req.format, &rows, out),
    }
}

fn emit(format: Format, rows: &[Row], out: &mut dyn Write) -> Result<(), CliError> {
    let mut w = RowWriter::new(format, out)?;
    w.write_all(rows)?;
    w.finish()?;
    Ok(())
}

/// Builds every output row of `req` without writing anything.
pub fn collect_rows(req: &RunRequest) -> Result<Vec<Row>, CliError> {
    match req.command {
        Command::Run => {
            let (id, parsed) = load(req)?;
            run_config(&id, &parsed, req.algorithm)
        }
        Command::Example(id) => example_rows(id),
        Command::Fig3 => figure_rows(
            req,
            "fig3",
            fig3_sweep(req.values.clone().unwrap_or_else(fig3_default_values)),
        ),
        Command::Fig4 => figure_rows(
            req,
            "fig4",
            fig4_sweep(req.values.clone().unwrap_or_else(fig4_default_values)),
        ),
        Command::Fig5 => figure_rows(
            req,
            "fig5",
            fig5_sweep(req.values.clone().unwrap_or_else(fig5_default_values)),
        ),
        Command::OracleCheck => {
            let (id, parsed) = load(req)?;
            oracle_rows(&id, &parsed, req.oracle_resolution)
        }
    }
}

fn load(req: &RunRequest) -> Result<(String, ParsedConfig), CliError> {
    let path = req
        .config_path
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required for this command".into()))?;
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut parsed = parse_config(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if let Some(base) = req.log_base {
        parsed.config.log_base = base;
        parsed.config.validate()?;
    }
    let id = path
        .file_stem()
        .map_or_else(|| "config".to_string(), |s| s.to_string_lossy().into_owned());
    Ok((id, parsed))
}

fn warning_rows(id: &str, parsed: &ParsedConfig) -> Vec<Row> {
    parsed
        .warnings
        .iter()
        .map(|w| Row::note(id, "warning", Cell::Empty, w.clone()))
        .collect()
}

fn run_config(id: &str, parsed: &ParsedConfig, select: AlgoSelect) -> Result<Vec<Row>, CliError> {
    let cfg = &parsed.config;
    let has_isr = cfg.interference.is_some();
    let mut rows = warning_rows(id, parsed);
    for alg in select.algorithms() {
        if alg == Algorithm::Greedy && !has_isr {
            if select == AlgoSelect::All {
                rows.push(Row::note(
                    id,
                    "warning",
                    Cell::Empty,
                    "greedy skipped: no ISR data".into(),
                ));
                continue;
            }
            return Err(Error::MissingInterferenceData.into());
        }
        rows.extend(run_rows(id, &run_algorithm(cfg, alg)?));
    }
    if select == AlgoSelect::All && has_isr {
        let report = assemble_bounds(cfg)?;
        let note = format!(
            "upper={} lower={} greedy_certified={} energy_binds={} energy_binds_greedy={} idle_greedy_certified={} idle_energy_binds={} relaxed={}",
            output::fixed(report.upper),
            output::fixed(report.lower),
            report.greedy_certified,
            report.energy_binds,
            report.energy_binds_on_greedy,
            report.idle.greedy_condition,
            report.idle.energy_binding,
            report.relaxed_case.as_str()
        );
        rows.push(Row::note(id, "bounds", report.gap.into(), note));
    }
    Ok(rows)
}

fn example_rows(id: u32) -> Result<Vec<Row>, CliError> {
    let example = run_example(id)?;
    let scenario = format!("example{id}");
    let mut rows = Vec::new();
    for (k, stage) in example.trace.stages.iter().enumerate() {
        let label = format!("alloc({})", k + 1);
        for (n, &p) in stage.iter().enumerate() {
            rows.push(Row::slot(
                &scenario,
                &label,
                n,
                p,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
            ));
        }
    }
    Ok(rows)
}

fn figure_rows(req: &RunRequest, figure: &str, mut spec: SweepSpec) -> Result<Vec<Row>, CliError> {
    if let Some(base) = req.log_base {
        spec.base.log_base = base;
    }
    spec.algorithms = req.algorithm.algorithms();
    let label = spec.parameter.label();
    let mut rows = Vec::new();
    for point in run_sweep(&spec)? {
        let scenario = format!("{figure}:{label}={}", output::fixed(point.value));
        for run in &point.runs {
            rows.extend(run_rows(&scenario, run));
        }
    }
    Ok(rows)
}

fn oracle_rows(id: &str, parsed: &ParsedConfig, resolution: f64) -> Result<Vec<Row>, CliError> {
    let cfg = &parsed.config;
    if cfg.slots() > MAX_ORACLE_SLOTS {
        return Err(Error::OracleRefused {
            slots: cfg.slots(),
            max_slots: MAX_ORACLE_SLOTS,
        }
        .into());
    }
    let grid = GridSpec::new(resolution, MAX_ORACLE_SLOTS)?;
    let mode = if cfg.interference.is_some() {
        CapMode::Full
    } else {
        CapMode::Relaxed
    };
    let mut rows = warning_rows(id, parsed);

    let upper_alg = match mode {
        CapMode::Full => Algorithm::Greedy,
        CapMode::Relaxed => Algorithm::GreedyRelaxed,
    };
    let upper = run_algorithm(cfg, upper_alg)?;
    let lower = run_algorithm(cfg, Algorithm::Pa)?;
    rows.extend(run_rows(id, &upper));
    rows.extend(run_rows(id, &lower));

    let full = grid_optimal_full(cfg, grid, mode)?;
    rows.extend(schedule_rows(id, "oracle-full", &full.schedule));
    let relaxed = grid_optimal_relaxed(cfg, grid)?;
    rows.extend(schedule_rows(id, "oracle-relaxed", &relaxed.schedule));

    let (lo, mid, hi) = (
        lower.schedule.objective,
        full.schedule.objective,
        upper.schedule.objective,
    );
    let sandwich = lo <= mid + resolution && mid <= hi + resolution;
    rows.push(Row::note(
        id,
        "sandwich",
        (hi - lo).into(),
        format!("pa<=oracle<={}: {sandwich}", upper_alg.name()),
    ));
    Ok(rows)
}

fn schedule_rows(id: &str, label: &str, s: &Schedule) -> Vec<Row> {
    let mut rows: Vec<Row> = (0..s.power.len())
        .map(|n| {
            Row::slot(
                id,
                label,
                n,
                s.power[n],
                s.rate[n].into(),
                s.queue[n + 1].into(),
                Cell::Empty,
            )
        })
        .collect();
    rows.push(Row::summary(id, label, s.objective));
    rows
}

/// Parses a config file from disk.
pub fn read_config(path: &std::path::Path) -> Result<ScenarioConfig, CliError> {
    let text = fs::read_to_string(path)?;
    Ok(parse_config(&text).map_err(|e| CliError::Config(e.to_string()))?.config)
}
