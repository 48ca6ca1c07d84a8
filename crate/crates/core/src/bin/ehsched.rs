use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ehsched::cli::{self, AlgoSelect, Command, Format, RunRequest};

#[derive(Parser)]
#[command(
    name = "ehsched",
    version,
    about = "Power schedules for an energy-harvesting cognitive-radio link"
)]
struct Args {
    #[command(subcommand)]
    command: Cmd,

    /// Scenario file (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "all", global = true)]
    algo: Algo,

    #[arg(long, value_enum, default_value = "csv", global = true)]
    format: Fmt,

    /// Write rows here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, default_value_t = 1e-2, global = true)]
    oracle_resolution: f64,

    /// Override the rate-law logarithm base
    #[arg(long, global = true)]
    log_base: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run allocators on --config
    Run,
    /// Stage-by-stage re-allocation of numerical example 1 or 2
    Example { id: u32 },
    /// Sweep alpha[3]
    Fig3(Sweep),
    /// Sweep the mean energy arrival
    Fig4(Sweep),
    /// Sweep the mean data arrival
    Fig5(Sweep),
    /// Compare allocators against the brute-force oracles on --config
    OracleCheck,
}

#[derive(clap::Args)]
struct Sweep {
    /// Comma-separated sweep points; an empty string yields no points
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    values: Option<Vec<String>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Greedy,
    GreedyRelaxed,
    Pa,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Csv,
    Jsonl,
}

fn parse_values(sweep: &Sweep) -> Result<Option<Vec<f64>>, String> {
    let Some(raw) = &sweep.values else {
        return Ok(None);
    };
    raw.iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| format!("bad sweep value `{s}`")))
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let (command, values) = match &args.command {
        Cmd::Run => (Command::Run, Ok(None)),
        Cmd::Example { id } => (Command::Example(*id), Ok(None)),
        Cmd::Fig3(s) => (Command::Fig3, parse_values(s)),
        Cmd::Fig4(s) => (Command::Fig4, parse_values(s)),
        Cmd::Fig5(s) => (Command::Fig5, parse_values(s)),
        Cmd::OracleCheck => (Command::OracleCheck, Ok(None)),
    };
    let values = match values {
        Ok(v) => v,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let request = RunRequest {
        command,
        config_path: args.config,
        algorithm: match args.algo {
            Algo::Greedy => AlgoSelect::Greedy,
            Algo::GreedyRelaxed => AlgoSelect::GreedyRelaxed,
            Algo::Pa => AlgoSelect::Pa,
            Algo::All => AlgoSelect::All,
        },
        output: args.out,
        format: match args.format {
            Fmt::Csv => Format::Csv,
            Fmt::Jsonl => Format::Jsonl,
        },
        oracle_resolution: args.oracle_resolution,
        log_base: args.log_base,
        values,
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match cli::run(&request, &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
