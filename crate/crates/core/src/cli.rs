//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when an argument or input file is invalid
//! (the message names the flag), 2 when the work itself fails.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use crate::harness::{
    replay_record, run_episode, sweep, write_trajectory_csv, EpisodeOptions, EpisodeRecord, PlannerSettings,
    ScenarioConfig, SweepConfig, Timing,
};
use crate::oracle::oracle_check;
use crate::planner::PlannerId;
use crate::vo::VoParams;

#[derive(Debug, Parser)]
#[command(name = "mcts-vo", version, about = "MCTS motion planning with velocity-obstacle pruning")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one episode and print its record as JSON.
    Run(RunArgs),
    /// Run a planner × budget × scenario grid and write summary.csv and raw.jsonl.
    Sweep(SweepArgs),
    /// Re-simulate a logged episode and write its trajectory as CSV.
    Replay(ReplayArgs),
    /// Cross-check the safe-heading kernel against the sampling oracle.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenario JSON file; defaults apply to missing keys.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long)]
    pub planner: String,
    /// Simulations per decision.
    #[arg(long, default_value_t = 100)]
    pub m: usize,
    /// Scenario seed; defaults to the scenario file's `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Planner settings JSON file.
    #[arg(long)]
    pub settings: Option<PathBuf>,
    /// `wall` or `off`.
    #[arg(long, default_value = "wall")]
    pub timing: String,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Sweep JSON file; defaults apply to missing keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads, overriding the config; 0 uses every core.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Master seed, overriding the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Print the fully resolved configuration and exit.
    #[arg(long)]
    pub print_config: bool,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// JSONL file of episode records.
    #[arg(long)]
    pub record: PathBuf,
    /// Zero-based line of the record to replay.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Heading grid spacing in radians.
    #[arg(long, default_value_t = 0.01)]
    pub resolution: f64,
}

enum Failure {
    Invalid(String),
    Runtime(String),
}

fn invalid(flag: &str, msg: impl std::fmt::Display) -> Failure {
    Failure::Invalid(format!("invalid --{flag}: {msg}"))
}

fn runtime(msg: impl std::fmt::Display) -> Failure {
    Failure::Runtime(msg.to_string())
}

fn read_json<T: DeserializeOwned>(flag: &str, path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(flag, format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid(flag, format!("{}: {e}", path.display())))
}

fn parse_timing(value: &str) -> Result<Timing, Failure> {
    match value {
        "wall" => Ok(Timing::Wall),
        "off" => Ok(Timing::Off),
        other => Err(invalid("timing", format!("expected `wall` or `off`, got `{other}`"))),
    }
}

fn json_line<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("configuration types always serialize")
}

fn cmd_run(args: RunArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let scenario: ScenarioConfig = match &args.scenario {
        Some(path) => read_json("scenario", path)?,
        None => ScenarioConfig::default(),
    };
    scenario.validate().map_err(|e| invalid("scenario", e))?;
    let planner: PlannerId = args.planner.parse().map_err(|e| invalid("planner", e))?;
    if args.m == 0 {
        return Err(invalid("m", "must be at least 1"));
    }
    let settings: PlannerSettings = match &args.settings {
        Some(path) => read_json("settings", path)?,
        None => PlannerSettings::default(),
    };
    let timing = parse_timing(&args.timing)?;
    let seed = args.seed.unwrap_or(scenario.seed);
    let record = run_episode(planner, args.m, &scenario, seed, &EpisodeOptions { settings, timing }).map_err(runtime)?;
    writeln!(out, "{}", record.to_json_line()).map_err(runtime)
}

fn cmd_sweep(args: SweepArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let mut cfg: SweepConfig = match &args.config {
        Some(path) => read_json("config", path)?,
        None => SweepConfig::default(),
    };
    if let Some(jobs) = args.jobs {
        cfg.jobs = jobs;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate().map_err(|e| invalid("config", e))?;
    if args.print_config {
        return writeln!(out, "{}", json_line(&cfg)).map_err(runtime);
    }
    let dir = args.out.ok_or_else(|| invalid("out", "an output directory is required"))?;
    if dir.exists() && !dir.is_dir() {
        return Err(invalid("out", format!("{} is not a directory", dir.display())));
    }
    std::fs::create_dir_all(&dir).map_err(|e| invalid("out", format!("{}: {e}", dir.display())))?;
    let result = sweep(&cfg, Some(&dir)).map_err(runtime)?;
    writeln!(
        out,
        "wrote {} records and {} summary rows to {}",
        result.records.len(),
        result.summary.len(),
        dir.display()
    )
    .map_err(runtime)
}

fn cmd_replay(args: ReplayArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&args.record)
        .map_err(|e| invalid("record", format!("{}: {e}", args.record.display())))?;
    let line = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .nth(args.index)
        .ok_or_else(|| invalid("index", format!("{} has no record {}", args.record.display(), args.index)))?;
    let record = EpisodeRecord::from_json_line(line).map_err(|e| invalid("record", e))?;
    if let Some(parent) = args.out.as_deref().and_then(Path::parent) {
        if !parent.as_os_str().is_empty() && !parent.is_dir() {
            return Err(invalid("out", format!("directory {} does not exist", parent.display())));
        }
    }
    let check = replay_record(&record).map_err(runtime)?;
    if check.rho != record.rho {
        return Err(runtime(format!("replayed return {} differs from logged {}", check.rho, record.rho)));
    }
    match &args.out {
        Some(path) => {
            let file = File::create(path).map_err(runtime)?;
            let mut w = BufWriter::new(file);
            write_trajectory_csv(&record, &mut w).and_then(|_| w.flush()).map_err(runtime)
        }
        None => write_trajectory_csv(&record, out).map_err(runtime),
    }
}

fn cmd_oracle(args: OracleArgs, out: &mut dyn Write) -> Result<(), Failure> {
    if args.samples == 0 {
        return Err(invalid("samples", "must be at least 1"));
    }
    if !(args.resolution.is_finite() && args.resolution > 0.0) {
        return Err(invalid("resolution", "must be positive"));
    }
    let report = oracle_check(args.samples, args.seed, args.resolution, &VoParams::default());
    writeln!(
        out,
        "scenes: {}\nheadings checked: {}\nsoundness violations: {}\ncompleteness mismatches: {}",
        report.scenes, report.headings_checked, report.soundness_violations, report.completeness_mismatches
    )
    .map_err(runtime)?;
    if report.passed() {
        writeln!(out, "PASS").map_err(runtime)
    } else {
        Err(runtime("FAIL"))
    }
}

/// Parses `args` (program name first) and dispatches; returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 1;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Replay(a) => cmd_replay(a, out),
        Command::OracleCheck(a) => cmd_oracle(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Invalid(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
