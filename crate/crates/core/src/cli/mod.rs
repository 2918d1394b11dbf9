//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for usage or configuration errors, 1 for
//! anything else (I/O on outputs, internal failures).

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::engine::{
    compare_systems, simulate_load_balanced, simulate_normal, BlockedCost, EngineError,
};
use crate::teletraffic::{blocking_sweep, erlang_b, write_sweep_csv, OfferedLoad};
use crate::traffic::{generate_workload, read_workload, write_workload, CallRequest};

use config::{resolve, ConfigError, OutputFormat, Resolved, RunConfig};
use output::{
    comparison_block, console_block, write_comparison_csv, write_records_csv, JsonComparison,
    JsonReport,
};

#[derive(Debug, Parser)]
#[command(
    name = "cellsim",
    version,
    about = "Call admission simulator: blocking baseline vs round-robin overflow handover"
)]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Flat `key = value` config file; flags override its keys.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Number of call requests.
    #[arg(long, global = true, value_name = "N")]
    pub calls: Option<u32>,
    #[arg(long, global = true, value_name = "S")]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Include per-call records in JSON reports.
    #[arg(long, global = true)]
    pub full: bool,
    /// Replay a workload file instead of generating one.
    #[arg(long, global = true, value_name = "PATH")]
    pub workload: Option<PathBuf>,
    /// Free channels per BSC, home first (e.g. 313,346,382).
    #[arg(
        long,
        global = true,
        value_delimiter = ',',
        allow_negative_numbers = true
    )]
    pub bsc_channels: Option<Vec<i64>>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub cells_per_bsc: Option<i64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub area_km: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub arrival_window_ms: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub demand_ms: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub context_switch_ms: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub waiting_ms: Option<f64>,
    /// Fixed round-robin quantum instead of the derived one.
    #[arg(long = "quantum-ms", global = true, allow_negative_numbers = true)]
    pub quantum_override_ms: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub blocked_cost: Option<BlockedCostArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BlockedCostArg {
    Waiting,
    Zero,
}

impl From<BlockedCostArg> for BlockedCost {
    fn from(a: BlockedCostArg) -> Self {
        match a {
            BlockedCostArg::Waiting => BlockedCost::Waiting,
            BlockedCostArg::Zero => BlockedCost::Zero,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SystemArg {
    Normal,
    Lb,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one admission system.
    Run {
        #[arg(value_enum)]
        system: SystemArg,
    },
    /// Run both systems on the same workload and report the differences.
    Compare,
    /// Blocking probability of both systems over a range of call counts.
    Sweep {
        /// `start:stop:step`, inclusive of stop.
        range: String,
    },
    /// Erlang B blocking probability.
    Erlang {
        /// Offered load in erlangs.
        #[arg(long = "a", allow_negative_numbers = true, conflicts_with_all = ["lambda", "mu"])]
        erlangs: Option<f64>,
        /// Arrival rate per second.
        #[arg(long, allow_negative_numbers = true, requires = "mu")]
        lambda: Option<f64>,
        /// Departure rate per second.
        #[arg(long, allow_negative_numbers = true, requires = "lambda")]
        mu: Option<f64>,
        /// Number of channels.
        #[arg(long = "n")]
        channels: u32,
    },
    /// Export a generated workload as CSV.
    Gen,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

impl GlobalOpts {
    fn overrides(&self) -> RunConfig {
        RunConfig {
            bsc_channels: self.bsc_channels.clone(),
            cells_per_bsc: self.cells_per_bsc,
            area_km: self.area_km,
            n_calls: self.calls,
            seed: self.seed,
            arrival_window_ms: self.arrival_window_ms,
            demand_ms: self.demand_ms,
            context_switch_ms: self.context_switch_ms,
            waiting_ms: self.waiting_ms,
            quantum_override_ms: self.quantum_override_ms,
            blocked_cost: self.blocked_cost.map(Into::into),
            format: self.format,
            output: self.output.clone(),
        }
    }

    fn resolve(&self) -> Result<Resolved, CliError> {
        let (file, source) = match &self.config {
            Some(path) => {
                let (cfg, text) = RunConfig::load(path)?;
                (cfg, Some(text))
            }
            None => (RunConfig::default(), None),
        };
        Ok(resolve(&file.merge(self.overrides()), source.as_deref())?)
    }
}

/// Parses `start:stop:step` into the inclusive list of levels.
pub fn parse_range(spec: &str) -> Result<Vec<u32>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(format!("range `{spec}` must be start:stop:step"));
    };
    let num = |s: &str, what: &str| {
        s.trim()
            .parse::<u32>()
            .map_err(|_| format!("range `{spec}`: {what} `{s}` is not a non-negative integer"))
    };
    let (start, stop, step) = (num(start, "start")?, num(stop, "stop")?, num(step, "step")?);
    if step == 0 {
        return Err(format!("range `{spec}`: step must be positive"));
    }
    if stop < start {
        return Err(format!("range `{spec}` is descending"));
    }
    Ok((start..=stop).step_by(step as usize).collect())
}

type ReportSink = (OutputFormat, Box<dyn Write>);

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            CliError::Internal(format!("cannot create {}: {e}", p.display()))
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

impl Resolved {
    /// The workload to simulate, plus the seed when it was generated.
    fn calls(&self, replay: Option<&Path>) -> Result<(Vec<CallRequest>, Option<u64>), CliError> {
        match replay {
            Some(path) => {
                let file = File::open(path).map_err(|e| {
                    CliError::Usage(format!("cannot open workload {}: {e}", path.display()))
                })?;
                let calls = read_workload(io::BufReader::new(file))
                    .map_err(|e| CliError::Usage(format!("workload {}: {e}", path.display())))?;
                Ok((calls, None))
            }
            None => {
                let calls = generate_workload(&self.workload, &self.topology)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                Ok((calls, Some(self.workload.seed)))
            }
        }
    }

    /// Report destination: the output path, or stdout when only a format
    /// was requested. `None` means console summary only.
    fn report_sink(&self) -> Result<Option<ReportSink>, CliError> {
        match (&self.output, self.format) {
            (Some(path), fmt) => Ok(Some((
                fmt.unwrap_or(OutputFormat::Json),
                open_output(Some(path))?,
            ))),
            (None, Some(fmt)) => Ok(Some((fmt, open_output(None)?))),
            (None, None) => Ok(None),
        }
    }
}

fn engine_error(e: EngineError) -> CliError {
    match e {
        EngineError::NonPositiveQuantumInput { .. } => {
            CliError::Usage(format!("{e}; set quantum_override_ms to run this workload"))
        }
        EngineError::InvalidParam { .. } | EngineError::Traffic(_) => {
            CliError::Usage(e.to_string())
        }
    }
}

fn cmd_run(opts: &GlobalOpts, system: SystemArg) -> Result<(), CliError> {
    let cfg = opts.resolve()?;
    let (calls, seed) = cfg.calls(opts.workload.as_deref())?;
    let report = match system {
        SystemArg::Normal => simulate_normal(&cfg.topology, &calls, &cfg.engine),
        SystemArg::Lb => {
            simulate_load_balanced(&cfg.topology, &calls, &cfg.engine).map_err(engine_error)?
        }
    };
    print!("{}", console_block(&report, &cfg.topology));
    if let Some((fmt, mut out)) = cfg.report_sink()? {
        match fmt {
            OutputFormat::Json => {
                let doc = JsonReport::new(&report, &cfg.topology, &cfg.engine, seed, opts.full);
                serde_json::to_writer_pretty(&mut out, &doc).map_err(internal)?;
                writeln!(out).map_err(internal)?;
            }
            OutputFormat::Csv => write_records_csv(&report.records, &mut out).map_err(internal)?,
        }
        out.flush().map_err(internal)?;
    }
    Ok(())
}

fn cmd_compare(opts: &GlobalOpts) -> Result<(), CliError> {
    let cfg = opts.resolve()?;
    let (calls, seed) = cfg.calls(opts.workload.as_deref())?;
    let cmp = compare_systems(&cfg.topology, &calls, &cfg.engine).map_err(engine_error)?;
    print!("{}", comparison_block(&cmp, &cfg.topology));
    if let Some((fmt, mut out)) = cfg.report_sink()? {
        match fmt {
            OutputFormat::Json => {
                let doc = JsonComparison::new(&cmp, &cfg.topology, &cfg.engine, seed, opts.full);
                serde_json::to_writer_pretty(&mut out, &doc).map_err(internal)?;
                writeln!(out).map_err(internal)?;
            }
            OutputFormat::Csv => write_comparison_csv(&cmp, &mut out).map_err(internal)?,
        }
        out.flush().map_err(internal)?;
    }
    Ok(())
}

fn cmd_sweep(opts: &GlobalOpts, range: &str) -> Result<(), CliError> {
    let levels = parse_range(range).map_err(CliError::Usage)?;
    let cfg = opts.resolve()?;
    let points = blocking_sweep(&cfg.topology, &levels, &cfg.workload, &cfg.engine)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut out = open_output(cfg.output.as_deref())?;
    match cfg.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => write_sweep_csv(&points, &mut out).map_err(internal)?,
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &points).map_err(internal)?;
            writeln!(out).map_err(internal)?;
        }
    }
    out.flush().map_err(internal)
}

fn cmd_erlang(
    erlangs: Option<f64>,
    lambda: Option<f64>,
    mu: Option<f64>,
    channels: u32,
) -> Result<(), CliError> {
    let usage = |e: crate::teletraffic::TeletrafficError| CliError::Usage(e.to_string());
    let load = match (erlangs, lambda, mu) {
        (Some(a), _, _) => OfferedLoad::from_erlangs(a).map_err(usage)?,
        (None, Some(l), Some(m)) => OfferedLoad::from_rates(l, m).map_err(usage)?,
        _ => return Err(CliError::Usage("give --a, or --lambda and --mu".into())),
    };
    let p = erlang_b(&load, channels).map_err(usage)?;
    println!("{p:.6}");
    Ok(())
}

fn cmd_gen(opts: &GlobalOpts) -> Result<(), CliError> {
    let cfg = opts.resolve()?;
    let calls = generate_workload(&cfg.workload, &cfg.topology)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut out = open_output(cfg.output.as_deref())?;
    write_workload(&calls, &mut out).map_err(internal)?;
    out.flush().map_err(internal)
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run { system } => cmd_run(&cli.opts, *system),
        Command::Compare => cmd_compare(&cli.opts),
        Command::Sweep { range } => cmd_sweep(&cli.opts, range),
        Command::Erlang {
            erlangs,
            lambda,
            mu,
            channels,
        } => cmd_erlang(*erlangs, *lambda, *mu, *channels),
        Command::Gen => cmd_gen(&cli.opts),
    }
}

/// Parses `args`, runs the command and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
