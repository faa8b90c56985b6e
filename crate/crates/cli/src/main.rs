//! `lohe`: simulate, fuse and check Lohe tensor models.

mod config;
mod error;
mod format;
mod simulate;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lohe_core::experiments::{run_suite, Settings, SUITES};
use lohe_core::symbol::fuse_all;

use crate::config::{ExperimentConfig, Mode};
use crate::error::{io_err, CliError, CliResult};
use crate::format::{read_symbol, symbol_to_json, write_symbol};

#[derive(Parser, Debug)]
#[command(name = "lohe", version, about = "Lohe tensor models and their characteristic symbols")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate the configured model and write diagnostics.csv and report.txt.
    Simulate(RunArgs),
    /// Fuse symbol files (left fold) into one symbol file.
    Fuse(FuseArgs),
    /// Run a named check suite.
    Check(RunArgs),
    /// Run whatever `mode` the config file names.
    Run(RunArgs),
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "h")]
    h: Option<f64>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    renormalize: bool,
}

#[derive(Args, Debug)]
struct FuseArgs {
    /// Symbol files, fused in the given order.
    files: Vec<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_config(path: Option<&Path>) -> CliResult<ExperimentConfig> {
    match path {
        Some(p) => ExperimentConfig::load(p),
        None => Ok(ExperimentConfig::default()),
    }
}

/// Command-line flags override the config file.
fn apply_overrides(cfg: &mut ExperimentConfig, args: &RunArgs) {
    if let Some(s) = args.seed {
        cfg.seed = Some(s);
    }
    if let Some(h) = args.h {
        cfg.integrator.h = h;
    }
    if let Some(t) = args.t_end {
        cfg.integrator.t_end = t;
    }
    if args.renormalize {
        cfg.integrator.renormalize = true;
    }
    if let Some(s) = &args.suite {
        cfg.suite = Some(s.clone());
    }
    if let Some(o) = &args.out {
        cfg.output = Some(o.clone());
    }
}

fn cmd_simulate(cfg: &ExperimentConfig) -> CliResult<()> {
    let out = cfg.output.clone().unwrap_or_else(|| PathBuf::from("lohe-output"));
    let report = simulate::simulate(cfg, &out)?;
    print!("{}", report.render());
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Run("assertion failed".into()))
    }
}

fn cmd_check(cfg: &ExperimentConfig, args: &RunArgs) -> CliResult<()> {
    let name = cfg
        .suite
        .clone()
        .ok_or_else(|| CliError::Config(format!("no suite given; choose one of {}", SUITES.join(", "))))?;
    let settings = Settings {
        seed: cfg.seed(),
        step: args.h,
        t_end: args.t_end,
    };
    let results = run_suite(&name, &settings)
        .ok_or_else(|| CliError::Config(format!("unknown suite `{name}`; choose one of {}", SUITES.join(", "))))?;
    let mut text = String::new();
    for r in &results {
        let _ = write!(text, "{r}");
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    let _ = writeln!(text, "\n{} of {} checks passed", results.len() - failed, results.len());
    print!("{text}");
    if let Some(dir) = &cfg.output {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let path = dir.join("report.txt");
        std::fs::write(&path, &text).map_err(|e| io_err(&path, e))?;
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Run(format!("{failed} check(s) failed")))
    }
}

fn fuse_output(cfg: &ExperimentConfig, symbols: &[lohe_core::symbol::CharacteristicSymbol]) -> CliResult<()> {
    if symbols.len() < 2 {
        return Err(CliError::Config(format!("fuse needs at least two symbols, got {}", symbols.len())));
    }
    let fused = fuse_all(symbols)?;
    match &cfg.output {
        Some(p) => write_symbol(p, &fused),
        None => {
            println!("{}", symbol_to_json(&fused));
            Ok(())
        }
    }
}

fn cmd_fuse(args: &FuseArgs) -> CliResult<()> {
    let mut cfg = load_config(args.config.as_deref())?;
    if let Some(o) = &args.out {
        cfg.output = Some(o.clone());
    }
    let mut symbols = if cfg.symbols.is_empty() {
        Vec::new()
    } else {
        config::prepare(&cfg)?.symbols
    };
    for f in &args.files {
        symbols.push(read_symbol(f)?);
    }
    fuse_output(&cfg, &symbols)
}

fn run(args: &RunArgs, mode: Option<Mode>) -> CliResult<()> {
    let mut cfg = load_config(args.config.as_deref())?;
    apply_overrides(&mut cfg, args);
    let mode = mode
        .or(cfg.mode)
        .unwrap_or(if cfg.suite.is_some() { Mode::Check } else { Mode::Simulate });
    match mode {
        Mode::Simulate => {
            if args.config.is_none() {
                return Err(CliError::Config("simulate needs --config".into()));
            }
            cmd_simulate(&cfg)
        }
        Mode::Check => cmd_check(&cfg, args),
        Mode::Fuse => {
            let symbols = config::prepare(&cfg)?.symbols;
            fuse_output(&cfg, &symbols)
        }
    }
}

/// Sizes the global rayon pool from LOHE_THREADS.
fn init_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("LOHE_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("LOHE_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match &cli.command {
        Command::Simulate(a) => run(a, Some(Mode::Simulate)),
        Command::Check(a) => run(a, Some(Mode::Check)),
        Command::Run(a) => run(a, None),
        Command::Fuse(a) => cmd_fuse(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lohe: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
