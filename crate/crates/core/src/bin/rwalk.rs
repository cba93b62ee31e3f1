//! Command-line front end for the reinforced-walk laboratory.
//!
//! Exit codes: 0 success, 1 check/oracle failure, 2 usage or config error.

use clap::{Args, Parser, Subcommand};
use reinforced_walks::cli::{
    load_config, resolve_seed, run_command, CommandKind, LimitProcess, RunConfig,
};
use reinforced_walks::config::{Truncation, WalkSign};
use reinforced_walks::dist::StepKind;
use reinforced_walks::verify::TheoremId;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "rwalk",
    version,
    about = "Simulation and verification laboratory for step-reinforced random walks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; each mirrors a config-file key and
/// overrides it when given.
#[derive(Args, Debug, Default)]
struct CommonFlags {
    /// TOML config file, or a previous output file (its provenance header
    /// is read back)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Step distribution, e.g. rademacher, gaussian(0,1),
    /// two-point(0.5,2,0.5), constant(1), pareto(1.5,1)
    #[arg(long)]
    dist: Option<String>,
    /// Reinforcement parameter in [0, 1]
    #[arg(long)]
    p: Option<f64>,
    /// Walk sign: positive | negative
    #[arg(long)]
    sign: Option<String>,
    /// Truncation rule: none | sqrt | linear
    #[arg(long)]
    truncation: Option<String>,
    /// Horizon (number of steps)
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    replicas: Option<u64>,
    /// Seed; falls back to REINFORCED_WALKS_SEED, then 0
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated recording indices
    #[arg(long, value_delimiter = ',')]
    checkpoints: Option<Vec<u64>>,
    /// Worker threads (defaults to all cores; never affects results)
    #[arg(long)]
    parallelism: Option<usize>,
    /// Output path; stdout when omitted
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate walk trajectories and write per-checkpoint CSV
    Simulate(CommonFlags),
    /// Exact moment recursion table as CSV
    Moments(CommonFlags),
    /// Exhaustive small-n enumeration cross-check (JSON)
    Oracle(CommonFlags),
    /// Sample limiting Gaussian processes as CSV
    Limits {
        #[command(flatten)]
        common: CommonFlags,
        /// standard-bm | noise-reinforced | counterbalanced
        #[arg(long)]
        process: Option<String>,
        /// Comma-separated time grid starting at 0
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
    },
    /// Run statistical checks of the limit theorems (JSON + table)
    Verify {
        #[command(flatten)]
        common: CommonFlags,
        /// Comma-separated check names (defaults to the built-in suite)
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        /// Test level: 0.01 or 0.05
        #[arg(long)]
        level: Option<f64>,
    },
}

fn parse_sign(s: &str) -> Result<WalkSign, String> {
    match s.to_ascii_lowercase().as_str() {
        "positive" | "pos" => Ok(WalkSign::Positive),
        "negative" | "neg" => Ok(WalkSign::Negative),
        other => Err(format!("unknown sign `{other}` (positive|negative)")),
    }
}

fn parse_truncation(s: &str) -> Result<Truncation, String> {
    match s.to_ascii_lowercase().as_str() {
        "none" => Ok(Truncation::None),
        "sqrt" => Ok(Truncation::Sqrt),
        "linear" => Ok(Truncation::Linear),
        other => Err(format!("unknown truncation `{other}` (none|sqrt|linear)")),
    }
}

fn parse_process(s: &str) -> Result<LimitProcess, String> {
    match s.to_ascii_lowercase().as_str() {
        "standard-bm" | "bm" => Ok(LimitProcess::StandardBm),
        "noise-reinforced" => Ok(LimitProcess::NoiseReinforced),
        "counterbalanced" => Ok(LimitProcess::Counterbalanced),
        other => Err(format!(
            "unknown process `{other}` (standard-bm|noise-reinforced|counterbalanced)"
        )),
    }
}

fn build_config(kind: CommandKind, common: &CommonFlags) -> Result<RunConfig, String> {
    let mut config = match &common.config {
        Some(path) => load_config(path).map_err(|e| e.to_string())?,
        None => RunConfig::new(kind),
    };
    config.command = kind;
    if let Some(d) = &common.dist {
        config.dist = d.parse::<StepKind>().map_err(|e| e.to_string())?;
    }
    if let Some(p) = common.p {
        config.p = p;
    }
    if let Some(s) = &common.sign {
        config.sign = parse_sign(s)?;
    }
    if let Some(t) = &common.truncation {
        config.truncation = parse_truncation(t)?;
    }
    if let Some(n) = common.n {
        config.n = n;
    }
    if let Some(r) = common.replicas {
        config.replicas = r;
    }
    if common.seed.is_some() || common.config.is_none() {
        config.seed = resolve_seed(common.seed);
    }
    if let Some(cp) = &common.checkpoints {
        config.checkpoints = cp.clone();
    }
    if let Some(par) = common.parallelism {
        config.parallelism = Some(par);
    }
    if let Some(out) = &common.output {
        config.output = Some(out.display().to_string());
    }
    Ok(config)
}

fn run() -> Result<i32, String> {
    let cli = Cli::parse();
    let config = match &cli.command {
        Command::Simulate(common) => build_config(CommandKind::Simulate, common)?,
        Command::Moments(common) => build_config(CommandKind::Moments, common)?,
        Command::Oracle(common) => build_config(CommandKind::Oracle, common)?,
        Command::Limits {
            common,
            process,
            times,
        } => {
            let mut config = build_config(CommandKind::Limits, common)?;
            if let Some(p) = process {
                config.process = parse_process(p)?;
            }
            if let Some(t) = times {
                config.times = t.clone();
            }
            config
        }
        Command::Verify {
            common,
            checks,
            level,
        } => {
            let mut config = build_config(CommandKind::Verify, common)?;
            if let Some(list) = checks {
                config.checks = list
                    .iter()
                    .map(|c| c.parse::<TheoremId>().map_err(|e| e.to_string()))
                    .collect::<Result<_, String>>()?;
            }
            if let Some(l) = level {
                config.level = *l;
            }
            config
        }
    };

    let out = run_command(&config).map_err(|e| e.to_string())?;
    match &config.output {
        Some(path) => {
            std::fs::write(path, &out.text)
                .map_err(|e| format!("cannot write output `{path}`: {e}"))?;
            if let Some(table) = &out.table {
                print!("{table}");
            }
        }
        None => {
            print!("{}", out.text);
            if let Some(table) = &out.table {
                eprint!("{table}");
            }
        }
    }
    Ok(out.exit_code)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
