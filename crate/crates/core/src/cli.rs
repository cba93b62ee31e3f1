//! Configuration and command implementations behind the `rwalk` binary.
//!
//! A run is described by one [`RunConfig`], parseable from a TOML file with
//! flag overrides on top. Every output file begins with a `#`-prefixed
//! comment block holding the artifact version and the fully resolved
//! config; feeding such a file back via `--config` strips the prefixes and
//! reproduces the run byte-for-byte.

use crate::config::{Truncation, WalkConfig, WalkSign};
use crate::dist::{StepDistribution, StepKind};
use crate::engine::monte_carlo::monte_carlo;
use crate::error::{Error, Result};
use crate::limits::{sample_bm, sample_counterbalanced_bm, sample_noise_reinforced_bm};
use crate::moments::recursion::MomentTable;
use crate::moments::{
    enumerate_exact, enumerate_tree_moments, expected_delta, expected_delta2, expected_occupancy,
    mean_profile, variance_profile, OracleFunctional,
};
use crate::rng::RngStream;
use crate::verify::{default_suite, run_check, CheckSpec, TheoremId, VerificationReport};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SEED_ENV_VAR: &str = "REINFORCED_WALKS_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Simulate,
    Moments,
    Oracle,
    Limits,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitProcess {
    StandardBm,
    NoiseReinforced,
    Counterbalanced,
}

fn default_dist() -> StepKind {
    StepKind::Rademacher
}
fn default_p() -> f64 {
    0.5
}
fn default_sign() -> WalkSign {
    WalkSign::Positive
}
fn default_truncation() -> Truncation {
    Truncation::None
}
fn default_n() -> u64 {
    1000
}
fn default_replicas() -> u64 {
    1
}
fn default_level() -> f64 {
    0.01
}
fn default_process() -> LimitProcess {
    LimitProcess::StandardBm
}
fn default_times() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 0.75, 1.0]
}

/// Fully resolved description of one CLI run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(default = "default_dist")]
    pub dist: StepKind,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default = "default_sign")]
    pub sign: WalkSign,
    #[serde(default = "default_truncation")]
    pub truncation: Truncation,
    #[serde(default = "default_n")]
    pub n: u64,
    #[serde(default = "default_replicas")]
    pub replicas: u64,
    #[serde(default)]
    pub seed: u64,
    /// Recording indices; empty means "horizon only" (or a log grid for
    /// the moments command).
    #[serde(default)]
    pub checkpoints: Vec<u64>,
    /// Worker count; never affects results.
    #[serde(default)]
    pub parallelism: Option<usize>,
    #[serde(default)]
    pub output: Option<String>,
    /// Gaussian process for the limits command.
    #[serde(default = "default_process")]
    pub process: LimitProcess,
    /// Time grid for the limits command.
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    /// Check list for the verify command; empty runs the default suite.
    #[serde(default)]
    pub checks: Vec<TheoremId>,
    #[serde(default = "default_level")]
    pub level: f64,
}

impl RunConfig {
    pub fn new(command: CommandKind) -> Self {
        Self {
            command,
            dist: default_dist(),
            p: default_p(),
            sign: default_sign(),
            truncation: default_truncation(),
            n: default_n(),
            replicas: default_replicas(),
            seed: 0,
            checkpoints: Vec::new(),
            parallelism: None,
            output: None,
            process: default_process(),
            times: default_times(),
            checks: Vec::new(),
            level: default_level(),
        }
    }

    fn effective_checkpoints(&self) -> Vec<u64> {
        if self.checkpoints.is_empty() {
            vec![self.n]
        } else {
            self.checkpoints.clone()
        }
    }

    /// Log-spaced moment grid: powers of two up to n, plus n itself.
    fn moment_grid(&self) -> Vec<u64> {
        if !self.checkpoints.is_empty() {
            return self.checkpoints.clone();
        }
        let mut grid = Vec::new();
        let mut k = 1u64;
        while k < self.n {
            grid.push(k);
            k = k.saturating_mul(2);
        }
        grid.push(self.n);
        grid
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ConfigDocument {
    version: String,
    config: RunConfig,
}

/// Renders the provenance comment block placed at the top of every output.
pub fn provenance_header(config: &RunConfig) -> String {
    let doc = ConfigDocument {
        version: ARTIFACT_VERSION.to_string(),
        config: config.clone(),
    };
    let toml = toml::to_string(&doc).expect("config serializes");
    let mut out = String::new();
    for line in toml.lines() {
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}

/// Loads a config from a TOML file, or from the `#`-prefixed provenance
/// block at the top of a previously written output file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    let body: String = if text.starts_with('#') {
        text.lines()
            .take_while(|l| l.starts_with('#'))
            .map(|l| {
                l.trim_start_matches('#')
                    .strip_prefix(' ')
                    .unwrap_or(l.trim_start_matches('#'))
            })
            .collect::<Vec<_>>()
            .join("\n")
    } else {
        text
    };
    if body.contains("[config]") {
        let doc: ConfigDocument = toml::from_str(&body)
            .map_err(|e| Error::InvalidConfig(format!("config parse error: {e}")))?;
        Ok(doc.config)
    } else {
        toml::from_str(&body).map_err(|e| Error::InvalidConfig(format!("config parse error: {e}")))
    }
}

/// Resolves the seed: an explicit value wins, then the environment variable,
/// then 0.
pub fn resolve_seed(explicit: Option<u64>) -> u64 {
    explicit
        .or_else(|| {
            std::env::var(SEED_ENV_VAR)
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0)
}

/// Outcome of one command: rendered output text plus the process exit code
/// (0 success, 1 check failure, 2 usage/config error handled by the caller).
pub struct CommandOutput {
    pub text: String,
    pub exit_code: i32,
    /// Secondary human-readable rendering (verify prints a table).
    pub table: Option<String>,
}

pub fn run_command(config: &RunConfig) -> Result<CommandOutput> {
    match config.command {
        CommandKind::Simulate => cmd_simulate(config),
        CommandKind::Moments => cmd_moments(config),
        CommandKind::Oracle => cmd_oracle(config),
        CommandKind::Limits => cmd_limits(config),
        CommandKind::Verify => cmd_verify(config),
    }
}

/// Per-checkpoint trajectory summaries as CSV: replica, n, S, normalized_S
/// (normalized by n: the law-of-large-numbers scale, defined for every
/// step law).
pub fn cmd_simulate(config: &RunConfig) -> Result<CommandOutput> {
    let dist = StepDistribution::new(config.dist)?;
    let cfg = WalkConfig::new(
        config.p,
        config.sign,
        config.truncation,
        config.n,
        config.seed,
        config.effective_checkpoints(),
    )?;
    let mc = monte_carlo(&dist, &cfg, config.replicas, config.parallelism)?;
    let mut text = provenance_header(config);
    text.push_str("replica,n,S,normalized_S\n");
    for r in 0..mc.replicas() {
        for (ci, &cp) in mc.checkpoints().iter().enumerate() {
            let v = mc.values_at(ci)[r];
            let _ = writeln!(text, "{},{},{},{}", r + 1, cp, v, v / cp as f64);
        }
    }
    Ok(CommandOutput {
        text,
        exit_code: 0,
        table: None,
    })
}

/// Exact moment recursion table as CSV: n, mean, var, regime_normalized_var.
pub fn cmd_moments(config: &RunConfig) -> Result<CommandOutput> {
    let dist = StepDistribution::new(config.dist)?;
    let table = MomentTable::compute(
        &dist,
        config.p,
        config.sign,
        config.truncation,
        &config.moment_grid(),
    )?;
    let mut text = provenance_header(config);
    let _ = writeln!(text, "# regime: {}", table.regime.label());
    text.push_str("n,mean,var,regime_normalized_var\n");
    for row in &table.rows {
        let _ = writeln!(
            text,
            "{},{},{},{}",
            row.n, row.mean, row.var, row.normalized_var
        );
    }
    Ok(CommandOutput {
        text,
        exit_code: 0,
        table: None,
    })
}

#[derive(Serialize)]
struct OracleTreeRow {
    j: u64,
    occupancy_oracle: f64,
    occupancy_closed_form: f64,
    delta_oracle: f64,
    delta_closed_form: f64,
    delta2_oracle: f64,
    delta2_recursion: f64,
}

#[derive(Serialize)]
struct OracleReport {
    walk_law: Vec<(f64, f64)>,
    walk_mean_oracle: f64,
    walk_mean_recursion: f64,
    walk_var_oracle: f64,
    walk_var_recursion: f64,
    trees: Vec<OracleTreeRow>,
    max_abs_discrepancy: f64,
    pass: bool,
}

/// Exhaustive-enumeration cross-check: exact laws and the maximum absolute
/// discrepancy between the oracle and the closed-form recursions. Exits
/// nonzero if the discrepancy exceeds 1e-10.
pub fn cmd_oracle(config: &RunConfig) -> Result<CommandOutput> {
    let dist = StepDistribution::new(config.dist)?;
    let n = config.n;
    let law = enumerate_exact(
        &dist,
        config.p,
        config.sign,
        config.truncation,
        n,
        OracleFunctional::WalkFinal,
    )?;
    let mean_rec = *mean_profile(&dist, config.p, config.sign, config.truncation, n)
        .last()
        .unwrap();
    let var_rec = *variance_profile(&dist, config.p, config.sign, config.truncation, n)?
        .last()
        .unwrap();
    let tree_moments = enumerate_tree_moments(config.p, n)?;
    let mut max_disc = (law.mean() - mean_rec)
        .abs()
        .max((law.variance() - var_rec).abs());
    let trees: Vec<OracleTreeRow> = tree_moments
        .iter()
        .map(|tm| {
            let occ = expected_occupancy(config.p, tm.j, n).unwrap();
            let del = expected_delta(config.p, tm.j, n).unwrap();
            let del2 = expected_delta2(config.p, tm.j, n).unwrap();
            max_disc = max_disc
                .max((tm.occupancy_mean - occ).abs())
                .max((tm.delta_mean - del).abs())
                .max((tm.delta_second_moment - del2).abs());
            OracleTreeRow {
                j: tm.j,
                occupancy_oracle: tm.occupancy_mean,
                occupancy_closed_form: occ,
                delta_oracle: tm.delta_mean,
                delta_closed_form: del,
                delta2_oracle: tm.delta_second_moment,
                delta2_recursion: del2,
            }
        })
        .collect();
    let pass = max_disc <= 1e-10;
    let report = OracleReport {
        walk_law: law.outcomes(),
        walk_mean_oracle: law.mean(),
        walk_mean_recursion: mean_rec,
        walk_var_oracle: law.variance(),
        walk_var_recursion: var_rec,
        trees,
        max_abs_discrepancy: max_disc,
        pass,
    };
    let mut text = provenance_header(config);
    text.push_str(&serde_json::to_string_pretty(&report).expect("report serializes"));
    text.push('\n');
    Ok(CommandOutput {
        text,
        exit_code: if pass { 0 } else { 1 },
        table: None,
    })
}

/// Limit-process path export as CSV: t, value, replica.
pub fn cmd_limits(config: &RunConfig) -> Result<CommandOutput> {
    let mut text = provenance_header(config);
    text.push_str("t,value,replica\n");
    for r in 1..=config.replicas {
        let mut stream = RngStream::new(config.seed, r);
        let path = match config.process {
            LimitProcess::StandardBm => sample_bm(&config.times, &mut stream)?,
            LimitProcess::NoiseReinforced => {
                sample_noise_reinforced_bm(config.p, &config.times, &mut stream)?
            }
            LimitProcess::Counterbalanced => {
                sample_counterbalanced_bm(config.p, &config.times, &mut stream)?
            }
        };
        for (t, v) in path.grid.iter().zip(&path.values) {
            let _ = writeln!(text, "{t},{v},{r}");
        }
    }
    Ok(CommandOutput {
        text,
        exit_code: 0,
        table: None,
    })
}

/// Runs the requested checks (or the default suite) and emits the reports as
/// JSON plus a human-readable table; exit status 1 if any check fails.
pub fn cmd_verify(config: &RunConfig) -> Result<CommandOutput> {
    let specs: Vec<CheckSpec> = if config.checks.is_empty() {
        default_suite(config.seed)
    } else {
        config
            .checks
            .iter()
            .enumerate()
            .map(|(i, &theorem)| {
                let mut s = CheckSpec::new(
                    theorem,
                    config.dist,
                    config.p,
                    config.n,
                    config.replicas,
                    config.seed + i as u64,
                );
                s.sign = theorem.implied_sign().unwrap_or(config.sign);
                s.level = config.level;
                if theorem == TheoremId::LlnPos || theorem == TheoremId::LlnNeg {
                    // single-path and median-band LLN runs need an allowance
                    s.tolerance = Some(0.02);
                }
                s
            })
            .collect()
    };
    let reports: Vec<VerificationReport> = specs
        .iter()
        .map(|s| run_check(s, config.parallelism))
        .collect::<Result<_>>()?;
    let all_passed = reports.iter().all(|r| r.passed);
    let mut table = String::new();
    for r in &reports {
        table.push_str(&r.one_line());
        table.push('\n');
    }
    let _ = writeln!(
        table,
        "{}/{} checks passed",
        reports.iter().filter(|r| r.passed).count(),
        reports.len()
    );
    let mut text = provenance_header(config);
    text.push_str(&serde_json::to_string_pretty(&reports).expect("reports serialize"));
    text.push('\n');
    Ok(CommandOutput {
        text,
        exit_code: if all_passed { 0 } else { 1 },
        table: Some(table),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_roundtrips_through_loader() {
        let mut config = RunConfig::new(CommandKind::Simulate);
        config.dist = StepKind::TwoPoint {
            a: 0.5,
            b: 2.0,
            prob_a: 0.25,
        };
        config.p = 0.3;
        config.n = 50;
        config.replicas = 3;
        config.seed = 99;
        config.checkpoints = vec![10, 50];
        let out = cmd_simulate(&config).unwrap();
        let dir = std::env::temp_dir().join("rwalk-test-header");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.csv");
        std::fs::write(&path, &out.text).unwrap();
        let loaded = load_config(&path).unwrap();
        assert_eq!(loaded, config);
        // rerunning the loaded config reproduces the bytes
        let again = cmd_simulate(&loaded).unwrap();
        assert_eq!(again.text, out.text);
    }

    #[test]
    fn simulate_degenerate_cases() {
        let mut config = RunConfig::new(CommandKind::Simulate);
        config.dist = StepKind::Constant { c: 1.0 };
        config.p = 1.0;
        config.n = 10;
        let out = cmd_simulate(&config).unwrap();
        let last = out.text.lines().last().unwrap();
        assert_eq!(last, "1,10,10,1");
    }

    #[test]
    fn moments_table_header() {
        let mut config = RunConfig::new(CommandKind::Moments);
        config.n = 64;
        config.p = 0.25;
        let out = cmd_moments(&config).unwrap();
        assert!(out.text.contains("n,mean,var,regime_normalized_var"));
        assert!(out.text.contains("# regime: diffusive"));
    }

    #[test]
    fn oracle_small_run_passes() {
        let mut config = RunConfig::new(CommandKind::Oracle);
        config.n = 4;
        config.p = 0.5;
        let out = cmd_oracle(&config).unwrap();
        assert_eq!(out.exit_code, 0);
        assert!(out.text.contains("\"pass\": true"));
    }

    #[test]
    fn limits_csv_shape() {
        let mut config = RunConfig::new(CommandKind::Limits);
        config.replicas = 2;
        config.process = LimitProcess::Counterbalanced;
        config.p = 0.5;
        let out = cmd_limits(&config).unwrap();
        let lines: Vec<&str> = out.text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(lines[0], "t,value,replica");
        assert_eq!(lines.len(), 1 + 2 * 5);
        assert!(lines[1].starts_with("0,0,1"));
    }

    #[test]
    fn seed_resolution_order() {
        assert_eq!(resolve_seed(Some(7)), 7);
        // env fallback exercised in the CLI integration tests
    }
}
