//! Command-line and config-file parsing.
//!
//! The config file is flat `key = value` text; `#` starts a comment. Keys use
//! the long flag names with `-` or `_` (`tail_eps`, `tail-eps`). Flags given
//! on the command line override file values.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use partition_entropy::{PartitionCounts, PdpParams64};
use thiserror::Error;

pub const DEFAULT_TAIL_EPS: f64 = partition_entropy::pdp::DEFAULT_TAIL_EPS;
pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_CHECKPOINTS: [u64; 3] = [100, 1_000, 10_000];
pub const DEFAULT_SIMULATE_N: u64 = 1000;
pub const DEFAULT_MAX_N: u64 = 200;

#[derive(Debug, Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Debug, Parser)]
#[command(
    name = "partition-entropy",
    version,
    about = "Entropy estimation for exchangeable random partitions under Poisson-Dirichlet priors",
    after_help = "Tolerances:\n  \
                  converge          posterior error and posterior/plug-in gap strictly decrease\n  \
                  martingale-check  |residual| < 1e-9, increasing step > -1e-12\n  \
                  posterior-check   |z| < 4 standard errors\n  \
                  prior-check       |z| < 4 standard errors\n\n\
                  Exit status: 0 pass, 1 tolerance violated, 2 invalid configuration.\n\
                  PARTITION_ENTROPY_THREADS caps the worker count; output bytes never depend on it."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Draw masses by stick breaking and sample one partition of size n per trial.
    ///
    /// Reports plug-in and posterior entropy against the entropy of the drawn
    /// masses. No tolerance: always passes when the run completes.
    Simulate(FlagArgs),
    /// Track plug-in and posterior errors along one growing sample path per trial.
    ///
    /// Pass: mean |posterior - truth| and mean |posterior - plugin| strictly
    /// decrease across checkpoints (with --masses: mean plug-in error strictly
    /// decreases).
    Converge(FlagArgs),
    /// Exact check of the posterior-entropy martingale on CRP-generated states.
    ///
    /// --trials states with n uniform on [1, --n]. Pass: max |residual| < 1e-9,
    /// min increasing-process step > -1e-12, and the step matches the
    /// conditional variance within 1e-10.
    MartingaleCheck(FlagArgs),
    /// Monte Carlo mean entropy of posterior draws vs the closed form.
    ///
    /// Pass: |mc_mean - closed_form| < 4 standard errors. Needs --counts.
    PosteriorCheck(FlagArgs),
    /// Monte Carlo mean entropy of prior stick-breaking draws vs psi(theta+1) - psi(1-alpha).
    ///
    /// Pass: |mc_mean - closed_form| < 4 standard errors.
    PriorCheck(FlagArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct FlagArgs {
    /// Discount parameter, 0 <= alpha < 1.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Concentration parameter, theta > -alpha.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Sample size (simulate) or largest state size (martingale-check).
    #[arg(long)]
    pub n: Option<u64>,
    /// Comma-separated increasing sample sizes for converge.
    #[arg(long)]
    pub checkpoints: Option<String>,
    /// Number of trials (states for martingale-check). Default 1000.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Random seed. Required.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Stick-breaking truncation: stop once the unbroken mass is below this. Default 1e-12.
    #[arg(long)]
    pub tail_eps: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Observed class sizes for posterior-check, comma separated.
    #[arg(long)]
    pub counts: Option<String>,
    /// JSON file with a list of {"weights": [...], "tail": x} for plug-in-only converge.
    #[arg(long)]
    pub masses: Option<PathBuf>,
    /// Flat key=value file with defaults for any of the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Simulate,
    Converge,
    MartingaleCheck,
    PosteriorCheck,
    PriorCheck,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::Converge => "converge",
            Self::MartingaleCheck => "martingale-check",
            Self::PosteriorCheck => "posterior-check",
            Self::PriorCheck => "prior-check",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    /// Absent only for converge over user-supplied masses.
    pub params: Option<PdpParams64>,
    pub n: u64,
    pub checkpoints: Vec<u64>,
    pub trials: usize,
    pub seed: u64,
    pub tail_eps: f64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub counts: Option<PartitionCounts>,
    pub masses: Option<PathBuf>,
}

const FILE_KEYS: &[&str] = &[
    "command",
    "alpha",
    "theta",
    "n",
    "checkpoints",
    "trials",
    "seed",
    "tail_eps",
    "output",
    "format",
    "counts",
    "masses",
];

/// Reads a flat `key = value` file.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("config line {}: expected key=value", lineno + 1)))?;
        let key = key.trim().replace('-', "_");
        if !FILE_KEYS.contains(&key.as_str()) {
            return Err(bad(format!(
                "config line {}: unknown key '{key}'",
                lineno + 1
            )));
        }
        if out.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(bad(format!(
                "config line {}: duplicate key '{key}'",
                lineno + 1
            )));
        }
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.trim()
        .parse()
        .map_err(|_| bad(format!("{key}: cannot parse '{v}'")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<u64>, ConfigError> {
    v.split(',').map(|s| parse_num(key, s)).collect()
}

/// Merges command-line flags over the optional config file and validates.
pub fn parse_config(
    command: CommandKind,
    flags: FlagArgs,
) -> Result<ExperimentConfig, ConfigError> {
    let file = match &flags.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| bad(format!("cannot read config {}: {e}", path.display())))?;
            parse_config_file(&text)?
        }
        None => BTreeMap::new(),
    };
    if let Some(cmd) = file.get("command") {
        if cmd != command.name() {
            return Err(bad(format!(
                "config file is for command '{cmd}', invoked as '{}'",
                command.name()
            )));
        }
    }

    let from_file = |key: &str| file.get(key).map(String::as_str);
    macro_rules! pick {
        ($flag:expr, $key:literal) => {
            match $flag {
                Some(v) => Some(v),
                None => from_file($key).map(|v| parse_num($key, v)).transpose()?,
            }
        };
    }

    let alpha: Option<f64> = pick!(flags.alpha, "alpha");
    let theta: Option<f64> = pick!(flags.theta, "theta");
    let n: Option<u64> = pick!(flags.n, "n");
    let trials: Option<usize> = pick!(flags.trials, "trials");
    let seed: Option<u64> = pick!(flags.seed, "seed");
    let tail_eps: Option<f64> = pick!(flags.tail_eps, "tail_eps");
    let checkpoints = match flags.checkpoints.as_deref().or(from_file("checkpoints")) {
        Some(v) => Some(parse_list("checkpoints", v)?),
        None => None,
    };
    let counts = match flags.counts.as_deref().or(from_file("counts")) {
        Some(v) => Some(
            PartitionCounts::new(parse_list("counts", v)?)
                .map_err(|e| bad(format!("counts: {e}")))?,
        ),
        None => None,
    };
    let format = match flags.format {
        Some(f) => f,
        None => match from_file("format") {
            None => Format::default(),
            Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(other) => return Err(bad(format!("format must be csv or json, got '{other}'"))),
        },
    };
    let output = flags
        .output
        .or_else(|| from_file("output").map(PathBuf::from));
    let masses = flags
        .masses
        .or_else(|| from_file("masses").map(PathBuf::from));

    let tail_eps = tail_eps.unwrap_or(DEFAULT_TAIL_EPS);
    if !(tail_eps > 0.0 && tail_eps < 1.0) {
        return Err(bad(format!("tail_eps must lie in (0, 1), got {tail_eps}")));
    }
    let trials = trials.unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(bad("trials must be positive"));
    }

    let params = match (alpha, theta) {
        (Some(a), Some(t)) => Some(PdpParams64::new(a, t).map_err(|e| bad(e.to_string()))?),
        (None, None) if command == CommandKind::Converge && masses.is_some() => None,
        (None, _) => return Err(bad("--alpha is required")),
        (_, None) => return Err(bad("--theta is required")),
    };
    let seed = seed.ok_or_else(|| bad("--seed is required (runs must be reproducible)"))?;
    if masses.is_some() && command != CommandKind::Converge {
        return Err(bad("--masses only applies to converge"));
    }
    if masses.is_some() && params.is_some() {
        return Err(bad("give either --masses or --alpha/--theta, not both"));
    }

    let n = match command {
        CommandKind::MartingaleCheck => n.unwrap_or(DEFAULT_MAX_N),
        _ => n.unwrap_or(DEFAULT_SIMULATE_N),
    };
    if n == 0 {
        return Err(bad("n must be at least 1"));
    }
    let checkpoints = checkpoints.unwrap_or_else(|| DEFAULT_CHECKPOINTS.to_vec());
    if checkpoints.is_empty() || checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(bad("checkpoints must be positive and strictly increasing"));
    }
    if command == CommandKind::PosteriorCheck {
        match &counts {
            None => return Err(bad("posterior-check needs --counts")),
            Some(c) if c.is_empty() => return Err(bad("counts must be nonempty")),
            _ => {}
        }
    }
    if matches!(
        command,
        CommandKind::PosteriorCheck | CommandKind::PriorCheck
    ) && trials < partition_entropy::verify::MIN_TRIALS
    {
        return Err(bad(format!(
            "{} needs at least {} trials",
            command.name(),
            partition_entropy::verify::MIN_TRIALS
        )));
    }

    Ok(ExperimentConfig {
        command,
        params,
        n,
        checkpoints,
        trials,
        seed,
        tail_eps,
        output,
        format,
        counts,
        masses,
    })
}

impl Sub {
    pub fn into_parts(self) -> (CommandKind, FlagArgs) {
        match self {
            Sub::Simulate(a) => (CommandKind::Simulate, a),
            Sub::Converge(a) => (CommandKind::Converge, a),
            Sub::MartingaleCheck(a) => (CommandKind::MartingaleCheck, a),
            Sub::PosteriorCheck(a) => (CommandKind::PosteriorCheck, a),
            Sub::PriorCheck(a) => (CommandKind::PriorCheck, a),
        }
    }
}
