//! Library side of the `partition-entropy` binary: argument handling and
//! subcommand execution.

pub mod config;
pub mod run;

pub use config::{parse_config, Cli, CommandKind, ConfigError, ExperimentConfig, Format};
pub use run::{run, Outcome};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "PARTITION_ENTROPY_THREADS";
