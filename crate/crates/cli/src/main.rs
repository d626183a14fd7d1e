use std::env;
use std::process::ExitCode;

use clap::Parser;
use partition_entropy_cli::{parse_config, run, Cli, THREADS_ENV};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (command, flags) = cli.command.into_parts();
    let cfg = match parse_config(command, flags) {
        Ok(cfg) => cfg,
        Err(e) => return usage_error(e),
    };

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = env::var(THREADS_ENV) {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => pool = pool.num_threads(n),
            _ => {
                return usage_error(format!(
                    "{THREADS_ENV} must be a positive integer, got '{v}'"
                ))
            }
        }
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => return usage_error(e),
    };

    let outcome = match pool.install(|| run::run(&cfg)) {
        Ok(o) => o,
        Err(e) => return usage_error(e),
    };
    if let Err(e) = run::emit(&cfg, &outcome) {
        return usage_error(format!("cannot write output: {e}"));
    }
    // keep the summary off stdout when stdout carries the data
    if cfg.output.is_some() {
        println!("{}", outcome.summary);
    } else {
        eprintln!("{}", outcome.summary);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}
