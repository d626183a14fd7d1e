//! Subcommand execution. Every command returns its data (written to the
//! configured output) and a one-line summary with the tolerance applied.

use std::fs;
use std::io::{self, BufWriter, Write};

use partition_entropy::verify::{
    convergence_experiment, martingale_sweep, output, plugin_convergence_experiment,
    posterior_agreement_check, prior_mean_check, strictly_decreasing, ConvergenceRun, McEstimate,
    Z_TOLERANCE,
};
use partition_entropy::{
    entropy_of_masses, expected_tail_entropy, plugin_entropy, posterior_entropy,
    simulate_partition, stick_breaking, PartitionCounts, PdpParams64, RandomStream, RankedMasses64,
    Result,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{CommandKind, ExperimentConfig, Format};

pub const RESIDUAL_TOL: f64 = 1e-9;
pub const STEP_TOL: f64 = -1e-12;
pub const VARIANCE_GAP_TOL: f64 = 1e-10;

/// Stream id of every run; trial `i` uses substream `i` of `(seed, STREAM_ID)`.
pub const STREAM_ID: u64 = 0;

#[derive(Debug)]
pub struct Outcome {
    pub passed: bool,
    pub summary: String,
    /// Output file contents (CSV or JSON text).
    pub data: Vec<u8>,
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let stream = RandomStream::new(cfg.seed, STREAM_ID);
    match cfg.command {
        CommandKind::Simulate => simulate(cfg, &stream),
        CommandKind::Converge => converge(cfg, &stream),
        CommandKind::MartingaleCheck => martingale(cfg, &stream),
        CommandKind::PosteriorCheck => {
            let pi = cfg.counts.as_ref().expect("validated by config");
            let r = posterior_agreement_check(params(cfg), pi, cfg.trials, cfg.tail_eps, &stream)?;
            mc_outcome(cfg, "posterior-check", r)
        }
        CommandKind::PriorCheck => {
            let r = prior_mean_check(params(cfg), cfg.trials, cfg.tail_eps, &stream)?;
            mc_outcome(cfg, "prior-check", r)
        }
    }
}

/// Writes the data to `cfg.output`, or to standard output when unset.
pub fn emit(cfg: &ExperimentConfig, outcome: &Outcome) -> io::Result<()> {
    match &cfg.output {
        Some(path) => fs::write(path, &outcome.data),
        None => {
            let mut out = BufWriter::new(io::stdout().lock());
            out.write_all(&outcome.data)?;
            out.flush()
        }
    }
}

fn params(cfg: &ExperimentConfig) -> &PdpParams64 {
    cfg.params.as_ref().expect("validated by config")
}

fn json_bytes(v: &Value) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(v)?;
    out.push(b'\n');
    Ok(out)
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

struct SimRow {
    counts: PartitionCounts,
    plugin: f64,
    posterior: f64,
    truth: f64,
}

fn simulate(cfg: &ExperimentConfig, stream: &RandomStream) -> Result<Outcome> {
    let p = params(cfg);
    let rows = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream.substream(i as u64);
            let draw = stick_breaking(p, cfg.tail_eps, &mut rng)?;
            let truth = entropy_of_masses(&draw.masses)
                + expected_tail_entropy(p, &draw.masses, draw.sticks_drawn);
            let counts = simulate_partition(&draw.masses, cfg.n, &mut rng)?;
            Ok(SimRow {
                plugin: plugin_entropy(&counts)?,
                posterior: posterior_entropy(p, &counts)?.value,
                truth,
                counts,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let t = rows.len() as f64;
    let mean_k = rows.iter().map(|r| r.counts.k() as f64).sum::<f64>() / t;
    let err_plugin = rows.iter().map(|r| (r.plugin - r.truth).abs()).sum::<f64>() / t;
    let err_post = rows
        .iter()
        .map(|r| (r.posterior - r.truth).abs())
        .sum::<f64>()
        / t;

    let data = match cfg.format {
        Format::Csv => csv_bytes(
            &["trial", "n", "k", "plugin", "posterior", "truth"],
            rows.iter().enumerate().map(|(i, r)| {
                vec![
                    i.to_string(),
                    cfg.n.to_string(),
                    r.counts.k().to_string(),
                    r.plugin.to_string(),
                    r.posterior.to_string(),
                    r.truth.to_string(),
                ]
            }),
        ),
        Format::Json => json_bytes(&Value::Array(
            rows.iter()
                .enumerate()
                .map(|(i, r)| {
                    json!({
                        "trial": i,
                        "n": cfg.n,
                        "counts": r.counts,
                        "plugin": r.plugin,
                        "posterior": r.posterior,
                        "truth": r.truth,
                    })
                })
                .collect(),
        ))?,
    };
    Ok(Outcome {
        passed: true,
        summary: format!(
            "simulate: {} trials at n = {}, mean k = {mean_k:.3}, mean |plugin - truth| = {err_plugin:.6}, \
             mean |posterior - truth| = {err_post:.6} (no tolerance)",
            cfg.trials, cfg.n
        ),
        data,
    })
}

fn converge(cfg: &ExperimentConfig, stream: &RandomStream) -> Result<Outcome> {
    let run: ConvergenceRun<f64> = match &cfg.masses {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            let masses: Vec<RankedMasses64> = serde_json::from_str(&text)?;
            plugin_convergence_experiment(&masses, &cfg.checkpoints, stream)?
        }
        None => convergence_experiment(
            params(cfg),
            &cfg.checkpoints,
            cfg.trials,
            cfg.tail_eps,
            stream,
        )?,
    };
    let s = &run.summary;
    let plugin = s.mean_err_plugin();
    let (passed, summary) = match (s.mean_err_posterior(), s.mean_gap()) {
        (Some(post), Some(gap)) => {
            let ok = strictly_decreasing(&post) && strictly_decreasing(&gap);
            (
                ok,
                format!(
                    "converge: {}; mean |posterior - truth| {}, mean gap {}, mean |plugin - truth| {} \
                     (tolerance: posterior error and gap strictly decreasing)",
                    verdict(ok),
                    fmt_list(&post),
                    fmt_list(&gap),
                    fmt_list(&plugin)
                ),
            )
        }
        _ => {
            let ok = strictly_decreasing(&plugin);
            (
                ok,
                format!(
                    "converge: {}; mean |plugin - truth| {} (tolerance: strictly decreasing)",
                    verdict(ok),
                    fmt_list(&plugin)
                ),
            )
        }
    };
    let data = match cfg.format {
        Format::Csv => {
            let mut buf = Vec::new();
            output::write_trace_csv(&run, &mut buf)?;
            buf
        }
        Format::Json => json_bytes(&output::summary_json(s))?,
    };
    Ok(Outcome {
        passed,
        summary,
        data,
    })
}

fn martingale(cfg: &ExperimentConfig, stream: &RandomStream) -> Result<Outcome> {
    let p = params(cfg);
    let sweep = martingale_sweep(p, cfg.trials, cfg.n, stream)?;
    let passed = sweep.max_abs_residual < RESIDUAL_TOL
        && sweep.min_increasing_step > STEP_TOL
        && sweep.max_variance_gap < VARIANCE_GAP_TOL;
    let summary = format!(
        "martingale-check: {}; {} states, n <= {}, max |residual| = {:e} (< {RESIDUAL_TOL:e}), \
         min increasing step = {:e} (> {STEP_TOL:e}), max variance gap = {:e} (< {VARIANCE_GAP_TOL:e})",
        verdict(passed),
        cfg.trials,
        cfg.n,
        sweep.max_abs_residual,
        sweep.min_increasing_step,
        sweep.max_variance_gap
    );
    let data = match cfg.format {
        Format::Csv => {
            let mut buf = Vec::new();
            output::write_sweep_csv(&sweep, &mut buf)?;
            buf
        }
        Format::Json => json_bytes(&json!({
            "alpha": p.alpha(),
            "theta": p.theta(),
            "states": cfg.trials,
            "max_n": cfg.n,
            "max_abs_residual": sweep.max_abs_residual,
            "min_increasing_step": sweep.min_increasing_step,
            "max_variance_gap": sweep.max_variance_gap,
            "residual_tolerance": RESIDUAL_TOL,
            "step_tolerance": STEP_TOL,
            "variance_gap_tolerance": VARIANCE_GAP_TOL,
            "pass": passed,
        }))?,
    };
    Ok(Outcome {
        passed,
        summary,
        data,
    })
}

fn mc_outcome(cfg: &ExperimentConfig, name: &str, r: McEstimate<f64>) -> Result<Outcome> {
    let passed = r.within(Z_TOLERANCE);
    let summary = format!(
        "{name}: {}; mc_mean = {:.6} +- {:.6}, closed form = {:.6}, |z| = {:.2} (tolerance |z| < {Z_TOLERANCE}), \
         {} trials",
        verdict(passed),
        r.mc_mean,
        r.std_err,
        r.reference,
        r.z_score().abs(),
        r.trials
    );
    let data = match cfg.format {
        Format::Csv => csv_bytes(
            &["mc_mean", "std_err", "closed_form", "z", "trials", "pass"],
            [vec![
                r.mc_mean.to_string(),
                r.std_err.to_string(),
                r.reference.to_string(),
                r.z_score().to_string(),
                r.trials.to_string(),
                passed.to_string(),
            ]],
        ),
        Format::Json => json_bytes(&json!({
            "mc_mean": r.mc_mean,
            "std_err": r.std_err,
            "closed_form": r.reference,
            "z": r.z_score(),
            "z_tolerance": Z_TOLERANCE,
            "trials": r.trials,
            "pass": passed,
        }))?,
    };
    Ok(Outcome {
        passed,
        summary,
        data,
    })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.5}")).collect();
    format!("[{}]", parts.join(", "))
}
