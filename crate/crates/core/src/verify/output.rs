//! CSV rows and JSON summaries for experiment results.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use super::exact::MartingaleSweep;
use super::montecarlo::ConvergenceRun;
use super::trace::ConvergenceSummary;
use crate::error::Result;
use crate::scalar::Real;

pub const TRACE_CSV_HEADER: [&str; 8] = [
    "n",
    "trial",
    "plugin",
    "posterior",
    "truth",
    "abs_err_plugin",
    "abs_err_posterior",
    "gap",
];

#[derive(Serialize)]
struct TraceRow<T> {
    n: u64,
    trial: usize,
    plugin: T,
    posterior: Option<T>,
    truth: T,
    abs_err_plugin: T,
    abs_err_posterior: Option<T>,
    gap: Option<T>,
}

/// One row per (trial, checkpoint), trial-major. Missing posterior values are
/// written as empty fields.
pub fn write_trace_csv<T: Real + Serialize, W: Write>(
    run: &ConvergenceRun<T>,
    out: W,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(TRACE_CSV_HEADER)?;
    for (trial, trace) in run.traces.iter().enumerate() {
        for c in trace.checkpoints() {
            w.serialize(TraceRow {
                n: c.n,
                trial,
                plugin: c.plugin,
                posterior: c.posterior,
                truth: c.truth,
                abs_err_plugin: c.abs_err_plugin,
                abs_err_posterior: c.abs_err_posterior,
                gap: c.gap,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `{ "<n>": { "mean_err_plugin": .., "mean_err_posterior": .., "mean_gap": .., "std_err_*": .., "median_*": .. } }`
/// with checkpoints in increasing order. Absent posterior statistics are `null`.
pub fn summary_json<T: Real + Serialize>(summary: &ConvergenceSummary<T>) -> Value {
    let mut out = Map::new();
    for c in &summary.checkpoints {
        let post = c.err_posterior.as_ref();
        let gap = c.gap.as_ref();
        out.insert(
            c.n.to_string(),
            json!({
                "trials": c.trials,
                "mean_err_plugin": c.err_plugin.mean,
                "mean_err_posterior": post.map(|m| m.mean),
                "mean_gap": gap.map(|m| m.mean),
                "std_err_plugin": c.err_plugin.std_err,
                "std_err_posterior": post.map(|m| m.std_err),
                "std_err_gap": gap.map(|m| m.std_err),
                "median_err_plugin": c.err_plugin.median,
                "median_err_posterior": post.map(|m| m.median),
                "median_gap": gap.map(|m| m.median),
            }),
        );
    }
    Value::Object(out)
}

pub fn write_sweep_csv<T: Real + Serialize, W: Write>(
    sweep: &MartingaleSweep<T>,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in &sweep.rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
