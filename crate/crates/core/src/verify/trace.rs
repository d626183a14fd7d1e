//! Per-trial estimate trajectories and their per-checkpoint summaries.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Estimates at one sample size along one path.
///
/// `posterior` is absent when the path was drawn from user-supplied masses
/// with no PDP prior attached.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Checkpoint<T> {
    pub n: u64,
    pub plugin: T,
    pub posterior: Option<T>,
    pub truth: T,
    pub abs_err_plugin: T,
    pub abs_err_posterior: Option<T>,
    /// |posterior − plugin|
    pub gap: Option<T>,
}

impl<T: Real> Checkpoint<T> {
    pub fn new(n: u64, plugin: T, posterior: Option<T>, truth: T) -> Self {
        Self {
            n,
            plugin,
            posterior,
            truth,
            abs_err_plugin: (plugin - truth).abs(),
            abs_err_posterior: posterior.map(|p| (p - truth).abs()),
            gap: posterior.map(|p| (p - plugin).abs()),
        }
    }
}

/// One sample path: checkpoints with strictly increasing `n`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EstimateTrace<T> {
    checkpoints: Vec<Checkpoint<T>>,
}

impl<T: Real> EstimateTrace<T> {
    pub fn new() -> Self {
        Self {
            checkpoints: Vec::new(),
        }
    }

    pub fn push(&mut self, checkpoint: Checkpoint<T>) -> Result<()> {
        if let Some(last) = self.checkpoints.last() {
            if checkpoint.n <= last.n {
                return Err(Error::InvalidArgument(format!(
                    "checkpoint n = {} does not follow n = {}",
                    checkpoint.n, last.n
                )));
            }
        }
        self.checkpoints.push(checkpoint);
        Ok(())
    }

    pub fn checkpoints(&self) -> &[Checkpoint<T>] {
        &self.checkpoints
    }
}

/// Sample mean, median and standard error of the mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Moments<T> {
    pub mean: T,
    pub median: T,
    pub std_err: T,
}

impl<T: Real> Moments<T> {
    /// Folds in index order so the result is independent of how the values
    /// were produced.
    pub fn of(values: &[T]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = T::from_count(values.len() as u64);
        let mean = values.iter().fold(T::zero(), |acc, &v| acc + v) / n;
        let std_err = if values.len() > 1 {
            let ss = values
                .iter()
                .fold(T::zero(), |acc, &v| acc + (v - mean) * (v - mean));
            (ss / (n - T::one()) / n).sqrt()
        } else {
            T::zero()
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 {
            sorted[mid]
        } else {
            (sorted[mid - 1] + sorted[mid]) / T::lit(2.0)
        };
        Some(Self {
            mean,
            median,
            std_err,
        })
    }
}

/// Error statistics across trials at one checkpoint.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckpointSummary<T> {
    pub n: u64,
    pub trials: usize,
    pub err_plugin: Moments<T>,
    pub err_posterior: Option<Moments<T>>,
    pub gap: Option<Moments<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceSummary<T> {
    pub checkpoints: Vec<CheckpointSummary<T>>,
}

impl<T: Real> ConvergenceSummary<T> {
    /// Aggregates traces that share the same checkpoint grid.
    pub fn from_traces(traces: &[EstimateTrace<T>]) -> Result<Self> {
        let first = traces
            .first()
            .ok_or_else(|| Error::InvalidArgument("no traces to summarize".into()))?;
        let grid: Vec<u64> = first.checkpoints().iter().map(|c| c.n).collect();
        if traces
            .iter()
            .any(|t| t.checkpoints().iter().map(|c| c.n).ne(grid.iter().copied()))
        {
            return Err(Error::InvalidArgument(
                "traces use different checkpoints".into(),
            ));
        }

        let checkpoints = grid
            .iter()
            .enumerate()
            .map(|(j, &n)| {
                let at: Vec<&Checkpoint<T>> = traces.iter().map(|t| &t.checkpoints()[j]).collect();
                let plugin: Vec<T> = at.iter().map(|c| c.abs_err_plugin).collect();
                let posterior: Option<Vec<T>> = at.iter().map(|c| c.abs_err_posterior).collect();
                let gap: Option<Vec<T>> = at.iter().map(|c| c.gap).collect();
                CheckpointSummary {
                    n,
                    trials: at.len(),
                    err_plugin: Moments::of(&plugin).expect("nonempty"),
                    err_posterior: posterior.and_then(|v| Moments::of(&v)),
                    gap: gap.and_then(|v| Moments::of(&v)),
                }
            })
            .collect();
        Ok(Self { checkpoints })
    }

    pub fn mean_err_plugin(&self) -> Vec<T> {
        self.checkpoints.iter().map(|c| c.err_plugin.mean).collect()
    }

    pub fn mean_err_posterior(&self) -> Option<Vec<T>> {
        self.checkpoints
            .iter()
            .map(|c| c.err_posterior.map(|m| m.mean))
            .collect()
    }

    pub fn mean_gap(&self) -> Option<Vec<T>> {
        self.checkpoints
            .iter()
            .map(|c| c.gap.map(|m| m.mean))
            .collect()
    }
}

/// True when every element is strictly below its predecessor.
pub fn strictly_decreasing<T: PartialOrd>(values: &[T]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_are_consistent() {
        let c = Checkpoint::new(10, 0.5_f64, Some(0.8), 0.7);
        assert!((c.abs_err_plugin - 0.2).abs() < 1e-14);
        assert!((c.abs_err_posterior.unwrap() - 0.1).abs() < 1e-14);
        assert!((c.gap.unwrap() - 0.3).abs() < 1e-14);
        let d = Checkpoint::new(10, 0.5_f64, None, 0.7);
        assert!(d.gap.is_none());
    }

    #[test]
    fn trace_requires_increasing_n() {
        let mut t = EstimateTrace::new();
        t.push(Checkpoint::new(10, 0.1_f64, None, 0.0)).unwrap();
        assert!(t.push(Checkpoint::new(10, 0.1, None, 0.0)).is_err());
        assert!(t.push(Checkpoint::new(5, 0.1, None, 0.0)).is_err());
        t.push(Checkpoint::new(11, 0.1, None, 0.0)).unwrap();
        assert_eq!(t.checkpoints().len(), 2);
    }

    #[test]
    fn moments() {
        let m = Moments::of(&[1.0_f64, 2.0, 3.0, 10.0]).unwrap();
        assert_eq!(m.mean, 4.0);
        assert_eq!(m.median, 2.5);
        let sd = ((9.0f64 + 4.0 + 1.0 + 36.0) / 3.0).sqrt();
        assert!((m.std_err - sd / 2.0).abs() < 1e-14);
        assert_eq!(Moments::of(&[7.0_f64]).unwrap().std_err, 0.0);
        assert!(Moments::<f64>::of(&[]).is_none());
    }

    #[test]
    fn summary_aggregates_by_checkpoint() {
        let mk = |a: f64, b: f64| {
            let mut t = EstimateTrace::new();
            t.push(Checkpoint::new(10, a, Some(a + 0.1), 1.0)).unwrap();
            t.push(Checkpoint::new(100, b, Some(b + 0.1), 1.0)).unwrap();
            t
        };
        let s = ConvergenceSummary::from_traces(&[mk(0.5, 0.9), mk(0.7, 0.95)]).unwrap();
        assert_eq!(s.checkpoints.len(), 2);
        assert!((s.mean_err_plugin()[0] - 0.4).abs() < 1e-14);
        assert!(strictly_decreasing(&s.mean_err_plugin()));
        assert!((s.mean_gap().unwrap()[1] - 0.1).abs() < 1e-14);
    }

    #[test]
    fn mismatched_grids_rejected() {
        let mut a = EstimateTrace::new();
        a.push(Checkpoint::new(10, 0.0_f64, None, 0.0)).unwrap();
        let mut b = EstimateTrace::new();
        b.push(Checkpoint::new(20, 0.0_f64, None, 0.0)).unwrap();
        assert!(ConvergenceSummary::from_traces(&[a, b]).is_err());
    }
}
