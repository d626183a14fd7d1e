//! Monte Carlo checks. Trial `i` always draws from substream `i` of the
//! caller's stream and results are folded in trial order, so every output is
//! a pure function of `(inputs, seed, stream_id)` whatever the thread count.

use rayon::prelude::*;
use serde::Serialize;

use super::trace::{Checkpoint, ConvergenceSummary, EstimateTrace, Moments};
use crate::error::{Error, Result};
use crate::masses::{entropy_of_masses, simulate_partition, PathSimulator, RankedMasses};
use crate::partition::plugin_entropy;
use crate::partition::PartitionCounts;
use crate::pdp::{
    expected_tail_entropy, posterior_entropy, posterior_sample, prior_mean_entropy, stick_breaking,
    PdpParams,
};
use crate::rng::RandomStream;
use crate::scalar::Real;

/// Agreement threshold for the statistical checks, in standard errors.
pub const Z_TOLERANCE: f64 = 4.0;

/// Minimum number of trials for a check that reports a standard error.
pub const MIN_TRIALS: usize = 100;

/// A Monte Carlo mean with its standard error, next to the value it should
/// match.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate<T> {
    pub mc_mean: T,
    pub std_err: T,
    pub reference: T,
    pub trials: usize,
}

impl<T: Real> McEstimate<T> {
    fn from_samples(samples: &[T], reference: T) -> Self {
        let m = Moments::of(samples).expect("at least one trial");
        Self {
            mc_mean: m.mean,
            std_err: m.std_err,
            reference,
            trials: samples.len(),
        }
    }

    /// (mc_mean − reference) / std_err.
    pub fn z_score(&self) -> T {
        (self.mc_mean - self.reference) / self.std_err
    }

    /// |mc_mean − reference| within `sigmas` standard errors. A zero standard
    /// error demands exact agreement.
    pub fn within(&self, sigmas: T) -> bool {
        (self.mc_mean - self.reference).abs() <= sigmas * self.std_err
    }
}

fn per_trial<T, F>(trials: usize, stream: &RandomStream, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut RandomStream) -> Result<T> + Sync + Send,
{
    (0..trials)
        .into_par_iter()
        .map(|i| f(&mut stream.substream(i as u64)))
        .collect()
}

fn check_trials(trials: usize) -> Result<()> {
    if trials < MIN_TRIALS {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_TRIALS} trials are needed, got {trials}"
        )));
    }
    Ok(())
}

/// Tail-corrected entropy of one stick-breaking prior draw.
fn prior_draw_entropy<T: Real>(
    params: &PdpParams<T>,
    tail_eps: T,
    rng: &mut RandomStream,
) -> Result<T> {
    let draw = stick_breaking(params, tail_eps, rng)?;
    Ok(entropy_of_masses(&draw.masses)
        + expected_tail_entropy(params, &draw.masses, draw.sticks_drawn))
}

/// Mean entropy of stick-breaking draws against ψ(θ + 1) − ψ(1 − α).
pub fn prior_mean_check<T: Real>(
    params: &PdpParams<T>,
    trials: usize,
    tail_eps: T,
    stream: &RandomStream,
) -> Result<McEstimate<T>> {
    check_trials(trials)?;
    let samples = per_trial(trials, stream, |rng| {
        prior_draw_entropy(params, tail_eps, rng)
    })?;
    Ok(McEstimate::from_samples(
        &samples,
        prior_mean_entropy(params),
    ))
}

/// Mean entropy of posterior draws against the closed-form posterior entropy.
pub fn posterior_agreement_check<T: Real>(
    params: &PdpParams<T>,
    pi: &PartitionCounts,
    trials: usize,
    tail_eps: T,
    stream: &RandomStream,
) -> Result<McEstimate<T>> {
    check_trials(trials)?;
    if pi.is_empty() {
        return Err(Error::EmptyPartition);
    }
    let closed = posterior_entropy(params, pi)?.value;
    let samples = per_trial(trials, stream, |rng| {
        Ok(posterior_sample(params, pi, tail_eps, rng)?.tail_corrected_entropy())
    })?;
    Ok(McEstimate::from_samples(&samples, closed))
}

/// Mean plug-in entropy of independent `n`-samples from fixed masses, against
/// the entropy of those masses.
pub fn plugin_bias_check<T: Real>(
    s: &RankedMasses<T>,
    n: u64,
    trials: usize,
    stream: &RandomStream,
) -> Result<McEstimate<T>> {
    if s.tail() > T::zero() {
        return Err(Error::InvalidArgument(
            "plug-in bias check needs masses with zero tail".into(),
        ));
    }
    if n == 0 || trials == 0 {
        return Err(Error::InvalidArgument(
            "n and trials must be positive".into(),
        ));
    }
    let samples = per_trial(trials, stream, |rng| {
        plugin_entropy(&simulate_partition(s, n, rng)?)
    })?;
    Ok(McEstimate::from_samples(&samples, entropy_of_masses(s)))
}

/// Frequency of two classes after two draws from stick-breaking masses,
/// against the CRP value (θ + α)/(θ + 1).
pub fn second_draw_new_class_check<T: Real>(
    params: &PdpParams<T>,
    trials: usize,
    tail_eps: T,
    stream: &RandomStream,
) -> Result<McEstimate<T>> {
    check_trials(trials)?;
    let samples = per_trial(trials, stream, |rng| {
        let draw = stick_breaking(params, tail_eps, rng)?;
        let pi = simulate_partition(&draw.masses, 2, rng)?;
        Ok(if pi.k() == 2 { T::one() } else { T::zero() })
    })?;
    let exact = (params.theta() + params.alpha()) / (params.theta() + T::one());
    Ok(McEstimate::from_samples(&samples, exact))
}

#[derive(Clone, Debug)]
pub struct ConvergenceRun<T> {
    pub traces: Vec<EstimateTrace<T>>,
    pub summary: ConvergenceSummary<T>,
}

fn check_checkpoints(checkpoints: &[u64]) -> Result<()> {
    if checkpoints.is_empty() || checkpoints[0] == 0 {
        return Err(Error::InvalidArgument(
            "checkpoints must be nonempty and start at n >= 1".into(),
        ));
    }
    if checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "checkpoints must be strictly increasing".into(),
        ));
    }
    Ok(())
}

fn trace_along_path<T: Real>(
    masses: &RankedMasses<T>,
    checkpoints: &[u64],
    truth: T,
    posterior: impl Fn(&PartitionCounts) -> Result<Option<T>>,
    rng: &mut RandomStream,
) -> Result<EstimateTrace<T>> {
    let mut path = PathSimulator::new(masses)?;
    let mut trace = EstimateTrace::new();
    for &n in checkpoints {
        path.advance_to(n, rng);
        let pi = path.counts();
        trace.push(Checkpoint::new(
            n,
            plugin_entropy(pi)?,
            posterior(pi)?,
            truth,
        ))?;
    }
    Ok(trace)
}

/// Per trial: draw masses from PDP(α, θ) by stick breaking, then grow one
/// sample path through the checkpoints, recording the plug-in and posterior
/// estimates against the (tail-corrected) entropy of the drawn masses.
///
/// `tail_eps` must not exceed the simulation tail limit (1e-9).
pub fn convergence_experiment<T: Real>(
    params: &PdpParams<T>,
    checkpoints: &[u64],
    trials: usize,
    tail_eps: T,
    stream: &RandomStream,
) -> Result<ConvergenceRun<T>> {
    check_checkpoints(checkpoints)?;
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let traces = per_trial(trials, stream, |rng| {
        let draw = stick_breaking(params, tail_eps, rng)?;
        let truth = entropy_of_masses(&draw.masses)
            + expected_tail_entropy(params, &draw.masses, draw.sticks_drawn);
        trace_along_path(
            &draw.masses,
            checkpoints,
            truth,
            |pi| Ok(Some(posterior_entropy(params, pi)?.value)),
            rng,
        )
    })?;
    let summary = ConvergenceSummary::from_traces(&traces)?;
    Ok(ConvergenceRun { traces, summary })
}

/// Plug-in convergence for user-supplied masses, one path per entry. No
/// posterior is computed since no prior is attached to the masses.
pub fn plugin_convergence_experiment<T: Real>(
    masses: &[RankedMasses<T>],
    checkpoints: &[u64],
    stream: &RandomStream,
) -> Result<ConvergenceRun<T>> {
    check_checkpoints(checkpoints)?;
    if masses.is_empty() {
        return Err(Error::InvalidArgument("no masses supplied".into()));
    }
    let traces = (0..masses.len())
        .into_par_iter()
        .map(|i| {
            let mut rng = stream.substream(i as u64);
            let s = &masses[i];
            trace_along_path(s, checkpoints, entropy_of_masses(s), |_| Ok(None), &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = ConvergenceSummary::from_traces(&traces)?;
    Ok(ConvergenceRun { traces, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, t: f64) -> PdpParams<f64> {
        PdpParams::new(a, t).unwrap()
    }

    fn pc(c: &[u64]) -> PartitionCounts {
        PartitionCounts::new(c.to_vec()).unwrap()
    }

    #[test]
    fn prior_check_dp() {
        let r =
            prior_mean_check(&params(0.0, 1.0), 10_000, 1e-12, &RandomStream::new(1, 0)).unwrap();
        assert_eq!(r.reference, prior_mean_entropy(&params(0.0, 1.0)));
        assert!(r.std_err > 0.0 && r.std_err.is_finite());
        assert!(r.within(Z_TOLERANCE), "{r:?}");
    }

    #[test]
    fn too_few_trials() {
        let s = RandomStream::new(1, 0);
        assert!(prior_mean_check(&params(0.0, 1.0), 99, 1e-12, &s).is_err());
        assert!(posterior_agreement_check(&params(0.0, 1.0), &pc(&[1]), 10, 1e-12, &s).is_err());
    }

    #[test]
    fn posterior_check_single_observation() {
        let r = posterior_agreement_check(
            &params(0.0, 1.0),
            &pc(&[1]),
            10_000,
            1e-12,
            &RandomStream::new(2, 0),
        )
        .unwrap();
        assert!((r.reference - 1.0).abs() < 1e-14);
        assert!(r.within(Z_TOLERANCE), "{r:?}");
    }

    #[test]
    fn plugin_bias_examples() {
        let s = RandomStream::new(3, 0);
        let fair = RankedMasses::new(vec![0.5, 0.5], 0.0).unwrap();
        let r = plugin_bias_check(&fair, 100, 10_000, &s).unwrap();
        assert!(r.mc_mean <= std::f64::consts::LN_2 + Z_TOLERANCE * r.std_err);
        assert!(r.mc_mean < r.reference, "plug-in should be biased low");

        let one = RankedMasses::new(vec![1.0], 0.0).unwrap();
        let r = plugin_bias_check(&one, 37, 200, &s).unwrap();
        assert_eq!(r.mc_mean, 0.0);

        let r = plugin_bias_check(&fair, 100_000, 100, &s).unwrap();
        assert!((r.mc_mean - std::f64::consts::LN_2).abs() < 0.001);

        let tailed = RankedMasses::new(vec![1.0 - 1e-10], 1e-10).unwrap();
        assert!(plugin_bias_check(&tailed, 10, 10, &s).is_err());
    }

    #[test]
    fn checkpoints_validated() {
        let s = RandomStream::new(4, 0);
        let p = params(0.0, 1.0);
        assert!(convergence_experiment(&p, &[], 1, 1e-12, &s).is_err());
        assert!(convergence_experiment(&p, &[0, 10], 1, 1e-12, &s).is_err());
        assert!(convergence_experiment(&p, &[100, 10], 1, 1e-12, &s).is_err());
        // the stick-breaking tail must be small enough to simulate from
        assert!(matches!(
            convergence_experiment(&p, &[10], 1, 1e-3, &s),
            Err(Error::TailTooLarge { .. })
        ));
    }

    #[test]
    fn single_trial_is_reproducible() {
        let p = params(0.3, 1.0);
        let s = RandomStream::new(5, 17);
        let a = convergence_experiment(&p, &[10, 100, 1000], 1, 1e-9, &s).unwrap();
        let b = convergence_experiment(&p, &[10, 100, 1000], 1, 1e-9, &s).unwrap();
        assert_eq!(a.traces, b.traces);
        let c = &a.traces[0].checkpoints()[2];
        assert_eq!(c.abs_err_plugin, (c.plugin - c.truth).abs());
    }

    #[test]
    fn dp_convergence_small() {
        let p = params(0.0, 1.0);
        let run = convergence_experiment(
            &p,
            &[100, 1000, 10_000],
            200,
            1e-12,
            &RandomStream::new(6, 0),
        )
        .unwrap();
        let post = run.summary.mean_err_posterior().unwrap();
        assert!(super::super::trace::strictly_decreasing(&post), "{post:?}");
        let gap = run.summary.mean_gap().unwrap();
        assert!(gap[2] < gap[0]);
    }

    #[test]
    fn plugin_only_convergence() {
        let masses = vec![
            RankedMasses::new(vec![0.6, 0.3, 0.1], 0.0).unwrap(),
            RankedMasses::new(vec![0.25; 4], 0.0).unwrap(),
        ];
        let run =
            plugin_convergence_experiment(&masses, &[10, 1000, 100_000], &RandomStream::new(7, 0))
                .unwrap();
        assert!(run.summary.mean_err_posterior().is_none());
        assert_eq!(run.traces.len(), 2);
        let last = run.summary.checkpoints.last().unwrap();
        assert!(last.err_plugin.mean < 0.01);
    }
}
