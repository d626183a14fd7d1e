//! The Chinese restaurant process: the one-step transition kernel and
//! the sequential sampler it induces.

use rand::Rng;

use super::params::PdpParams;
use crate::error::{Error, Result};
use crate::partition::PartitionCounts;
use crate::rng::uniform;
use crate::scalar::{compensated_sum, Real};

/// Law of the next state over the successors of a partition: entry `j < k`
/// grows class `j`, entry `k` opens a new class.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionDistribution<T> {
    probs: Vec<T>,
}

impl<T: Real> TransitionDistribution<T> {
    pub fn new(probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() || probs.iter().any(|p| !(p.is_finite() && *p >= T::zero())) {
            return Err(Error::InvalidArgument(
                "transition probabilities must be finite and nonnegative".into(),
            ));
        }
        let total = compensated_sum(probs.iter().copied());
        if (total - T::one()).abs() > T::lit(T::NORMALIZATION_TOL) {
            return Err(Error::InvalidArgument(format!(
                "transition probabilities sum to {total}"
            )));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// Probability of opening a new class.
    pub fn new_class(&self) -> T {
        *self.probs.last().expect("nonempty")
    }

    /// Inverse-CDF lookup; `u` in [0, 1).
    pub fn pick(&self, u: T) -> usize {
        let mut upper = T::zero();
        for (j, &p) in self.probs.iter().enumerate() {
            upper = upper + p;
            if u < upper {
                return j;
            }
        }
        // rounding left u above the last cumulative sum
        self.probs
            .iter()
            .rposition(|p| *p > T::zero())
            .unwrap_or(self.probs.len() - 1)
    }
}

/// (π_j − α)/(θ + n) for existing classes, (θ + αk)/(θ + n) for a new one.
pub fn crp_transition<T: Real>(
    params: &PdpParams<T>,
    pi: &PartitionCounts,
) -> TransitionDistribution<T> {
    if pi.is_empty() {
        return TransitionDistribution {
            probs: vec![T::one()],
        };
    }
    let alpha = params.alpha();
    let denom = params.theta() + T::from_count(pi.n());
    let mut probs: Vec<T> = pi
        .counts()
        .iter()
        .map(|&c| (T::from_count(c) - alpha) / denom)
        .collect();
    probs.push((params.theta() + alpha * T::from_count(pi.k() as u64)) / denom);
    TransitionDistribution { probs }
}

/// One CRP step in place.
pub fn crp_step<T: Real, R: Rng + ?Sized>(
    params: &PdpParams<T>,
    pi: &mut PartitionCounts,
    rng: &mut R,
) {
    let q = crp_transition(params, pi);
    let j = q.pick(uniform::<T, R>(rng));
    pi.grow(j);
}

/// π^n by iterating the kernel from the empty state.
pub fn crp_sample<T: Real, R: Rng + ?Sized>(
    params: &PdpParams<T>,
    n: u64,
    rng: &mut R,
) -> PartitionCounts {
    let mut pi = PartitionCounts::empty();
    for _ in 0..n {
        crp_step(params, &mut pi, rng);
    }
    pi
}
