//! Ranked masses and the interval construction that turns them into a
//! partition: i.i.d. uniforms are dropped onto consecutive intervals of the
//! given lengths, and classes are labelled in order of first visit.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::PartitionCounts;
use crate::rng::uniform;
use crate::scalar::{compensated_sum, Real};

/// Largest tail mass [`simulate_partition`] accepts.
pub const MAX_SIMULATION_TAIL: f64 = 1e-9;

/// Decreasing nonnegative weights plus the mass left out by truncation.
///
/// JSON form: `{"weights": [...], "tail": x}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawMasses<T>",
    bound(deserialize = "T: Real + Deserialize<'de>")
)]
pub struct RankedMasses<T> {
    weights: Vec<T>,
    tail: T,
}

#[derive(Deserialize)]
struct RawMasses<T> {
    weights: Vec<T>,
    #[serde(default)]
    tail: Option<T>,
}

impl<T: Real> TryFrom<RawMasses<T>> for RankedMasses<T> {
    type Error = Error;

    fn try_from(raw: RawMasses<T>) -> Result<Self> {
        Self::new(raw.weights, raw.tail.unwrap_or_else(T::zero))
    }
}

impl<T: Real> RankedMasses<T> {
    pub fn new(weights: Vec<T>, tail: T) -> Result<Self> {
        if let Some(i) = weights
            .iter()
            .position(|w| !(w.is_finite() && *w >= T::zero()))
        {
            return Err(Error::InvalidMasses(format!(
                "weight {i} is {}",
                weights[i]
            )));
        }
        if let Some(i) = weights.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::InvalidMasses(format!(
                "weights not decreasing at position {}: {} < {}",
                i + 1,
                weights[i],
                weights[i + 1]
            )));
        }
        if !(tail.is_finite() && tail >= T::zero()) {
            return Err(Error::InvalidMasses(format!("tail is {tail}")));
        }
        let total = compensated_sum(weights.iter().copied().chain(std::iter::once(tail)));
        if (total - T::one()).abs() > T::lit(T::NORMALIZATION_TOL) {
            return Err(Error::InvalidMasses(format!(
                "weights and tail sum to {total}, not 1"
            )));
        }
        Ok(Self { weights, tail })
    }

    /// Sorts `weights` decreasing before validating.
    pub fn from_unsorted(mut weights: Vec<T>, tail: T) -> Result<Self> {
        weights.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        Self::new(weights, tail)
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn tail(&self) -> T {
        self.tail
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// H(s) in nats over the listed weights; the tail is not included.
pub fn entropy_of_masses<T: Real>(s: &RankedMasses<T>) -> T {
    let terms = s
        .weights()
        .iter()
        .filter(|w| **w > T::zero())
        .map(|&w| -w * w.ln());
    compensated_sum(terms)
}

/// Outcome of locating a uniform among the mass intervals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassDraw {
    Class(usize),
    Tail,
}

/// Index of the interval containing `u`, intervals laid end to end from zero
/// in weight order. Linear scan; see [`MassSampler`] for repeated lookups.
pub fn sample_class<T: Real>(s: &RankedMasses<T>, u: T) -> ClassDraw {
    let mut upper = T::zero();
    for (i, &w) in s.weights().iter().enumerate() {
        upper = upper + w;
        if u < upper {
            return ClassDraw::Class(i);
        }
    }
    ClassDraw::Tail
}

/// Binary-search version of [`sample_class`] over precomputed cumulative sums.
/// Both accumulate left to right, so they agree exactly.
#[derive(Clone, Debug)]
pub struct MassSampler<'a, T> {
    masses: &'a RankedMasses<T>,
    upper: Vec<T>,
}

impl<'a, T: Real> MassSampler<'a, T> {
    pub fn new(masses: &'a RankedMasses<T>) -> Self {
        let upper = masses
            .weights()
            .iter()
            .scan(T::zero(), |acc, &w| {
                *acc = *acc + w;
                Some(*acc)
            })
            .collect();
        Self { masses, upper }
    }

    pub fn masses(&self) -> &'a RankedMasses<T> {
        self.masses
    }

    pub fn locate(&self, u: T) -> ClassDraw {
        let i = self.upper.partition_point(|&c| c <= u);
        if i < self.upper.len() {
            ClassDraw::Class(i)
        } else {
            ClassDraw::Tail
        }
    }
}

/// One growing sample path: keeps the first-visit labelling so the counts can
/// be extended without resampling earlier observations.
#[derive(Clone, Debug)]
pub struct PathSimulator<'a, T> {
    sampler: MassSampler<'a, T>,
    // position in `counts` for each mass index, tail last; u32::MAX = unseen
    label: Vec<u32>,
    counts: PartitionCounts,
}

const UNSEEN: u32 = u32::MAX;

impl<'a, T: Real> PathSimulator<'a, T> {
    pub fn new(masses: &'a RankedMasses<T>) -> Result<Self> {
        if masses.tail() > T::lit(MAX_SIMULATION_TAIL) {
            return Err(Error::TailTooLarge {
                tail: masses.tail().as_f64(),
                limit: MAX_SIMULATION_TAIL,
            });
        }
        Ok(Self {
            sampler: MassSampler::new(masses),
            label: vec![UNSEEN; masses.len() + 1],
            counts: PartitionCounts::empty(),
        })
    }

    pub fn counts(&self) -> &PartitionCounts {
        &self.counts
    }

    /// Draws `steps` further observations.
    pub fn extend<R: Rng + ?Sized>(&mut self, steps: u64, rng: &mut R) {
        let tail_slot = self.label.len() - 1;
        for _ in 0..steps {
            let slot = match self.sampler.locate(uniform::<T, R>(rng)) {
                ClassDraw::Class(i) => i,
                // tail hits pool into one pseudo-class
                ClassDraw::Tail => tail_slot,
            };
            let class = match self.label[slot] {
                UNSEEN => {
                    let k = self.counts.k();
                    self.label[slot] = k as u32;
                    k
                }
                c => c as usize,
            };
            self.counts.grow(class);
        }
    }

    /// Extends the path until it holds `n` observations.
    pub fn advance_to<R: Rng + ?Sized>(&mut self, n: u64, rng: &mut R) {
        let have = self.counts.n();
        if n > have {
            self.extend(n - have, rng);
        }
    }
}

/// π^n from `n` i.i.d. draws out of `s`, classes in order of first appearance.
pub fn simulate_partition<T: Real, R: Rng + ?Sized>(
    s: &RankedMasses<T>,
    n: u64,
    rng: &mut R,
) -> Result<PartitionCounts> {
    let mut path = PathSimulator::new(s)?;
    path.extend(n, rng);
    Ok(path.counts)
}
