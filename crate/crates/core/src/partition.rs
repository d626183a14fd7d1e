//! Partition counts and the plug-in estimators built on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Class sizes of an exchangeable partition in order of first appearance.
///
/// Serializes as a bare JSON array of integers. The empty state (no
/// observations) is legal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct PartitionCounts {
    counts: Vec<u64>,
    n: u64,
}

impl PartitionCounts {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if let Some(pos) = counts.iter().position(|&c| c == 0) {
            return Err(Error::InvalidCounts(format!("class {pos} has size zero")));
        }
        let n = counts
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .ok_or_else(|| Error::InvalidCounts("total count overflows u64".into()))?;
        Ok(Self { counts, n })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of observations.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of classes.
    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Adds one observation to `class`; `class == k()` opens a new class.
    pub fn grow(&mut self, class: usize) {
        assert!(
            class <= self.counts.len(),
            "class {class} out of range for k = {}",
            self.k()
        );
        if class == self.counts.len() {
            self.counts.push(1);
        } else {
            self.counts[class] += 1;
        }
        self.n += 1;
    }

    pub fn grown(&self, class: usize) -> Self {
        let mut next = self.clone();
        next.grow(class);
        next
    }

    /// Class sizes sorted decreasing; the label-free summary of the state.
    pub fn multiset(&self) -> Vec<u64> {
        let mut sorted = self.counts.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        sorted
    }
}

impl TryFrom<Vec<u64>> for PartitionCounts {
    type Error = Error;

    fn try_from(counts: Vec<u64>) -> Result<Self> {
        Self::new(counts)
    }
}

impl From<PartitionCounts> for Vec<u64> {
    fn from(pi: PartitionCounts) -> Self {
        pi.counts
    }
}

/// The `k + 1` states reachable with one more observation: each existing
/// class grown by one, then a new singleton class appended.
pub fn successors(pi: &PartitionCounts) -> Vec<PartitionCounts> {
    (0..=pi.k()).map(|j| pi.grown(j)).collect()
}

/// Entropy (nats) of the empirical class frequencies.
pub fn plugin_entropy<T: Real>(pi: &PartitionCounts) -> Result<T> {
    plugin_additive(pi, |p: T| -p * p.ln())
}

/// Σ f(count / n) over the classes.
pub fn plugin_additive<T: Real, F: Fn(T) -> T>(pi: &PartitionCounts, f: F) -> Result<T> {
    if pi.is_empty() {
        return Err(Error::EmptyPartition);
    }
    let n = T::from_count(pi.n());
    Ok(pi
        .counts()
        .iter()
        .fold(T::zero(), |acc, &c| acc + f(T::from_count(c) / n)))
}
