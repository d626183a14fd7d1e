//! Exact one-step checks by enumerating the successors of a state.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::{successors, PartitionCounts};
use crate::pdp::{crp_sample, crp_transition, posterior_entropy, PdpParams};
use crate::rng::RandomStream;
use crate::scalar::Real;

/// Posterior entropy at `pi` and at each successor, with the kernel weights.
fn one_step<T: Real>(params: &PdpParams<T>, pi: &PartitionCounts) -> Result<(T, Vec<(T, T)>)> {
    let here = posterior_entropy(params, pi)?.value;
    let q = crp_transition(params, pi);
    let next = successors(pi)
        .iter()
        .zip(q.probs())
        .map(|(s, &p)| Ok((posterior_entropy(params, s)?.value, p)))
        .collect::<Result<Vec<_>>>()?;
    Ok((here, next))
}

/// E(ℋ_{n+1} | π^n) − ℋ_n, computed exactly. Zero up to rounding.
pub fn martingale_residual<T: Real>(params: &PdpParams<T>, pi: &PartitionCounts) -> Result<T> {
    let (here, next) = one_step(params, pi)?;
    let expected = next.iter().fold(T::zero(), |acc, &(h, p)| acc + h * p);
    Ok(expected - here)
}

/// Increment of the increasing process of the squared martingale,
/// E(ℋ_{n+1}² | π^n) − ℋ_n².
pub fn increasing_process_step<T: Real>(params: &PdpParams<T>, pi: &PartitionCounts) -> Result<T> {
    let (here, next) = one_step(params, pi)?;
    let second = next.iter().fold(T::zero(), |acc, &(h, p)| acc + h * h * p);
    Ok(second - here * here)
}

/// Var(ℋ_{n+1} | π^n) in centred form; equals [`increasing_process_step`]
/// when the martingale identity holds.
pub fn conditional_variance<T: Real>(params: &PdpParams<T>, pi: &PartitionCounts) -> Result<T> {
    let (_, next) = one_step(params, pi)?;
    let mean = next.iter().fold(T::zero(), |acc, &(h, p)| acc + h * p);
    Ok(next.iter().fold(T::zero(), |acc, &(h, p)| {
        let d = h - mean;
        acc + d * d * p
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow<T> {
    pub state: usize,
    pub n: u64,
    pub k: usize,
    pub residual: T,
    pub increasing_step: T,
    pub conditional_variance: T,
}

/// Martingale and increasing-process checks over CRP-generated states.
#[derive(Clone, Debug)]
pub struct MartingaleSweep<T> {
    pub params: PdpParams<T>,
    pub rows: Vec<SweepRow<T>>,
    pub max_abs_residual: T,
    pub min_increasing_step: T,
    /// Largest |increasing_step − conditional_variance|.
    pub max_variance_gap: T,
}

/// Generates `states` partitions with the CRP at sizes uniform on
/// `[1, max_n]` (state `i` uses substream `i`) and runs the exact checks on
/// each.
pub fn martingale_sweep<T: Real>(
    params: &PdpParams<T>,
    states: usize,
    max_n: u64,
    stream: &RandomStream,
) -> Result<MartingaleSweep<T>> {
    use rand::Rng;

    if max_n == 0 {
        return Err(Error::InvalidArgument("max_n must be at least 1".into()));
    }
    let rows = (0..states)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream.substream(i as u64);
            let n = rng.gen_range(1..=max_n);
            let pi = crp_sample(params, n, &mut rng);
            Ok(SweepRow {
                state: i,
                n,
                k: pi.k(),
                residual: martingale_residual(params, &pi)?,
                increasing_step: increasing_process_step(params, &pi)?,
                conditional_variance: conditional_variance(params, &pi)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let max_abs_residual = rows
        .iter()
        .map(|r| r.residual.abs())
        .fold(T::zero(), T::max);
    let min_increasing_step = rows
        .iter()
        .map(|r| r.increasing_step)
        .fold(T::infinity(), T::min);
    let max_variance_gap = rows
        .iter()
        .map(|r| (r.increasing_step - r.conditional_variance).abs())
        .fold(T::zero(), T::max);
    Ok(MartingaleSweep {
        params: *params,
        rows,
        max_abs_residual,
        min_increasing_step,
        max_variance_gap,
    })
}

/// Exact law of the sorted class sizes of π^n under the CRP: the product of
/// one-step kernels summed over every path from the empty state.
pub fn crp_multiset_law<T: Real>(params: &PdpParams<T>, n: u64) -> BTreeMap<Vec<u64>, T> {
    let mut layer: HashMap<PartitionCounts, T> =
        HashMap::from([(PartitionCounts::empty(), T::one())]);
    for _ in 0..n {
        let mut next: HashMap<PartitionCounts, T> = HashMap::new();
        for (pi, mass) in &layer {
            let q = crp_transition(params, pi);
            for (succ, &p) in successors(pi).into_iter().zip(q.probs()) {
                let slot = next.entry(succ).or_insert_with(T::zero);
                *slot = *slot + *mass * p;
            }
        }
        layer = next;
    }
    let mut law = BTreeMap::new();
    for (pi, mass) in layer {
        let slot = law.entry(pi.multiset()).or_insert_with(T::zero);
        *slot = *slot + mass;
    }
    law
}
