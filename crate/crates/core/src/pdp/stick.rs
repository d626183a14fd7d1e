//! Truncated stick-breaking (GEM) draws from PDP(α, θ).

use rand::Rng;

use super::params::PdpParams;
use super::variates::beta_split;
use crate::error::{Error, Result};
use crate::masses::RankedMasses;
use crate::scalar::{compensated_sum, Real};

pub const DEFAULT_TAIL_EPS: f64 = 1e-12;

/// Hard cap on the number of sticks per draw.
pub const MAX_STICKS: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct StickBreaking<T> {
    /// Weights ranked decreasing, with the unbroken remainder as tail.
    pub masses: RankedMasses<T>,
    pub sticks_drawn: usize,
    /// The same weights in size-biased (generation) order.
    pub size_biased: Vec<T>,
}

/// Breaks sticks β_j ~ Beta(1 − α, θ + αj) until the remaining length drops
/// below `tail_eps`.
pub fn stick_breaking<T: Real, R: Rng + ?Sized>(
    params: &PdpParams<T>,
    tail_eps: T,
    rng: &mut R,
) -> Result<StickBreaking<T>> {
    if !(tail_eps > T::zero() && tail_eps < T::one()) {
        return Err(Error::InvalidArgument(format!(
            "tail_eps must lie in (0, 1), got {tail_eps}"
        )));
    }
    let a = T::one() - params.alpha();
    let mut remaining = T::one();
    let mut sticks = Vec::new();
    let mut j = 0usize;
    while remaining >= tail_eps {
        if j == MAX_STICKS {
            return Err(Error::StickCapReached {
                cap: MAX_STICKS,
                remaining: remaining.as_f64(),
                target: tail_eps.as_f64(),
            });
        }
        j += 1;
        let b = params.theta() + params.alpha() * T::from_count(j as u64);
        let (beta, rest) = beta_split(a, b, rng);
        sticks.push(remaining * beta);
        remaining = remaining * rest;
    }

    // Absorb the rounding drift of the running product.
    let total = compensated_sum(sticks.iter().copied().chain(std::iter::once(remaining)));
    for w in &mut sticks {
        *w = *w / total;
    }
    let tail = remaining / total;

    let masses = RankedMasses::from_unsorted(sticks.clone(), tail)?;
    Ok(StickBreaking {
        masses,
        sticks_drawn: j,
        size_biased: sticks,
    })
}
