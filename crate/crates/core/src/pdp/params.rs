use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Discount `alpha` in [0, 1) and concentration `theta > -alpha`.
///
/// JSON form: `{"alpha": a, "theta": t}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawParams<T>",
    bound(deserialize = "T: Real + Deserialize<'de>")
)]
pub struct PdpParams<T> {
    alpha: T,
    theta: T,
}

#[derive(Deserialize)]
struct RawParams<T> {
    alpha: T,
    theta: T,
}

impl<T: Real> TryFrom<RawParams<T>> for PdpParams<T> {
    type Error = Error;

    fn try_from(raw: RawParams<T>) -> Result<Self> {
        Self::new(raw.alpha, raw.theta)
    }
}

impl<T: Real> PdpParams<T> {
    pub fn new(alpha: T, theta: T) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= T::zero() && alpha < T::one()) {
            return Err(Error::InvalidParams(format!(
                "alpha must lie in [0, 1), got {alpha}"
            )));
        }
        if !(theta.is_finite() && theta > -alpha) {
            return Err(Error::InvalidParams(format!(
                "theta must exceed -alpha, got theta = {theta}, alpha = {alpha}"
            )));
        }
        Ok(Self { alpha, theta })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    /// Parameters of the residual process after `k` classes have been seen:
    /// PDP(α, θ + αk).
    pub fn shifted(&self, k: usize) -> Self {
        Self {
            alpha: self.alpha,
            theta: self.theta + self.alpha * T::from_count(k as u64),
        }
    }
}
