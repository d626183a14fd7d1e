//! Exchangeable random partitions and Bayesian entropy estimation.
//!
//! The crate samples partitions of `n` observations either from a fixed set
//! of ranked masses or from the Chinese restaurant process of the
//! two-parameter Poisson-Dirichlet family, and compares two estimators of the
//! entropy of the underlying masses: the plug-in entropy of the empirical
//! frequencies and the posterior mean entropy under a PDP(α, θ) prior. The
//! [`verify`] module checks the martingale identity of the posterior estimator
//! by exact enumeration and its convergence by simulation.
//!
//! Every numerical routine is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`.
//!
//! Entropies are in nats.

pub mod error;
pub mod masses;
pub mod partition;
pub mod pdp;
pub mod rng;
pub mod scalar;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use masses::{
    entropy_of_masses, sample_class, simulate_partition, ClassDraw, MassSampler, PathSimulator,
    RankedMasses,
};
pub use partition::{plugin_additive, plugin_entropy, successors, PartitionCounts};
pub use pdp::{
    beta_draw, crp_sample, crp_transition, dirichlet_draw, expected_tail_entropy, gamma_draw,
    posterior_entropy, posterior_sample, prior_mean_entropy, stick_breaking, PdpParams,
    PosteriorDraw, PosteriorEntropyParts, StickBreaking, TransitionDistribution,
};
pub use rng::RandomStream;
pub use scalar::Real;
pub use special::{digamma, log_gamma, try_digamma, try_log_gamma, PositiveReal};

pub type PdpParams64 = PdpParams<f64>;
pub type RankedMasses64 = RankedMasses<f64>;
pub type TransitionDistribution64 = TransitionDistribution<f64>;
pub type PosteriorEntropyParts64 = PosteriorEntropyParts<f64>;
pub type StickBreaking64 = StickBreaking<f64>;
pub type EstimateTrace64 = verify::EstimateTrace<f64>;
pub type McEstimate64 = verify::McEstimate<f64>;
pub type PosteriorDraw64 = PosteriorDraw<f64>;
