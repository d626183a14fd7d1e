//! Two-parameter Poisson-Dirichlet family PDP(α, θ).

mod kernel;
mod params;
mod posterior;
mod stick;
mod variates;

pub use kernel::{crp_sample, crp_step, crp_transition, TransitionDistribution};
pub use params::PdpParams;
pub use posterior::{
    expected_tail_entropy, posterior_entropy, posterior_sample, prior_mean_entropy, PosteriorDraw,
    PosteriorEntropyParts,
};
pub use stick::{stick_breaking, StickBreaking, DEFAULT_TAIL_EPS, MAX_STICKS};
pub use variates::{beta_draw, dirichlet_draw, gamma_draw};
