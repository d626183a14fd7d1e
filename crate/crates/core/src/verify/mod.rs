//! Verification harness: exact martingale checks by enumeration and Monte
//! Carlo checks of the closed forms and of convergence.

mod exact;
mod montecarlo;
pub mod output;
mod trace;

pub use exact::{
    conditional_variance, crp_multiset_law, increasing_process_step, martingale_residual,
    martingale_sweep, MartingaleSweep, SweepRow,
};
pub use montecarlo::{
    convergence_experiment, plugin_bias_check, plugin_convergence_experiment,
    posterior_agreement_check, prior_mean_check, second_draw_new_class_check, ConvergenceRun,
    McEstimate, MIN_TRIALS, Z_TOLERANCE,
};
pub use trace::{
    strictly_decreasing, Checkpoint, CheckpointSummary, ConvergenceSummary, EstimateTrace, Moments,
};
