//! Positive-P phase-space simulation of the six-mode system with pump
//! depletion.

mod accumulator;
mod ensemble;
mod state;

pub use accumulator::{EnsembleAccumulator, MomentSums};
pub use ensemble::{
    deterministic_invariant_check, run_ensemble, run_trajectory, trajectory_rng, EnsembleResult, Estimate,
    SeriesPoint, SimConfig, DIVERGENCE_FLAG_FRACTION,
};
pub use state::{apply_noise, draw_wiener, drift, euler_step, noise_increment, principal_sqrt, PPState, PUMP_PAIRS};
