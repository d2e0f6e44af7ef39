//! Exact quenched simulation: the nearest-neighbour stepper, the chain of
//! marked-site visits, first-passage times and Monte Carlo estimators.

mod branching;
mod crossing;
mod embedded;
mod hitting;
mod recurrence;
mod speed;
mod stepper;

pub use branching::{negative_binomial, sample_hitting_time};
pub use crossing::{exit_probability, mean_crossing_time, ssrw_conditional_exit_time, Side};
pub use embedded::{direct_sigma_step, embedded_kernel, embedded_step, EmbeddedKernel, EmbeddedState};
pub use hitting::{run_to_hit, run_to_hit_with, HittingRecord, HittingRow, DEFAULT_BUDGET};
pub use recurrence::{recurrence_diagnostic, track, RecurrenceRecord, RecurrenceReport};
pub use speed::{
    direct_velocity, estimate_speed, estimate_speed_direct, estimate_speed_mean_time, mean_time_velocity, ExactPath,
    MeanTimeOnly, SpeedEstimate, SpeedMode, SpeedSummary,
};
pub use stepper::{step, trajectory, Stepper, WalkState};
