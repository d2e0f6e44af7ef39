//! Recurrent regime: normalized potential, valleys and the localization
//! experiment.

mod experiment;
mod potential;
mod valley;

pub use experiment::{
    classical_limit_ks, predictor_b_n, predictor_valley, sinai_experiment, SearchConfig, SinaiAggregate, SinaiConfig,
    SinaiRecord, SinaiReport, REPORT_QUANTILES,
};
pub use potential::{normalized_potential, potential_breakpoints, u_scale, PotentialPath, Scale};
pub use valley::{find_valleys, valley_containing_origin, Valley};
