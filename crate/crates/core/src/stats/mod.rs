//! Estimators and hypothesis tests with asymptotic p-values.

mod chisq;
mod hill;
mod ks;
mod regression;
mod sample;
mod summary;

pub use chisq::{chi_square_gof, chi_square_homogeneity};
pub use hill::hill_estimator;
pub use ks::{kolmogorov_sf, ks_one_sample, ks_two_sample, TestResult};
pub use regression::{median_scaling_regression, ols, scaling_regression, BootstrapConfig, ScalingFit};
pub use sample::{spec_hash, Provenance, Sample};
pub use summary::{empirical_quantiles, mean_stderr, median, quantile, quantile_sorted, Welford};
