//! Closed-form evaluators: regimes, speed and its dual representations,
//! the Kesten exponent, exact series identities, stable laws and the
//! recurrent-case limit density.

mod functionals;
mod kappa;
mod kesten_golosov;
mod regime;
mod speed;
mod stable;

pub use functionals::{
    dual_s_tilde, identity_check_f, identity_check_s, identity_e_s_tilde, lambda_functional, right_product_sum, series_f,
    series_s, speed_reweighted_diagnostic, speed_via_dual, DualSpeedEstimate, IdentityResidual, LambdaValue, MeanEstimate,
    STildeReport, SeriesControl, SeriesValue, TailModel, FORM_AGREEMENT,
};
pub use kappa::kappa_root;
pub use kesten_golosov::{sinai_cdf, sinai_density};
pub use regime::{classify, classify_laws, Regime, RegimeReport};
pub use speed::{dual_gap_moments, max_speed_fixed_b, max_speed_fixed_s_bar, mean_f_bar, mean_s_bar, speed_formula, SpeedBreakdown};
pub use stable::{stable_cdf, stable_cf, StableLaw, StableQuadrature};
