//! Samplers for the level block when observations are not Gaussian.

mod cwmh;
mod link;
mod probit;
mod truncnorm;

pub use cwmh::{
    cwmh_conditional, cwmh_sweep, log_acceptance_ratio, AdaptiveScales, BinomialObs,
    ObservationModel, BATCH_LEN, TARGET_ACCEPTANCE,
};
pub use link::{normal_cdf, normal_log_pdf, normal_quantile, Link, PROBABILITY_CLAMP};
pub use probit::{probit_augment, probit_theta1};
pub use truncnorm::{sample_signed as sample_truncated_unit_normal, standard_normal_above};
