//! Peaks-over-threshold modelling of extreme losses with the generalized
//! Pareto distribution.
//!
//! The crate fits the excess distribution by moments, probability-weighted
//! moments, maximum likelihood and objective-Bayes posteriors (MDI,
//! Jeffreys, flat), turns posterior draws into Value-at-Risk and Expected
//! Shortfall curves with credible bands, and ships a Monte Carlo harness
//! comparing the estimators by RMSE.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bayes;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod fixture;
pub mod gpd;
pub mod optim;
pub mod risk;
pub mod rng;
pub mod series;
pub mod stats;
pub mod study;
pub mod threshold;

pub use bayes::{credible_interval, log_posterior, metropolis, posterior_mean, posterior_mode, Draw, McmcConfig, PosteriorDraws, Prior};
pub use error::{Error, Result};
pub use estimators::{fit_mle, fit_mom, fit_pwm, log_likelihood, ExceedanceSample, FitResult, Method};
pub use gpd::GpdParams;
pub use risk::{
    bayes_risk_curve, es_closed_form, historical_var, normal_var, predictive_sample, rescale_alpha, var_closed_form, PointEstimate, RiskCurve, RiskPoint,
    RiskQuery,
};
pub use study::{rmse, run_study, StudyReport, StudyScenario};
pub use threshold::{extract_exceedances, mean_excess_data, pareto_quantile_data, sweep, ThresholdSweep};
