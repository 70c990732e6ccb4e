//! Objective-Bayes inference for the excess distribution: priors, the log
//! posterior, its mode, and random-walk Metropolis draws.

use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{log_likelihood, maximize, ExceedanceSample, FitResult, Method};
use crate::rng;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Prior {
    /// Maximal data information prior, `e^gamma / sigma`.
    Mdi,
    /// `sigma^-1 (1 + gamma)^-1 (1 + 2 gamma)^-1/2`, proper only for `gamma > -1/2`.
    Jeffreys,
    Uniform,
}

impl Prior {
    pub fn label(&self) -> &'static str {
        match self {
            Prior::Mdi => "MDI",
            Prior::Jeffreys => "JEFF",
            Prior::Uniform => "UNIF",
        }
    }

    pub fn log_density(&self, sigma: f64, gamma: f64) -> f64 {
        if !(sigma > 0.0) {
            return f64::NEG_INFINITY;
        }
        match self {
            Prior::Mdi => gamma - sigma.ln(),
            Prior::Jeffreys => {
                if !(gamma > -0.5) {
                    return f64::NEG_INFINITY;
                }
                -sigma.ln() - gamma.ln_1p() - 0.5 * (2.0 * gamma).ln_1p()
            }
            Prior::Uniform => 0.0,
        }
    }
}

impl fmt::Display for Prior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Prior::Mdi => "mdi",
            Prior::Jeffreys => "jeffreys",
            Prior::Uniform => "uniform",
        })
    }
}

impl FromStr for Prior {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mdi" => Ok(Prior::Mdi),
            "jeffreys" | "jeff" => Ok(Prior::Jeffreys),
            "uniform" | "unif" | "flat" => Ok(Prior::Uniform),
            other => Err(Error::Parse(format!("unknown prior '{other}'"))),
        }
    }
}

/// Log posterior with the normalizing constant set to zero. Negative
/// infinity marks every invalid region.
pub fn log_posterior(s: &ExceedanceSample, prior: Prior, sigma: f64, gamma: f64) -> f64 {
    let lp = prior.log_density(sigma, gamma);
    if lp == f64::NEG_INFINITY {
        return lp;
    }
    let ll = log_likelihood(s, sigma, gamma);
    if ll == f64::NEG_INFINITY {
        return ll;
    }
    ll + lp
}

pub fn posterior_mode(s: &ExceedanceSample, prior: Prior) -> Result<FitResult> {
    s.require(2)?;
    let (sigma, gamma, value, converged) = maximize(s, |sg, g| log_posterior(s, prior, sg, g));
    Ok(FitResult::build(s, sigma, gamma, Method::Mode(prior), converged, Some(value)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McmcConfig {
    pub n_draws: usize,
    pub burn_in: usize,
    pub thinning: usize,
    /// Random-walk step for sigma; `None` uses `0.15 * sigma_mode`.
    pub proposal_scale_sigma: Option<f64>,
    /// Random-walk step for gamma; `None` uses `max(0.15 * |gamma_mode|, 0.01)`.
    pub proposal_scale_gamma: Option<f64>,
    pub proposal_correlation: f64,
    pub seed: u64,
    /// Tune the step sizes during burn-in only.
    pub adapt: bool,
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            n_draws: 10_000,
            burn_in: 2_000,
            thinning: 1,
            proposal_scale_sigma: None,
            proposal_scale_gamma: None,
            proposal_correlation: 0.0,
            seed: 0,
            adapt: true,
        }
    }
}

impl McmcConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_draws < 1 {
            return Err(Error::Validation("n_draws must be at least 1".into()));
        }
        if self.thinning < 1 {
            return Err(Error::Validation("thinning must be at least 1".into()));
        }
        for s in [self.proposal_scale_sigma, self.proposal_scale_gamma].into_iter().flatten() {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::Validation(format!("proposal scales must be positive, got {s}")));
            }
        }
        if !(self.proposal_correlation.abs() < 1.0) {
            return Err(Error::Validation(format!("proposal correlation must lie in (-1, 1), got {}", self.proposal_correlation)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Draw {
    pub sigma: f64,
    pub gamma: f64,
}

/// Stored states of a Metropolis chain plus its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorDraws {
    pub draws: Vec<Draw>,
    /// Over post-burn-in proposals.
    pub acceptance_rate: f64,
    pub burn_in: usize,
    pub thinning: usize,
    pub seed: u64,
    /// Step sizes in force after burn-in.
    pub proposal_scales: (f64, f64),
    /// Set when the acceptance rate falls outside `[0.05, 0.80]`.
    pub acceptance_warning: bool,
}

impl PosteriorDraws {
    /// Wraps externally produced draws (no chain diagnostics).
    pub fn from_draws(draws: Vec<Draw>) -> Result<Self> {
        if draws.is_empty() {
            return Err(Error::EmptyChain);
        }
        if draws.iter().any(|d| !(d.sigma > 0.0) || !d.gamma.is_finite()) {
            return Err(Error::Validation("draws need positive sigma and finite gamma".into()));
        }
        Ok(PosteriorDraws {
            draws,
            acceptance_rate: f64::NAN,
            burn_in: 0,
            thinning: 1,
            seed: 0,
            proposal_scales: (f64::NAN, f64::NAN),
            acceptance_warning: false,
        })
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn sigmas(&self) -> Vec<f64> {
        self.draws.iter().map(|d| d.sigma).collect()
    }

    pub fn gammas(&self) -> Vec<f64> {
        self.draws.iter().map(|d| d.gamma).collect()
    }
}

const ADAPT_WINDOW: usize = 100;

/// Random-walk Metropolis on `(sigma, gamma)` started at the posterior mode.
/// A proposal is kept when `ln p(new) - ln p(current) > ln U`.
pub fn metropolis(s: &ExceedanceSample, prior: Prior, cfg: &McmcConfig) -> Result<PosteriorDraws> {
    cfg.validate()?;
    let mode = posterior_mode(s, prior)?;
    let mut current = Draw { sigma: mode.sigma, gamma: mode.gamma };
    let mut current_lp = log_posterior(s, prior, current.sigma, current.gamma);
    if !current_lp.is_finite() {
        return Err(Error::InsufficientData("posterior mode has zero density; cannot start chain".into()));
    }

    let mut scale_sigma = cfg.proposal_scale_sigma.unwrap_or(0.15 * mode.sigma);
    let mut scale_gamma = cfg.proposal_scale_gamma.unwrap_or((0.15 * mode.gamma.abs()).max(0.01));
    let rho = cfg.proposal_correlation;
    let rho_c = (1.0 - rho * rho).sqrt();

    let mut rng = rng::stream(cfg.seed);
    let step = |current: &mut Draw, current_lp: &mut f64, ss: f64, sg: f64, rng: &mut rng::Stream| -> bool {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let proposal = Draw { sigma: current.sigma + ss * z1, gamma: current.gamma + sg * (rho * z1 + rho_c * z2) };
        let lp = log_posterior(s, prior, proposal.sigma, proposal.gamma);
        let u: f64 = rng.sample(Open01);
        if lp - *current_lp > u.ln() {
            *current = proposal;
            *current_lp = lp;
            true
        } else {
            false
        }
    };

    let mut window_accepts = 0usize;
    for i in 0..cfg.burn_in {
        if step(&mut current, &mut current_lp, scale_sigma, scale_gamma, &mut rng) {
            window_accepts += 1;
        }
        if cfg.adapt && (i + 1) % ADAPT_WINDOW == 0 {
            let rate = window_accepts as f64 / ADAPT_WINDOW as f64;
            if rate > 0.5 {
                scale_sigma *= 1.1;
                scale_gamma *= 1.1;
            } else if rate < 0.2 {
                scale_sigma *= 0.9;
                scale_gamma *= 0.9;
            }
            window_accepts = 0;
        }
    }

    let mut draws = Vec::with_capacity(cfg.n_draws);
    let mut accepted = 0usize;
    let proposals = cfg.n_draws * cfg.thinning;
    for i in 0..proposals {
        if step(&mut current, &mut current_lp, scale_sigma, scale_gamma, &mut rng) {
            accepted += 1;
        }
        if (i + 1) % cfg.thinning == 0 {
            draws.push(current);
        }
    }

    let acceptance_rate = accepted as f64 / proposals as f64;
    Ok(PosteriorDraws {
        draws,
        acceptance_rate,
        burn_in: cfg.burn_in,
        thinning: cfg.thinning,
        seed: cfg.seed,
        proposal_scales: (scale_sigma, scale_gamma),
        acceptance_warning: !(0.05..=0.80).contains(&acceptance_rate),
    })
}

pub fn posterior_mean(d: &PosteriorDraws) -> Result<(f64, f64)> {
    if d.draws.is_empty() {
        return Err(Error::EmptyChain);
    }
    let n = d.draws.len() as f64;
    let (ss, sg) = d.draws.iter().fold((0.0, 0.0), |(a, b), x| (a + x.sigma, b + x.gamma));
    Ok((ss / n, sg / n))
}

/// Posterior-mean fit built from a chain.
pub fn posterior_mean_fit(s: &ExceedanceSample, prior: Prior, d: &PosteriorDraws) -> Result<FitResult> {
    let (sigma, gamma) = posterior_mean(d)?;
    let value = log_posterior(s, prior, sigma, gamma);
    Ok(FitResult::build(s, sigma, gamma, Method::Mean(prior), !d.acceptance_warning, Some(value)))
}

/// Equal-tailed interval holding `level` of the values.
pub fn credible_interval(values: &[f64], level: f64) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::EmptyInput("credible interval of no values".into()));
    }
    crate::gpd::check_open_unit(level, "credible level")?;
    let sorted = stats::sorted_copy(values);
    Ok(credible_interval_sorted(&sorted, level))
}

pub(crate) fn credible_interval_sorted(sorted: &[f64], level: f64) -> (f64, f64) {
    let tail = (1.0 - level) / 2.0;
    (stats::quantile_sorted(sorted, tail), stats::quantile_sorted(sorted, 1.0 - tail))
}
