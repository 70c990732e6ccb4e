//! Classical point estimators of the excess distribution's `(sigma, gamma)`:
//! method of moments, probability-weighted moments and maximum likelihood.

use serde::{Deserialize, Serialize};

use crate::bayes::Prior;
use crate::error::{Error, Result};
use crate::gpd::is_exponential;
use crate::optim::NelderMead;
use crate::stats;

/// Exceedances over a threshold, shifted so that the threshold sits at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceedanceSample {
    threshold: f64,
    excesses: Vec<f64>,
    n_total: usize,
}

impl ExceedanceSample {
    pub fn new(threshold: f64, excesses: Vec<f64>, n_total: usize) -> Result<Self> {
        if excesses.is_empty() {
            return Err(Error::InsufficientData("no exceedances".into()));
        }
        if let Some(bad) = excesses.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
            return Err(Error::Validation(format!("excesses must be positive and finite, got {bad}")));
        }
        if excesses.len() > n_total {
            return Err(Error::Validation(format!("{} exceedances cannot come from {} observations", excesses.len(), n_total)));
        }
        if !threshold.is_finite() {
            return Err(Error::Validation(format!("threshold must be finite, got {threshold}")));
        }
        Ok(ExceedanceSample { threshold, excesses, n_total })
    }

    /// Excesses with no surrounding series: threshold 0 and
    /// `n_total == n_exceed`.
    pub fn from_excesses(excesses: Vec<f64>) -> Result<Self> {
        let n = excesses.len();
        Self::new(0.0, excesses, n)
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn excesses(&self) -> &[f64] {
        &self.excesses
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn n_exceed(&self) -> usize {
        self.excesses.len()
    }

    pub fn max_excess(&self) -> f64 {
        self.excesses.iter().copied().fold(f64::MIN, f64::max)
    }

    pub(crate) fn require(&self, min: usize) -> Result<()> {
        if self.n_exceed() < min {
            Err(Error::InsufficientData(format!("need at least {min} exceedances, got {}", self.n_exceed())))
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    Mom,
    Pwm,
    Mle,
    Mode(Prior),
    Mean(Prior),
}

impl Method {
    /// Column label as used in estimator comparison tables.
    pub fn label(&self) -> String {
        match self {
            Method::Mom => "MOM".into(),
            Method::Pwm => "PWM".into(),
            Method::Mle => "MLE".into(),
            Method::Mode(p) => format!("MODE/{}", p.label()),
            Method::Mean(p) => format!("MEAN/{}", p.label()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub sigma: f64,
    pub gamma: f64,
    pub method: Method,
    pub converged: bool,
    /// False when `gamma < 0` and some excess reaches the implied upper
    /// endpoint `sigma / |gamma|`.
    pub data_consistent: bool,
    /// Log-likelihood or log-posterior at the optimum, for optimizing methods.
    pub objective_value: Option<f64>,
}

impl FitResult {
    pub(crate) fn build(s: &ExceedanceSample, sigma: f64, gamma: f64, method: Method, converged: bool, objective_value: Option<f64>) -> Self {
        FitResult { sigma, gamma, method, converged, data_consistent: data_consistent(s, sigma, gamma), objective_value }
    }
}

pub fn data_consistent(s: &ExceedanceSample, sigma: f64, gamma: f64) -> bool {
    !(gamma < 0.0 && s.max_excess() >= sigma / gamma.abs())
}

/// Log-likelihood of zero-located excesses,
/// `-n ln sigma - (1/gamma + 1) sum ln(1 + gamma x / sigma)`;
/// negative infinity outside the parameter space or support.
pub fn log_likelihood(s: &ExceedanceSample, sigma: f64, gamma: f64) -> f64 {
    if !(sigma > 0.0) || !sigma.is_finite() || !gamma.is_finite() {
        return f64::NEG_INFINITY;
    }
    let xs = s.excesses();
    let n = xs.len() as f64;
    let ln_sigma = sigma.ln();
    if is_exponential(gamma) {
        return -n * ln_sigma - xs.iter().sum::<f64>() / sigma;
    }
    let ratio = gamma / sigma;
    let mut acc = 0.0;
    for &x in xs {
        let t = ratio * x;
        if !(t > -1.0) {
            return f64::NEG_INFINITY;
        }
        acc += t.ln_1p();
    }
    -n * ln_sigma - (1.0 / gamma + 1.0) * acc
}

pub fn fit_mom(s: &ExceedanceSample) -> Result<FitResult> {
    s.require(2)?;
    let m = stats::mean(s.excesses());
    let v = stats::sample_variance(s.excesses());
    if !(v > 0.0) {
        return Err(Error::InsufficientData("zero sample variance".into()));
    }
    let r = m * m / v;
    let gamma = 0.5 * (1.0 - r);
    let sigma = 0.5 * m * (1.0 + r);
    Ok(FitResult::build(s, sigma, gamma, Method::Mom, true, None))
}

/// Plotting position of the `i`-th (1-based) ascending order statistic.
fn plotting_position(i: usize, n: usize) -> f64 {
    (i as f64 - 0.35) / n as f64
}

pub fn fit_pwm(s: &ExceedanceSample) -> Result<FitResult> {
    s.require(2)?;
    let sorted = stats::sorted_copy(s.excesses());
    let n = sorted.len();
    let a0 = stats::mean(&sorted);
    let a1 = sorted.iter().enumerate().map(|(i, x)| (1.0 - plotting_position(i + 1, n)) * x).sum::<f64>() / n as f64;
    let (sigma, gamma) = pwm_from_moments(a0, a1)?;
    if !(sigma > 0.0) {
        return Err(Error::DegenerateMoments(format!("weighted moments a0={a0}, a1={a1} give scale {sigma}")));
    }
    Ok(FitResult::build(s, sigma, gamma, Method::Pwm, true, None))
}

/// Solves the weighted-moment identities `a_s = sigma / ((s+1)(s+1+k))`,
/// `s = 0, 1`, returning `(sigma, gamma = -k)`.
pub fn pwm_from_moments(a0: f64, a1: f64) -> Result<(f64, f64)> {
    let denom = a0 - 2.0 * a1;
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::DegenerateMoments(format!("a0 - 2 a1 = {denom}")));
    }
    let k = a0 / denom - 2.0;
    let sigma = 2.0 * a0 * a1 / denom;
    Ok((sigma, -k))
}

/// Scale MLE of the exponential sub-model (`gamma = 0`): the sample mean.
pub fn exponential_mle(s: &ExceedanceSample) -> f64 {
    stats::mean(s.excesses())
}

pub(crate) const GAMMA_LOWER_GUARD: f64 = -0.99;
pub(crate) const GAMMA_UPPER_GUARD: f64 = 10.0;

fn solver() -> NelderMead {
    NelderMead { tolerance: 1e-8, max_evaluations: 2000, initial_step: vec![0.1, 0.1], restarts: 1 }
}

/// Maximizes `objective(sigma, gamma)` over `(ln sigma, gamma)` with the
/// shape held inside the guard interval. Returns `(sigma, gamma, value,
/// converged)`.
pub(crate) fn maximize<F>(s: &ExceedanceSample, objective: F) -> (f64, f64, f64, bool)
where
    F: Fn(f64, f64) -> f64,
{
    let inside = |g: f64| (GAMMA_LOWER_GUARD..=GAMMA_UPPER_GUARD).contains(&g);
    let negated = |x: &[f64]| {
        if !inside(x[1]) {
            return f64::INFINITY;
        }
        -objective(x[0].exp(), x[1])
    };

    let fallback = [exponential_mle(s).ln(), 0.1];
    let start = match fit_mom(s) {
        Ok(f) if inside(f.gamma) && f.sigma > 0.0 && negated(&[f.sigma.ln(), f.gamma]).is_finite() => [f.sigma.ln(), f.gamma],
        _ => fallback,
    };

    let m = solver().minimize(negated, &start);
    let sigma = m.x[0].exp();
    let gamma = m.x[1];
    let pinned = gamma - GAMMA_LOWER_GUARD < 1e-6;
    (sigma, gamma, -m.value, m.converged && !pinned && m.value.is_finite())
}

pub fn fit_mle(s: &ExceedanceSample) -> Result<FitResult> {
    s.require(2)?;
    let (sigma, gamma, value, converged) = maximize(s, |sg, g| log_likelihood(s, sg, g));
    Ok(FitResult::build(s, sigma, gamma, Method::Mle, converged, Some(value)))
}
