//! Generalized Pareto distribution: density, distribution function,
//! quantiles and inverse-transform sampling.
//!
//! The density with location `mu`, scale `sigma` and shape `gamma` is
//!
//! ```text
//! f(x) = (1/sigma) * (1 + gamma (x - mu) / sigma)^(-1/gamma - 1)
//! ```
//!
//! on `[mu, inf)` for `gamma >= 0` and on `[mu, mu - sigma/gamma)` for
//! `gamma < 0`. When `|gamma|` is below [`SMALL_GAMMA`] every formula is
//! evaluated through its exponential limit.

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this magnitude the shape is treated as exactly zero.
pub const SMALL_GAMMA: f64 = 1e-8;

#[inline]
pub(crate) fn is_exponential(gamma: f64) -> bool {
    gamma.abs() < SMALL_GAMMA
}

/// Location, scale and shape of a GPD.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpdParams {
    mu: f64,
    sigma: f64,
    gamma: f64,
}

impl GpdParams {
    pub fn new(mu: f64, sigma: f64, gamma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::ParameterDomain(format!("sigma must be positive and finite, got {sigma}")));
        }
        if !mu.is_finite() || !gamma.is_finite() {
            return Err(Error::ParameterDomain(format!("mu and gamma must be finite, got mu={mu}, gamma={gamma}")));
        }
        Ok(GpdParams { mu, sigma, gamma })
    }

    /// Zero-location parameters, as used for shifted exceedances.
    pub fn excess(sigma: f64, gamma: f64) -> Result<Self> {
        Self::new(0.0, sigma, gamma)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn with_location(self, mu: f64) -> Result<Self> {
        Self::new(mu, self.sigma, self.gamma)
    }

    /// Finite upper end of the support when `gamma < 0`. The endpoint
    /// itself is excluded from the support.
    pub fn upper_endpoint(&self) -> Option<f64> {
        if self.gamma < 0.0 && !is_exponential(self.gamma) {
            Some(self.mu - self.sigma / self.gamma)
        } else {
            None
        }
    }

    pub fn in_support(&self, x: f64) -> bool {
        x >= self.mu && self.upper_endpoint().is_none_or(|end| x < end)
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        if x.is_nan() || x < self.mu {
            return f64::NEG_INFINITY;
        }
        let z = (x - self.mu) / self.sigma;
        if is_exponential(self.gamma) {
            if z.is_infinite() {
                return f64::NEG_INFINITY;
            }
            return -self.sigma.ln() - z;
        }
        let t = self.gamma * z;
        if !(1.0 + t > 0.0) || t.is_infinite() {
            return f64::NEG_INFINITY;
        }
        -self.sigma.ln() - (1.0 / self.gamma + 1.0) * t.ln_1p()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    /// Survival probability `P(X > x)`.
    pub fn sf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= self.mu {
            return 1.0;
        }
        (-self.cumulative_hazard(x)).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= self.mu {
            return 0.0;
        }
        (-(-self.cumulative_hazard(x)).exp_m1()).clamp(0.0, 1.0)
    }

    // -ln P(X > x) for x > mu.
    fn cumulative_hazard(&self, x: f64) -> f64 {
        let z = (x - self.mu) / self.sigma;
        if is_exponential(self.gamma) {
            return z;
        }
        let t = self.gamma * z;
        if !(1.0 + t > 0.0) {
            return f64::INFINITY;
        }
        t.ln_1p() / self.gamma
    }

    /// Value exceeded with survival probability `u`:
    /// `mu + (u^-gamma - 1) sigma / gamma`.
    pub fn isf(&self, u: f64) -> Result<f64> {
        check_open_unit(u, "survival probability")?;
        Ok(self.isf_unchecked(u.ln()))
    }

    fn isf_unchecked(&self, ln_u: f64) -> f64 {
        if is_exponential(self.gamma) {
            self.mu - self.sigma * ln_u
        } else {
            self.mu + self.sigma / self.gamma * (-self.gamma * ln_u).exp_m1()
        }
    }

    /// Inverse distribution function.
    pub fn quantile(&self, prob: f64) -> Result<f64> {
        check_open_unit(prob, "probability")?;
        Ok(self.isf_unchecked((-prob).ln_1p()))
    }

    /// Draws `n` values by applying the inverse transform to open-interval
    /// uniforms, read as survival probabilities.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n).map(|_| self.draw(rng)).collect()
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        self.isf_unchecked(u.ln())
    }

    /// `E[X]`, finite only for `gamma < 1`.
    pub fn mean(&self) -> Option<f64> {
        (self.gamma < 1.0).then(|| self.mu + self.sigma / (1.0 - self.gamma))
    }
}

pub(crate) fn check_open_unit(p: f64, what: &str) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::ProbabilityDomain(format!("{what} must lie in (0, 1), got {p}")))
    }
}
