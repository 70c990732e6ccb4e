//! Value-at-Risk and Expected Shortfall: closed forms for the GPD tail,
//! posterior bands over a horizon grid, and the historical and Normal
//! baselines they are compared with.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bayes::{credible_interval_sorted, PosteriorDraws};
use crate::error::{Error, Result};
use crate::estimators::ExceedanceSample;
use crate::gpd::{check_open_unit, GpdParams};
use crate::stats;

/// Loss exceeded with probability `alpha`: `mu + (alpha^-gamma - 1) sigma / gamma`.
pub fn var_closed_form(p: &GpdParams, alpha: f64) -> Result<f64> {
    check_open_unit(alpha, "alpha")?;
    p.isf(alpha)
}

/// Mean loss beyond the `alpha` VaR: `VaR + sigma alpha^-gamma / (1 - gamma)`.
pub fn es_closed_form(p: &GpdParams, alpha: f64) -> Result<f64> {
    if p.gamma() >= 1.0 {
        return Err(Error::InfiniteMean { gamma: p.gamma() });
    }
    let var = var_closed_form(p, alpha)?;
    Ok(var + p.sigma() * alpha.powf(-p.gamma()) / (1.0 - p.gamma()))
}

/// Converts a daily tail probability into a tail probability within the
/// exceedance sample: `alpha_day * n_total / n_exceed`.
pub fn rescale_alpha(alpha_day: f64, s: &ExceedanceSample) -> Result<f64> {
    if !(alpha_day > 0.0) || !alpha_day.is_finite() {
        return Err(Error::ProbabilityDomain(format!("alpha must be positive, got {alpha_day}")));
    }
    let rescaled = alpha_day * s.n_total() as f64 / s.n_exceed() as f64;
    if rescaled >= 1.0 {
        return Err(Error::HorizonTooShort { rescaled });
    }
    Ok(rescaled)
}

/// How the point curve is summarized from the posterior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PointEstimate {
    /// Posterior mean of the per-draw risk measures.
    #[default]
    MeanOfDraws,
    /// Quantile (and tail mean) of the posterior predictive mixture.
    Predictive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskQuery {
    /// Trading days per expected exceedance; `alpha_day = 1 / horizon`.
    pub horizons: Vec<f64>,
    /// Credible level of the bands.
    pub level: f64,
    pub point: PointEstimate,
}

impl RiskQuery {
    pub fn from_horizons(horizons: Vec<f64>, level: f64) -> Result<Self> {
        let q = RiskQuery { horizons, level, point: PointEstimate::default() };
        q.validate()?;
        Ok(q)
    }

    pub fn from_alphas(alphas: &[f64], level: f64) -> Result<Self> {
        for &a in alphas {
            check_open_unit(a, "daily alpha")?;
        }
        Self::from_horizons(alphas.iter().map(|a| 1.0 / a).collect(), level)
    }

    pub fn with_point(mut self, point: PointEstimate) -> Self {
        self.point = point;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizons.is_empty() {
            return Err(Error::EmptyInput("no horizons requested".into()));
        }
        if let Some(h) = self.horizons.iter().find(|h| !(**h > 1.0) || !h.is_finite()) {
            return Err(Error::Validation(format!("horizons must exceed one day, got {h}")));
        }
        check_open_unit(self.level, "credible level")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskPoint {
    pub horizon: f64,
    pub alpha_day: f64,
    /// `alpha_day` rescaled to the exceedance sample.
    pub alpha_tail: f64,
    pub var_mean: f64,
    pub var_lo: f64,
    pub var_hi: f64,
    pub es_mean: f64,
    pub es_lo: f64,
    pub es_hi: f64,
    /// Absent beyond the data limit.
    pub var_hist: Option<f64>,
    pub var_normal: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskCurve {
    pub level: f64,
    pub points: Vec<RiskPoint>,
    pub n_draws: usize,
    /// Draws with `gamma >= 1`, left out of every ES summary.
    pub es_excluded: usize,
}

impl RiskCurve {
    /// Fills in the historical and Normal baselines from the full loss series.
    pub fn attach_baselines(&mut self, losses: &[f64]) -> Result<()> {
        let sorted = stats::sorted_copy(losses);
        for pt in &mut self.points {
            pt.var_hist = match historical_var_sorted(&sorted, pt.alpha_day) {
                Ok(v) => Some(v),
                Err(Error::NotEstimable { .. }) => None,
                Err(e) => return Err(e),
            };
            pt.var_normal = Some(normal_var(losses, pt.alpha_day)?);
        }
        Ok(())
    }
}

pub fn bayes_risk_curve(d: &PosteriorDraws, s: &ExceedanceSample, q: &RiskQuery) -> Result<RiskCurve> {
    if d.is_empty() {
        return Err(Error::EmptyChain);
    }
    q.validate()?;
    let mu = s.threshold();
    let params: Vec<GpdParams> = d.draws.iter().map(|x| GpdParams::new(mu, x.sigma, x.gamma)).collect::<Result<_>>()?;
    let es_excluded = params.iter().filter(|p| p.gamma() >= 1.0).count();

    let mut points = Vec::with_capacity(q.horizons.len());
    for &horizon in &q.horizons {
        let alpha_day = 1.0 / horizon;
        let alpha = rescale_alpha(alpha_day, s)?;

        let mut vars = params.iter().map(|p| var_closed_form(p, alpha)).collect::<Result<Vec<_>>>()?;
        let mut ess: Vec<f64> = params.iter().filter_map(|p| es_closed_form(p, alpha).ok()).collect();

        let (var_mean, es_mean) = match q.point {
            PointEstimate::MeanOfDraws => (stats::mean(&vars), if ess.is_empty() { f64::NAN } else { stats::mean(&ess) }),
            PointEstimate::Predictive => {
                let v = predictive_quantile(&params, alpha, &vars);
                (v, predictive_tail_mean(&params, v))
            }
        };

        vars.sort_by(f64::total_cmp);
        ess.sort_by(f64::total_cmp);
        let (var_lo, var_hi) = credible_interval_sorted(&vars, q.level);
        let (es_lo, es_hi) = if ess.is_empty() { (f64::NAN, f64::NAN) } else { credible_interval_sorted(&ess, q.level) };

        points.push(RiskPoint { horizon, alpha_day, alpha_tail: alpha, var_mean, var_lo, var_hi, es_mean, es_lo, es_hi, var_hist: None, var_normal: None });
    }

    Ok(RiskCurve { level: q.level, points, n_draws: d.len(), es_excluded })
}

// Solves mean_j S_j(x) = alpha; the root lies between the smallest and
// largest per-draw quantiles.
fn predictive_quantile(params: &[GpdParams], alpha: f64, vars: &[f64]) -> f64 {
    let mixture_sf = |x: f64| params.iter().map(|p| p.sf(x)).sum::<f64>() / params.len() as f64;
    let mut lo = vars.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = vars.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 0.0 {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mixture_sf(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

// E[X | X > v] under the mixture of finite-mean components, for v at or
// above the common location.
fn predictive_tail_mean(params: &[GpdParams], v: f64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for p in params.iter().filter(|p| p.gamma() < 1.0) {
        let sf = p.sf(v);
        if sf > 0.0 {
            let mean_excess = (p.sigma() + p.gamma() * (v - p.mu())) / (1.0 - p.gamma());
            num += sf * (v + mean_excess);
            den += sf;
        }
    }
    if den > 0.0 {
        num / den
    } else {
        f64::NAN
    }
}

/// Empirical `(1 - alpha_day)` quantile of the losses.
pub fn historical_var(losses: &[f64], alpha_day: f64) -> Result<f64> {
    if losses.is_empty() {
        return Err(Error::EmptyInput("no losses".into()));
    }
    historical_var_sorted(&stats::sorted_copy(losses), alpha_day)
}

fn historical_var_sorted(sorted: &[f64], alpha_day: f64) -> Result<f64> {
    check_open_unit(alpha_day, "alpha")?;
    let n = sorted.len();
    if alpha_day * ((n + 1) as f64) < 1.0 {
        return Err(Error::NotEstimable { alpha: alpha_day, n });
    }
    Ok(stats::quantile_sorted(sorted, 1.0 - alpha_day))
}

/// `m + s z(1 - alpha_day)` from the mean and standard deviation of all losses.
pub fn normal_var(losses: &[f64], alpha_day: f64) -> Result<f64> {
    if losses.len() < 2 {
        return Err(Error::InsufficientData("normal VaR needs at least two losses".into()));
    }
    let m = stats::mean(losses);
    let sd = stats::sample_variance(losses).sqrt();
    if !(sd > 0.0) {
        return Err(Error::InsufficientData("losses have zero standard deviation".into()));
    }
    Ok(m + sd * stats::normal_quantile(1.0 - alpha_day)?)
}

/// Posterior predictive draws by composition: `n_per_draw` GPD samples at
/// every posterior draw, located at `threshold`.
pub fn predictive_sample<R: Rng + ?Sized>(d: &PosteriorDraws, threshold: f64, n_per_draw: usize, rng: &mut R) -> Result<Vec<f64>> {
    if d.is_empty() {
        return Err(Error::EmptyChain);
    }
    let mut out = Vec::with_capacity(d.len() * n_per_draw);
    for x in &d.draws {
        let p = GpdParams::new(threshold, x.sigma, x.gamma)?;
        out.extend(p.sample(n_per_draw, rng));
    }
    Ok(out)
}
