//! Threshold workflow: exceedance extraction, mean-excess and Pareto
//! quantile plot data, and multi-threshold sensitivity sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayes::{metropolis, posterior_mean_fit, McmcConfig, PosteriorDraws, Prior};
use crate::error::{Error, Result};
use crate::estimators::{ExceedanceSample, FitResult};
use crate::risk::{bayes_risk_curve, RiskCurve, RiskQuery};
use crate::rng::derive_seed;
use crate::stats;

/// Default threshold of the demo pipeline: a one-day loss of 3.3%.
pub const DEFAULT_THRESHOLD: f64 = 0.033;

/// Minimum exceedances a sweep entry needs before it is fitted.
pub const DEFAULT_MIN_EXCEEDANCES: usize = 10;

/// Losses strictly above `threshold`, shifted down by it.
pub fn extract_exceedances(losses: &[f64], threshold: f64) -> Result<ExceedanceSample> {
    extract_with_minimum(losses, threshold, 2)
}

pub fn extract_with_minimum(losses: &[f64], threshold: f64, required: usize) -> Result<ExceedanceSample> {
    let excesses: Vec<f64> = losses.iter().filter(|&&x| x > threshold).map(|&x| x - threshold).collect();
    if excesses.len() < required.max(1) {
        return Err(Error::InsufficientExceedances { threshold, found: excesses.len(), required: required.max(1) });
    }
    ExceedanceSample::new(threshold, excesses, losses.len())
}

/// `(u, e(u))` for every distinct loss `u` below the maximum, where
/// `e(u)` is the mean of `x - u` over `x > u`.
pub fn mean_excess_data(losses: &[f64]) -> Result<Vec<(f64, f64)>> {
    let sorted = stats::sorted_copy(losses);
    if sorted.iter().any(|x| !x.is_finite()) {
        return Err(Error::Validation("losses must be finite".into()));
    }
    let n = sorted.len();
    if n < 2 || sorted[0] == sorted[n - 1] {
        return Err(Error::InsufficientData("mean excess needs at least two distinct losses".into()));
    }
    let mut tail_sum = vec![0.0; n + 1];
    for i in (0..n).rev() {
        tail_sum[i] = tail_sum[i + 1] + sorted[i];
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let u = sorted[i];
        let mut j = i;
        while j + 1 < n && sorted[j + 1] == u {
            j += 1;
        }
        let above = n - (j + 1);
        if above == 0 {
            break;
        }
        out.push((u, tail_sum[j + 1] / above as f64 - u));
        i = j + 1;
    }
    Ok(out)
}

/// Pareto quantile plot pairs `(ln((n+1)/i), ln x_(n-i+1))`, `i = 1..n`,
/// over the positive losses in descending order.
pub fn pareto_quantile_data(losses: &[f64]) -> Result<Vec<(f64, f64)>> {
    let mut positive: Vec<f64> = losses.iter().copied().filter(|&x| x > 0.0).collect();
    if positive.len() < 2 {
        return Err(Error::InsufficientData(format!("Pareto quantile plot needs two positive losses, got {}", positive.len())));
    }
    positive.sort_by(|a, b| b.total_cmp(a));
    let n1 = (positive.len() + 1) as f64;
    Ok(positive.iter().enumerate().map(|(k, x)| ((n1 / (k + 1) as f64).ln(), x.ln())).collect())
}

/// The single-threshold pipeline: exceedances, posterior draws, posterior
/// mean fit and a risk curve with baselines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub sample: ExceedanceSample,
    pub draws: PosteriorDraws,
    pub fit: FitResult,
    pub curve: RiskCurve,
}

pub fn analyze(losses: &[f64], threshold: f64, prior: Prior, cfg: &McmcConfig, q: &RiskQuery, min_exceed: usize) -> Result<Analysis> {
    let sample = extract_with_minimum(losses, threshold, min_exceed.max(2))?;
    let draws = metropolis(&sample, prior, cfg)?;
    let fit = posterior_mean_fit(&sample, prior, &draws)?;
    let mut curve = bayes_risk_curve(&draws, &sample, q)?;
    curve.attach_baselines(losses)?;
    Ok(Analysis { sample, draws, fit, curve })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub threshold: f64,
    pub n_exceed: usize,
    pub seed: u64,
    pub fit: Option<FitResult>,
    pub acceptance_rate: Option<f64>,
    pub curve: Option<RiskCurve>,
    pub error_kind: Option<String>,
    pub error: Option<String>,
}

impl SweepEntry {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSweep {
    pub master_seed: u64,
    pub entries: Vec<SweepEntry>,
}

/// Runs [`analyze`] at every threshold. Entry `i` uses the chain seed
/// `derive_seed(cfg.seed, [i])`; failures are recorded per entry.
pub fn sweep(losses: &[f64], thresholds: &[f64], prior: Prior, cfg: &McmcConfig, q: &RiskQuery, min_exceed: usize) -> ThresholdSweep {
    let entries = thresholds
        .par_iter()
        .enumerate()
        .map(|(i, &threshold)| {
            let seed = derive_seed(cfg.seed, &[i as u64]);
            let entry_cfg = McmcConfig { seed, ..cfg.clone() };
            let n_exceed = losses.iter().filter(|&&x| x > threshold).count();
            match analyze(losses, threshold, prior, &entry_cfg, q, min_exceed) {
                Ok(a) => SweepEntry {
                    threshold,
                    n_exceed,
                    seed,
                    fit: Some(a.fit),
                    acceptance_rate: Some(a.draws.acceptance_rate),
                    curve: Some(a.curve),
                    error_kind: None,
                    error: None,
                },
                Err(e) => SweepEntry {
                    threshold,
                    n_exceed,
                    seed,
                    fit: None,
                    acceptance_rate: None,
                    curve: None,
                    error_kind: Some(e.kind().to_string()),
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    ThresholdSweep { master_seed: cfg.seed, entries }
}
