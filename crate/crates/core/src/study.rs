//! Monte Carlo comparison of estimators by root mean square error over
//! simulated GPD samples.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayes::{metropolis, posterior_mean, posterior_mode, McmcConfig, Prior};
use crate::error::{Error, Result};
use crate::estimators::{fit_mle, fit_mom, fit_pwm, ExceedanceSample, Method};
use crate::gpd::GpdParams;
use crate::rng::{self, derive_seed};

pub fn rmse(estimates: &[f64], truth: f64) -> Result<f64> {
    if estimates.is_empty() {
        return Err(Error::EmptyInput("rmse of no estimates".into()));
    }
    let ss: f64 = estimates.iter().map(|e| (e - truth) * (e - truth)).sum();
    Ok((ss / estimates.len() as f64).sqrt())
}

/// The estimator columns of the comparison table.
pub fn default_estimators() -> Vec<Method> {
    vec![Method::Mom, Method::Pwm, Method::Mode(Prior::Mdi), Method::Mode(Prior::Jeffreys), Method::Mean(Prior::Mdi), Method::Mean(Prior::Jeffreys)]
}

/// Chain settings for desk-scale studies: 2000 kept draws after 2000 burn-in.
pub fn default_study_mcmc() -> McmcConfig {
    McmcConfig { n_draws: 2_000, burn_in: 2_000, ..McmcConfig::default() }
}

pub const DEFAULT_REPLICATIONS: usize = 1_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyScenario {
    pub n: usize,
    pub sigma: f64,
    pub gamma: f64,
    pub replications: usize,
    pub mcmc: McmcConfig,
    pub estimators: Vec<Method>,
}

impl StudyScenario {
    pub fn new(n: usize, sigma: f64, gamma: f64, replications: usize) -> Self {
        StudyScenario { n, sigma, gamma, replications, mcmc: default_study_mcmc(), estimators: default_estimators() }
    }

    pub fn with_estimators(mut self, estimators: Vec<Method>) -> Self {
        self.estimators = estimators;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications < 1 {
            return Err(Error::Validation("replications must be at least 1".into()));
        }
        if self.n < 2 {
            return Err(Error::Validation("scenario sample size must be at least 2".into()));
        }
        GpdParams::excess(self.sigma, self.gamma)?;
        self.mcmc.validate()
    }
}

/// n in {40, 80, 120} x gamma in {-0.2, 0.3, 0.8} at sigma = 1, then the
/// (n = 120, gamma = 0.3, sigma = 0.008) scenario.
pub fn default_grid(replications: usize) -> Vec<StudyScenario> {
    let mut out = Vec::new();
    for n in [40, 80, 120] {
        for gamma in [-0.2, 0.3, 0.8] {
            out.push(StudyScenario::new(n, 1.0, gamma, replications));
        }
    }
    out.push(StudyScenario::new(120, 0.008, 0.3, replications));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Sigma,
    Gamma,
}

/// Running sums of squared errors for one estimator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorAccumulator {
    pub sum_sq_sigma: f64,
    pub sum_sq_gamma: f64,
    pub used: usize,
    pub failures: usize,
}

impl ErrorAccumulator {
    pub fn record(&mut self, estimate: Option<(f64, f64)>, truth: (f64, f64)) {
        match estimate {
            Some((s, g)) => {
                self.sum_sq_sigma += (s - truth.0) * (s - truth.0);
                self.sum_sq_gamma += (g - truth.1) * (g - truth.1);
                self.used += 1;
            }
            None => self.failures += 1,
        }
    }

    pub fn merge(&mut self, other: &ErrorAccumulator) {
        self.sum_sq_sigma += other.sum_sq_sigma;
        self.sum_sq_gamma += other.sum_sq_gamma;
        self.used += other.used;
        self.failures += other.failures;
    }

    pub fn rmse(&self, param: Param) -> Option<f64> {
        if self.used == 0 {
            return None;
        }
        let ss = match param {
            Param::Sigma => self.sum_sq_sigma,
            Param::Gamma => self.sum_sq_gamma,
        };
        Some((ss / self.used as f64).sqrt())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorCell {
    pub method: Method,
    pub errors: ErrorAccumulator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub n: usize,
    pub sigma: f64,
    pub gamma: f64,
    pub replications: usize,
    pub cells: Vec<EstimatorCell>,
}

impl ScenarioReport {
    pub fn cell(&self, method: Method) -> Option<&EstimatorCell> {
        self.cells.iter().find(|c| c.method == method)
    }

    pub fn rmse(&self, method: Method, param: Param) -> Option<f64> {
        self.cell(method).and_then(|c| c.errors.rmse(param))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub master_seed: u64,
    pub scenarios: Vec<ScenarioReport>,
}

impl StudyReport {
    /// Table with one row per scenario and parameter and one RMSE column
    /// per estimator, followed by per-estimator failure counts.
    pub fn to_csv(&self) -> String {
        let methods: Vec<Method> = self.scenarios.first().map(|s| s.cells.iter().map(|c| c.method).collect()).unwrap_or_default();
        let mut out = String::from("n,sigma,gamma,parameter,replications");
        for m in &methods {
            out.push(',');
            out.push_str(&m.label());
        }
        for m in &methods {
            out.push_str(&format!(",{}_failures", m.label()));
        }
        out.push('\n');
        for s in &self.scenarios {
            for (param, name) in [(Param::Sigma, "sigma"), (Param::Gamma, "gamma")] {
                out.push_str(&format!("{},{},{},{},{}", s.n, s.sigma, s.gamma, name, s.replications));
                for m in &methods {
                    out.push(',');
                    if let Some(v) = s.rmse(*m, param) {
                        out.push_str(&v.to_string());
                    }
                }
                for m in &methods {
                    out.push_str(&format!(",{}", s.cell(*m).map_or(0, |c| c.errors.failures)));
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Point estimate of `(sigma, gamma)` from one method; `None` marks a
/// failed replication (error or non-convergence).
pub fn estimate(method: Method, s: &ExceedanceSample, mcmc: &McmcConfig) -> Option<(f64, f64)> {
    let fit = match method {
        Method::Mom => fit_mom(s),
        Method::Pwm => fit_pwm(s),
        Method::Mle => fit_mle(s),
        Method::Mode(prior) => posterior_mode(s, prior),
        Method::Mean(prior) => {
            return metropolis(s, prior, mcmc).and_then(|d| posterior_mean(&d)).ok();
        }
    };
    match fit {
        Ok(f) if f.converged && f.sigma.is_finite() && f.gamma.is_finite() && f.sigma > 0.0 => Some((f.sigma, f.gamma)),
        _ => None,
    }
}

/// Replications `range` of scenario `index`, one accumulator per estimator
/// in the scenario's order. Each replication draws from
/// `derive_seed(master, [index, rep])`; chain `k` uses
/// `derive_seed(master, [index, rep, k + 1])`.
pub fn run_replications(scenario: &StudyScenario, index: usize, master_seed: u64, range: std::ops::Range<usize>) -> Vec<ErrorAccumulator> {
    let truth = (scenario.sigma, scenario.gamma);
    let dist = GpdParams::excess(scenario.sigma, scenario.gamma).expect("validated scenario");
    let per_rep: Vec<Vec<Option<(f64, f64)>>> = range
        .into_par_iter()
        .map(|rep| {
            let path = [index as u64, rep as u64];
            let mut r = rng::stream(derive_seed(master_seed, &path));
            let data = dist.sample(scenario.n, &mut r);
            let sample = ExceedanceSample::from_excesses(data).expect("GPD draws are positive");
            scenario
                .estimators
                .iter()
                .enumerate()
                .map(|(k, &m)| {
                    let cfg = McmcConfig { seed: derive_seed(master_seed, &[index as u64, rep as u64, k as u64 + 1]), ..scenario.mcmc.clone() };
                    estimate(m, &sample, &cfg)
                })
                .collect()
        })
        .collect();

    let mut acc = vec![ErrorAccumulator::default(); scenario.estimators.len()];
    for rep in &per_rep {
        for (a, e) in acc.iter_mut().zip(rep) {
            a.record(*e, truth);
        }
    }
    acc
}

pub fn run_study(scenarios: &[StudyScenario], master_seed: u64) -> Result<StudyReport> {
    for s in scenarios {
        s.validate()?;
    }
    let reports = scenarios
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let acc = run_replications(s, i, master_seed, 0..s.replications);
            ScenarioReport {
                n: s.n,
                sigma: s.sigma,
                gamma: s.gamma,
                replications: s.replications,
                cells: s.estimators.iter().zip(acc).map(|(&method, errors)| EstimatorCell { method, errors }).collect(),
            }
        })
        .collect();
    Ok(StudyReport { master_seed, scenarios: reports })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rmse_examples() {
        assert!((rmse(&[0.2, 0.4], 0.3).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(rmse(&[0.3], 0.3).unwrap(), 0.0);
        assert!((rmse(&[1.0, 2.0, 3.0], 0.0).unwrap() - (14.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(rmse(&[], 0.0).is_err());
    }

    #[test]
    fn grid_layout() {
        let g = default_grid(5);
        assert_eq!(g.len(), 10);
        assert_eq!((g[9].n, g[9].sigma, g[9].gamma), (120, 0.008, 0.3));
        assert!(g.iter().all(|s| s.replications == 5 && s.estimators.len() == 6));
    }

    #[test]
    fn single_replication_reports_one_squared_error() {
        let sc = StudyScenario::new(50, 1.0, 0.3, 1).with_estimators(vec![Method::Mom]);
        let report = run_study(std::slice::from_ref(&sc), 99).unwrap();
        let mut r = rng::stream(derive_seed(99, &[0, 0]));
        let data = GpdParams::excess(1.0, 0.3).unwrap().sample(50, &mut r);
        let f = fit_mom(&ExceedanceSample::from_excesses(data).unwrap()).unwrap();
        let cell = report.scenarios[0].cell(Method::Mom).unwrap();
        assert_eq!(cell.errors.used, 1);
        assert_eq!(report.scenarios[0].rmse(Method::Mom, Param::Gamma).unwrap(), (f.gamma - 0.3).abs());
        assert_eq!(report.scenarios[0].rmse(Method::Mom, Param::Sigma).unwrap(), (f.sigma - 1.0).abs());
    }

    #[test]
    fn failures_are_counted_not_used() {
        let mut a = ErrorAccumulator::default();
        a.record(None, (1.0, 0.3));
        a.record(Some((1.1, 0.3)), (1.0, 0.3));
        assert_eq!((a.used, a.failures), (1, 1));
        assert!((a.rmse(Param::Sigma).unwrap() - 0.1).abs() < 1e-12);
        assert_eq!(ErrorAccumulator::default().rmse(Param::Gamma), None);
    }

    #[test]
    fn csv_layout() {
        let sc = StudyScenario::new(30, 1.0, 0.3, 2).with_estimators(vec![Method::Mom, Method::Pwm]);
        let csv = run_study(&[sc], 1).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,sigma,gamma,parameter,replications,MOM,PWM,MOM_failures,PWM_failures");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("30,1,0.3,sigma,2,"));
        assert!(lines[2].starts_with("30,1,0.3,gamma,2,"));
    }
}
