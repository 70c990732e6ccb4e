//! C ABI for `tailrisk`.
//!
//! Conventions:
//! - Every fallible call returns a [`TrStatus`]; results go through out
//!   pointers that are written only on success.
//! - Samples and posterior draws are opaque handles created by
//!   `tr_*_new`-style calls and released with the matching `*_free`.
//! - After a failure, [`tr_last_error_message`] describes it (per thread).
//! - Absent values (for example a historical VaR beyond the data limit) are
//!   reported as NaN.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use tailrisk::bayes::{self, McmcConfig, PosteriorDraws, Prior};
use tailrisk::estimators::{self, ExceedanceSample, FitResult};
use tailrisk::risk::{self, RiskQuery};
use tailrisk::{rng, threshold, Error, GpdParams};

/// Outcome of a call. Values other than `TR_STATUS_OK` mirror the library's
/// error kinds, plus pointer and panic failures of the boundary itself.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrStatus {
    Ok = 0,
    ParameterDomain = 1,
    ProbabilityDomain = 2,
    InsufficientData = 3,
    InsufficientExceedances = 4,
    DegenerateMoments = 5,
    InfiniteMean = 6,
    HorizonTooShort = 7,
    NotEstimable = 8,
    EmptyChain = 9,
    EmptyInput = 10,
    Parse = 11,
    Validation = 12,
    Io = 13,
    NullPointer = 14,
    Panic = 15,
}

impl From<&Error> for TrStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::ParameterDomain(_) => TrStatus::ParameterDomain,
            Error::ProbabilityDomain(_) => TrStatus::ProbabilityDomain,
            Error::InsufficientData(_) => TrStatus::InsufficientData,
            Error::InsufficientExceedances { .. } => TrStatus::InsufficientExceedances,
            Error::DegenerateMoments(_) => TrStatus::DegenerateMoments,
            Error::InfiniteMean { .. } => TrStatus::InfiniteMean,
            Error::HorizonTooShort { .. } => TrStatus::HorizonTooShort,
            Error::NotEstimable { .. } => TrStatus::NotEstimable,
            Error::EmptyChain => TrStatus::EmptyChain,
            Error::EmptyInput(_) => TrStatus::EmptyInput,
            Error::Parse(_) => TrStatus::Parse,
            Error::Validation(_) => TrStatus::Validation,
            Error::Io(_) => TrStatus::Io,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrMethod {
    Mom = 0,
    Pwm = 1,
    Mle = 2,
    /// Posterior mode under the given prior.
    Mode = 3,
    /// Posterior mean from a Metropolis chain with default settings.
    Mean = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrPrior {
    Mdi = 0,
    Jeffreys = 1,
    Uniform = 2,
}

impl From<TrPrior> for Prior {
    fn from(p: TrPrior) -> Self {
        match p {
            TrPrior::Mdi => Prior::Mdi,
            TrPrior::Jeffreys => Prior::Jeffreys,
            TrPrior::Uniform => Prior::Uniform,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrFit {
    pub sigma: f64,
    pub gamma: f64,
    pub converged: bool,
    pub data_consistent: bool,
    /// NaN for the moment estimators.
    pub objective_value: f64,
}

impl From<&FitResult> for TrFit {
    fn from(f: &FitResult) -> Self {
        TrFit {
            sigma: f.sigma,
            gamma: f.gamma,
            converged: f.converged,
            data_consistent: f.data_consistent,
            objective_value: f.objective_value.unwrap_or(f64::NAN),
        }
    }
}

/// Chain settings. Non-positive proposal scales select the automatic
/// defaults.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrMcmcConfig {
    pub n_draws: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub proposal_scale_sigma: f64,
    pub proposal_scale_gamma: f64,
    pub proposal_correlation: f64,
    pub seed: u64,
    pub adapt: bool,
}

impl From<&TrMcmcConfig> for McmcConfig {
    fn from(c: &TrMcmcConfig) -> Self {
        let scale = |v: f64| (v > 0.0).then_some(v);
        McmcConfig {
            n_draws: c.n_draws,
            burn_in: c.burn_in,
            thinning: c.thinning,
            proposal_scale_sigma: scale(c.proposal_scale_sigma),
            proposal_scale_gamma: scale(c.proposal_scale_gamma),
            proposal_correlation: c.proposal_correlation,
            seed: c.seed,
            adapt: c.adapt,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrRiskPoint {
    pub horizon: f64,
    pub var_mean: f64,
    pub var_lo: f64,
    pub var_hi: f64,
    pub es_mean: f64,
    pub es_lo: f64,
    pub es_hi: f64,
    pub var_hist: f64,
    pub var_normal: f64,
}

/// Opaque exceedance sample.
pub struct TrSample(ExceedanceSample);

/// Opaque posterior draws.
pub struct TrDraws(PosteriorDraws);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard<F>(f: F) -> TrStatus
where
    F: FnOnce() -> Result<(), (TrStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TrStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside tailrisk".into());
            TrStatus::Panic
        }
    }
}

fn lift<T>(r: tailrisk::Result<T>) -> Result<T, (TrStatus, String)> {
    r.map_err(|e| (TrStatus::from(&e), e.to_string()))
}

fn null(what: &str) -> (TrStatus, String) {
    (TrStatus::NullPointer, format!("{what} is null"))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), (TrStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-null and, per the caller contract, valid for writes.
    unsafe { out.write(v) };
    Ok(())
}

unsafe fn view<'a>(data: *const f64, len: usize, what: &str) -> Result<&'a [f64], (TrStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    // SAFETY: caller guarantees `len` readable doubles at `data`.
    Ok(unsafe { slice::from_raw_parts(data, len) })
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (TrStatus, String)> {
    // SAFETY: caller passes a live handle or null.
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

/// Message for the most recent failure on this thread, or NULL. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// NUL-terminated library version.
#[no_mangle]
pub extern "C" fn tr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn params(mu: f64, sigma: f64, gamma: f64) -> Result<GpdParams, (TrStatus, String)> {
    lift(GpdParams::new(mu, sigma, gamma))
}

/// # Safety
/// `out` must be valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn tr_gpd_pdf(mu: f64, sigma: f64, gamma: f64, x: f64, out: *mut f64) -> TrStatus {
    guard(|| unsafe { write(out, params(mu, sigma, gamma)?.pdf(x), "out") })
}

/// # Safety
/// `out` must be valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn tr_gpd_log_pdf(mu: f64, sigma: f64, gamma: f64, x: f64, out: *mut f64) -> TrStatus {
    guard(|| unsafe { write(out, params(mu, sigma, gamma)?.log_pdf(x), "out") })
}

/// # Safety
/// `out` must be valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn tr_gpd_cdf(mu: f64, sigma: f64, gamma: f64, x: f64, out: *mut f64) -> TrStatus {
    guard(|| unsafe { write(out, params(mu, sigma, gamma)?.cdf(x), "out") })
}

/// # Safety
/// `out` must be valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn tr_gpd_quantile(mu: f64, sigma: f64, gamma: f64, prob: f64, out: *mut f64) -> TrStatus {
    guard(|| {
        let q = lift(params(mu, sigma, gamma)?.quantile(prob))?;
        unsafe { write(out, q, "out") }
    })
}

/// Fills `out[0..n]` with GPD draws from the seeded stream.
///
/// # Safety
/// `out` must be valid for writing `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn tr_gpd_sample(mu: f64, sigma: f64, gamma: f64, n: usize, seed: u64, out: *mut f64) -> TrStatus {
    guard(|| {
        let p = params(mu, sigma, gamma)?;
        if n == 0 {
            return Ok(());
        }
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: caller guarantees room for `n` doubles.
        let dst = unsafe { slice::from_raw_parts_mut(out, n) };
        let mut r = rng::stream(seed);
        for slot in dst {
            *slot = p.draw(&mut r);
        }
        Ok(())
    })
}

/// # Safety
/// `out` must be valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn tr_var(mu: f64, sigma: f64, gamma: f64, alpha: f64, out: *mut f64) -> TrStatus {
    guard(|| {
        let v = lift(risk::var_closed_form(&params(mu, sigma, gamma)?, alpha))?;
        unsafe { write(out, v, "out") }
    })
}

/// # Safety
/// `out` must be valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn tr_es(mu: f64, sigma: f64, gamma: f64, alpha: f64, out: *mut f64) -> TrStatus {
    guard(|| {
        let v = lift(risk::es_closed_form(&params(mu, sigma, gamma)?, alpha))?;
        unsafe { write(out, v, "out") }
    })
}

/// Extracts the exceedances of `losses[0..n]` over `threshold` into a new
/// sample handle.
///
/// # Safety
/// `losses` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tr_sample_new(losses: *const f64, n: usize, threshold: f64, out: *mut *mut TrSample) -> TrStatus {
    guard(|| {
        let xs = unsafe { view(losses, n, "losses") }?;
        let s = lift(threshold::extract_exceedances(xs, threshold))?;
        unsafe { write(out, Box::into_raw(Box::new(TrSample(s))), "out") }
    })
}

/// # Safety
/// `sample` must be NULL or a handle from [`tr_sample_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tr_sample_free(sample: *mut TrSample) {
    if !sample.is_null() {
        // SAFETY: produced by Box::into_raw in tr_sample_new.
        drop(unsafe { Box::from_raw(sample) });
    }
}

/// Number of exceedances, or 0 for a NULL handle.
///
/// # Safety
/// `sample` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tr_sample_n_exceed(sample: *const TrSample) -> usize {
    unsafe { sample.as_ref() }.map_or(0, |s| s.0.n_exceed())
}

/// Number of observations the sample was drawn from, or 0 for NULL.
///
/// # Safety
/// `sample` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tr_sample_n_total(sample: *const TrSample) -> usize {
    unsafe { sample.as_ref() }.map_or(0, |s| s.0.n_total())
}

/// Point fit of the excess distribution. `prior` is ignored for the
/// classical methods.
///
/// # Safety
/// `sample` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tr_fit(sample: *const TrSample, method: TrMethod, prior: TrPrior, out: *mut TrFit) -> TrStatus {
    guard(|| {
        let s = &unsafe { deref(sample, "sample") }?.0;
        let prior = Prior::from(prior);
        let fit = lift(match method {
            TrMethod::Mom => estimators::fit_mom(s),
            TrMethod::Pwm => estimators::fit_pwm(s),
            TrMethod::Mle => estimators::fit_mle(s),
            TrMethod::Mode => bayes::posterior_mode(s, prior),
            TrMethod::Mean => bayes::metropolis(s, prior, &McmcConfig::default()).and_then(|d| bayes::posterior_mean_fit(s, prior, &d)),
        })?;
        unsafe { write(out, TrFit::from(&fit), "out") }
    })
}

/// Default chain settings: 10000 kept draws, 2000 burn-in, no thinning,
/// automatic proposal scales, adaptation on, seed 0.
#[no_mangle]
pub extern "C" fn tr_mcmc_config_default() -> TrMcmcConfig {
    let d = McmcConfig::default();
    TrMcmcConfig {
        n_draws: d.n_draws,
        burn_in: d.burn_in,
        thinning: d.thinning,
        proposal_scale_sigma: 0.0,
        proposal_scale_gamma: 0.0,
        proposal_correlation: d.proposal_correlation,
        seed: d.seed,
        adapt: d.adapt,
    }
}

/// Runs a Metropolis chain and returns the draws as a new handle.
///
/// # Safety
/// `sample` and `config` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tr_metropolis(sample: *const TrSample, prior: TrPrior, config: *const TrMcmcConfig, out: *mut *mut TrDraws) -> TrStatus {
    guard(|| {
        let s = &unsafe { deref(sample, "sample") }?.0;
        let cfg = McmcConfig::from(unsafe { deref(config, "config") }?);
        let d = lift(bayes::metropolis(s, prior.into(), &cfg))?;
        unsafe { write(out, Box::into_raw(Box::new(TrDraws(d))), "out") }
    })
}

/// # Safety
/// `draws` must be NULL or a handle from [`tr_metropolis`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tr_draws_free(draws: *mut TrDraws) {
    if !draws.is_null() {
        // SAFETY: produced by Box::into_raw in tr_metropolis.
        drop(unsafe { Box::from_raw(draws) });
    }
}

/// # Safety
/// `draws` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tr_draws_len(draws: *const TrDraws) -> usize {
    unsafe { draws.as_ref() }.map_or(0, |d| d.0.len())
}

/// Post-burn-in acceptance rate, NaN for NULL.
///
/// # Safety
/// `draws` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tr_draws_acceptance_rate(draws: *const TrDraws) -> f64 {
    unsafe { draws.as_ref() }.map_or(f64::NAN, |d| d.0.acceptance_rate)
}

/// Copies draw `index` into `sigma` and `gamma`.
///
/// # Safety
/// `draws` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn tr_draws_get(draws: *const TrDraws, index: usize, sigma: *mut f64, gamma: *mut f64) -> TrStatus {
    guard(|| {
        let d = &unsafe { deref(draws, "draws") }?.0;
        let x = d.draws.get(index).ok_or_else(|| (TrStatus::Validation, format!("draw index {index} out of range {}", d.len())))?;
        unsafe {
            write(sigma, x.sigma, "sigma")?;
            write(gamma, x.gamma, "gamma")
        }
    })
}

/// # Safety
/// `draws` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn tr_posterior_mean(draws: *const TrDraws, sigma: *mut f64, gamma: *mut f64) -> TrStatus {
    guard(|| {
        let d = &unsafe { deref(draws, "draws") }?.0;
        let (s, g) = lift(bayes::posterior_mean(d))?;
        unsafe {
            write(sigma, s, "sigma")?;
            write(gamma, g, "gamma")
        }
    })
}

/// Equal-tailed interval of `values[0..n]` at `level`.
///
/// # Safety
/// `values` must point to `n` readable doubles; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn tr_credible_interval(values: *const f64, n: usize, level: f64, lo: *mut f64, hi: *mut f64) -> TrStatus {
    guard(|| {
        let xs = unsafe { view(values, n, "values") }?;
        let (a, b) = lift(bayes::credible_interval(xs, level))?;
        unsafe {
            write(lo, a, "lo")?;
            write(hi, b, "hi")
        }
    })
}

/// Risk curve at `horizons[0..n_horizons]` (trading days per exceedance)
/// written to `out[0..n_horizons]`. Baselines are computed from
/// `losses[0..n_losses]` when given and are NaN otherwise.
///
/// # Safety
/// All array pointers must be valid for their stated lengths; `out` must
/// have room for `n_horizons` points.
#[no_mangle]
pub unsafe extern "C" fn tr_risk_curve(
    draws: *const TrDraws,
    sample: *const TrSample,
    horizons: *const f64,
    n_horizons: usize,
    level: f64,
    losses: *const f64,
    n_losses: usize,
    out: *mut TrRiskPoint,
) -> TrStatus {
    guard(|| {
        let d = &unsafe { deref(draws, "draws") }?.0;
        let s = &unsafe { deref(sample, "sample") }?.0;
        let hs = unsafe { view(horizons, n_horizons, "horizons") }?;
        let ls = unsafe { view(losses, n_losses, "losses") }?;
        let q = lift(RiskQuery::from_horizons(hs.to_vec(), level))?;
        let mut curve = lift(risk::bayes_risk_curve(d, s, &q))?;
        if !ls.is_empty() {
            lift(curve.attach_baselines(ls))?;
        }
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: caller guarantees room for n_horizons points.
        let dst = unsafe { slice::from_raw_parts_mut(out, n_horizons) };
        for (slot, p) in dst.iter_mut().zip(&curve.points) {
            *slot = TrRiskPoint {
                horizon: p.horizon,
                var_mean: p.var_mean,
                var_lo: p.var_lo,
                var_hi: p.var_hi,
                es_mean: p.es_mean,
                es_lo: p.es_lo,
                es_hi: p.es_hi,
                var_hist: p.var_hist.unwrap_or(f64::NAN),
                var_normal: p.var_normal.unwrap_or(f64::NAN),
            };
        }
        Ok(())
    })
}
