use std::ffi::CStr;
use std::ptr;

use tailrisk_ffi::*;

fn losses() -> Vec<f64> {
    // Deterministic heavy-ish tail: 40 exceedances of 1.0 among 400 values.
    let mut v: Vec<f64> = (0..360).map(|i| (i as f64) / 400.0).collect();
    v.extend((1..=40).map(|i| 1.0 + 0.05 * (i as f64).powf(1.3)));
    v
}

#[test]
fn gpd_functions_match_core() {
    let mut x = f64::NAN;
    let p = tailrisk::GpdParams::new(0.0, 1.0, 0.3).unwrap();
    unsafe {
        assert_eq!(tr_gpd_pdf(0.0, 1.0, 0.3, 1.5, &mut x), TrStatus::Ok);
        assert_eq!(x, p.pdf(1.5));
        assert_eq!(tr_gpd_log_pdf(0.0, 1.0, 0.3, 1.5, &mut x), TrStatus::Ok);
        assert_eq!(x, p.log_pdf(1.5));
        assert_eq!(tr_gpd_cdf(0.0, 1.0, 0.3, 1.5, &mut x), TrStatus::Ok);
        assert_eq!(x, p.cdf(1.5));
        assert_eq!(tr_gpd_quantile(0.0, 1.0, 0.3, 0.9, &mut x), TrStatus::Ok);
        assert_eq!(x, p.quantile(0.9).unwrap());
        assert_eq!(tr_var(0.0, 1.0, 0.3, 0.01, &mut x), TrStatus::Ok);
        let var = x;
        assert_eq!(tr_es(0.0, 1.0, 0.3, 0.01, &mut x), TrStatus::Ok);
        assert!(x > var);
    }
}

#[test]
fn errors_set_status_and_message() {
    let mut x = 7.0;
    unsafe {
        assert_eq!(tr_gpd_pdf(0.0, -1.0, 0.3, 1.0, &mut x), TrStatus::ParameterDomain);
        assert_eq!(x, 7.0);
        let msg = CStr::from_ptr(tr_last_error_message()).to_str().unwrap();
        assert!(!msg.is_empty());
        assert_eq!(tr_gpd_quantile(0.0, 1.0, 0.3, 1.5, &mut x), TrStatus::ProbabilityDomain);
        assert_eq!(tr_es(0.0, 1.0, 1.2, 0.01, &mut x), TrStatus::InfiniteMean);
        assert_eq!(tr_gpd_cdf(0.0, 1.0, 0.3, 1.0, ptr::null_mut()), TrStatus::NullPointer);
        let mut s = ptr::null_mut();
        assert_eq!(tr_sample_new(ptr::null(), 5, 0.0, &mut s), TrStatus::NullPointer);
        assert!(s.is_null());
    }
}

#[test]
fn sample_fit_chain_and_curve() {
    let ls = losses();
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(tr_sample_new(ls.as_ptr(), ls.len(), 1.0, &mut s), TrStatus::Ok);
        assert_eq!(tr_sample_n_exceed(s), 40);
        assert_eq!(tr_sample_n_total(s), 400);

        let mut mle = std::mem::zeroed::<TrFit>();
        let mut unif = std::mem::zeroed::<TrFit>();
        assert_eq!(tr_fit(s, TrMethod::Mle, TrPrior::Mdi, &mut mle), TrStatus::Ok);
        assert_eq!(tr_fit(s, TrMethod::Mode, TrPrior::Uniform, &mut unif), TrStatus::Ok);
        assert_eq!(mle.sigma, unif.sigma);
        assert_eq!(mle.gamma, unif.gamma);
        let mut mom = std::mem::zeroed::<TrFit>();
        assert_eq!(tr_fit(s, TrMethod::Mom, TrPrior::Mdi, &mut mom), TrStatus::Ok);
        assert!(mom.objective_value.is_nan());

        let mut cfg = tr_mcmc_config_default();
        cfg.n_draws = 2000;
        cfg.burn_in = 500;
        cfg.seed = 11;
        let mut d = ptr::null_mut();
        assert_eq!(tr_metropolis(s, TrPrior::Mdi, &cfg, &mut d), TrStatus::Ok);
        assert_eq!(tr_draws_len(d), 2000);
        let acc = tr_draws_acceptance_rate(d);
        assert!(acc > 0.05 && acc < 0.8);

        let (mut sg, mut gm) = (0.0, 0.0);
        assert_eq!(tr_draws_get(d, 0, &mut sg, &mut gm), TrStatus::Ok);
        assert!(sg > 0.0);
        assert_eq!(tr_draws_get(d, 2000, &mut sg, &mut gm), TrStatus::Validation);
        assert_eq!(tr_posterior_mean(d, &mut sg, &mut gm), TrStatus::Ok);
        assert!(sg > 0.0 && gm.is_finite());

        let hs = [20.0, 100.0, 1000.0];
        let mut pts = vec![std::mem::zeroed::<TrRiskPoint>(); 3];
        assert_eq!(tr_risk_curve(d, s, hs.as_ptr(), 3, 0.95, ls.as_ptr(), ls.len(), pts.as_mut_ptr()), TrStatus::Ok);
        for w in pts.windows(2) {
            assert!(w[1].var_mean > w[0].var_mean);
        }
        for p in &pts {
            assert!(p.var_lo <= p.var_mean && p.var_mean <= p.var_hi);
            assert!(p.var_normal.is_finite());
        }
        // 1000 days exceeds the 400-observation historical limit.
        assert!(pts[2].var_hist.is_nan());
        assert!(pts[0].var_hist.is_finite());

        let short = [5.0];
        assert_eq!(tr_risk_curve(d, s, short.as_ptr(), 1, 0.95, ptr::null(), 0, pts.as_mut_ptr()), TrStatus::HorizonTooShort);

        tr_draws_free(d);
        tr_sample_free(s);
        tr_draws_free(ptr::null_mut());
        tr_sample_free(ptr::null_mut());
    }
}

#[test]
fn seeded_sampling_is_reproducible() {
    let mut a = vec![0.0; 64];
    let mut b = vec![0.0; 64];
    unsafe {
        assert_eq!(tr_gpd_sample(0.0, 1.0, 0.2, 64, 5, a.as_mut_ptr()), TrStatus::Ok);
        assert_eq!(tr_gpd_sample(0.0, 1.0, 0.2, 64, 5, b.as_mut_ptr()), TrStatus::Ok);
    }
    assert_eq!(a, b);
    assert!(a.iter().all(|&x| x >= 0.0));
    let (mut lo, mut hi) = (0.0, 0.0);
    unsafe {
        assert_eq!(tr_credible_interval(a.as_ptr(), a.len(), 0.9, &mut lo, &mut hi), TrStatus::Ok);
    }
    assert!(lo < hi);
}

#[test]
fn version_and_header() {
    let v = unsafe { CStr::from_ptr(tr_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/tailrisk.h")).unwrap();
    for sym in [
        "tr_gpd_pdf",
        "tr_fit",
        "tr_metropolis",
        "tr_risk_curve",
        "tr_sample_free",
        "tr_draws_free",
        "tr_last_error_message",
        "TR_STATUS_OK",
        "typedef struct TrSample TrSample",
    ] {
        assert!(header.contains(sym), "{sym} missing from header");
    }
}
