//! Command-line surface. Every subcommand is deterministic given its flags;
//! numbers are written in shortest round-trip form, so no precision is lost.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bayes::{credible_interval, metropolis, posterior_mean_fit, posterior_mode, McmcConfig, Prior};
use crate::error::{Error, Result};
use crate::estimators::{fit_mle, fit_mom, fit_pwm, FitResult};
use crate::fixture::Fixture;
use crate::gpd::GpdParams;
use crate::risk::{bayes_risk_curve, historical_var, normal_var, rescale_alpha, PointEstimate, RiskCurve, RiskQuery};
use crate::rng;
use crate::series::{self, LossSeries};
use crate::study::{self, StudyScenario};
use crate::threshold::{self, DEFAULT_MIN_EXCEEDANCES, DEFAULT_THRESHOLD};

#[derive(Debug, Parser)]
#[command(name = "tailrisk", version, about = "Peaks-over-threshold GPD fitting, Bayesian VaR/ES and estimator studies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitMethod {
    Mom,
    Pwm,
    Mle,
    Mode,
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PriorArg {
    Mdi,
    Jeffreys,
    Uniform,
}

impl From<PriorArg> for Prior {
    fn from(p: PriorArg) -> Self {
        match p {
            PriorArg::Mdi => Prior::Mdi,
            PriorArg::Jeffreys => Prior::Jeffreys,
            PriorArg::Uniform => Prior::Uniform,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PointArg {
    Mean,
    Predictive,
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    /// Posterior draws kept.
    #[arg(long, default_value_t = 10_000)]
    pub draws: usize,
    #[arg(long, default_value_t = 2_000)]
    pub burnin: usize,
    #[arg(long, default_value_t = 1)]
    pub thin: usize,
    #[arg(long, env = "TAILRISK_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Keep proposal scales fixed during burn-in.
    #[arg(long)]
    pub no_adapt: bool,
}

impl ChainArgs {
    pub fn config(&self) -> McmcConfig {
        McmcConfig { n_draws: self.draws, burn_in: self.burnin, thinning: self.thin, seed: self.seed, adapt: !self.no_adapt, ..McmcConfig::default() }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a `date,close` price file into negated log returns.
    Returns {
        prices: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the excess distribution above a threshold and print JSON.
    Fit {
        losses: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long, value_enum, default_value_t = FitMethod::Mean)]
        method: FitMethod,
        #[arg(long, value_enum, default_value_t = PriorArg::Mdi)]
        prior: PriorArg,
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// VaR/ES curve with credible bands and baselines, as CSV.
    Risk {
        losses: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long, value_enum, default_value_t = PriorArg::Mdi)]
        prior: PriorArg,
        /// Trading days per expected exceedance.
        #[arg(long, value_delimiter = ',', default_value = "50,100,200,500,1000,2000,5000,10000")]
        horizons: Vec<f64>,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        #[arg(long, value_enum, default_value_t = PointArg::Mean)]
        point: PointArg,
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeat the risk pipeline over several thresholds.
    Sweep {
        losses: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.025,0.030,0.033")]
        thresholds: Vec<f64>,
        #[arg(long, value_enum, default_value_t = PriorArg::Mdi)]
        prior: PriorArg,
        #[arg(long, value_delimiter = ',', default_value = "50,100,200,500,1000,2000,5000,10000")]
        horizons: Vec<f64>,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        #[arg(long, default_value_t = DEFAULT_MIN_EXCEEDANCES)]
        min_exceed: usize,
        #[command(flatten)]
        chain: ChainArgs,
        /// Directory receiving one risk CSV per threshold and summary.json.
        #[arg(long, default_value = "sweep")]
        out_dir: PathBuf,
    },
    /// Mean-excess and Pareto quantile plot data.
    Diag {
        losses: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Monte Carlo RMSE comparison of the estimators.
    Study {
        #[arg(long, default_value_t = study::DEFAULT_REPLICATIONS)]
        replications: usize,
        #[arg(long, env = "TAILRISK_SEED", default_value_t = 0)]
        seed: u64,
        /// `default` for the built-in grid, or a CSV with `n,sigma,gamma[,replications]`.
        #[arg(long, default_value = "default")]
        scenarios: String,
        #[arg(long, default_value_t = 2_000)]
        draws: usize,
        #[arg(long, default_value_t = 2_000)]
        burnin: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Raw GPD sample.
    Simulate {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long)]
        sigma: f64,
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(short = 'n', long = "n")]
        n: usize,
        #[arg(long, env = "TAILRISK_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthetic index-like `date,close` series (Normal body, GPD tail).
    Fixture {
        #[arg(long, default_value_t = 2_500)]
        n_total: usize,
        #[arg(long, default_value_t = 100)]
        n_exceed: usize,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long, default_value_t = 0.008)]
        sigma: f64,
        #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, default_value_t = 0.0005, allow_negative_numbers = true)]
        body_mean: f64,
        #[arg(long, default_value_t = 0.012)]
        body_sd: f64,
        #[arg(long, env = "TAILRISK_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_losses(path: &Path) -> Result<LossSeries> {
    series::read_losses(open(path)?)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn finite(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else {
        String::new()
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Returns { prices, out } => {
            let p = series::read_prices(open(&prices)?)?;
            let l = series::log_losses(&p)?;
            let mut w = sink(&out)?;
            series::write_losses(&l, &mut w)?;
            w.flush()?;
        }
        Command::Fit { losses, threshold, method, prior, chain, out } => {
            let values = load_losses(&losses)?.values();
            let doc = fit_document(&values, threshold, method, prior.into(), &chain.config())?;
            let mut w = sink(&out)?;
            writeln!(w, "{}", serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?)?;
            w.flush()?;
        }
        Command::Risk { losses, threshold, prior, horizons, level, point, chain, out } => {
            let values = load_losses(&losses)?.values();
            let point = match point {
                PointArg::Mean => PointEstimate::MeanOfDraws,
                PointArg::Predictive => PointEstimate::Predictive,
            };
            let csv = risk_table(&values, threshold, prior.into(), &horizons, level, point, &chain.config())?;
            let mut w = sink(&out)?;
            w.write_all(csv.as_bytes())?;
            w.flush()?;
        }
        Command::Sweep { losses, thresholds, prior, horizons, level, min_exceed, chain, out_dir } => {
            let values = load_losses(&losses)?.values();
            let q = RiskQuery::from_horizons(horizons, level)?;
            let result = threshold::sweep(&values, &thresholds, prior.into(), &chain.config(), &q, min_exceed);
            fs::create_dir_all(&out_dir)?;
            let mut summary = Vec::new();
            for (i, e) in result.entries.iter().enumerate() {
                let file = match &e.curve {
                    Some(curve) => {
                        let name = format!("risk_{i}_{}.csv", e.threshold);
                        fs::write(out_dir.join(&name), curve_csv(curve))?;
                        Some(name)
                    }
                    None => None,
                };
                summary.push(json!({
                    "threshold": e.threshold,
                    "n_exceed": e.n_exceed,
                    "seed": e.seed,
                    "sigma": e.fit.as_ref().map(|f| f.sigma),
                    "gamma": e.fit.as_ref().map(|f| f.gamma),
                    "acceptance_rate": e.acceptance_rate,
                    "file": file,
                    "error_kind": e.error_kind,
                    "error": e.error,
                }));
            }
            let doc = json!({ "master_seed": result.master_seed, "prior": Prior::from(prior).to_string(), "level": level, "entries": summary });
            let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
            fs::write(out_dir.join("summary.json"), format!("{text}\n"))?;
            println!("{text}");
        }
        Command::Diag { losses, out_dir } => {
            let values = load_losses(&losses)?.values();
            fs::create_dir_all(&out_dir)?;
            let me = threshold::mean_excess_data(&values)?;
            let mut s = String::from("u,mean_excess\n");
            for (u, e) in me {
                s.push_str(&format!("{u},{e}\n"));
            }
            fs::write(out_dir.join("mean_excess.csv"), s)?;
            let pq = threshold::pareto_quantile_data(&values)?;
            let mut s = String::from("log_pareto_quantile,log_loss\n");
            for (a, b) in pq {
                s.push_str(&format!("{a},{b}\n"));
            }
            fs::write(out_dir.join("pareto_quantile.csv"), s)?;
        }
        Command::Study { replications, seed, scenarios, draws, burnin, out } => {
            let mut list = if scenarios == "default" { study::default_grid(replications) } else { read_scenarios(Path::new(&scenarios), replications)? };
            for s in &mut list {
                s.mcmc.n_draws = draws;
                s.mcmc.burn_in = burnin;
            }
            let report = study::run_study(&list, seed)?;
            let mut w = sink(&out)?;
            w.write_all(report.to_csv().as_bytes())?;
            w.flush()?;
        }
        Command::Simulate { mu, sigma, gamma, n, seed, out } => {
            let p = GpdParams::new(mu, sigma, gamma)?;
            let xs = p.sample(n, &mut rng::stream(seed));
            let mut w = sink(&out)?;
            writeln!(w, "x")?;
            for x in xs {
                writeln!(w, "{x}")?;
            }
            w.flush()?;
        }
        Command::Fixture { n_total, n_exceed, threshold, sigma, gamma, body_mean, body_sd, seed, out } => {
            let f = Fixture { n_total, n_exceed, threshold, tail_sigma: sigma, tail_gamma: gamma, body_mean, body_sd, seed, ..Fixture::default() };
            let prices = f.prices()?;
            let mut w = sink(&out)?;
            series::write_prices(&prices, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

/// JSON summary of a single fit.
pub fn fit_document(losses: &[f64], threshold: f64, method: FitMethod, prior: Prior, cfg: &McmcConfig) -> Result<serde_json::Value> {
    let s = threshold::extract_exceedances(losses, threshold)?;
    let mut chain = None;
    let fit: FitResult = match method {
        FitMethod::Mom => fit_mom(&s)?,
        FitMethod::Pwm => fit_pwm(&s)?,
        FitMethod::Mle => fit_mle(&s)?,
        FitMethod::Mode => posterior_mode(&s, prior)?,
        FitMethod::Mean => {
            let d = metropolis(&s, prior, cfg)?;
            let f = posterior_mean_fit(&s, prior, &d)?;
            chain = Some(d);
            f
        }
    };
    let bayesian = matches!(method, FitMethod::Mode | FitMethod::Mean);
    let mut doc = json!({
        "method": format!("{method:?}").to_lowercase(),
        "prior": bayesian.then(|| prior.to_string()),
        "threshold": threshold,
        "n_total": s.n_total(),
        "n_exceed": s.n_exceed(),
        "sigma": fit.sigma,
        "gamma": fit.gamma,
        "converged": fit.converged,
        "data_consistent": fit.data_consistent,
        "objective_value": fit.objective_value,
    });
    if let Some(d) = chain {
        let ci_s = credible_interval(&d.sigmas(), 0.95)?;
        let ci_g = credible_interval(&d.gammas(), 0.95)?;
        doc["acceptance_rate"] = json!(d.acceptance_rate);
        doc["acceptance_warning"] = json!(d.acceptance_warning);
        doc["n_draws"] = json!(d.len());
        doc["seed"] = json!(d.seed);
        doc["ci95_sigma"] = json!([ci_s.0, ci_s.1]);
        doc["ci95_gamma"] = json!([ci_g.0, ci_g.1]);
    }
    Ok(doc)
}

pub const RISK_HEADER: &str = "horizon_days,var_mean,var_lo,var_hi,es_mean,es_lo,es_hi,var_hist,var_normal";

pub fn curve_csv(curve: &RiskCurve) -> String {
    let mut s = format!("{RISK_HEADER}\n");
    for p in &curve.points {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            p.horizon,
            finite(p.var_mean),
            finite(p.var_lo),
            finite(p.var_hi),
            finite(p.es_mean),
            finite(p.es_lo),
            finite(p.es_hi),
            opt(p.var_hist),
            opt(p.var_normal)
        ));
    }
    s
}

/// Risk CSV for the `risk` subcommand. Horizons too short for the modelled
/// tail keep their historical and Normal columns and leave the Bayesian
/// ones empty.
pub fn risk_table(losses: &[f64], threshold: f64, prior: Prior, horizons: &[f64], level: f64, point: PointEstimate, cfg: &McmcConfig) -> Result<String> {
    RiskQuery::from_horizons(horizons.to_vec(), level)?;
    let s = threshold::extract_exceedances(losses, threshold)?;
    let (modelled, short): (Vec<f64>, Vec<f64>) = horizons.iter().partition(|&&h| rescale_alpha(1.0 / h, &s).is_ok());
    let mut rows: Vec<(f64, String)> = Vec::new();
    if !modelled.is_empty() {
        let d = metropolis(&s, prior, cfg)?;
        let q = RiskQuery::from_horizons(modelled, level)?.with_point(point);
        let mut curve = bayes_risk_curve(&d, &s, &q)?;
        curve.attach_baselines(losses)?;
        let body = curve_csv(&curve);
        for (line, p) in body.lines().skip(1).zip(&curve.points) {
            rows.push((p.horizon, line.to_string()));
        }
    }
    for h in short {
        let hist = historical_var(losses, 1.0 / h).ok();
        let normal = normal_var(losses, 1.0 / h)?;
        rows.push((h, format!("{h},,,,,,,{},{normal}", opt(hist))));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = format!("{RISK_HEADER}\n");
    for (_, r) in rows {
        out.push_str(&r);
        out.push('\n');
    }
    Ok(out)
}

fn read_scenarios(path: &Path, default_reps: usize) -> Result<Vec<StudyScenario>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(open(path)?);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (Some(n), Some(sg), Some(g)) = (col("n"), col("sigma"), col("gamma")) else {
        return Err(Error::Parse("scenario file needs an 'n,sigma,gamma' header".into()));
    };
    let reps = col("replications");
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |c: usize| rec.get(c).unwrap_or("").to_string();
        let bad = |what: &str| Error::Parse(format!("scenario row {}: bad {what}", i + 2));
        let n: usize = field(n).parse().map_err(|_| bad("n"))?;
        let sigma: f64 = field(sg).parse().map_err(|_| bad("sigma"))?;
        let gamma: f64 = field(g).parse().map_err(|_| bad("gamma"))?;
        let r = match reps {
            Some(c) if !field(c).is_empty() => field(c).parse().map_err(|_| bad("replications"))?,
            _ => default_reps,
        };
        out.push(StudyScenario::new(n, sigma, gamma, r));
    }
    if out.is_empty() {
        return Err(Error::EmptyInput("scenario file has no rows".into()));
    }
    Ok(out)
}

/// Single-line machine-readable error record.
pub fn error_line(kind: &str, message: &str) -> String {
    json!({ "error": kind, "message": message }).to_string()
}
