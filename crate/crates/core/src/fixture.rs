//! Synthetic index-like loss series: a Normal body held below the
//! threshold plus an exact number of GPD exceedances above it.

use chrono::{Datelike, Days, NaiveDate, Weekday};
use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use statrs::distribution::ContinuousCDF;

use crate::error::{Error, Result};
use crate::gpd::GpdParams;
use crate::rng;
use crate::series::PriceSeries;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub n_total: usize,
    pub n_exceed: usize,
    pub threshold: f64,
    pub tail_sigma: f64,
    pub tail_gamma: f64,
    pub body_mean: f64,
    pub body_sd: f64,
    pub seed: u64,
    pub start_price: f64,
    pub start_date: NaiveDate,
}

impl Default for Fixture {
    /// Roughly ten years of daily index losses with 100 exceedances of 3.3%.
    fn default() -> Self {
        Fixture {
            n_total: 2_500,
            n_exceed: 100,
            threshold: 0.033,
            tail_sigma: 0.008,
            tail_gamma: 0.3,
            body_mean: 0.0005,
            body_sd: 0.012,
            seed: 0,
            start_price: 10_000.0,
            start_date: NaiveDate::from_ymd_opt(2002, 8, 1).expect("valid date"),
        }
    }
}

impl Fixture {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn tail(&self) -> Result<GpdParams> {
        GpdParams::new(self.threshold, self.tail_sigma, self.tail_gamma)
    }

    /// True tail probability of a loss above the threshold.
    pub fn exceed_probability(&self) -> f64 {
        self.n_exceed as f64 / self.n_total as f64
    }

    /// Generating VaR for a daily tail probability.
    pub fn true_var(&self, alpha_day: f64) -> Result<f64> {
        self.tail()?.isf(alpha_day / self.exceed_probability())
    }

    pub fn losses(&self) -> Result<Vec<f64>> {
        if self.n_exceed > self.n_total || self.n_exceed == 0 {
            return Err(Error::Validation(format!("fixture needs 0 < n_exceed <= n_total, got {} of {}", self.n_exceed, self.n_total)));
        }
        let body = Normal::new(self.body_mean, self.body_sd).map_err(|e| Error::ParameterDomain(e.to_string()))?;
        let below = statrs::distribution::Normal::new(self.body_mean, self.body_sd).map_or(0.0, |n| n.cdf(self.threshold));
        if below < 1e-3 {
            return Err(Error::ParameterDomain("threshold leaves almost no Normal body below it".into()));
        }
        let tail = self.tail()?;
        let mut r = rng::stream(self.seed);
        let mut out = Vec::with_capacity(self.n_total);
        while out.len() < self.n_total - self.n_exceed {
            let x: f64 = body.sample(&mut r);
            if x <= self.threshold {
                out.push(x);
            }
        }
        while out.len() < self.n_total {
            let x = tail.draw(&mut r);
            if x > self.threshold {
                out.push(x);
            }
        }
        out.shuffle(&mut r);
        Ok(out)
    }

    /// Closing prices whose negated log returns are [`Fixture::losses`],
    /// dated on consecutive weekdays.
    pub fn prices(&self) -> Result<PriceSeries> {
        let losses = self.losses()?;
        let mut date = next_weekday(self.start_date);
        let mut close = self.start_price;
        let mut points = Vec::with_capacity(losses.len() + 1);
        points.push((date, close));
        for loss in losses {
            date = next_weekday(date.checked_add_days(Days::new(1)).expect("date in range"));
            close *= (-loss).exp();
            points.push((date, close));
        }
        PriceSeries::new(points)
    }
}

fn next_weekday(mut d: NaiveDate) -> NaiveDate {
    while matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
        d = d.checked_add_days(Days::new(1)).expect("date in range");
    }
    d
}
