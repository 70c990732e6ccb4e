//! Dated price and loss series with CSV reading and writing.

use std::io::{Read, Write};

use chrono::NaiveDate;

use crate::error::{Error, Result};

/// Daily closing prices with strictly increasing dates.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    points: Vec<(NaiveDate, f64)>,
}

impl PriceSeries {
    pub fn new(points: Vec<(NaiveDate, f64)>) -> Result<Self> {
        for (i, (date, close)) in points.iter().enumerate() {
            if !(*close > 0.0) || !close.is_finite() {
                return Err(Error::Validation(format!("row {}: close must be positive, got {close}", i + 1)));
            }
            if i > 0 && *date <= points[i - 1].0 {
                return Err(Error::Validation(format!("row {}: date {date} does not follow {}", i + 1, points[i - 1].0)));
            }
        }
        Ok(PriceSeries { points })
    }

    pub fn points(&self) -> &[(NaiveDate, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Negated daily log returns, dated at the later close.
#[derive(Debug, Clone, PartialEq)]
pub struct LossSeries {
    points: Vec<(Option<NaiveDate>, f64)>,
}

impl LossSeries {
    pub fn from_values(values: Vec<f64>) -> Self {
        LossSeries { points: values.into_iter().map(|v| (None, v)).collect() }
    }

    pub fn points(&self) -> &[(Option<NaiveDate>, f64)] {
        &self.points
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn log_losses(p: &PriceSeries) -> Result<LossSeries> {
    if p.len() < 2 {
        return Err(Error::InsufficientData("need at least two prices".into()));
    }
    let points = p.points.windows(2).map(|w| (Some(w[1].0), -(w[1].1 / w[0].1).ln())).collect();
    Ok(LossSeries { points })
}

fn parse_date(s: &str, row: usize) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").map_err(|e| Error::Parse(format!("row {row}: bad date '{s}': {e}")))
}

fn parse_number(s: &str, row: usize) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| Error::Parse(format!("row {row}: bad number '{s}'")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("row {row}: non-finite value '{s}'")));
    }
    Ok(v)
}

/// Reads `date,close` rows with ISO-8601 dates.
pub fn read_prices<R: Read>(reader: R) -> Result<PriceSeries> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (date_col, close_col) = match (col("date"), col("close")) {
        (Some(d), Some(c)) => (d, c),
        _ => return Err(Error::Parse("price file needs a 'date,close' header".into())),
    };
    let mut points = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let date = parse_date(rec.get(date_col).unwrap_or(""), row)?;
        let close = parse_number(rec.get(close_col).unwrap_or(""), row)?;
        points.push((date, close));
    }
    PriceSeries::new(points)
}

/// Reads a loss file: the `loss` column when present, otherwise the last
/// column. A `date` column, when present, is carried along.
pub fn read_losses<R: Read>(reader: R) -> Result<LossSeries> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() {
        return Err(Error::Parse("empty loss file".into()));
    }
    let value_col = headers.iter().position(|h| h.eq_ignore_ascii_case("loss")).unwrap_or(headers.len() - 1);
    let date_col = headers.iter().position(|h| h.eq_ignore_ascii_case("date"));
    let mut points = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let date = match date_col {
            Some(c) => Some(parse_date(rec.get(c).unwrap_or(""), row)?),
            None => None,
        };
        points.push((date, parse_number(rec.get(value_col).unwrap_or(""), row)?));
    }
    if points.is_empty() {
        return Err(Error::EmptyInput("loss file has no rows".into()));
    }
    Ok(LossSeries { points })
}

pub fn write_prices<W: Write>(p: &PriceSeries, mut w: W) -> Result<()> {
    writeln!(w, "date,close")?;
    for (d, c) in &p.points {
        writeln!(w, "{},{}", d.format("%Y-%m-%d"), c)?;
    }
    Ok(())
}

pub fn write_losses<W: Write>(l: &LossSeries, mut w: W) -> Result<()> {
    writeln!(w, "date,loss")?;
    for (d, v) in &l.points {
        match d {
            Some(d) => writeln!(w, "{},{}", d.format("%Y-%m-%d"), v)?,
            None => writeln!(w, ",{v}")?,
        }
    }
    Ok(())
}
