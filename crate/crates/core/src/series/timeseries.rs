use serde::{Deserialize, Serialize};

use super::period::Quarter;
use crate::error::{Error, Result};

/// Quarterly observations of a fixed-dimension real vector.
///
/// Periods are contiguous and strictly increasing, all values are finite,
/// and when a bound is attached every coordinate satisfies `|x| <= bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    periods: Vec<Quarter>,
    columns: Vec<String>,
    /// Row-major, `periods.len() * columns.len()` entries.
    values: Vec<f64>,
    bound: Option<f64>,
}

/// One row of the GDP dataset: flash growth estimate and the business
/// climate indicator aligned to the same quarter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GdpRow {
    pub period: Quarter,
    pub gdp_growth: f64,
    pub climate: f64,
}

pub const GDP_COLUMNS: [&str; 2] = ["gdp_growth", "climate"];

impl TimeSeries {
    /// Build a series from row vectors starting at `start`.
    pub fn from_rows(start: Quarter, columns: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let mut periods = Vec::with_capacity(rows.len());
        let mut values = Vec::with_capacity(rows.len() * columns.len());
        for (i, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(Error::data(format!(
                    "row {i} has {} values, expected {}",
                    row.len(),
                    columns.len()
                )));
            }
            let p = start
                .offset(i as i64)
                .ok_or_else(|| Error::data("period range exceeds year 9999"))?;
            periods.push(p);
            values.extend_from_slice(row);
        }
        Self::new(periods, columns, values)
    }

    /// Univariate series starting at `start`.
    pub fn univariate(start: Quarter, name: &str, values: &[f64]) -> Result<Self> {
        let rows: Vec<Vec<f64>> = values.iter().map(|&v| vec![v]).collect();
        Self::from_rows(start, vec![name.to_string()], &rows)
    }

    pub fn from_gdp_rows(rows: &[GdpRow]) -> Result<Self> {
        let periods = rows.iter().map(|r| r.period).collect();
        let values = rows.iter().flat_map(|r| [r.gdp_growth, r.climate]).collect();
        Self::new(
            periods,
            GDP_COLUMNS.iter().map(|s| s.to_string()).collect(),
            values,
        )
    }

    /// Validating constructor. `values` is row-major.
    pub fn new(periods: Vec<Quarter>, columns: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::data("series needs at least one value column"));
        }
        if values.len() != periods.len() * columns.len() {
            return Err(Error::data(format!(
                "{} values do not fill {} rows of {} columns",
                values.len(),
                periods.len(),
                columns.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::data(format!(
                "non-finite value in period {}",
                periods[i / columns.len()]
            )));
        }
        check_contiguous(&periods)?;
        Ok(Self {
            periods,
            columns,
            values,
            bound: None,
        })
    }

    /// Attach a known almost-sure sup-norm bound.
    pub fn with_bound(mut self, bound: f64) -> Result<Self> {
        if !(bound.is_finite() && bound > 0.0) {
            return Err(Error::domain(format!("bound must be positive, got {bound}")));
        }
        let observed = self.empirical_bound();
        if observed > bound {
            return Err(Error::data(format!(
                "observed sup-norm {observed} exceeds declared bound {bound}"
            )));
        }
        self.bound = Some(bound);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn periods(&self) -> &[Quarter] {
        &self.periods
    }

    pub fn period(&self, t: usize) -> Quarter {
        self.periods[t]
    }

    pub fn index_of(&self, period: Quarter) -> Option<usize> {
        let first = self.periods.first()?;
        let idx = period.ordinal() - first.ordinal();
        (0..self.len() as i64).contains(&idx).then_some(idx as usize)
    }

    pub fn row(&self, t: usize) -> &[f64] {
        let p = self.dim();
        &self.values[t * p..(t + 1) * p]
    }

    pub fn value(&self, t: usize, column: usize) -> f64 {
        self.values[t * self.dim() + column]
    }

    pub fn column(&self, column: usize) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().skip(column).step_by(self.dim()).copied()
    }

    pub fn bound(&self) -> Option<f64> {
        self.bound
    }

    /// `max |x|` over every coordinate of every observation.
    pub fn empirical_bound(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// The declared bound, or the empirical one with a warning.
    pub fn effective_bound(&self) -> f64 {
        match self.bound {
            Some(b) => b,
            None => {
                let b = self.empirical_bound();
                log::warn!(
                    "no a.s. bound declared; using empirical sup-norm {b}. \
                     Theoretical bounds require a true almost-sure bound."
                );
                b
            }
        }
    }

    /// The first `len` observations.
    pub fn prefix(&self, len: usize) -> Self {
        let len = len.min(self.len());
        Self {
            periods: self.periods[..len].to_vec(),
            columns: self.columns.clone(),
            values: self.values[..len * self.dim()].to_vec(),
            bound: self.bound,
        }
    }

    /// Interpret as GDP rows (first two columns: growth, climate).
    pub fn gdp_rows(&self) -> Result<Vec<GdpRow>> {
        if self.dim() < 2 {
            return Err(Error::data("GDP rows need a growth and a climate column"));
        }
        Ok((0..self.len())
            .map(|t| GdpRow {
                period: self.periods[t],
                gdp_growth: self.value(t, 0),
                climate: self.value(t, 1),
            })
            .collect())
    }

    /// Replace a column's values for every period.
    pub fn replace_column(&mut self, column: usize, values: &[f64]) -> Result<()> {
        if values.len() != self.len() || column >= self.dim() {
            return Err(Error::data("replacement column has the wrong shape"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::data("replacement column has non-finite values"));
        }
        let p = self.dim();
        for (t, &v) in values.iter().enumerate() {
            self.values[t * p + column] = v;
        }
        if let Some(b) = self.bound {
            if self.empirical_bound() > b {
                self.bound = None;
            }
        }
        Ok(())
    }
}

fn check_contiguous(periods: &[Quarter]) -> Result<()> {
    let mut missing = Vec::new();
    for w in periods.windows(2) {
        let (a, b) = (w[0].ordinal(), w[1].ordinal());
        if b <= a {
            return Err(Error::data(format!(
                "periods not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        for o in a + 1..b {
            missing.push(Quarter::from_ordinal(o).expect("between valid quarters").to_string());
        }
    }
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::Gap { missing })
    }
}
