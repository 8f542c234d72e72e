//! Quarterly alignment of the monthly business climate indicator.
//!
//! The value attached to quarter `q` is the mean of the last month of `q`
//! and the first two months of `q + 1`: the information a forecaster holds
//! when predicting quarter `q + 1`.

use std::collections::BTreeMap;

use super::period::{Month, Quarter};
use super::timeseries::TimeSeries;
use crate::error::{Error, Result};

pub fn align_climate(monthly: &[(Month, f64)]) -> Result<Vec<(Quarter, f64)>> {
    let mut by_month = BTreeMap::new();
    for &(m, v) in monthly {
        if !v.is_finite() {
            return Err(Error::data(format!("non-finite climate value for {m}")));
        }
        if by_month.insert(m.ordinal(), v).is_some() {
            return Err(Error::data(format!("duplicate month {m}")));
        }
    }
    let aligned: Vec<(Quarter, f64)> = by_month
        .iter()
        .filter_map(|(&o, &last)| {
            let m = Month::from_ordinal(o)?;
            if m.month() % 3 != 0 {
                return None;
            }
            let a = by_month.get(&(o + 1))?;
            let b = by_month.get(&(o + 2))?;
            Some((m.quarter(), (last + a + b) / 3.0))
        })
        .collect();
    if aligned.is_empty() {
        return Err(Error::Alignment(
            "no quarter has all three source months (last month of the quarter, first two of the next)"
                .into(),
        ));
    }
    Ok(aligned)
}

/// Overwrite `column` of `series` with aligned climate values.
pub fn apply_aligned_climate(
    series: &TimeSeries,
    column: usize,
    aligned: &[(Quarter, f64)],
) -> Result<TimeSeries> {
    let lookup: BTreeMap<Quarter, f64> = aligned.iter().copied().collect();
    let mut missing = Vec::new();
    let values: Vec<f64> = series
        .periods()
        .iter()
        .map(|p| {
            lookup.get(p).copied().unwrap_or_else(|| {
                missing.push(p.to_string());
                0.0
            })
        })
        .collect();
    if !missing.is_empty() {
        return Err(Error::Alignment(format!(
            "no aligned climate value for {}",
            missing.join(", ")
        )));
    }
    let mut out = series.clone();
    out.replace_column(column, &values)?;
    Ok(out)
}
