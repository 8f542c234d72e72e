use serde::{Deserialize, Serialize};

use super::record::{ForecastRecord, PointForecast};
use crate::error::{Error, Result};

/// Fraction of realizations at or below the predicted quantile, so the
/// target value is τ. Records without a realization are ignored; all records
/// must share one τ.
pub fn coverage_freq(records: &[ForecastRecord]) -> Result<f64> {
    let tau = single_tau(records)?;
    let mut hits = 0usize;
    let mut count = 0usize;
    for r in records {
        if let Some(y) = r.realized {
            count += 1;
            if y <= r.prediction {
                hits += 1;
            }
        }
    }
    if count == 0 {
        return Err(Error::data(format!("no realized forecasts for tau = {tau}")));
    }
    Ok(hits as f64 / count as f64)
}

fn single_tau(records: &[ForecastRecord]) -> Result<f64> {
    let first = records
        .first()
        .ok_or_else(|| Error::data("no forecast records"))?
        .tau;
    if records.iter().any(|r| r.tau != first) {
        return Err(Error::domain("records mix several tau levels"));
    }
    Ok(first)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorMetrics {
    pub mae: f64,
    pub mse: f64,
    pub count: usize,
}

fn metrics_from(pairs: impl Iterator<Item = (f64, f64)>) -> Result<ErrorMetrics> {
    let (mut abs, mut sq, mut count) = (0.0, 0.0, 0usize);
    for (pred, y) in pairs {
        let e = y - pred;
        abs += e.abs();
        sq += e * e;
        count += 1;
    }
    if count == 0 {
        return Err(Error::data("no realized forecasts"));
    }
    Ok(ErrorMetrics {
        mae: abs / count as f64,
        mse: sq / count as f64,
        count,
    })
}

/// Mean absolute and squared errors over realized records.
pub fn error_metrics(records: &[ForecastRecord]) -> Result<ErrorMetrics> {
    metrics_from(records.iter().filter_map(|r| r.realized.map(|y| (r.prediction, y))))
}

pub fn point_error_metrics(forecasts: &[PointForecast]) -> Result<ErrorMetrics> {
    metrics_from(forecasts.iter().filter_map(|f| f.realized.map(|y| (f.prediction, y))))
}

/// Records at quantile level `tau`, in their original order.
pub fn records_for_tau(records: &[ForecastRecord], tau: f64) -> Vec<ForecastRecord> {
    records.iter().filter(|r| r.tau == tau).cloned().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub tau: f64,
    pub frequency: f64,
    pub count: usize,
}

/// One coverage row per distinct τ, in increasing τ.
pub fn coverage_table(records: &[ForecastRecord]) -> Result<Vec<CoverageRow>> {
    let mut taus: Vec<f64> = records.iter().map(|r| r.tau).collect();
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    taus.into_iter()
        .map(|tau| {
            let subset = records_for_tau(records, tau);
            Ok(CoverageRow {
                tau,
                frequency: coverage_freq(&subset)?,
                count: subset.iter().filter(|r| r.realized.is_some()).count(),
            })
        })
        .collect()
}
