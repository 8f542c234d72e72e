//! Fan-chart bands: per-period quantile curves across τ.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::record::ForecastRecord;
use crate::error::{Error, Result};
use crate::series::Quarter;

/// Sort quantile predictions across τ in place, removing crossings. Each
/// output value is the `i`-th order statistic of the inputs.
pub fn monotone_rearrangement(values: &mut [f64]) {
    values.sort_by(f64::total_cmp);
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FanRow {
    pub period: Quarter,
    /// One value per τ, in increasing τ.
    pub quantiles: Vec<f64>,
    pub realized: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FanChart {
    pub taus: Vec<f64>,
    pub rearranged: bool,
    pub rows: Vec<FanRow>,
}

impl FanChart {
    /// Every period must carry a forecast for every τ.
    pub fn from_records(records: &[ForecastRecord], rearrange: bool) -> Result<Self> {
        let mut taus: Vec<f64> = records.iter().map(|r| r.tau).collect();
        taus.sort_by(f64::total_cmp);
        taus.dedup();
        let mut by_period: BTreeMap<Quarter, (Vec<Option<f64>>, Option<f64>)> = BTreeMap::new();
        for r in records {
            let j = taus.iter().position(|&t| t == r.tau).expect("tau collected above");
            let entry = by_period
                .entry(r.period)
                .or_insert_with(|| (vec![None; taus.len()], r.realized));
            if entry.0[j].replace(r.prediction).is_some() {
                return Err(Error::data(format!("duplicate forecast for {} at tau {}", r.period, r.tau)));
            }
        }
        let rows = by_period
            .into_iter()
            .map(|(period, (qs, realized))| {
                let mut quantiles = qs
                    .into_iter()
                    .collect::<Option<Vec<f64>>>()
                    .ok_or_else(|| Error::data(format!("period {period} lacks a forecast for some tau")))?;
                if rearrange {
                    monotone_rearrangement(&mut quantiles);
                }
                Ok(FanRow {
                    period,
                    quantiles,
                    realized,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            taus,
            rearranged: rearrange,
            rows,
        })
    }

    /// Header `period,q<τ>...,realized`; one row per forecast period.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["period".to_string()];
        header.extend(self.taus.iter().map(|t| format!("q{t}")));
        header.push("realized".into());
        w.write_record(&header)?;
        for row in &self.rows {
            let mut fields = vec![row.period.to_string()];
            fields.extend(row.quantiles.iter().map(f64::to_string));
            fields.push(row.realized.map(|v| v.to_string()).unwrap_or_default());
            w.write_record(&fields)?;
        }
        w.flush().map_err(|e| Error::io("fan chart", e))?;
        Ok(())
    }
}
