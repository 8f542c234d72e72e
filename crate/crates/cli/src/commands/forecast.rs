use std::path::{Path, PathBuf};

use qgibbs::online::{monotone_rearrangement, rolling_forecast};
use serde_json::json;

use super::{create_out_dir, load_series, rolling_config, write_json, write_records, Artifact};
use crate::config::RunConfig;
use crate::error::CliError;

/// Quantile forecasts for the period after the last observation, using the
/// whole sample for fitting and λ selection.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let series = load_series(cfg)?;
    let next = series
        .period(series.len() - 1)
        .next()
        .ok_or_else(|| CliError::usage("no period after the last observation"))?;
    let rc = qgibbs::RollingConfig {
        start: Some(next),
        ..rolling_config(cfg)
    };
    let bt = rolling_forecast(&series, &rc)?;
    create_out_dir(out)?;

    let mut f = Artifact::csv(out.join("forecast.csv"), cfg)?;
    write_records(&mut f, &bt.records)?;
    let csv_path = f.finish()?;

    let raw: Vec<f64> = bt.records.iter().map(|r| r.prediction).collect();
    let mut rearranged = raw.clone();
    monotone_rearrangement(&mut rearranged);
    let report = json!({
        "config": cfg,
        "period": next,
        "taus": cfg.taus,
        "lambda": bt.records.iter().map(|r| r.lambda_used).collect::<Vec<_>>(),
        "quantiles": raw,
        "rearranged": rearranged,
        "flags": bt.records.iter().map(|r| r.flags_label()).collect::<Vec<_>>(),
    });
    let json_path = write_json(out.join("forecast.json"), &report)?;
    Ok(vec![csv_path, json_path])
}
