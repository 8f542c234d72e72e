use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use log::info;
use qgibbs::online::{
    coverage_table, error_metrics, point_error_metrics, records_for_tau, rolling_forecast, rolling_least_squares,
    FanChart,
};
use serde_json::json;

use super::{create_out_dir, load_series, rolling_config, write_json, write_records, Artifact};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::svg;

pub fn run(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let series = load_series(cfg)?;
    let rc = rolling_config(cfg);
    info!("backtest on {} observations, taus {:?}", series.len(), rc.taus);
    let bt = rolling_forecast(&series, &rc)?;
    let ols = rolling_least_squares(&series, rc.feature_map, rc.target, rc.start)?;
    create_out_dir(out)?;
    let mut written = Vec::new();

    let mut f = Artifact::csv(out.join("forecasts.csv"), cfg)?;
    write_records(&mut f, &bt.records)?;
    written.push(f.finish()?);

    let fan = FanChart::from_records(&bt.records, true)?;
    let mut f = Artifact::csv(out.join("fan_chart.csv"), cfg)?;
    fan.write_csv(&mut f)?;
    written.push(f.finish()?);

    if cfg.svg {
        let mut f = Artifact::create(out.join("fan_chart.svg"))?;
        svg::write_fan_chart(&mut f, &fan, cfg).map_err(|e| CliError::io(out.join("fan_chart.svg"), e))?;
        written.push(f.finish()?);
    }

    let realized = bt.records.iter().filter(|r| r.realized.is_some()).count();
    let median = if cfg.taus.contains(&0.5) && realized > 0 {
        Some(error_metrics(&records_for_tau(&bt.records, 0.5))?)
    } else {
        None
    };
    let ols_metrics = if ols.iter().any(|p| p.realized.is_some()) {
        Some(point_error_metrics(&ols)?)
    } else {
        None
    };
    let coverage = if realized > 0 { coverage_table(&bt.records)? } else { Vec::new() };
    let mut flags: BTreeMap<String, usize> = BTreeMap::new();
    for r in &bt.records {
        for fl in &r.flags {
            *flags.entry(fl.to_string()).or_default() += 1;
        }
    }
    let summary = json!({
        "config": cfg,
        "lambda_grid": bt.lambda_grid,
        "first_period": bt.records.first().map(|r| r.period),
        "last_period": bt.records.last().map(|r| r.period),
        "evaluated_periods": realized / cfg.taus.len(),
        "median": median,
        "ols": ols_metrics,
        "coverage": coverage,
        "flags": flags,
    });
    written.push(write_json(out.join("summary.json"), &summary)?);
    Ok(written)
}
