mod backtest;
mod forecast;
mod simulate;
mod verify;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use qgibbs::online::{ForecastRecord, RollingConfig};
use qgibbs::series::{align_climate, apply_aligned_climate, load_csv, load_monthly_csv, CsvSchema};
use qgibbs::TimeSeries;

pub use backtest::run as backtest;
pub use forecast::run as forecast;
pub use simulate::run as simulate;
pub use verify::run as verify;

use crate::config::{Model, RunConfig};
use crate::error::CliError;

/// Prefix of the first line of every CSV artifact.
pub const RUN_CONFIG_PREFIX: &str = "# run_config=";

pub fn load_series(cfg: &RunConfig) -> Result<TimeSeries, CliError> {
    let path = cfg
        .data
        .as_deref()
        .ok_or_else(|| CliError::usage("no data file given (use --data or `data` in the config)"))?;
    if !path.is_file() {
        return Err(CliError::io(path, std::io::Error::from(std::io::ErrorKind::NotFound)));
    }
    let schema = match cfg.model {
        Model::Gdp => CsvSchema::gdp(),
        Model::Ar(_) => CsvSchema::single(&cfg.column),
    };
    let mut series = load_csv(path, &schema)?;
    if let Some(monthly) = cfg.climate.as_deref() {
        if cfg.model != Model::Gdp {
            return Err(CliError::usage("a climate file only applies to the gdp model"));
        }
        let aligned = align_climate(&load_monthly_csv(monthly)?)?;
        series = apply_aligned_climate(&series, 1, &aligned)?;
    }
    Ok(series)
}

pub fn rolling_config(cfg: &RunConfig) -> RollingConfig {
    RollingConfig {
        taus: cfg.taus.clone(),
        ball: cfg.ball,
        sampler: cfg.sampler(),
        seed: cfg.seed,
        start: cfg.start,
        feature_map: cfg.model.feature_map(),
        target: 0,
    }
}

pub fn create_out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Buffered file writer whose errors carry the path.
pub struct Artifact {
    path: PathBuf,
    inner: BufWriter<File>,
}

impl Artifact {
    pub fn create(path: PathBuf) -> Result<Self, CliError> {
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        Ok(Self {
            path,
            inner: BufWriter::new(file),
        })
    }

    /// CSV artifact starting with the embedded config line.
    pub fn csv(path: PathBuf, cfg: &RunConfig) -> Result<Self, CliError> {
        let mut a = Self::create(path)?;
        let line = format!("{RUN_CONFIG_PREFIX}{}\n", cfg.to_json());
        a.write_all(line.as_bytes()).map_err(|e| CliError::io(&a.path, e))?;
        Ok(a)
    }

    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.inner.flush().map_err(|e| CliError::io(&self.path, e))?;
        Ok(self.path)
    }
}

impl Write for Artifact {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.inner.write(buf)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

pub fn write_json(path: PathBuf, value: &serde_json::Value) -> Result<PathBuf, CliError> {
    let mut a = Artifact::create(path)?;
    let mut text = serde_json::to_string_pretty(value).expect("json serializes");
    text.push('\n');
    a.write_all(text.as_bytes()).map_err(|e| CliError::io(&a.path, e))?;
    a.finish()
}

/// `period,tau,lambda,prediction,realized,loss,flags`.
pub fn write_records(out: &mut impl Write, records: &[ForecastRecord]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["period", "tau", "lambda", "prediction", "realized", "loss", "flags"])
        .map_err(qgibbs::Error::from)?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in records {
        w.write_record([
            r.period.to_string(),
            r.tau.to_string(),
            r.lambda_used.to_string(),
            r.prediction.to_string(),
            opt(r.realized),
            opt(r.loss),
            r.flags_label(),
        ])
        .map_err(qgibbs::Error::from)?;
    }
    w.flush().map_err(|e| CliError::io("<records>", e))?;
    Ok(())
}
