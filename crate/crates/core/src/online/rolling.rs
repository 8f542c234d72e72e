//! Walk-forward backtest. At each date the Gibbs estimator is refit on the
//! observations seen so far, for every λ in the grid and every τ; λ is then
//! picked by cumulative online loss and the one-step-ahead quantile forecast
//! is recorded.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lambda::{select_lambda, LambdaGrid};
use super::record::{Flag, ForecastRecord, PointForecast};
use crate::error::{Error, Result};
use crate::gibbs::{least_squares, pilot_fit_design, ProposalDraws, SamplerConfig, DEFAULT_BALL};
use crate::losses::{pinball, LossFn};
use crate::series::{Design, FeatureMap, Quarter, TimeSeries};
use crate::stats::derive_seed;

/// Fewest observations accepted as history before the first reported forecast.
pub const MIN_HISTORY: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollingConfig {
    /// Strictly increasing quantile levels in `(0, 1)`.
    pub taus: Vec<f64>,
    /// Comparison ball radius `B`; the prior is uniform on `Θ(B + 1)`.
    pub ball: f64,
    pub sampler: SamplerConfig,
    pub seed: u64,
    /// First period to report. Defaults to the earliest forecastable one.
    pub start: Option<Quarter>,
    pub feature_map: FeatureMap,
    /// Column being forecast.
    pub target: usize,
}

impl Default for RollingConfig {
    fn default() -> Self {
        Self {
            taus: vec![0.05, 0.25, 0.5, 0.75, 0.95],
            ball: DEFAULT_BALL,
            sampler: SamplerConfig::default(),
            seed: 0,
            start: None,
            feature_map: FeatureMap::Gdp,
            target: 0,
        }
    }
}

impl RollingConfig {
    pub fn validate(&self) -> Result<()> {
        validate_taus(&self.taus)?;
        if !(self.ball.is_finite() && self.ball > 0.0) {
            return Err(Error::domain(format!("B must be positive, got {}", self.ball)));
        }
        self.sampler.validate()
    }
}

pub(crate) fn validate_taus(taus: &[f64]) -> Result<()> {
    if taus.is_empty() {
        return Err(Error::domain("at least one tau is required"));
    }
    if let Some(t) = taus.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
        return Err(Error::domain(format!("tau must lie in (0, 1), got {t}")));
    }
    if taus.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("taus must be strictly increasing"));
    }
    Ok(())
}

/// Output of [`rolling_forecast`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Backtest {
    /// Sorted by period, then τ.
    pub records: Vec<ForecastRecord>,
    /// Grid over the full sample; each forecast selects from its own prefix.
    pub lambda_grid: LambdaGrid,
    /// Index of the first reported target in the series (may equal its length).
    pub start_index: usize,
}

struct Layout {
    first_fit: usize,
    start: usize,
}

fn layout(series: &TimeSeries, map: FeatureMap, target: usize, start: Option<Quarter>) -> Result<Layout> {
    if map.required_columns() > series.dim() || target >= series.dim() {
        return Err(Error::domain(format!(
            "feature map needs {} columns and target {target}, series has {}",
            map.required_columns(),
            series.dim()
        )));
    }
    let first_fit = map.memory() + map.dim() + 1;
    let earliest = first_fit.max(MIN_HISTORY);
    let n = series.len();
    if n < earliest {
        return Err(Error::InsufficientData { needed: earliest, got: n });
    }
    let start = match start {
        None => earliest,
        Some(q) => match series.index_of(q) {
            Some(i) => i,
            None if Some(q) == next_period(series).ok() => n,
            None => return Err(Error::domain(format!("start period {q} is outside the series"))),
        },
    };
    if start < earliest {
        return Err(Error::InsufficientData { needed: earliest, got: start });
    }
    Ok(Layout { first_fit, start })
}

fn next_period(series: &TimeSeries) -> Result<Quarter> {
    series
        .period(series.len() - 1)
        .next()
        .ok_or_else(|| Error::domain("no period after the last observation"))
}

fn period_at(series: &TimeSeries, t: usize) -> Result<Quarter> {
    if t < series.len() {
        Ok(series.period(t))
    } else {
        next_period(series)
    }
}

/// Quantile forecasts for every period from `config.start` through the one
/// after the last observation.
///
/// The forecast of index `t` only reads observations `0..t`: the design prefix,
/// the pilot, the draws (seeded by `(τ, t)`) and the λ history are all built
/// from them, so editing later values leaves it bit-identical.
pub fn rolling_forecast(series: &TimeSeries, config: &RollingConfig) -> Result<Backtest> {
    config.validate()?;
    let map = config.feature_map;
    let lay = layout(series, map, config.target, config.start)?;
    let n = series.len();
    let full_grid = LambdaGrid::up_to(n)?;
    let design = Design::build(series, map, config.target)?;

    let per_tau: Vec<Result<Vec<ForecastRecord>>> = config
        .taus
        .par_iter()
        .enumerate()
        .map(|(ti, &tau)| forecast_one_tau(series, &design, config, &full_grid, &lay, ti, tau))
        .collect();
    let per_tau = per_tau.into_iter().collect::<Result<Vec<_>>>()?;

    let periods = n + 1 - lay.start;
    let mut records = Vec::with_capacity(periods * config.taus.len());
    for p in 0..periods {
        for recs in &per_tau {
            records.push(recs[p].clone());
        }
    }
    Ok(Backtest {
        records,
        lambda_grid: full_grid,
        start_index: lay.start,
    })
}

fn forecast_one_tau(
    series: &TimeSeries,
    design: &Design,
    config: &RollingConfig,
    full_grid: &LambdaGrid,
    lay: &Layout,
    tau_index: usize,
    tau: f64,
) -> Result<Vec<ForecastRecord>> {
    let map = config.feature_map;
    let n = series.len();
    let radius = config.ball + 1.0;
    let loss = LossFn::quantile(tau)?.with_target(config.target);
    let lambdas = full_grid.values();

    let mut cumulative = vec![0.0; lambdas.len()];
    let mut summands = 0usize;
    let mut x = vec![0.0; map.dim()];
    let mut preds = vec![0.0; lambdas.len()];
    let mut low_ess = vec![false; lambdas.len()];
    let mut out = Vec::with_capacity(n + 1 - lay.start);

    for t in lay.first_fit..=n {
        let view = design.prefix(t);
        let pilot = pilot_fit_design(tau, view)?;
        map.features_into(series, t, &mut x)?;
        let pilot_pred = pilot.theta.predict(&x);

        let seed = derive_seed(config.seed, &[tau_index as u64, t as u64]);
        let fitted = ProposalDraws::draw(&pilot.theta, radius, &config.sampler, seed).and_then(|draws| {
            let risks = draws.risks(&loss, view)?;
            for (j, &lambda) in lambdas.iter().enumerate() {
                let est = draws.estimate(&risks, lambda)?;
                preds[j] = est.theta_hat.predict(&x);
                low_ess[j] = est.low_ess;
            }
            Ok(())
        });
        let fallback = match fitted {
            Ok(()) => false,
            Err(Error::Coverage { .. }) => {
                log::warn!("sampler coverage failure at t={t}, tau={tau}; using the pilot forecast");
                preds.iter_mut().for_each(|p| *p = pilot_pred);
                low_ess.iter_mut().for_each(|f| *f = false);
                true
            }
            Err(e) => return Err(e),
        };

        if t >= lay.start {
            let grid = LambdaGrid::up_to(t)?;
            let choice = select_lambda(&grid, &cumulative, summands)?;
            let j = lambdas
                .iter()
                .position(|&l| l == choice.lambda)
                .expect("prefix grid is a prefix of the full grid");
            let realized = (t < n).then(|| series.value(t, config.target));
            let mut rec = ForecastRecord::new(period_at(series, t)?, tau, choice.lambda, preds[j], realized);
            if choice.cold_start {
                rec = rec.with_flag(Flag::ColdStart);
            }
            if low_ess[j] {
                rec = rec.with_flag(Flag::LowEss);
            }
            if fallback {
                rec = rec.with_flag(Flag::PilotFallback);
            }
            if pilot.ridge {
                rec = rec.with_flag(Flag::Ridge);
            }
            out.push(rec);
        }

        if t < n {
            let y = series.value(t, config.target);
            for (c, p) in cumulative.iter_mut().zip(&preds) {
                *c += pinball(tau, y - p);
            }
            summands += 1;
        }
    }
    Ok(out)
}

/// Rolling least-squares point forecasts over the same periods as
/// [`rolling_forecast`], the comparator for the median forecasts.
pub fn rolling_least_squares(
    series: &TimeSeries,
    map: FeatureMap,
    target: usize,
    start: Option<Quarter>,
) -> Result<Vec<PointForecast>> {
    let lay = layout(series, map, target, start)?;
    let n = series.len();
    let design = Design::build(series, map, target)?;
    let mut x = vec![0.0; map.dim()];
    let mut out = Vec::with_capacity(n + 1 - lay.start);
    for t in lay.start..=n {
        let (beta, _) = least_squares(design.prefix(t))?;
        map.features_into(series, t, &mut x)?;
        out.push(PointForecast {
            period: period_at(series, t)?,
            prediction: beta.iter().zip(&x).map(|(b, v)| b * v).sum(),
            realized: (t < n).then(|| series.value(t, target)),
        });
    }
    Ok(out)
}
