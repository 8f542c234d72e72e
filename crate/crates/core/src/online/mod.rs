//! Out-of-sample forecasting with online λ selection and its evaluation.

mod band;
mod lambda;
mod metrics;
mod record;
mod rolling;

pub use band::{monotone_rearrangement, FanChart, FanRow};
pub use lambda::{select_lambda, LambdaChoice, LambdaGrid};
pub use metrics::{
    coverage_freq, coverage_table, error_metrics, point_error_metrics, records_for_tau, CoverageRow,
    ErrorMetrics,
};
pub use record::{Flag, ForecastRecord, PointForecast};
pub use rolling::{rolling_forecast, rolling_least_squares, Backtest, RollingConfig, MIN_HISTORY};
pub(crate) use rolling::validate_taus;
