//! Gibbs-estimator aggregation of linear time-series predictors under the
//! quantile loss.
//!
//! The pipeline runs from [`series`] (quarterly data, features, synthetic
//! processes) through [`losses`] and [`gibbs`] (exponentially weighted
//! aggregation computed by importance sampling) to [`online`] (walk-forward
//! quantile forecasting with online selection of the inverse temperature).
//! [`lab`] evaluates the PAC-Bayes bounds and checks their ingredients by
//! Monte Carlo.

pub mod error;
pub mod gibbs;
pub mod lab;
pub mod losses;
pub mod online;
pub mod series;
pub mod stats;

pub use error::{Error, Result};
pub use gibbs::{GibbsResult, ParamVector, PriorSpec, SamplerConfig};
pub use losses::{quantile_loss, LossFn};
pub use online::{Backtest, ForecastRecord, LambdaGrid, RollingConfig};
pub use series::{FeatureMap, Quarter, SyntheticSpec, TimeSeries};
