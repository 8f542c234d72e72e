//! Declarative run configuration. A file supplies the base, command-line
//! flags override it, and the merged result is embedded in every artifact.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qgibbs::gibbs::{SamplerConfig, DEFAULT_BALL, DEFAULT_PROPOSAL_VAR};
use qgibbs::lab::KlConvention;
use qgibbs::series::FeatureMap;
use qgibbs::Quarter;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Forecast,
    Backtest,
    Simulate,
    Verify,
}

/// Predictor family: `gdp` or `ar<order>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Model {
    Gdp,
    Ar(usize),
}

impl Model {
    pub fn feature_map(self) -> FeatureMap {
        match self {
            Model::Gdp => FeatureMap::Gdp,
            Model::Ar(order) => FeatureMap::Autoregressive { order },
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Gdp => f.write_str("gdp"),
            Model::Ar(p) => write!(f, "ar{p}"),
        }
    }
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "gdp" {
            return Ok(Model::Gdp);
        }
        s.strip_prefix("ar")
            .and_then(|p| p.parse().ok())
            .map(Model::Ar)
            .ok_or_else(|| format!("unknown model {s:?}; expected gdp or ar<order>"))
    }
}

impl TryFrom<String> for Model {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Model> for String {
    fn from(m: Model) -> Self {
        m.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self { a: 0.5, b: 1.0, n: 400 }
    }
}

/// Budgets for the `verify` checks. Defaults finish in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub dv_instances: usize,
    pub dv_max_support: usize,
    pub mgf_n: usize,
    pub mgf_t: Vec<f64>,
    pub mgf_replications: usize,
    /// Coefficient of the dependent process in the second MGF check.
    pub mgf_ar: f64,
    pub deviation_replications: usize,
    pub oracle_n: usize,
    pub oracle_taus: Vec<f64>,
    pub oracle_replications: usize,
    pub oracle_holdout: usize,
    pub oracle_samples: usize,
    pub oracle_grid: usize,
    pub kl: KlConvention,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            dv_instances: 100,
            dv_max_support: 50,
            mgf_n: 50,
            mgf_t: vec![0.05, 0.1, 0.2],
            mgf_replications: 100_000,
            mgf_ar: 0.5,
            deviation_replications: 20_000,
            oracle_n: 400,
            oracle_taus: vec![0.5],
            oracle_replications: 20,
            oracle_holdout: 100_000,
            oracle_samples: 10_000,
            oracle_grid: 41,
            kl: KlConvention::VolumeRatio { dim: 2 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    pub seed: u64,
    /// Quarterly input CSV.
    pub data: Option<PathBuf>,
    /// Optional monthly climate CSV, averaged into the `climate` column.
    pub climate: Option<PathBuf>,
    pub model: Model,
    /// Value column read for `ar<order>` models.
    pub column: String,
    pub taus: Vec<f64>,
    #[serde(rename = "B")]
    pub ball: f64,
    #[serde(rename = "N")]
    pub samples: usize,
    #[serde(rename = "v")]
    pub proposal_var: f64,
    pub start: Option<Quarter>,
    pub epsilon: f64,
    /// Also render the fan chart as SVG.
    pub svg: bool,
    pub simulate: SimulateConfig,
    pub verify: VerifyConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sampler = SamplerConfig::default();
        Self {
            command: None,
            seed: 0,
            data: None,
            climate: None,
            model: Model::Gdp,
            column: "value".into(),
            taus: vec![0.05, 0.25, 0.5, 0.75, 0.95],
            ball: DEFAULT_BALL,
            samples: sampler.samples,
            proposal_var: DEFAULT_PROPOSAL_VAR,
            start: None,
            epsilon: 0.1,
            svg: false,
            simulate: SimulateConfig::default(),
            verify: VerifyConfig::default(),
        }
    }
}

impl RunConfig {
    /// Reads TOML, or JSON when the extension is `.json`.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let parsed = if is_json {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|msg| CliError::Config {
            path: Some(path.display().to_string()),
            message: msg,
        })
    }

    pub fn sampler(&self) -> SamplerConfig {
        SamplerConfig {
            samples: self.samples,
            proposal_var: self.proposal_var,
            ..SamplerConfig::default()
        }
    }

    /// Single-line JSON, as embedded in artifacts.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::usage(m));
        if self.taus.is_empty() {
            return bad("at least one tau is required".into());
        }
        if let Some(t) = self.taus.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
            return bad(format!("tau must lie in (0, 1), got {t}"));
        }
        if self.taus.windows(2).any(|w| w[0] >= w[1]) {
            return bad("taus must be strictly increasing".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        Ok(())
    }
}
