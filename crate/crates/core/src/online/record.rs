use std::fmt;

use serde::{Deserialize, Serialize};

use crate::losses::pinball;
use crate::series::Quarter;

/// Diagnostics attached to a forecast.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// λ came from the cold-start rule, not from online selection.
    ColdStart,
    /// The importance sampler's ESS fell below the configured floor.
    LowEss,
    /// The sampler failed and the pilot prediction was used instead.
    PilotFallback,
    /// The pilot solve needed the ridge fallback.
    Ridge,
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flag::ColdStart => "cold_start",
            Flag::LowEss => "low_ess",
            Flag::PilotFallback => "pilot_fallback",
            Flag::Ridge => "ridge",
        })
    }
}

/// One out-of-sample τ-quantile forecast.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRecord {
    pub period: Quarter,
    pub tau: f64,
    pub lambda_used: f64,
    pub prediction: f64,
    /// `None` for the period past the end of the data.
    pub realized: Option<f64>,
    pub loss: Option<f64>,
    pub flags: Vec<Flag>,
}

impl ForecastRecord {
    /// The loss field is derived from the other fields.
    pub fn new(period: Quarter, tau: f64, lambda_used: f64, prediction: f64, realized: Option<f64>) -> Self {
        Self {
            period,
            tau,
            lambda_used,
            prediction,
            realized,
            loss: realized.map(|y| pinball(tau, y - prediction)),
            flags: Vec::new(),
        }
    }

    pub fn with_flag(mut self, flag: Flag) -> Self {
        if !self.flags.contains(&flag) {
            self.flags.push(flag);
            self.flags.sort();
        }
        self
    }

    pub fn has_flag(&self, flag: Flag) -> bool {
        self.flags.contains(&flag)
    }

    /// Flags joined by `|`, empty when there are none.
    pub fn flags_label(&self) -> String {
        self.flags.iter().map(Flag::to_string).collect::<Vec<_>>().join("|")
    }
}

/// A point forecast from a comparator model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointForecast {
    pub period: Quarter,
    pub prediction: f64,
    pub realized: Option<f64>,
}
