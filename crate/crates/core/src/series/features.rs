//! Linear-in-parameter predictor families and their design matrices.

use serde::{Deserialize, Serialize};

use super::timeseries::TimeSeries;
use crate::error::{Error, Result};

/// Regressor of the GDP model:
/// `(1, ΔGDP[t-1], I[t-1], (I[t-1] - I[t-2]) * |I[t-1] - I[t-2]|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; 4]);

impl FeatureVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// A predictor family `f_θ(x) = θ · φ(X[t-1], ..., X[t-k])`.
///
/// Coordinate 0 of every feature map is the constant 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FeatureMap {
    /// The GDP model on `(growth, climate)` series, memory 2, dimension 4.
    Gdp,
    /// `θ0 + Σ θj X[t-j]` on column 0, memory `order`, dimension `order + 1`.
    /// Order 0 is the constant predictor.
    Autoregressive { order: usize },
}

impl FeatureMap {
    /// Memory `k`: number of lagged observations consumed.
    pub fn memory(&self) -> usize {
        match self {
            FeatureMap::Gdp => 2,
            FeatureMap::Autoregressive { order } => *order,
        }
    }

    /// Parameter dimension `d`.
    pub fn dim(&self) -> usize {
        match self {
            FeatureMap::Gdp => 4,
            FeatureMap::Autoregressive { order } => order + 1,
        }
    }

    pub fn required_columns(&self) -> usize {
        match self {
            FeatureMap::Gdp => 2,
            FeatureMap::Autoregressive { .. } => 1,
        }
    }

    /// Sup over `x` of `|φ(x)|_∞` given `|X|_∞ ≤ bound`, used to turn an L1
    /// parameter distance into a prediction distance.
    pub fn feature_sup(&self, bound: f64) -> f64 {
        match self {
            FeatureMap::Gdp => 1f64.max(bound).max(4.0 * bound * bound),
            FeatureMap::Autoregressive { .. } => 1f64.max(bound),
        }
    }

    /// Features for predicting index `t` of `series` from the rows before it.
    /// `t` may equal `series.len()` (one step past the end).
    pub fn features_into(&self, series: &TimeSeries, t: usize, out: &mut [f64]) -> Result<()> {
        let k = self.memory();
        if t < k {
            return Err(Error::InsufficientData { needed: k, got: t });
        }
        if t > series.len() {
            return Err(Error::domain(format!(
                "index {t} beyond one step past a series of length {}",
                series.len()
            )));
        }
        if series.dim() < self.required_columns() {
            return Err(Error::data(format!(
                "feature map needs {} columns, series has {}",
                self.required_columns(),
                series.dim()
            )));
        }
        debug_assert_eq!(out.len(), self.dim());
        out[0] = 1.0;
        match self {
            FeatureMap::Gdp => {
                let growth = series.value(t - 1, 0);
                let climate = series.value(t - 1, 1);
                let diff = climate - series.value(t - 2, 1);
                out[1] = growth;
                out[2] = climate;
                out[3] = diff * diff.abs();
            }
            FeatureMap::Autoregressive { order } => {
                for j in 1..=*order {
                    out[j] = series.value(t - j, 0);
                }
            }
        }
        Ok(())
    }

    pub fn features(&self, series: &TimeSeries, t: usize) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.features_into(series, t, &mut out)?;
        Ok(out)
    }
}

/// GDP regressor for predicting row `t` (zero-based; needs `t >= 2`).
pub fn build_features(series: &TimeSeries, t: usize) -> Result<FeatureVector> {
    let mut out = [0.0; 4];
    FeatureMap::Gdp.features_into(series, t, &mut out)?;
    Ok(FeatureVector(out))
}

/// Stacked regressors and targets for rows `k..n` of a series.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    dim: usize,
    memory: usize,
    x: Vec<f64>,
    y: Vec<f64>,
}

/// Borrowed rows of a [`Design`].
#[derive(Debug, Clone, Copy)]
pub struct DesignView<'a> {
    pub dim: usize,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

impl Design {
    /// Response is coordinate `target` of `X[t]`.
    pub fn build(series: &TimeSeries, map: FeatureMap, target: usize) -> Result<Self> {
        let k = map.memory();
        let d = map.dim();
        if target >= series.dim() {
            return Err(Error::domain(format!(
                "target coordinate {target} out of range for {} columns",
                series.dim()
            )));
        }
        if series.len() <= k {
            return Err(Error::InsufficientData {
                needed: k + 1,
                got: series.len(),
            });
        }
        let rows = series.len() - k;
        let mut x = vec![0.0; rows * d];
        let mut y = Vec::with_capacity(rows);
        for (r, t) in (k..series.len()).enumerate() {
            map.features_into(series, t, &mut x[r * d..(r + 1) * d])?;
            y.push(series.value(t, target));
        }
        Ok(Self { dim: d, memory: k, x, y })
    }

    /// Autoregressive design built straight from raw values, for streams too
    /// long to carry quarterly labels.
    pub fn from_values(map: FeatureMap, values: &[f64]) -> Result<Self> {
        let FeatureMap::Autoregressive { order } = map else {
            return Err(Error::domain("raw-value designs need an autoregressive feature map"));
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::data("non-finite value"));
        }
        if values.len() <= order {
            return Err(Error::InsufficientData {
                needed: order + 1,
                got: values.len(),
            });
        }
        let d = order + 1;
        let rows = values.len() - order;
        let mut x = Vec::with_capacity(rows * d);
        for t in order..values.len() {
            x.push(1.0);
            x.extend((1..=order).map(|j| values[t - j]));
        }
        Ok(Self {
            dim: d,
            memory: order,
            x,
            y: values[order..].to_vec(),
        })
    }

    pub fn from_parts(dim: usize, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if dim == 0 || x.len() != y.len() * dim {
            return Err(Error::data("design matrix shape mismatch"));
        }
        Ok(Self { dim, memory: 0, x, y })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn rows(&self) -> usize {
        self.y.len()
    }

    pub fn view(&self) -> DesignView<'_> {
        DesignView {
            dim: self.dim,
            x: &self.x,
            y: &self.y,
        }
    }

    /// Rows available after observing the first `observations` points.
    pub fn prefix(&self, observations: usize) -> DesignView<'_> {
        let rows = observations.saturating_sub(self.memory).min(self.rows());
        DesignView {
            dim: self.dim,
            x: &self.x[..rows * self.dim],
            y: &self.y[..rows],
        }
    }
}

impl<'a> DesignView<'a> {
    pub fn rows(&self) -> usize {
        self.y.len()
    }

    pub fn row(&self, i: usize) -> &'a [f64] {
        &self.x[i * self.dim..(i + 1) * self.dim]
    }
}
