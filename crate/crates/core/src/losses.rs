//! Losses of the form `ℓ(pred, actual) = g(actual - pred)` with `g` convex,
//! nonnegative, `g(0) = 0` and `K`-Lipschitz, plus empirical and online risks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::online::ForecastRecord;
use crate::series::{Design, DesignView, FeatureMap, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum LossKind {
    /// Pinball loss of order `tau`.
    Quantile { tau: f64 },
    Absolute,
    /// `(pred - actual)^2` on data whose residuals lie in `[-range, range]`.
    SquaredBounded { range: f64 },
}

/// A loss applied to coordinate `target` of the observation vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossFn {
    kind: LossKind,
    target: usize,
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("tau must lie in (0, 1), got {tau}")))
    }
}

/// Pinball loss on the residual `u = actual - pred`.
#[inline]
pub(crate) fn pinball(tau: f64, u: f64) -> f64 {
    if u > 0.0 {
        tau * u
    } else {
        (tau - 1.0) * u
    }
}

/// Quantile loss: `τ (actual - pred)` when the realization lies above the
/// prediction, `(1 - τ)(pred - actual)` otherwise. Minimizing its expectation
/// over `pred` yields the τ-quantile of `actual`.
pub fn quantile_loss(tau: f64, pred: f64, actual: f64) -> Result<f64> {
    check_tau(tau)?;
    Ok(pinball(tau, actual - pred))
}

impl LossFn {
    pub fn quantile(tau: f64) -> Result<Self> {
        check_tau(tau)?;
        Ok(Self {
            kind: LossKind::Quantile { tau },
            target: 0,
        })
    }

    pub fn absolute() -> Self {
        Self {
            kind: LossKind::Absolute,
            target: 0,
        }
    }

    pub fn squared_bounded(range: f64) -> Result<Self> {
        if !(range.is_finite() && range > 0.0) {
            return Err(Error::domain(
                "squared loss is Lipschitz only on bounded data; supply a positive range",
            ));
        }
        Ok(Self {
            kind: LossKind::SquaredBounded { range },
            target: 0,
        })
    }

    pub fn with_target(mut self, target: usize) -> Self {
        self.target = target;
        self
    }

    pub fn kind(&self) -> LossKind {
        self.kind
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn tau(&self) -> Option<f64> {
        match self.kind {
            LossKind::Quantile { tau } => Some(tau),
            _ => None,
        }
    }

    /// Lipschitz constant `K` of `g`.
    pub fn lipschitz(&self) -> f64 {
        match self.kind {
            LossKind::Quantile { tau } => tau.max(1.0 - tau),
            LossKind::Absolute => 1.0,
            LossKind::SquaredBounded { range } => 2.0 * range,
        }
    }

    #[inline]
    pub fn eval(&self, pred: f64, actual: f64) -> f64 {
        let u = actual - pred;
        match self.kind {
            LossKind::Quantile { tau } => pinball(tau, u),
            LossKind::Absolute => u.abs(),
            LossKind::SquaredBounded { .. } => u * u,
        }
    }

    /// Mean loss of the linear predictor `theta` over the rows of `design`.
    ///
    /// The caller guarantees a nonempty view with matching dimension.
    pub fn risk(&self, theta: &[f64], design: DesignView<'_>) -> f64 {
        debug_assert_eq!(theta.len(), design.dim);
        let total = match self.kind {
            LossKind::Quantile { tau } => sum_loss(theta, design, |u| pinball(tau, u)),
            LossKind::Absolute => sum_loss(theta, design, f64::abs),
            LossKind::SquaredBounded { .. } => sum_loss(theta, design, |u| u * u),
        };
        total / design.rows() as f64
    }
}

#[inline]
fn sum_loss(theta: &[f64], design: DesignView<'_>, g: impl Fn(f64) -> f64) -> f64 {
    let d = design.dim;
    design
        .x
        .chunks_exact(d)
        .zip(design.y)
        .map(|(x, &y)| {
            let pred: f64 = x.iter().zip(theta).map(|(a, b)| a * b).sum();
            g(y - pred)
        })
        .sum()
}

/// `r_n(θ) = (1 / (n - k)) Σ_{i=k+1}^{n} ℓ(f_θ(X[i-1..i-k]), X[i])`.
pub fn empirical_risk(
    loss: &LossFn,
    theta: &[f64],
    series: &TimeSeries,
    map: FeatureMap,
) -> Result<f64> {
    if theta.len() != map.dim() {
        return Err(Error::domain(format!(
            "parameter has dimension {}, predictor family expects {}",
            theta.len(),
            map.dim()
        )));
    }
    let design = Design::build(series, map, loss.target())?;
    Ok(loss.risk(theta, design.view()))
}

/// Sum of online quantile losses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnlineLoss {
    pub total: f64,
    /// Records that contributed (those with a realized value).
    pub count: usize,
}

impl OnlineLoss {
    pub fn is_empty(&self) -> bool {
        self.count == 0
    }
}

/// `Σ_j ℓ_τ(prediction_j, realized_j)` in record order; records without a
/// realization are skipped.
pub fn cumulative_online_loss(tau: f64, records: &[ForecastRecord]) -> Result<OnlineLoss> {
    check_tau(tau)?;
    let mut out = OnlineLoss { total: 0.0, count: 0 };
    for r in records {
        if let Some(actual) = r.realized {
            out.total += pinball(tau, actual - r.prediction);
            out.count += 1;
        }
    }
    Ok(out)
}
