use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficient vector of a linear-in-θ predictor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamVector(pub Vec<f64>);

impl ParamVector {
    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `‖θ‖₁ = Σ |θ_i|`.
    pub fn l1_norm(&self) -> f64 {
        l1_norm(&self.0)
    }

    /// Membership in `Θ(radius) = {θ : ‖θ‖₁ ≤ radius}`.
    pub fn in_ball(&self, radius: f64) -> bool {
        self.l1_norm() <= radius
    }

    /// Prediction `θ · x`.
    pub fn predict(&self, features: &[f64]) -> f64 {
        self.0.iter().zip(features).map(|(a, b)| a * b).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl From<Vec<f64>> for ParamVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

pub(crate) fn l1_norm(theta: &[f64]) -> f64 {
    theta.iter().map(|v| v.abs()).sum()
}

/// Prior probability measure on the parameter space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PriorSpec {
    /// Uniform on the L1 ball of the given radius (`B + 1` for a target ball `Θ(B)`).
    UniformL1Ball { radius: f64 },
    /// Finite support with probability weights; a mixture over models is a
    /// grid whose points come from several parameter sets.
    FiniteGrid {
        points: Vec<ParamVector>,
        weights: Vec<f64>,
    },
}

impl PriorSpec {
    /// Prior for comparing against the best predictor in `Θ(b)`.
    pub fn for_target_ball(b: f64) -> Self {
        PriorSpec::UniformL1Ball { radius: b + 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PriorSpec::UniformL1Ball { radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::domain(format!("ball radius must be positive, got {radius}")));
                }
            }
            PriorSpec::FiniteGrid { points, weights } => {
                if points.is_empty() || points.len() != weights.len() {
                    return Err(Error::domain("grid needs one weight per point"));
                }
                check_probabilities(weights)?;
                let d = points[0].dim();
                if points.iter().any(|p| p.dim() != d || !p.is_finite()) {
                    return Err(Error::domain("grid points must be finite and share a dimension"));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn check_probabilities(weights: &[f64]) -> Result<()> {
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::domain("prior weights must be nonnegative and finite"));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::domain(format!("prior weights sum to {total}, not 1")));
    }
    Ok(())
}
