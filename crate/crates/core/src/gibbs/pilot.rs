//! Pilot estimator centering the importance proposal: least squares on the
//! features followed by an intercept shift that puts the empirical
//! τ-quantile of the residuals at zero.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::prior::ParamVector;
use crate::error::{Error, Result};
use crate::series::{Design, DesignView, FeatureMap, TimeSeries};
use crate::stats::empirical_quantile;

/// Relative ridge added to the normal equations of a rank-deficient design.
pub const RIDGE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct PilotFit {
    pub theta: ParamVector,
    /// Intercept shift applied after least squares.
    pub shift: f64,
    /// The design was rank-deficient and the ridge fallback was used.
    pub ridge: bool,
}

/// Least squares `argmin ‖y - Xβ‖²`, with a ridge fallback flagged in the result.
pub fn least_squares(design: DesignView<'_>) -> Result<(Vec<f64>, bool)> {
    let d = design.dim;
    let n = design.rows();
    if n == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let x = DMatrix::from_row_slice(n, d, design.x);
    let y = DVector::from_column_slice(design.y);
    let mut gram = x.transpose() * &x;
    let rhs = x.transpose() * y;

    let eig = SymmetricEigen::new(gram.clone());
    let max = eig.eigenvalues.iter().copied().fold(0.0_f64, f64::max);
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let deficient = !(max > 0.0 && min > 1e-10 * max);
    if deficient {
        let scale = gram.trace() / d as f64;
        let alpha = RIDGE * if scale > 0.0 { scale } else { 1.0 };
        for i in 0..d {
            gram[(i, i)] += alpha;
        }
    }
    let beta = gram
        .cholesky()
        .ok_or_else(|| Error::data("normal equations are not positive definite"))?
        .solve(&rhs);
    Ok((beta.iter().copied().collect(), deficient))
}

/// Pilot on precomputed design rows. Coordinate 0 must be the intercept.
pub fn pilot_fit_design(tau: f64, design: DesignView<'_>) -> Result<PilotFit> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::domain(format!("tau must lie in (0, 1), got {tau}")));
    }
    let (mut beta, ridge) = least_squares(design)?;
    let residuals: Vec<f64> = (0..design.rows())
        .map(|i| {
            let pred: f64 = design.row(i).iter().zip(&beta).map(|(a, b)| a * b).sum();
            design.y[i] - pred
        })
        .collect();
    let shift = empirical_quantile(&residuals, tau).expect("nonempty design");
    beta[0] += shift;
    Ok(PilotFit {
        theta: ParamVector(beta),
        shift,
        ridge,
    })
}

/// Requires `n > k + d` observations.
pub fn pilot_fit(tau: f64, series: &TimeSeries, map: FeatureMap) -> Result<PilotFit> {
    let needed = map.memory() + map.dim() + 1;
    if series.len() < needed {
        return Err(Error::InsufficientData {
            needed,
            got: series.len(),
        });
    }
    let design = Design::build(series, map, 0)?;
    pilot_fit_design(tau, design.view())
}
