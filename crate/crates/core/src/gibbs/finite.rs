//! Exact Gibbs aggregation on a finite parameter grid.

use super::prior::{check_probabilities, ParamVector};
use crate::error::{Error, Result};

/// Posterior weights `w_i ∝ prior_i · exp(-λ · risk_i)`.
///
/// Computed in the log domain with a max shift, so `λ · risk` up to 1e6 and
/// beyond neither overflows nor underflows the normalizer. Points with zero
/// prior mass or infinite risk get weight zero.
pub fn gibbs_weights_finite(lambda: f64, risks: &[f64], prior_weights: &[f64]) -> Result<Vec<f64>> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::domain(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    if risks.len() != prior_weights.len() {
        return Err(Error::domain("one risk per prior weight"));
    }
    check_probabilities(prior_weights)?;
    if risks.iter().any(|r| r.is_nan() || *r == f64::NEG_INFINITY) {
        return Err(Error::domain("risks must be finite or +inf"));
    }
    if lambda == 0.0 {
        return Ok(prior_weights.to_vec());
    }
    let log_w: Vec<f64> = risks
        .iter()
        .zip(prior_weights)
        .map(|(&r, &p)| {
            if p == 0.0 || r == f64::INFINITY {
                f64::NEG_INFINITY
            } else {
                p.ln() - lambda * r
            }
        })
        .collect();
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::Degenerate(
            "all prior mass sits on infinite-risk points".into(),
        ));
    }
    let mut w: Vec<f64> = log_w.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    Ok(w)
}

/// Gibbs mean `Σ_i w_i θ_i` under [`gibbs_weights_finite`].
pub fn gibbs_mean_finite(
    lambda: f64,
    points: &[ParamVector],
    risks: &[f64],
    prior_weights: &[f64],
) -> Result<ParamVector> {
    if points.len() != risks.len() {
        return Err(Error::domain("one risk per grid point"));
    }
    let d = points.first().map_or(0, ParamVector::dim);
    if points.iter().any(|p| p.dim() != d) {
        return Err(Error::domain("grid points must share a dimension"));
    }
    let w = gibbs_weights_finite(lambda, risks, prior_weights)?;
    let mut mean = vec![0.0; d];
    for (p, &wi) in points.iter().zip(&w) {
        for (m, v) in mean.iter_mut().zip(p.as_slice()) {
            *m += wi * v;
        }
    }
    Ok(ParamVector(mean))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_lambda_returns_prior() {
        let prior = [0.2, 0.3, 0.5];
        assert_eq!(gibbs_weights_finite(0.0, &[1.0, 5.0, 0.0], &prior).unwrap(), prior);
    }

    #[test]
    fn equal_risks_are_symmetric() {
        assert_eq!(gibbs_weights_finite(7.0, &[2.0, 2.0], &[0.5, 0.5]).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn ln3_gives_three_to_one() {
        // 1 / (1 + e^{-ln 3}) = 3/4
        let w = gibbs_weights_finite(3f64.ln(), &[0.0, 1.0], &[0.5, 0.5]).unwrap();
        assert!((w[0] - 0.75).abs() < 1e-15);
        assert!((w[1] - 0.25).abs() < 1e-15);
        let m = gibbs_mean_finite(
            3f64.ln(),
            &[ParamVector(vec![0.0]), ParamVector(vec![1.0])],
            &[0.0, 1.0],
            &[0.5, 0.5],
        )
        .unwrap();
        assert!((m.0[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn symmetric_points_average_to_zero() {
        let v = ParamVector(vec![1.5, -2.0]);
        let neg = ParamVector(vec![-1.5, 2.0]);
        let m = gibbs_mean_finite(0.0, &[v, neg], &[3.0, 1.0], &[0.5, 0.5]).unwrap();
        assert_eq!(m.0, vec![0.0, 0.0]);
    }

    #[test]
    fn large_lambda_picks_argmin() {
        let pts: Vec<ParamVector> = [0.0, 1.0, 2.0, 3.0].iter().map(|&x| ParamVector(vec![x])).collect();
        let risks = [0.4, 0.1, 0.3, 5.0];
        let m = gibbs_mean_finite(1e6, &pts, &risks, &[0.25; 4]).unwrap();
        assert!((m.0[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn no_overflow_at_huge_scale() {
        let w = gibbs_weights_finite(1e6, &[1.0, 1.000001, 3.0], &[0.3, 0.3, 0.4]).unwrap();
        assert!(w.iter().all(|x| x.is_finite()));
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // Δrisk 1e-6 at λ = 1e6 is a factor e.
        assert!((w[0] / w[1] - std::f64::consts::E).abs() < 1e-6);
    }

    #[test]
    fn infinite_risk_handling() {
        let w = gibbs_weights_finite(1.0, &[f64::INFINITY, 0.0], &[0.5, 0.5]).unwrap();
        assert_eq!(w, vec![0.0, 1.0]);
        assert!(matches!(
            gibbs_weights_finite(1.0, &[f64::INFINITY, 0.0], &[1.0, 0.0]),
            Err(Error::Degenerate(_))
        ));
    }
}
