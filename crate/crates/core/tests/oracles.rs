//! Importance-sampling estimates checked against independent deterministic
//! oracles: midpoint quadrature of the continuous Gibbs mean and the exact
//! finite-grid mean.

use qgibbs::gibbs::{gibbs_mean_finite, importance_sample_gibbs, ParamVector, ProposalDraws, SamplerConfig};
use qgibbs::losses::LossFn;
use qgibbs::series::Design;

const YS: [f64; 12] = [0.31, -0.12, 0.55, 0.08, 0.9, -0.4, 0.22, 0.47, 0.05, 0.63, -0.2, 0.35];

/// Intercept-only design: the predictor is the constant θ.
fn constant_design() -> Design {
    Design::from_parts(1, vec![1.0; YS.len()], YS.to_vec()).unwrap()
}

/// Independent pinball risk of a constant predictor.
fn risk_of(theta: f64, tau: f64) -> f64 {
    YS.iter()
        .map(|&y| {
            let u = y - theta;
            if u > 0.0 {
                tau * u
            } else {
                (tau - 1.0) * u
            }
        })
        .sum::<f64>()
        / YS.len() as f64
}

/// `∫ θ e^{-λ r} / ∫ e^{-λ r}` over `[-R, R]` by the midpoint rule.
fn quadrature_mean(lambda: f64, radius: f64, tau: f64, cells: usize) -> f64 {
    let h = 2.0 * radius / cells as f64;
    let pts: Vec<f64> = (0..cells).map(|i| -radius + h * (i as f64 + 0.5)).collect();
    let logs: Vec<f64> = pts.iter().map(|&t| -lambda * risk_of(t, tau)).collect();
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (mut num, mut den) = (0.0, 0.0);
    for (t, l) in pts.iter().zip(&logs) {
        let w = (l - max).exp();
        num += t * w;
        den += w;
    }
    num / den
}

#[test]
fn quadrature_oracle_agrees_with_finite_grid_oracle() {
    // Two independent deterministic computations of nearly the same quantity.
    let radius = 2.0;
    for lambda in [1.0, 10.0, 100.0] {
        let grid: Vec<f64> = (0..201).map(|i| -radius + (2.0 * radius / 201.0) * (i as f64 + 0.5)).collect();
        let points: Vec<ParamVector> = grid.iter().map(|&g| ParamVector(vec![g])).collect();
        let risks: Vec<f64> = grid.iter().map(|&g| risk_of(g, 0.5)).collect();
        let exact = gibbs_mean_finite(lambda, &points, &risks, &[1.0 / 201.0; 201]).unwrap();
        let quad = quadrature_mean(lambda, radius, 0.5, 200_001);
        assert!((exact.0[0] - quad).abs() < 5e-3, "lambda {lambda}: {} vs {quad}", exact.0[0]);
    }
}

#[test]
fn finite_grid_crosscheck_at_one_million_draws() {
    let design = constant_design();
    let loss = LossFn::quantile(0.5).unwrap();
    let ball = 1.0;
    let radius = ball + 1.0;
    let cfg = SamplerConfig::with_samples(1_000_000);
    let center = ParamVector(vec![0.3]);
    let draws = ProposalDraws::draw(&center, radius, &cfg, 2024).unwrap();
    let risks = draws.risks(&loss, design.view()).unwrap();
    let grid: Vec<f64> = (0..201).map(|i| -radius + (2.0 * radius / 201.0) * (i as f64 + 0.5)).collect();
    let points: Vec<ParamVector> = grid.iter().map(|&g| ParamVector(vec![g])).collect();
    let grid_risks: Vec<f64> = grid.iter().map(|&g| risk_of(g, 0.5)).collect();
    for lambda in [1.0, 10.0, 100.0] {
        let est = draws.estimate(&risks, lambda).unwrap();
        let exact = gibbs_mean_finite(lambda, &points, &grid_risks, &[1.0 / 201.0; 201]).unwrap();
        let err = (est.theta_hat.0[0] - exact.0[0]).abs();
        assert!(err < 0.01, "lambda {lambda}: IS {} vs grid {}", est.theta_hat.0[0], exact.0[0]);
    }
}

#[test]
fn quadrature_within_three_standard_errors() {
    let design = constant_design();
    for (tau, lambda) in [(0.25, 0.0), (0.5, 5.0), (0.75, 30.0)] {
        let loss = LossFn::quantile(tau).unwrap();
        let cfg = SamplerConfig::with_samples(100_000);
        let r = importance_sample_gibbs(&loss, lambda, design.view(), 1.5, &ParamVector(vec![0.0]), &cfg, 77)
            .unwrap();
        let quad = quadrature_mean(lambda, 1.5, tau, 200_000);
        let err = (r.theta_hat.0[0] - quad).abs();
        assert!(err <= 3.0 * r.std_error[0] + 1e-9, "tau {tau} lambda {lambda}: {err} vs se {}", r.std_error[0]);
    }
}

#[test]
fn two_dimensional_prior_mean_is_zero() {
    // λ = 0 with a narrow proposal at the origin: the estimate targets the
    // mean of the uniform law on the L1 ball, which is 0.
    let design = Design::from_parts(2, vec![1.0, 0.2, 1.0, -0.4], vec![0.1, 0.3]).unwrap();
    let cfg = SamplerConfig {
        samples: 100_000,
        proposal_var: 0.04,
        ess_floor: 0.0,
    };
    let r = importance_sample_gibbs(
        &LossFn::quantile(0.5).unwrap(),
        0.0,
        design.view(),
        3.0,
        &ParamVector(vec![0.0, 0.0]),
        &cfg,
        5,
    )
    .unwrap();
    assert_eq!(r.mass_inside, 1.0);
    for (m, se) in r.theta_hat.0.iter().zip(&r.std_error) {
        assert!(m.abs() <= 3.0 * se, "{m} vs {se}");
    }
}

#[test]
fn more_draws_shrink_the_error() {
    let design = constant_design();
    let loss = LossFn::quantile(0.5).unwrap();
    let lambda = 10.0;
    let oracle = quadrature_mean(lambda, 2.0, 0.5, 200_000);
    let median_err = |samples: usize| {
        let cfg = SamplerConfig::with_samples(samples);
        let mut errs: Vec<f64> = (0..20u64)
            .map(|seed| {
                let r = importance_sample_gibbs(&loss, lambda, design.view(), 2.0, &ParamVector(vec![0.3]), &cfg, seed)
                    .unwrap();
                (r.theta_hat.0[0] - oracle).abs()
            })
            .collect();
        errs.sort_by(f64::total_cmp);
        (errs[9] + errs[10]) / 2.0
    };
    let (small, large) = (median_err(10_000), median_err(1_000_000));
    assert!(large < small, "N=1e6 median error {large} vs N=1e4 {small}");
}
