//! Empirical replication of the oracle inequality on a synthetic AR process:
//! fit the Gibbs estimator at `λ = √(3n)/κ`, estimate its true risk on a long
//! independent stream, and count how often it exceeds the best risk over
//! `Θ(B)` plus the bound.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::{ball_remainder, closed_form_remainder, KlConvention, TheoryConstants};
use crate::error::{Error, Result};
use crate::gibbs::{importance_sample_gibbs, pilot_fit_design, SamplerConfig};
use crate::losses::LossFn;
use crate::series::{simulate_values, Design, DesignView, FeatureMap, SyntheticSpec};
use crate::stats::derive_seed;

/// Batches used for the standard error of hold-out risk estimates.
const HOLDOUT_BATCHES: usize = 100;
/// Grid slack larger than this fraction of the bound is a configuration error.
const MAX_GRID_SLACK: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Training process; `length` is the sample size `n`.
    pub spec: SyntheticSpec,
    pub ball: f64,
    pub taus: Vec<f64>,
    pub epsilon: f64,
    pub replications: usize,
    pub seed: u64,
    /// Length of the stream approximating the true risk.
    pub holdout: usize,
    /// Points per axis of the comparator grid over `Θ(B)`; must be odd.
    pub grid_per_axis: usize,
    pub sampler: SamplerConfig,
    /// Factor applied to the bound before counting violations.
    pub multiplier: f64,
    pub kl: KlConvention,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            spec: SyntheticSpec::ar1(0.5, 1.0, 400, 0),
            ball: 2.0,
            taus: vec![0.5],
            epsilon: 0.1,
            replications: 200,
            seed: 0,
            holdout: 100_000,
            grid_per_axis: 41,
            sampler: SamplerConfig::with_samples(20_000),
            multiplier: 1.0,
            kl: KlConvention::VolumeRatio { dim: 2 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleTauReport {
    pub tau: f64,
    pub constants: TheoryConstants,
    pub lambda: f64,
    pub delta: f64,
    /// Bound after the multiplier.
    pub bound: f64,
    /// The closed form with the stated KL constant, when its hypotheses hold.
    pub closed_form_bound: Option<f64>,
    pub grid_inf: f64,
    pub grid_argmin: Vec<f64>,
    pub grid_slack: f64,
    pub violations: usize,
    pub violation_rate: f64,
    pub threshold: f64,
    pub mean_excess_risk: f64,
    pub max_excess_risk: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub config: OracleConfig,
    pub bound_b: f64,
    pub dependence_c: f64,
    pub per_tau: Vec<OracleTauReport>,
    pub pass: bool,
}

/// Hold-out mean loss with a batch-means standard error.
fn holdout_risk(loss: &LossFn, theta: &[f64], view: DesignView<'_>) -> (f64, f64) {
    let rows = view.rows();
    let per = rows / HOLDOUT_BATCHES;
    let means: Vec<f64> = (0..HOLDOUT_BATCHES)
        .map(|b| {
            let lo = b * per;
            let hi = if b + 1 == HOLDOUT_BATCHES { rows } else { lo + per };
            let sub = DesignView {
                dim: view.dim,
                x: &view.x[lo * view.dim..hi * view.dim],
                y: &view.y[lo..hi],
            };
            loss.risk(theta, sub)
        })
        .collect();
    let overall = loss.risk(theta, view);
    let m = means.len() as f64;
    let avg = means.iter().sum::<f64>() / m;
    let var = means.iter().map(|v| (v - avg).powi(2)).sum::<f64>() / (m - 1.0);
    (overall, (var / m).sqrt())
}

/// Points of the regular grid on `[-B, B]^d` that lie in `Θ(B)`.
fn comparator_grid(ball: f64, dim: usize, per_axis: usize) -> Vec<Vec<f64>> {
    let step = 2.0 * ball / (per_axis - 1) as f64;
    let axis: Vec<f64> = (0..per_axis).map(|i| -ball + step * i as f64).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; dim];
    loop {
        let p: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
        if p.iter().map(|v| v.abs()).sum::<f64>() <= ball * (1.0 + 1e-12) {
            out.push(p);
        }
        let mut c = 0;
        loop {
            if c == dim {
                return out;
            }
            idx[c] += 1;
            if idx[c] < per_axis {
                break;
            }
            idx[c] = 0;
            c += 1;
        }
    }
}

fn validate(config: &OracleConfig) -> Result<()> {
    config.spec.validate()?;
    config.sampler.validate()?;
    if !(config.ball > 0.0 && config.ball.is_finite()) {
        return Err(Error::domain("B must be positive"));
    }
    if !(config.epsilon > 0.0 && config.epsilon < 1.0) {
        return Err(Error::domain("epsilon must lie in (0, 1)"));
    }
    if config.replications == 0 {
        return Err(Error::domain("need at least one replication"));
    }
    if config.grid_per_axis < 3 || config.grid_per_axis.is_multiple_of(2) {
        return Err(Error::Config("grid points per axis must be odd and at least 3".into()));
    }
    if config.holdout < 10 * HOLDOUT_BATCHES {
        return Err(Error::Config(format!("hold-out needs at least {} points", 10 * HOLDOUT_BATCHES)));
    }
    if !(config.multiplier > 0.0 && config.multiplier.is_finite()) {
        return Err(Error::domain("bound multiplier must be positive"));
    }
    crate::online::validate_taus(&config.taus)
}

pub fn oracle_experiment(config: &OracleConfig) -> Result<OracleReport> {
    validate(config)?;
    let spec = &config.spec;
    let n = spec.length;
    let map = FeatureMap::Autoregressive { order: spec.ar.len() };
    let (k, d) = (map.memory(), map.dim());
    if n <= k + d {
        return Err(Error::InsufficientData { needed: k + d + 1, got: n });
    }
    let bound_b = spec.sup_bound();
    let dependence_c = spec.weak_dependence_bound();
    let feature_sup = map.feature_sup(bound_b);

    let mut hold_rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &[u64::MAX]));
    let holdout_values = simulate_values(spec, config.holdout, &mut hold_rng)?;
    let holdout = Design::from_values(map, &holdout_values)?;

    // Training designs are shared across τ.
    let designs: Vec<Design> = (0..config.replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &[r as u64]));
            let values = simulate_values(spec, n, &mut rng)?;
            Design::from_values(map, &values)
        })
        .collect::<Result<_>>()?;

    let grid = comparator_grid(config.ball, d, config.grid_per_axis);
    let step = 2.0 * config.ball / (config.grid_per_axis - 1) as f64;

    let mut per_tau = Vec::with_capacity(config.taus.len());
    for (ti, &tau) in config.taus.iter().enumerate() {
        let loss = LossFn::quantile(tau)?;
        // Θ(B + 1) is the prior support, so the lag coefficients sum to at most B + 1.
        let constants = TheoryConstants::new(loss.lipschitz(), config.ball + 1.0, bound_b, dependence_c, n, k)?;
        let lambda = constants.tuned_lambda();
        let (raw_bound, delta) = ball_remainder(&constants, lambda, config.ball, feature_sup, config.kl, config.epsilon)?;
        let bound = raw_bound * config.multiplier;
        let closed_form_bound = closed_form_remainder(n, constants.kappa, config.ball, bound_b, config.epsilon).ok();

        // Rounding each coordinate toward zero onto the grid stays in Θ(B)
        // and moves θ by less than d · step in L1.
        let grid_slack = loss.lipschitz() * feature_sup * d as f64 * step;
        if grid_slack > MAX_GRID_SLACK * bound {
            return Err(Error::Config(format!(
                "comparator grid too coarse: slack {grid_slack:.4} exceeds {MAX_GRID_SLACK} x bound {bound:.4}"
            )));
        }
        let grid_risk: Vec<f64> = grid.par_iter().map(|p| loss.risk(p, holdout.view())).collect();
        let (best, grid_inf) = grid_risk
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) });

        let outcomes: Vec<(bool, f64)> = designs
            .par_iter()
            .enumerate()
            .map(|(r, design)| {
                let view = design.view();
                let pilot = pilot_fit_design(tau, view)?;
                let fit = importance_sample_gibbs(
                    &loss,
                    lambda,
                    view,
                    config.ball + 1.0,
                    &pilot.theta,
                    &config.sampler,
                    derive_seed(config.seed, &[r as u64, ti as u64, 1]),
                )?;
                let (risk, se) = holdout_risk(&loss, fit.theta_hat.as_slice(), holdout.view());
                Ok((risk - 2.0 * se > grid_inf + bound, risk - grid_inf))
            })
            .collect::<Result<_>>()?;

        let violations = outcomes.iter().filter(|o| o.0).count();
        let m = config.replications as f64;
        let eps = config.epsilon;
        let threshold = eps + 2.0 * (eps * (1.0 - eps) / m).sqrt();
        let violation_rate = violations as f64 / m;
        per_tau.push(OracleTauReport {
            tau,
            constants,
            lambda,
            delta,
            bound,
            closed_form_bound,
            grid_inf,
            grid_argmin: grid[best].clone(),
            grid_slack,
            violations,
            violation_rate,
            threshold,
            mean_excess_risk: outcomes.iter().map(|o| o.1).sum::<f64>() / m,
            max_excess_risk: outcomes.iter().map(|o| o.1).fold(f64::NEG_INFINITY, f64::max),
            pass: violation_rate <= threshold,
        });
    }
    let pass = per_tau.iter().all(|r| r.pass);
    Ok(OracleReport {
        config: config.clone(),
        bound_b,
        dependence_c,
        per_tau,
        pass,
    })
}
