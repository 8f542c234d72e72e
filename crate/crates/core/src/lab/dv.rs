//! Donsker–Varadhan variational identity on finite supports:
//! `log π[e^h] = sup_ρ (ρ[h] - KL(ρ, π))`, attained at the Gibbs measure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::log_sum_exp;

/// Step size of the entropic mirror ascent.
const MIRROR_STEP: f64 = 0.2;
const MIRROR_ITERS: usize = 400;
const RANDOM_STARTS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DvReport {
    /// `log Σ π_i e^{h_i}`.
    pub lhs: f64,
    /// Variational objective evaluated at the Gibbs measure.
    pub rhs_closed_form: f64,
    /// Best objective found by mirror ascent from random starts.
    pub rhs_numerical: f64,
    pub gibbs: Vec<f64>,
    pub numerical_argmax: Vec<f64>,
}

impl DvReport {
    pub fn closed_form_gap(&self) -> f64 {
        (self.lhs - self.rhs_closed_form).abs()
    }

    /// How far the numerical search overshoots the left side (0 if it does not).
    pub fn numerical_excess(&self) -> f64 {
        (self.rhs_numerical - self.lhs).max(0.0)
    }
}

/// `ρ[h] - KL(ρ, π)`, restricted to the support of π.
pub fn variational_objective(rho: &[f64], prior: &[f64], h: &[f64]) -> f64 {
    rho.iter()
        .zip(prior)
        .zip(h)
        .filter(|((r, p), _)| **r > 0.0 && **p > 0.0)
        .map(|((r, p), hi)| r * (hi - (r / p).ln()))
        .sum()
}

fn validate(prior: &[f64], h: &[f64]) -> Result<()> {
    if prior.is_empty() || prior.len() != h.len() {
        return Err(Error::domain("need one value of h per prior atom"));
    }
    if prior.iter().any(|p| !(p.is_finite() && *p >= 0.0)) || h.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("prior and h must be finite, prior nonnegative"));
    }
    let total: f64 = prior.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::domain(format!("prior sums to {total}")));
    }
    Ok(())
}

pub fn dv_check(prior: &[f64], h: &[f64], seed: u64) -> Result<DvReport> {
    validate(prior, h)?;
    let support: Vec<usize> = (0..prior.len()).filter(|&i| prior[i] > 0.0).collect();
    let log_terms: Vec<f64> = support.iter().map(|&i| prior[i].ln() + h[i]).collect();
    let lhs = log_sum_exp(&log_terms);

    let mut gibbs = vec![0.0; prior.len()];
    for (&i, lt) in support.iter().zip(&log_terms) {
        gibbs[i] = (lt - lhs).exp();
    }
    let rhs_closed_form = variational_objective(&gibbs, prior, h);

    // Entropic mirror ascent on the support. The gradient of the objective
    // in ρ_i is h_i - log(ρ_i/π_i) - 1; the constant drops on normalization.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::NEG_INFINITY;
    let mut best_rho = gibbs.clone();
    for _ in 0..RANDOM_STARTS {
        let mut log_rho: Vec<f64> = support.iter().map(|_| rng.random::<f64>().max(1e-300).ln()).collect();
        normalize_log(&mut log_rho);
        for _ in 0..MIRROR_ITERS {
            for (j, &i) in support.iter().enumerate() {
                let grad = h[i] - (log_rho[j] - prior[i].ln());
                log_rho[j] += MIRROR_STEP * grad;
            }
            normalize_log(&mut log_rho);
        }
        let mut rho = vec![0.0; prior.len()];
        for (j, &i) in support.iter().enumerate() {
            rho[i] = log_rho[j].exp();
        }
        let value = variational_objective(&rho, prior, h);
        if value > best {
            best = value;
            best_rho = rho;
        }
    }
    Ok(DvReport {
        lhs,
        rhs_closed_form,
        rhs_numerical: best,
        gibbs,
        numerical_argmax: best_rho,
    })
}

fn normalize_log(log_rho: &mut [f64]) {
    let z = log_sum_exp(log_rho);
    log_rho.iter_mut().for_each(|v| *v -= z);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DvBatchReport {
    pub instances: usize,
    pub max_support: usize,
    pub max_closed_form_gap: f64,
    pub max_numerical_excess: f64,
    pub closed_form_tolerance: f64,
    pub solver_tolerance: f64,
    pub pass: bool,
}

/// Random instances with support size up to `max_support`: prior from
/// normalized exponentials (some atoms zeroed), `h` uniform on `[-5, 5]`.
pub fn dv_batch(instances: usize, max_support: usize, seed: u64) -> Result<DvBatchReport> {
    if max_support == 0 {
        return Err(Error::domain("support size must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut gap, mut excess) = (0.0_f64, 0.0_f64);
    for i in 0..instances {
        let m = rng.random_range(1..=max_support);
        let mut prior: Vec<f64> = (0..m).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        if m > 2 {
            prior[rng.random_range(0..m)] = 0.0;
        }
        let total: f64 = prior.iter().sum();
        prior.iter_mut().for_each(|p| *p /= total);
        let h: Vec<f64> = (0..m).map(|_| rng.random_range(-5.0..5.0)).collect();
        let r = dv_check(&prior, &h, crate::stats::derive_seed(seed, &[i as u64]))?;
        gap = gap.max(r.closed_form_gap());
        excess = excess.max(r.numerical_excess());
    }
    let (cf_tol, solver_tol) = (1e-12, 1e-6);
    Ok(DvBatchReport {
        instances,
        max_support,
        max_closed_form_gap: gap,
        max_numerical_excess: excess,
        closed_form_tolerance: cf_tol,
        solver_tolerance: solver_tol,
        pass: gap < cf_tol && excess <= solver_tol,
    })
}
