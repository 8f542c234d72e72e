//! Self-normalized importance sampling of the Gibbs mean under a uniform
//! prior on an L1 ball.
//!
//! Draws `T_1..T_N ~ N(center, v I)` with density `g`; the estimate is
//!
//! ```text
//! θ̂ = Σ_i T_i w_i / Σ_j w_j,   w_i = exp(-λ r(T_i)) 1{‖T_i‖₁ ≤ R} / g(T_i)
//! ```
//!
//! The draw set is generated once and can be re-weighted for any λ and any
//! risk vector computed on it. Normalizing constants of `g` and of the prior
//! cancel and are dropped.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::prior::{l1_norm, ParamVector};
use crate::error::{Error, Result};
use crate::losses::LossFn;
use crate::series::DesignView;

/// Proposal variance used when none is configured.
pub const DEFAULT_PROPOSAL_VAR: f64 = 1.0;
/// ESS below `samples * DEFAULT_ESS_FLOOR` raises the low-ESS flag.
pub const DEFAULT_ESS_FLOOR: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub samples: usize,
    pub proposal_var: f64,
    /// Fraction of `samples`; an ESS below it flags the result.
    pub ess_floor: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            samples: 100_000,
            proposal_var: DEFAULT_PROPOSAL_VAR,
            ess_floor: DEFAULT_ESS_FLOOR,
        }
    }
}

impl SamplerConfig {
    pub fn with_samples(samples: usize) -> Self {
        Self {
            samples,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::domain("need at least one importance draw"));
        }
        if !(self.proposal_var.is_finite() && self.proposal_var > 0.0) {
            return Err(Error::domain(format!(
                "proposal variance must be positive, got {}",
                self.proposal_var
            )));
        }
        if !(0.0..=1.0).contains(&self.ess_floor) {
            return Err(Error::domain("ESS floor is a fraction in [0, 1]"));
        }
        Ok(())
    }
}

/// Aggregated estimate with sampler diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsResult {
    pub theta_hat: ParamVector,
    pub lambda: f64,
    pub n_samples: usize,
    /// `(Σw)² / Σw²`.
    pub ess: f64,
    /// Fraction of draws inside the prior ball.
    pub mass_inside: f64,
    /// Delta-method Monte Carlo standard error per coordinate.
    pub std_error: Vec<f64>,
    pub low_ess: bool,
}

/// A reusable set of proposal draws.
#[derive(Debug, Clone)]
pub struct ProposalDraws {
    dim: usize,
    radius: f64,
    center: ParamVector,
    points: Vec<f64>,
    /// `-log g(T_i)` up to an additive constant.
    neg_log_density: Vec<f64>,
    inside: Vec<bool>,
    inside_count: usize,
    ess_floor: f64,
}

impl ProposalDraws {
    /// Deterministic in `seed`.
    pub fn draw(center: &ParamVector, radius: f64, config: &SamplerConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::domain(format!("ball radius must be positive, got {radius}")));
        }
        if center.dim() == 0 || !center.is_finite() {
            return Err(Error::domain("proposal center must be a finite nonempty vector"));
        }
        let d = center.dim();
        let n = config.samples;
        let sd = config.proposal_var.sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::with_capacity(n * d);
        let mut neg_log_density = Vec::with_capacity(n);
        let mut inside = Vec::with_capacity(n);
        for _ in 0..n {
            let mut sq = 0.0;
            let start = points.len();
            for c in center.as_slice() {
                let z: f64 = StandardNormal.sample(&mut rng);
                points.push(c + sd * z);
                sq += z * z;
            }
            neg_log_density.push(0.5 * sq);
            inside.push(l1_norm(&points[start..]) <= radius);
        }
        let inside_count = inside.iter().filter(|&&b| b).count();
        Ok(Self {
            dim: d,
            radius,
            center: center.clone(),
            points,
            neg_log_density,
            inside,
            inside_count,
            ess_floor: config.ess_floor,
        })
    }

    pub fn len(&self) -> usize {
        self.inside.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inside.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn center(&self) -> &ParamVector {
        &self.center
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn is_inside(&self, i: usize) -> bool {
        self.inside[i]
    }

    pub fn mass_inside(&self) -> f64 {
        self.inside_count as f64 / self.len() as f64
    }

    /// Empirical risk at every draw; `+inf` outside the ball. Evaluated in
    /// parallel; each entry is a sequential sum, so the result does not depend
    /// on the thread count.
    pub fn risks(&self, loss: &LossFn, design: DesignView<'_>) -> Result<Vec<f64>> {
        if design.dim != self.dim {
            return Err(Error::domain(format!(
                "draws have dimension {}, design has {}",
                self.dim, design.dim
            )));
        }
        if design.rows() == 0 {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        Ok(self
            .points
            .par_chunks_exact(self.dim)
            .zip(self.inside.par_iter())
            .map(|(t, &inside)| {
                if inside {
                    loss.risk(t, design)
                } else {
                    f64::INFINITY
                }
            })
            .collect())
    }

    /// Gibbs estimate at inverse temperature `lambda` (0 gives the prior mean).
    pub fn estimate(&self, risks: &[f64], lambda: f64) -> Result<GibbsResult> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::domain(format!("lambda must be finite and >= 0, got {lambda}")));
        }
        if risks.len() != self.len() {
            return Err(Error::domain("one risk per draw"));
        }
        let log_w: Vec<f64> = (0..self.len())
            .map(|i| {
                if self.inside[i] && risks[i].is_finite() {
                    self.neg_log_density[i] - lambda * risks[i]
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Err(Error::Coverage {
                samples: self.len(),
                radius: self.radius,
            });
        }
        let w: Vec<f64> = log_w.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = w.iter().sum();
        let mut mean = vec![0.0; self.dim];
        let mut sum_sq = 0.0;
        for (i, &wi) in w.iter().enumerate() {
            if wi == 0.0 {
                continue;
            }
            let wn = wi / total;
            sum_sq += wn * wn;
            for (m, t) in mean.iter_mut().zip(self.point(i)) {
                *m += wn * t;
            }
        }
        let mut var = vec![0.0; self.dim];
        for (i, &wi) in w.iter().enumerate() {
            if wi == 0.0 {
                continue;
            }
            let wn = wi / total;
            for ((v, t), m) in var.iter_mut().zip(self.point(i)).zip(&mean) {
                *v += wn * wn * (t - m) * (t - m);
            }
        }
        let ess = 1.0 / sum_sq;
        Ok(GibbsResult {
            theta_hat: ParamVector(mean),
            lambda,
            n_samples: self.len(),
            ess,
            mass_inside: self.mass_inside(),
            std_error: var.into_iter().map(f64::sqrt).collect(),
            low_ess: ess < self.ess_floor * self.len() as f64,
        })
    }

    pub fn estimate_many(&self, risks: &[f64], lambdas: &[f64]) -> Vec<Result<GibbsResult>> {
        lambdas.iter().map(|&l| self.estimate(risks, l)).collect()
    }
}

/// One-shot importance-sampling Gibbs estimate.
pub fn importance_sample_gibbs(
    loss: &LossFn,
    lambda: f64,
    design: DesignView<'_>,
    radius: f64,
    center: &ParamVector,
    config: &SamplerConfig,
    seed: u64,
) -> Result<GibbsResult> {
    let draws = ProposalDraws::draw(center, radius, config, seed)?;
    let risks = draws.risks(loss, design)?;
    draws.estimate(&risks, lambda)
}
