//! Gibbs (exponentially weighted) aggregation: priors, exact finite-grid
//! weights, the pilot estimator and the importance sampler.

mod finite;
mod pilot;
mod prior;
mod sampler;

pub use finite::{gibbs_mean_finite, gibbs_weights_finite};
pub use pilot::{least_squares, pilot_fit, pilot_fit_design, PilotFit, RIDGE};
pub use prior::{ParamVector, PriorSpec};
pub use sampler::{
    importance_sample_gibbs, GibbsResult, ProposalDraws, SamplerConfig, DEFAULT_ESS_FLOOR,
    DEFAULT_PROPOSAL_VAR,
};

/// Default radius `B` of the comparison ball; the prior lives on `Θ(B + 1)`.
pub const DEFAULT_BALL: f64 = 100.0;
