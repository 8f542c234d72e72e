//! Monte Carlo checks of the exponential moment inequalities behind the
//! oracle bound: Rio's Hoeffding-type inequality for Lipschitz functionals
//! of a weakly dependent process, and its specialization to the deviation
//! `R(θ) - r_n(θ)` of the empirical risk.
//!
//! The centering `E[h]` is replaced by the Monte Carlo mean of `h`, which
//! makes the estimate `M⁻¹ Σ_j exp(t (h̄ - h_j))` at least 1 by Jensen's
//! inequality applied to the empirical measure.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::kappa;
use crate::error::{Error, Result};
use crate::losses::LossFn;
use crate::series::{simulate_values, synthetic_start, Design, FeatureMap, SyntheticSpec, TimeSeries};
use crate::stats::derive_seed;

/// Width of the one-sided Monte Carlo band, in standard errors.
pub const DEFAULT_Z: f64 = 3.0;
/// Relative standard error above which a cell is inconclusive.
pub const MAX_RELATIVE_ERROR: f64 = 0.5;
const CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// Fail dominates; otherwise any pass makes the whole a pass.
    pub fn combine(items: impl IntoIterator<Item = Verdict>) -> Verdict {
        let mut any_pass = false;
        let mut any = false;
        for v in items {
            any = true;
            match v {
                Verdict::Fail => return Verdict::Fail,
                Verdict::Pass => any_pass = true,
                Verdict::Inconclusive => {}
            }
        }
        if any_pass || !any {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        }
    }
}

/// Run `replications` independent draws in fixed-size chunks, each chunk
/// seeded from `(seed, chunk index)`. The output order, and hence any
/// reduction over it, does not depend on the thread count.
pub(crate) fn replicate<T, F>(replications: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    let chunks = replications.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[c as u64]));
            let len = CHUNK.min(replications - c * CHUNK);
            (0..len).map(|_| f(&mut rng)).collect::<Vec<_>>()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MgfCell {
    pub t: f64,
    pub mc_mean: f64,
    pub mc_se: f64,
    /// `mc_mean - z · mc_se`.
    pub band_lower: f64,
    pub band_upper: f64,
    pub bound: f64,
    pub relative_error: f64,
    pub jensen_floor_ok: bool,
    pub verdict: Verdict,
}

/// Estimate `E exp(t (h̄ - h))` from samples of `h` and compare with `bound(t)`.
fn mgf_cells(samples: &[f64], ts: &[f64], z: f64, bound: impl Fn(f64) -> f64) -> Vec<MgfCell> {
    let m = samples.len() as f64;
    let center = samples.iter().sum::<f64>() / m;
    ts.iter()
        .map(|&t| {
            let vals: Vec<f64> = samples.iter().map(|h| (t * (center - h)).exp()).collect();
            let mean = vals.iter().sum::<f64>() / m;
            let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0).max(1.0);
            let se = (var / m).sqrt();
            let b = bound(t);
            let rel = if mean > 0.0 { se / mean } else { f64::INFINITY };
            let jensen = mean >= 1.0 - 1e-12;
            let lower = mean - z * se;
            let verdict = if t == 0.0 {
                Verdict::Pass
            } else if !jensen {
                Verdict::Fail
            } else if rel.is_nan() || rel > MAX_RELATIVE_ERROR {
                Verdict::Inconclusive
            } else if lower <= b {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            MgfCell {
                t,
                mc_mean: mean,
                mc_se: se,
                band_lower: lower,
                band_upper: mean + z * se,
                bound: b,
                relative_error: rel,
                jensen_floor_ok: jensen,
                verdict,
            }
        })
        .collect()
}

/// Process driving the functional `h(X_1..X_n) = Σ_i clip(X_i, ±𝓑)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MgfProcess {
    /// iid uniform on `[-b, b]`: `𝓑 = b`, no dependence.
    IidUniform { b: f64 },
    /// AR(1) with uniform innovations and the coupling bound on dependence.
    Ar1 { a: f64, b: f64 },
}

impl MgfProcess {
    fn spec(&self) -> SyntheticSpec {
        match *self {
            MgfProcess::IidUniform { b } => SyntheticSpec::ar1(0.0, b, 0, 0),
            MgfProcess::Ar1 { a, b } => SyntheticSpec::ar1(a, b, 0, 0),
        }
    }

    pub fn bound_b(&self) -> f64 {
        self.spec().sup_bound()
    }

    pub fn dependence_c(&self) -> f64 {
        match self {
            MgfProcess::IidUniform { .. } => 0.0,
            MgfProcess::Ar1 { .. } => self.spec().weak_dependence_bound(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MgfReport {
    pub process: MgfProcess,
    pub n: usize,
    pub bound_b: f64,
    pub dependence_c: f64,
    pub replications: usize,
    pub seed: u64,
    pub z: f64,
    pub cells: Vec<MgfCell>,
    pub verdict: Verdict,
}

/// Checks `E e^{t(E h - h)} ≤ exp(t² n (𝓑 + 𝓒)² / 2)` for each `t`.
pub fn rio_mgf_check(
    process: MgfProcess,
    n: usize,
    t_grid: &[f64],
    replications: usize,
    seed: u64,
) -> Result<MgfReport> {
    if n == 0 || replications < 2 {
        return Err(Error::domain("need n >= 1 and at least two replications"));
    }
    if t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::domain("t values must be finite and >= 0"));
    }
    let spec = process.spec();
    spec.validate()?;
    let bb = process.bound_b();
    let c = process.dependence_c();
    let samples = replicate(replications, seed, |rng| {
        simulate_values(&spec, n, rng)
            .expect("validated spec")
            .iter()
            .map(|x| x.clamp(-bb, bb))
            .sum::<f64>()
    });
    let scale = n as f64 * (bb + c) * (bb + c) / 2.0;
    let cells = mgf_cells(&samples, t_grid, DEFAULT_Z, |t| (t * t * scale).exp());
    let verdict = Verdict::combine(cells.iter().map(|c| c.verdict));
    Ok(MgfReport {
        process,
        n,
        bound_b: bb,
        dependence_c: c,
        replications,
        seed,
        z: DEFAULT_Z,
        cells,
        verdict,
    })
}

/// Synthetic two-column data for the GDP predictor: independent AR(1)
/// components for the growth rate and the climate indicator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskDeviationConfig {
    pub growth_ar: f64,
    pub climate_ar: f64,
    pub innovation_bound: f64,
    pub n: usize,
    pub tau: f64,
    /// Parameter of the GDP predictor where the deviation is measured.
    pub theta: Vec<f64>,
    /// Ball radius `B`; the predictor budget is taken on `Θ(B + 1)`.
    pub ball: f64,
    pub lambdas: Vec<f64>,
    pub replications: usize,
    pub seed: u64,
}

impl Default for RiskDeviationConfig {
    fn default() -> Self {
        Self {
            growth_ar: 0.4,
            climate_ar: 0.6,
            innovation_bound: 0.1,
            n: 60,
            tau: 0.5,
            theta: vec![0.1, 0.3, 0.5, 0.2],
            ball: 1.0,
            lambdas: vec![0.5, 1.0, 2.0, 4.0],
            replications: 20_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskDeviationReport {
    pub config: RiskDeviationConfig,
    pub bound_b: f64,
    pub dependence_c: f64,
    pub lipschitz_budget: f64,
    pub kappa: f64,
    /// Cells for `E e^{λ(R - r_n)}`; `t` holds λ.
    pub upper: Vec<MgfCell>,
    /// Cells for `E e^{λ(r_n - R)}`.
    pub lower: Vec<MgfCell>,
    pub verdict: Verdict,
}

/// Checks `E e^{±λ(R(θ) - r_n(θ))} ≤ exp(λ²κ² / (n(1 - k/n)²))` for the
/// GDP predictor. Vectors are measured in the L1 norm, so `𝓑` and `𝓒` add
/// over the two components. The budget `L` bounds `Σ_j a_j(θ)` over
/// `Θ(B + 1)` given that the climate component stays within `𝓑_I`:
/// `(B + 1) max(1, 8 𝓑_I)`, the factor coming from `u ↦ u|u|`.
pub fn risk_deviation_check(config: &RiskDeviationConfig) -> Result<RiskDeviationReport> {
    let map = FeatureMap::Gdp;
    let k = map.memory();
    if config.n <= k + 1 || config.replications < 2 {
        return Err(Error::domain("need n > k + 1 and at least two replications"));
    }
    if config.theta.len() != map.dim() {
        return Err(Error::domain(format!("theta must have {} coordinates", map.dim())));
    }
    if config.lambdas.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return Err(Error::domain("lambdas must be finite and >= 0"));
    }
    let growth = SyntheticSpec::ar1(config.growth_ar, config.innovation_bound, config.n, 0);
    let climate = SyntheticSpec::ar1(config.climate_ar, config.innovation_bound, config.n, 0);
    growth.validate()?;
    climate.validate()?;
    let loss = LossFn::quantile(config.tau)?;
    let bound_b = growth.sup_bound() + climate.sup_bound();
    let dependence_c = growth.weak_dependence_bound() + climate.weak_dependence_bound();
    let budget = (config.ball + 1.0) * (8.0 * climate.sup_bound()).max(1.0);
    let kap = kappa(loss.lipschitz(), budget, bound_b, dependence_c)?;

    let risks = replicate(config.replications, config.seed, |rng| {
        let g = simulate_values(&growth, config.n, rng).expect("validated spec");
        let c = simulate_values(&climate, config.n, rng).expect("validated spec");
        let rows: Vec<Vec<f64>> = g.iter().zip(&c).map(|(a, b)| vec![*a, *b]).collect();
        let series = TimeSeries::from_rows(
            synthetic_start(),
            vec!["gdp_growth".into(), "climate".into()],
            &rows,
        )
        .expect("finite simulated values");
        let design = Design::build(&series, map, 0).expect("enough rows");
        loss.risk(&config.theta, design.view())
    });

    let nf = config.n as f64;
    let shrink = 1.0 - k as f64 / nf;
    let bound = |l: f64| (l * l * kap * kap / (nf * shrink * shrink)).exp();
    // e^{λ(R - r_n)}: h = r_n. e^{λ(r_n - R)}: h = -r_n.
    let upper = mgf_cells(&risks, &config.lambdas, DEFAULT_Z, bound);
    let negated: Vec<f64> = risks.iter().map(|r| -r).collect();
    let lower = mgf_cells(&negated, &config.lambdas, DEFAULT_Z, bound);
    let verdict = Verdict::combine(upper.iter().chain(&lower).map(|c| c.verdict));
    Ok(RiskDeviationReport {
        config: config.clone(),
        bound_b,
        dependence_c,
        lipschitz_budget: budget,
        kappa: kap,
        upper,
        lower,
        verdict,
    })
}
