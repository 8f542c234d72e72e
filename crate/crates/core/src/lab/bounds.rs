//! Theory constants and the closed-form oracle-inequality remainders.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `K(1 + L)(𝓑 + 𝓒) / √2`.
///
/// `K` is the loss Lipschitz constant, `L` the predictor Lipschitz budget,
/// `𝓑` the almost-sure bound on the process and `𝓒` its weak-dependence bound.
pub fn kappa(k_loss: f64, l_lip: f64, bound_b: f64, weakdep_c: f64) -> Result<f64> {
    let finite = [k_loss, l_lip, bound_b, weakdep_c].iter().all(|v| v.is_finite());
    if !finite || k_loss <= 0.0 || l_lip < 0.0 || bound_b <= 0.0 || weakdep_c < 0.0 {
        return Err(Error::domain(format!(
            "kappa needs K > 0, L >= 0, bound > 0, C >= 0; got K={k_loss}, L={l_lip}, bound={bound_b}, C={weakdep_c}"
        )));
    }
    Ok(k_loss * (1.0 + l_lip) * (bound_b + weakdep_c) / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    pub k_loss: f64,
    pub l_lip: f64,
    pub bound_b: f64,
    pub weakdep_c: f64,
    pub kappa: f64,
    pub n: usize,
    pub memory: usize,
}

impl TheoryConstants {
    pub fn new(k_loss: f64, l_lip: f64, bound_b: f64, weakdep_c: f64, n: usize, memory: usize) -> Result<Self> {
        if memory >= n {
            return Err(Error::domain(format!("memory {memory} must be below n = {n}")));
        }
        Ok(Self {
            k_loss,
            l_lip,
            bound_b,
            weakdep_c,
            kappa: kappa(k_loss, l_lip, bound_b, weakdep_c)?,
            n,
            memory,
        })
    }

    /// Quantile loss (`K = 1`) with the GDP predictor over `Θ(B)`: `L = B + 1`, `k = 2`.
    pub fn gdp(ball: f64, bound_b: f64, weakdep_c: f64, n: usize) -> Result<Self> {
        Self::new(1.0, ball + 1.0, bound_b, weakdep_c, n, 2)
    }

    /// `λ = √(3n) / κ`.
    pub fn tuned_lambda(&self) -> f64 {
        (3.0 * self.n as f64).sqrt() / self.kappa
    }
}

fn check_epsilon(epsilon: f64, allow_one: bool) -> Result<()> {
    let ok = epsilon > 0.0 && (epsilon < 1.0 || (allow_one && epsilon == 1.0));
    if ok {
        Ok(())
    } else {
        Err(Error::domain(format!("epsilon out of range: {epsilon}")))
    }
}

fn rate_term(lambda: f64, n: usize, k: usize, kappa: f64) -> f64 {
    let n = n as f64;
    let shrink = 1.0 - k as f64 / n;
    2.0 * lambda * kappa * kappa / (n * shrink * shrink)
}

fn check_general(lambda: f64, n: usize, k: usize, kappa: f64, kl: f64) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::domain(format!("need 0 < k < n, got k = {k}, n = {n}")));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain(format!("lambda must be positive, got {lambda}")));
    }
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::domain(format!("kappa must be positive, got {kappa}")));
    }
    if !(kl.is_finite() && kl >= 0.0) {
        return Err(Error::domain(format!("KL must be finite and >= 0, got {kl}")));
    }
    Ok(())
}

/// Excess of the oracle inequality over `∫R dρ` for a fixed λ:
///
/// ```text
/// 2λκ² / (n (1 - k/n)²) + (2 KL + 2 log(2/ε)) / λ
/// ```
pub fn oracle_remainder(lambda: f64, n: usize, k: usize, kappa: f64, kl: f64, epsilon: f64) -> Result<f64> {
    Ok(oracle_report(lambda, n, k, kappa, kl, epsilon)?.total_bound)
}

pub fn oracle_report(lambda: f64, n: usize, k: usize, kappa: f64, kl: f64, epsilon: f64) -> Result<BoundReport> {
    check_general(lambda, n, k, kappa, kl)?;
    check_epsilon(epsilon, false)?;
    let rate = rate_term(lambda, n, k, kappa);
    let complexity = (2.0 * kl + 2.0 * (2.0 / epsilon).ln()) / lambda;
    Ok(BoundReport {
        lambda,
        epsilon,
        kl_term: complexity,
        rate_term: rate,
        total_bound: rate + complexity,
        regime: BoundRegime::General,
    })
}

/// Grid value of λ with the smallest [`oracle_remainder`]; ties keep the first.
pub fn minimize_oracle_remainder(
    lambdas: &[f64],
    n: usize,
    k: usize,
    kappa: f64,
    kl: f64,
    epsilon: f64,
) -> Result<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for &l in lambdas {
        let v = oracle_remainder(l, n, k, kappa, kl, epsilon)?;
        if best.is_none_or(|(_, bv)| v < bv) {
            best = Some((l, v));
        }
    }
    best.ok_or_else(|| Error::domain("empty lambda grid"))
}

/// `points` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && points >= 2) {
        return Err(Error::domain("log grid needs 0 < lo < hi and at least 2 points"));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect())
}

/// Convexity on a possibly uneven grid: successive secant slopes never
/// decrease by more than `tol` (relative to the slope scale).
pub fn is_convex_on_grid(xs: &[f64], ys: &[f64], tol: f64) -> bool {
    let slopes: Vec<f64> = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
        .collect();
    slopes
        .windows(2)
        .all(|s| s[1] - s[0] >= -tol * (1.0 + s[0].abs().max(s[1].abs())))
}

/// Exponent used for the KL divergence between uniform laws on L1 balls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum KlConvention {
    /// The constant 3 used in the published derivation of the GDP bound.
    StatedConstant,
    /// The volume-ratio exponent: the parameter dimension.
    VolumeRatio { dim: usize },
}

impl KlConvention {
    pub fn exponent(&self) -> f64 {
        match self {
            KlConvention::StatedConstant => 3.0,
            KlConvention::VolumeRatio { dim } => *dim as f64,
        }
    }

    pub fn label(&self) -> String {
        match self {
            KlConvention::StatedConstant => "stated_constant_3".into(),
            KlConvention::VolumeRatio { dim } => format!("volume_ratio_dim_{dim}"),
        }
    }
}

/// `KL(ρ_{θ,δ}, π_B) = exponent · log((B + 1) / δ)`, where `ρ_{θ,δ}` is uniform
/// on the L1 ball of radius δ around `θ ∈ Θ(B)` and `π_B` uniform on `Θ(B + 1)`.
pub fn kl_uniform_balls(ball: f64, delta: f64, convention: KlConvention) -> Result<f64> {
    if !(ball.is_finite() && ball >= 0.0) {
        return Err(Error::domain(format!("B must be finite and >= 0, got {ball}")));
    }
    if !(delta > 0.0 && delta <= ball + 1.0) {
        return Err(Error::domain(format!(
            "delta must lie in (0, B + 1] = (0, {}], got {delta}",
            ball + 1.0
        )));
    }
    Ok(convention.exponent() * ((ball + 1.0) / delta).ln())
}

/// Closed-form excess at `λ = √(3n)/κ`:
///
/// ```text
/// (2√3 κ / √n) [2.25 + log((B+1) 𝓑 √n / κ) + log(1/ε) / 3]
/// ```
///
/// Requires `n ≥ max(10, κ² / (3𝓑²))` as the derivation does.
pub fn closed_form_remainder(n: usize, kappa: f64, ball: f64, bound_b: f64, epsilon: f64) -> Result<f64> {
    Ok(closed_form_report(n, kappa, ball, bound_b, epsilon)?.total_bound)
}

pub fn closed_form_report(n: usize, kappa: f64, ball: f64, bound_b: f64, epsilon: f64) -> Result<BoundReport> {
    if !(kappa.is_finite() && kappa > 0.0 && bound_b.is_finite() && bound_b > 0.0 && ball >= 0.0) {
        return Err(Error::domain("kappa and the process bound must be positive, B >= 0"));
    }
    check_epsilon(epsilon, true)?;
    let nf = n as f64;
    let needed = 10f64.max(kappa * kappa / (3.0 * bound_b * bound_b));
    if nf < needed {
        return Err(Error::domain(format!(
            "closed form needs n >= max(10, kappa^2 / (3 bound^2)) = {needed}, got n = {n}"
        )));
    }
    let scale = 2.0 * 3f64.sqrt() * kappa / nf.sqrt();
    let rate = scale * 2.25;
    let complexity = scale * (((ball + 1.0) * bound_b * nf.sqrt() / kappa).ln() + (1.0 / epsilon).ln() / 3.0);
    Ok(BoundReport {
        lambda: (3.0 * nf).sqrt() / kappa,
        epsilon,
        kl_term: complexity,
        rate_term: rate,
        total_bound: rate + complexity,
        regime: BoundRegime::Tuned,
    })
}

/// Excess bound for a `dim`-dimensional linear predictor family after
/// choosing ρ uniform on an L1 ball of radius δ around the comparator:
///
/// ```text
/// 2λκ²/(n(1-k/n)²) + K c δ + (2 e log((B+1)/δ) + 2 log(2/ε)) / λ
/// ```
///
/// with `c` the sup of the features, `e` the KL exponent and δ set to its
/// minimizer `2e/(λKc)` clipped to `(0, 1]`.
pub fn ball_remainder(
    constants: &TheoryConstants,
    lambda: f64,
    ball: f64,
    feature_sup: f64,
    convention: KlConvention,
    epsilon: f64,
) -> Result<(f64, f64)> {
    if !(feature_sup.is_finite() && feature_sup > 0.0) {
        return Err(Error::domain("feature sup must be positive"));
    }
    let e = convention.exponent();
    let slope = constants.k_loss * feature_sup;
    let delta = (2.0 * e / (lambda * slope)).min(1.0);
    let kl = kl_uniform_balls(ball, delta, convention)?;
    let base = oracle_remainder(lambda, constants.n, constants.memory, constants.kappa, kl, epsilon)?;
    Ok((base + slope * delta, delta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundRegime {
    /// Any fixed λ and KL term.
    General,
    /// The closed form at `λ = √(3n)/κ`.
    Tuned,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub lambda: f64,
    pub epsilon: f64,
    /// Terms carrying the KL divergence and the confidence level.
    pub kl_term: f64,
    /// Terms driven by the concentration rate.
    pub rate_term: f64,
    pub total_bound: f64,
    pub regime: BoundRegime,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kappa_examples() {
        assert_relative_eq!(kappa(1.0, 101.0, 1.0, 1.0).unwrap(), 102.0 * 2f64.sqrt(), max_relative = 1e-15);
        assert!((kappa(1.0, 101.0, 1.0, 1.0).unwrap() - 144.2497).abs() < 1e-3);
        assert_relative_eq!(kappa(1.0, 0.0, 2f64.sqrt(), 0.0).unwrap(), 1.0, max_relative = 1e-15);
        assert!(kappa(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(kappa(1.0, 1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn kappa_is_homogeneous_in_bound_plus_c() {
        let a = kappa(0.7, 3.0, 0.5, 1.5).unwrap();
        let b = kappa(0.7, 3.0, 1.5, 4.5).unwrap();
        assert_relative_eq!(b, 3.0 * a, max_relative = 1e-15);
    }

    #[test]
    fn oracle_remainder_arithmetic() {
        let eps = 2.0 / std::f64::consts::E;
        let v = oracle_remainder(1.0, 100, 2, 1.0, 0.0, eps).unwrap();
        let expected = 2.0 / (100.0 * 0.98 * 0.98) + 2.0;
        assert_relative_eq!(v, expected, max_relative = 1e-14);
        assert!((v - 2.020824).abs() < 1e-6);
        let w = oracle_remainder(1.0, 100, 2, 1.0, 1.5, eps).unwrap();
        assert_relative_eq!(w - v, 2.0 * 1.5 / 1.0, max_relative = 1e-12);
        assert!(oracle_remainder(1.0, 2, 2, 1.0, 0.0, 0.5).is_err());
        assert!(oracle_remainder(1.0, 10, 2, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn grid_minimizer_is_an_argmin() {
        let grid = log_grid(0.01, 1000.0, 50).unwrap();
        let (l, v) = minimize_oracle_remainder(&grid, 400, 1, 3.0, 4.0, 0.1).unwrap();
        for &g in &grid {
            assert!(v <= oracle_remainder(g, 400, 1, 3.0, 4.0, 0.1).unwrap());
        }
        assert!(grid.contains(&l));
    }

    #[test]
    fn kl_modes() {
        assert_eq!(kl_uniform_balls(99.0, 100.0, KlConvention::StatedConstant).unwrap(), 0.0);
        assert!((kl_uniform_balls(99.0, 1.0, KlConvention::StatedConstant).unwrap() - 13.8155).abs() < 1e-4);
        assert!((kl_uniform_balls(99.0, 1.0, KlConvention::VolumeRatio { dim: 4 }).unwrap() - 18.4207).abs() < 1e-4);
        assert!(kl_uniform_balls(99.0, 100.5, KlConvention::StatedConstant).is_err());
        assert!(kl_uniform_balls(99.0, 0.0, KlConvention::StatedConstant).is_err());
    }

    #[test]
    fn closed_form_preconditions() {
        let k = 3f64.sqrt();
        assert!(closed_form_remainder(3, k, 99.0, 1.0, 0.5).is_err());
        // κ² / (3𝓑²) = 100 > 50.
        assert!(closed_form_remainder(50, 30.0, 99.0, 1.0, 0.5).is_err());
        assert!(closed_form_remainder(300, 30.0, 99.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn closed_form_terms_add_up() {
        let r = closed_form_report(300, 30.0, 99.0, 1.0, 0.2).unwrap();
        assert_eq!(r.total_bound, r.rate_term + r.kl_term);
        assert_relative_eq!(r.lambda, 1.0, max_relative = 1e-14);
        assert_eq!(r.regime, BoundRegime::Tuned);
    }

    #[test]
    fn convexity_detector() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        assert!(is_convex_on_grid(&xs, &xs.map(|x| x * x), 1e-12));
        assert!(!is_convex_on_grid(&xs, &xs.map(f64::sqrt), 1e-12));
    }

    #[test]
    fn ball_remainder_uses_optimal_delta() {
        let c = TheoryConstants::new(0.5, 3.0, 2.0, 4.0, 400, 1).unwrap();
        let lambda = c.tuned_lambda();
        let conv = KlConvention::VolumeRatio { dim: 2 };
        let (v, delta) = ball_remainder(&c, lambda, 2.0, 2.0, conv, 0.1).unwrap();
        for d in [0.5 * delta, 0.9 * delta, 1.1 * delta.min(0.9)] {
            let kl = kl_uniform_balls(2.0, d, conv).unwrap();
            let alt = oracle_remainder(lambda, 400, 1, c.kappa, kl, 0.1).unwrap() + 0.5 * 2.0 * d;
            assert!(v <= alt + 1e-12);
        }
    }
}
