//! Weakly dependent test processes: AR / ARMA recursions driven by iid
//! innovations uniform on `[-b, b]`.
//!
//! With `s = Σ|a_i| < 1` and the recursion started at zero, induction gives
//! `|X_t| ≤ b (1 + Σ|m_j|) / (1 - s)` for every `t`, which is reported as the
//! series bound. The dependence constant is the coupling bound
//! `2b Σ_{i≥1} i |ψ_i|` over the MA(∞) weights `ψ`; for AR(1) this is
//! `|a| / (1 - |a|) · 2b / (1 - |a|)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::period::Quarter;
use super::timeseries::TimeSeries;
use crate::error::{Error, Result};

/// Steps discarded before the first emitted observation.
pub const BURN_IN: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticFamily {
    Ar1Bounded,
    ArmaBounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub family: SyntheticFamily,
    /// Autoregressive coefficients `a_1..a_p`.
    pub ar: Vec<f64>,
    /// Moving-average coefficients `m_1..m_q` (ARMA only).
    #[serde(default)]
    pub ma: Vec<f64>,
    pub innovation_bound: f64,
    pub seed: u64,
    pub length: usize,
}

impl SyntheticSpec {
    pub fn ar1(a: f64, b: f64, length: usize, seed: u64) -> Self {
        Self {
            family: SyntheticFamily::Ar1Bounded,
            ar: vec![a],
            ma: Vec::new(),
            innovation_bound: b,
            seed,
            length,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.innovation_bound.is_finite() && self.innovation_bound > 0.0) {
            return Err(Error::domain(format!(
                "innovation bound must be positive, got {}",
                self.innovation_bound
            )));
        }
        if self.ar.iter().chain(&self.ma).any(|c| !c.is_finite()) {
            return Err(Error::domain("non-finite coefficient"));
        }
        match self.family {
            SyntheticFamily::Ar1Bounded => {
                if self.ar.len() != 1 || !self.ma.is_empty() {
                    return Err(Error::domain("ar1_bounded takes exactly one AR coefficient"));
                }
            }
            SyntheticFamily::ArmaBounded => {
                if self.ar.is_empty() && self.ma.is_empty() {
                    return Err(Error::domain("arma_bounded needs at least one coefficient"));
                }
            }
        }
        let s = self.ar_mass();
        if s >= 1.0 {
            return Err(Error::domain(format!(
                "AR coefficients must satisfy Σ|a| < 1, got {s}"
            )));
        }
        Ok(())
    }

    fn ar_mass(&self) -> f64 {
        self.ar.iter().map(|a| a.abs()).sum()
    }

    /// Almost-sure sup bound `b (1 + Σ|m|) / (1 - Σ|a|)`.
    pub fn sup_bound(&self) -> f64 {
        let ma: f64 = self.ma.iter().map(|m| m.abs()).sum();
        self.innovation_bound * (1.0 + ma) / (1.0 - self.ar_mass())
    }

    /// MA(∞) weights `ψ_0 = 1, ψ_1, ...` truncated once the tail is negligible.
    pub fn psi_weights(&self) -> Vec<f64> {
        let mut psi = vec![1.0];
        let p = self.ar.len();
        for i in 1..10_000 {
            let mut v = self.ma.get(i - 1).copied().unwrap_or(0.0);
            for j in 1..=p.min(i) {
                v += self.ar[j - 1] * psi[i - j];
            }
            psi.push(v);
            let tail_small = psi[psi.len().saturating_sub(p.max(1))..]
                .iter()
                .all(|w| w.abs() < 1e-17);
            if i > self.ma.len() && tail_small {
                break;
            }
        }
        psi
    }

    /// Upper bound on the weak-dependence coefficient `θ∞,k(1)` for all `k`.
    pub fn weak_dependence_bound(&self) -> f64 {
        let psi = self.psi_weights();
        let moment: f64 = psi
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, w)| i as f64 * w.abs())
            .sum();
        2.0 * self.innovation_bound * moment
    }
}

/// Periods of generated series start here.
pub fn synthetic_start() -> Quarter {
    Quarter::new(2000, 1).expect("valid quarter")
}

/// Simulate `len` observations with an explicit generator.
pub fn simulate_values<R: Rng>(spec: &SyntheticSpec, len: usize, rng: &mut R) -> Result<Vec<f64>> {
    spec.validate()?;
    let b = spec.innovation_bound;
    let p = spec.ar.len();
    let q = spec.ma.len();
    let mut xs: Vec<f64> = vec![0.0; p];
    let mut es: Vec<f64> = vec![0.0; q];
    let mut out = Vec::with_capacity(len);
    for step in 0..BURN_IN + len {
        let e: f64 = rng.random_range(-b..=b);
        let mut x = e;
        for (j, a) in spec.ar.iter().enumerate() {
            x += a * xs[j];
        }
        for (j, m) in spec.ma.iter().enumerate() {
            x += m * es[j];
        }
        if p > 0 {
            xs.rotate_right(1);
            xs[0] = x;
        }
        if q > 0 {
            es.rotate_right(1);
            es[0] = e;
        }
        if step >= BURN_IN {
            out.push(x);
        }
    }
    Ok(out)
}

/// Deterministic in `spec.seed`; the reported bound is [`SyntheticSpec::sup_bound`].
pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<TimeSeries> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let values = simulate_values(spec, spec.length, &mut rng)?;
    TimeSeries::univariate(synthetic_start(), "value", &values)?.with_bound(spec.sup_bound())
}
