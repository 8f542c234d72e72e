use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Candidate inverse temperatures `{2^k : k ≥ 0} ∩ {1, ..., n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LambdaGrid {
    values: Vec<f64>,
}

impl LambdaGrid {
    pub fn up_to(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("lambda grid needs n >= 1"));
        }
        let values = std::iter::successors(Some(1usize), |v| v.checked_mul(2))
            .take_while(|&v| v <= n)
            .map(|v| v as f64)
            .collect();
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, lambda: f64) -> bool {
        self.values.contains(&lambda)
    }

    /// Lower median, the cold-start choice.
    pub fn median(&self) -> f64 {
        self.values[(self.values.len() - 1) / 2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaChoice {
    pub lambda: f64,
    /// No online loss was available yet; the grid median was used.
    pub cold_start: bool,
}

/// Grid value with the smallest cumulative online loss; ties go to the
/// smaller λ. `cumulative[i]` is the loss accumulated by `grid.values()[i]`
/// over `summands` past predictions.
pub fn select_lambda(grid: &LambdaGrid, cumulative: &[f64], summands: usize) -> Result<LambdaChoice> {
    if cumulative.len() < grid.len() {
        return Err(Error::domain("one cumulative loss per grid value"));
    }
    if summands == 0 {
        return Ok(LambdaChoice {
            lambda: grid.median(),
            cold_start: true,
        });
    }
    let mut best = 0;
    for i in 1..grid.len() {
        if cumulative[i] < cumulative[best] {
            best = i;
        }
    }
    Ok(LambdaChoice {
        lambda: grid.values()[best],
        cold_start: false,
    })
}
