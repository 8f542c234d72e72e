//! Small numeric helpers shared across modules.

/// Lower empirical quantile: the `⌈mτ⌉`-th order statistic (1-based) of the
/// sample, which minimizes the empirical pinball risk.
///
/// Returns `None` for an empty sample.
pub fn empirical_quantile(sample: &[f64], tau: f64) -> Option<f64> {
    if sample.is_empty() {
        return None;
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    // The epsilon absorbs representation error in products like 20 * 0.05.
    let rank = ((m as f64 * tau - 1e-9).ceil() as usize).clamp(1, m);
    Some(sorted[rank - 1])
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = mean(xs);
    if xs.len() < 2 {
        return (m, f64::INFINITY);
    }
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Numerically stable `log Σ exp(x_i)`; `-inf` entries are skipped.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Derive an independent stream seed from a master seed and an index path.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    // splitmix64 finalizer folded over the path
    let mut z = master;
    for &p in path {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(p.wrapping_mul(0xD1B5_4A32_D192_ED03));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}
