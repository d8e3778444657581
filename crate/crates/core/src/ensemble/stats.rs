//! Two-sample rank statistics for comparing stopping-time samples.

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney {
    /// U statistic of the first sample.
    pub u: f64,
    pub z: f64,
    /// One-sided p-value for "first sample stochastically smaller than the second".
    pub p_less: f64,
}

/// Mann–Whitney U test with mid-ranks for ties and the normal approximation
/// (tie-corrected variance, continuity correction). Infinite values are
/// allowed and rank last, which is how censored stopping times are fed in.
pub fn mann_whitney_u(xs: &[f64], ys: &[f64]) -> Result<MannWhitney> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::invalid("Mann-Whitney test needs two non-empty samples"));
    }
    if xs.iter().chain(ys).any(|v| v.is_nan()) {
        return Err(Error::invalid("Mann-Whitney samples contain NaN"));
    }
    let n1 = xs.len() as f64;
    let n2 = ys.len() as f64;
    let mut pooled: Vec<(f64, bool)> = xs
        .iter()
        .map(|&v| (v, true))
        .chain(ys.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));

    let n = pooled.len();
    let mut rank_sum_x = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && pooled[j + 1].0 == pooled[i].0 {
            j += 1;
        }
        let mid_rank = (i + j) as f64 / 2.0 + 1.0;
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        rank_sum_x += pooled[i..=j].iter().filter(|p| p.1).count() as f64 * mid_rank;
        i = j + 1;
    }
    let u = rank_sum_x - n1 * (n1 + 1.0) / 2.0;
    let mean = n1 * n2 / 2.0;
    let nf = n as f64;
    let var = n1 * n2 / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    if var <= 0.0 {
        return Ok(MannWhitney {
            u,
            z: 0.0,
            p_less: 0.5,
        });
    }
    // Continuity correction toward the mean.
    let z = (u - mean + 0.5) / var.sqrt();
    let p_less = 0.5 * erfc(-z / std::f64::consts::SQRT_2);
    Ok(MannWhitney { u, z, p_less })
}
