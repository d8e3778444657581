use serde::Serialize;

use crate::error::{Error, Result};

/// Quantile levels of the 50% and 95% bands plus the median.
pub const DEFAULT_LEVELS: [f64; 5] = [0.025, 0.25, 0.5, 0.75, 0.975];

/// Empirical quantile with linear interpolation between order statistics
/// (position `h = (n − 1)·p` in the sorted sample).
pub fn quantile_sorted(sorted: &[f64], level: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * level;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let frac = h - lo as f64;
    if lo == hi || frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

/// Sorts a copy and evaluates one quantile.
pub fn quantile(values: &[f64], level: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid("quantile of an empty sample"));
    }
    check_level(level)?;
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    Ok(quantile_sorted(&sorted, level))
}

fn check_level(level: f64) -> Result<()> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid(format!("quantile level {level} outside (0, 1)")));
    }
    Ok(())
}

/// Per-index quantiles and mean across an ensemble of series.
///
/// `index` starts at 1. Series may be ragged: position `c` aggregates only the
/// series that are at least `c` long, and the bands stop where no series
/// reaches.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bands {
    pub levels: Vec<f64>,
    /// `quantiles[l][c]` is level `levels[l]` at index `c + 1`.
    pub quantiles: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    /// Number of series contributing at each index.
    pub count: Vec<usize>,
}

impl Bands {
    pub fn from_series<S: AsRef<[f64]>>(series: &[S], levels: &[f64]) -> Result<Self> {
        if series.is_empty() {
            return Err(Error::invalid("cannot summarise an empty ensemble"));
        }
        for &l in levels {
            check_level(l)?;
        }
        let len = series.iter().map(|s| s.as_ref().len()).max().unwrap_or(0);
        let mut quantiles = vec![Vec::with_capacity(len); levels.len()];
        let mut mean = Vec::with_capacity(len);
        let mut count = Vec::with_capacity(len);
        let mut column = Vec::with_capacity(series.len());
        for c in 0..len {
            column.clear();
            column.extend(series.iter().filter_map(|s| s.as_ref().get(c).copied()));
            column.sort_unstable_by(f64::total_cmp);
            for (l, &level) in levels.iter().enumerate() {
                quantiles[l].push(quantile_sorted(&column, level));
            }
            mean.push(column.iter().sum::<f64>() / column.len() as f64);
            count.push(column.len());
        }
        Ok(Bands {
            levels: levels.to_vec(),
            quantiles,
            mean,
            count,
        })
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    /// Series for one quantile level, if it was computed.
    pub fn level(&self, level: f64) -> Option<&[f64]> {
        self.levels
            .iter()
            .position(|l| (l - level).abs() < 1e-12)
            .map(|i| self.quantiles[i].as_slice())
    }

    pub fn median(&self) -> Option<&[f64]> {
        self.level(0.5)
    }
}

/// Column label for a quantile level, e.g. 0.025 → `q2_5`, 0.5 → `q50`.
pub fn level_label(level: f64) -> String {
    let pct = format!("{}", (level * 1000.0).round() / 10.0);
    format!("q{}", pct.replace('.', "_"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_interpolation_convention() {
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.5).unwrap(), 3.0);
        assert_eq!(quantile(&[4.0, 1.0, 3.0, 2.0], 0.25).unwrap(), 1.75);
        assert!(quantile(&[], 0.5).is_err());
        assert!(quantile(&[1.0], 1.0).is_err());
    }

    #[test]
    fn identical_series_collapse() {
        let s = vec![vec![0.1, 0.4, 0.9]; 7];
        let b = Bands::from_series(&s, &DEFAULT_LEVELS).unwrap();
        for q in &b.quantiles {
            for (got, want) in q.iter().zip([0.1, 0.4, 0.9]) {
                assert!((got - want).abs() < 1e-15);
            }
        }
        assert_eq!(b.count, vec![7, 7, 7]);
    }

    #[test]
    fn ragged_series() {
        let s = vec![vec![1.0, 2.0, 3.0], vec![3.0], vec![5.0, 4.0]];
        let b = Bands::from_series(&s, &[0.5]).unwrap();
        assert_eq!(b.count, vec![3, 2, 1]);
        assert_eq!(b.median().unwrap(), &[3.0, 3.0, 3.0]);
        assert!(Bands::from_series::<Vec<f64>>(&[], &[0.5]).is_err());
    }

    #[test]
    fn labels() {
        let labels: Vec<_> = DEFAULT_LEVELS.iter().map(|&l| level_label(l)).collect();
        assert_eq!(labels, ["q2_5", "q25", "q50", "q75", "q97_5"]);
    }
}
