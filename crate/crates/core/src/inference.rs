//! Exact posterior over every friend/rival configuration of the pool.
//!
//! The posterior is held densely in natural-log space, one entry per
//! configuration (bit `i` of the configuration index set ⇔ reviewer `i` is a
//! friend). Each submission multiplies in
//!
//! ```text
//! P(a | x, S) = f(x, S) · P(a | friend) + (1 − f(x, S)) · P(a | rival)
//! ```
//!
//! where `f` is the friend fraction of the suggested set, i.e. the chance
//! that the editor's uniform pick `r1` is a friend. The factor only depends on
//! how many members of `S` are friends, so an update evaluates at most
//! `|S| + 1` distinct logarithms and then adds them across the table.

use crate::error::{Error, Result};
use crate::model::{
    check_pool_size, friend_count, friend_fraction, Configuration, ReviewModel, ReviewerClass,
    SuggestedSet,
};

/// `log P(a | x, S)`, returning `-inf` when the mixture is zero.
pub fn submission_log_likelihood(
    a: usize,
    config: &Configuration,
    s: &SuggestedSet,
    model: &ReviewModel,
) -> Result<f64> {
    check_report(a)?;
    let f = friend_fraction(config, s)?;
    let friend = model.report_pmf(ReviewerClass::Friend).prob(a);
    let rival = model.report_pmf(ReviewerClass::Rival).prob(a);
    Ok(mix_ln(f, friend, rival))
}

fn check_report(a: usize) -> Result<()> {
    if a > 2 {
        return Err(Error::invalid(format!(
            "positive-report count {a} outside {{0, 1, 2}}"
        )));
    }
    Ok(())
}

#[inline]
fn mix_ln(f: f64, friend: f64, rival: f64) -> f64 {
    let p = f * friend + (1.0 - f) * rival;
    if p > 0.0 {
        p.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Per-model lookup of `log P(a | x, S)` indexed by `(a, friends in S)`.
///
/// Built once per model and suggested-set size; reused for every update.
#[derive(Debug, Clone)]
pub struct LikelihoodTable {
    suggest_size: usize,
    // [a][friend count]
    table: [Vec<f64>; 3],
}

impl LikelihoodTable {
    pub fn new(model: &ReviewModel, suggest_size: usize) -> Self {
        let friend = model.report_pmf(ReviewerClass::Friend);
        let rival = model.report_pmf(ReviewerClass::Rival);
        let row = |a: usize| -> Vec<f64> {
            (0..=suggest_size)
                .map(|c| mix_ln(c as f64 / suggest_size as f64, friend.prob(a), rival.prob(a)))
                .collect()
        };
        LikelihoodTable {
            suggest_size,
            table: [row(0), row(1), row(2)],
        }
    }

    pub fn suggest_size(&self) -> usize {
        self.suggest_size
    }

    #[inline]
    pub fn log_likelihood(&self, a: usize, friends_in_set: usize) -> f64 {
        self.table[a][friends_in_set]
    }
}

/// Normalised log-posterior over all `2^|R|` configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct LogPosterior {
    log_probs: Vec<f64>,
    pool_size: usize,
}

impl LogPosterior {
    /// Uniform prior `2^{-|R|}`.
    pub fn uniform(pool_size: usize) -> Result<Self> {
        check_pool_size(pool_size)?;
        let n = 1usize << pool_size;
        Ok(LogPosterior {
            log_probs: vec![-(n as f64).ln(); n],
            pool_size,
        })
    }

    /// Normalises arbitrary log-weights (`-inf` allowed).
    pub fn from_log_weights(mut log_weights: Vec<f64>, pool_size: usize) -> Result<Self> {
        check_pool_size(pool_size)?;
        if log_weights.len() != 1 << pool_size {
            return Err(Error::invalid(format!(
                "expected {} log-weights, got {}",
                1usize << pool_size,
                log_weights.len()
            )));
        }
        if log_weights.iter().any(|w| w.is_nan() || *w == f64::INFINITY) {
            return Err(Error::invalid("log-weights must be finite or -inf"));
        }
        normalize_in_place(&mut log_weights).ok_or(Error::Inconsistent { submission: 0 })?;
        Ok(LogPosterior {
            log_probs: log_weights,
            pool_size,
        })
    }

    /// Linear-space probabilities in configuration order.
    pub fn from_probs(probs: &[f64], pool_size: usize) -> Result<Self> {
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::invalid("probabilities must be finite and non-negative"));
        }
        let logs = probs
            .iter()
            .map(|&p| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY })
            .collect();
        Self::from_log_weights(logs, pool_size)
    }

    /// All mass on one configuration.
    pub fn point(config: &Configuration) -> Self {
        let n = 1usize << config.pool_size();
        let mut log_probs = vec![f64::NEG_INFINITY; n];
        log_probs[config.bits() as usize] = 0.0;
        LogPosterior {
            log_probs,
            pool_size: config.pool_size(),
        }
    }

    pub fn pool_size(&self) -> usize {
        self.pool_size
    }

    pub fn log_probs(&self) -> &[f64] {
        &self.log_probs
    }

    pub fn probs(&self) -> Vec<f64> {
        self.log_probs.iter().map(|lp| lp.exp()).collect()
    }

    /// In-place Bayesian update with one observed submission.
    pub fn update(&mut self, a: usize, s: &SuggestedSet, model: &ReviewModel) -> Result<()> {
        check_report(a)?;
        self.check_set(s)?;
        let table = LikelihoodTable::new(model, s.len());
        self.update_with(&table, a, s)
    }

    /// Same as [`update`](Self::update) with a prebuilt likelihood table.
    pub fn update_with(&mut self, table: &LikelihoodTable, a: usize, s: &SuggestedSet) -> Result<()> {
        check_report(a)?;
        if s.len() != table.suggest_size() {
            return Err(Error::invalid(format!(
                "likelihood table built for |S|={}, got |S|={}",
                table.suggest_size(),
                s.len()
            )));
        }
        self.check_set(s)?;
        let mask = s.mask();
        let row = &table.table[a];
        for (j, lp) in self.log_probs.iter_mut().enumerate() {
            *lp += row[friend_count(j as u32, mask)];
        }
        normalize_in_place(&mut self.log_probs).ok_or(Error::Inconsistent { submission: 0 })
    }

    fn check_set(&self, s: &SuggestedSet) -> Result<()> {
        match s.members().last() {
            Some(&m) if m >= self.pool_size => Err(Error::invalid(format!(
                "reviewer {m} outside pool of {}",
                self.pool_size
            ))),
            _ => Ok(()),
        }
    }

    pub fn marginal_friend_probability(&self, reviewer: usize) -> Result<f64> {
        if reviewer >= self.pool_size {
            return Err(Error::invalid(format!(
                "reviewer {reviewer} outside pool of {}",
                self.pool_size
            )));
        }
        let mass: f64 = self
            .log_probs
            .iter()
            .enumerate()
            .filter(|(j, _)| j >> reviewer & 1 == 1)
            .map(|(_, lp)| lp.exp())
            .sum();
        Ok(mass.clamp(0.0, 1.0))
    }

    /// `ρ_i` for every reviewer.
    pub fn marginals(&self) -> Vec<f64> {
        let mut rho = vec![0.0; self.pool_size];
        accumulate_marginals(&self.log_probs, &mut rho);
        rho
    }

    /// Argmax configuration; ties go to the lowest index.
    pub fn map_configuration(&self) -> Configuration {
        let bits = argmax_lowest(&self.log_probs);
        Configuration::from_bits(bits as u32, self.pool_size).expect("index within pool")
    }

    pub fn map_error_count(&self, truth: &Configuration) -> Result<usize> {
        if truth.pool_size() != self.pool_size {
            return Err(Error::invalid(format!(
                "truth has {} reviewers, posterior {}",
                truth.pool_size(),
                self.pool_size
            )));
        }
        Ok(self.map_configuration().hamming(truth))
    }

    /// Shannon entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        entropy_bits_of(&self.log_probs)
    }

    pub fn kth_largest_marginal(&self, k: usize) -> Result<f64> {
        kth_largest(&self.marginals(), k)
    }

    /// All four per-submission metrics in one pass over the table.
    pub fn snapshot(&self, m: usize, truth: &Configuration) -> Result<MetricSnapshot> {
        let map_errors = self.map_error_count(truth)?;
        let mut rho = vec![0.0; self.pool_size];
        let mut nats = 0.0;
        for (j, &lp) in self.log_probs.iter().enumerate() {
            if lp == f64::NEG_INFINITY {
                continue;
            }
            let p = lp.exp();
            nats -= p * lp;
            let mut bits = j;
            while bits != 0 {
                rho[bits.trailing_zeros() as usize] += p;
                bits &= bits - 1;
            }
        }
        for r in rho.iter_mut() {
            *r = r.clamp(0.0, 1.0);
        }
        let t3 = kth_largest(&rho, T_RANK.min(self.pool_size))?;
        Ok(MetricSnapshot {
            m,
            rho,
            map_errors,
            entropy_bits: (nats / std::f64::consts::LN_2).max(0.0),
            t3,
        })
    }
}

/// Rank of the marginal tracked by the `T(m)` metric.
pub const T_RANK: usize = 3;

/// Metrics of the posterior after `m` submissions.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSnapshot {
    pub m: usize,
    pub rho: Vec<f64>,
    pub map_errors: usize,
    pub entropy_bits: f64,
    pub t3: f64,
}

/// Functional form of [`LogPosterior::update`].
pub fn posterior_update(
    post: &LogPosterior,
    a: usize,
    s: &SuggestedSet,
    model: &ReviewModel,
) -> Result<LogPosterior> {
    let mut next = post.clone();
    next.update(a, s, model)?;
    Ok(next)
}

/// Shifts so that `logsumexp = 0`. Returns `None` when every entry is `-inf`.
fn normalize_in_place(log_probs: &mut [f64]) -> Option<()> {
    let max = log_probs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return None;
    }
    let sum: f64 = log_probs.iter().map(|lp| (lp - max).exp()).sum();
    let lse = max + sum.ln();
    for lp in log_probs.iter_mut() {
        *lp = (*lp - lse).min(0.0);
    }
    Some(())
}

fn accumulate_marginals(log_probs: &[f64], rho: &mut [f64]) {
    for (j, lp) in log_probs.iter().enumerate() {
        if *lp == f64::NEG_INFINITY {
            continue;
        }
        let p = lp.exp();
        let mut bits = j;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            rho[i] += p;
            bits &= bits - 1;
        }
    }
    for r in rho.iter_mut() {
        *r = r.clamp(0.0, 1.0);
    }
}

fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (j, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = j;
        }
    }
    best
}

fn entropy_bits_of(log_probs: &[f64]) -> f64 {
    let nats: f64 = log_probs
        .iter()
        .filter(|lp| lp.is_finite())
        .map(|lp| -lp.exp() * lp)
        .sum();
    (nats / std::f64::consts::LN_2).max(0.0)
}

/// k-th largest value (1-based `k`), duplicates counted separately.
pub fn kth_largest(values: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k > values.len() {
        return Err(Error::invalid(format!(
            "rank {k} outside [1, {}]",
            values.len()
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    Ok(sorted[k - 1])
}
