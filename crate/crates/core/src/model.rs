//! Domain types and exact report-count distributions.
//!
//! A submission is reviewed by `r1`, drawn from the author's suggested set,
//! and by `r2`, an unbiased referee chosen by the editor. The author only sees
//! `a`, the number of positive reports (0, 1 or 2). This module gives the law
//! of `a` conditioned on the class of `r1` for both reviewer-behaviour models:
//!
//! * cynical: friends always accept, rivals always reject, `r2` flips a fair coin;
//! * quality: each submission has a quality `q`; `r2` accepts with `q`, a rival
//!   with `q²` and a friend with `q(2 − q)`.
//!
//! Under the quality model every entry of `P(a | q, r1)` is a cubic in `q`, so
//! marginalising over the quality distribution reduces to the first three raw
//! moments `E[q^k]`. No quadrature is involved.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest pool for which the dense posterior over `2^|R|` configurations is supported.
pub const MAX_POOL_SIZE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReviewerClass {
    Friend,
    Rival,
}

impl ReviewerClass {
    /// Friend indicator: 1 for a friend, 0 for a rival.
    pub fn indicator(self) -> u8 {
        match self {
            ReviewerClass::Friend => 1,
            ReviewerClass::Rival => 0,
        }
    }

    pub fn is_friend(self) -> bool {
        self == ReviewerClass::Friend
    }
}

/// One friend/rival labelling of the whole pool.
///
/// Stored as a bitmask: reviewer `i` (0-based) is a friend iff bit `i` is set.
/// The 1-based configuration index is `bits + 1`, so index 1 is all-rival and
/// index `2^|R|` is all-friend. For two reviewers the enumeration order is
/// `[rr, fr, rf, ff]` written as `[x1 x2]`: the first reviewer is the low bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Configuration {
    bits: u32,
    pool_size: usize,
}

impl Configuration {
    pub fn from_bits(bits: u32, pool_size: usize) -> Result<Self> {
        check_pool_size(pool_size)?;
        if pool_size < 32 && bits >> pool_size != 0 {
            return Err(Error::invalid(format!(
                "configuration bits {bits:#b} exceed pool of {pool_size}"
            )));
        }
        Ok(Configuration { bits, pool_size })
    }

    /// Builds a configuration from its 1-based index `j ∈ [1, 2^|R|]`.
    pub fn from_index(j: usize, pool_size: usize) -> Result<Self> {
        check_pool_size(pool_size)?;
        let count = 1usize << pool_size;
        if j == 0 || j > count {
            return Err(Error::invalid(format!(
                "configuration index {j} outside [1, {count}]"
            )));
        }
        Ok(Configuration {
            bits: (j - 1) as u32,
            pool_size,
        })
    }

    /// Reviewer `i` of the slice becomes bit `i` of the mask.
    pub fn from_classes(classes: &[ReviewerClass]) -> Result<Self> {
        check_pool_size(classes.len())?;
        let bits = classes
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_friend())
            .fold(0u32, |acc, (i, _)| acc | (1 << i));
        Ok(Configuration {
            bits,
            pool_size: classes.len(),
        })
    }

    /// The first `n_friends` reviewers are friends, the rest rivals.
    pub fn first_friends(pool_size: usize, n_friends: usize) -> Result<Self> {
        check_pool_size(pool_size)?;
        if n_friends > pool_size {
            return Err(Error::invalid(format!(
                "{n_friends} friends do not fit in a pool of {pool_size}"
            )));
        }
        Ok(Configuration {
            bits: low_mask(n_friends),
            pool_size,
        })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// 1-based index.
    pub fn index(&self) -> usize {
        self.bits as usize + 1
    }

    pub fn pool_size(&self) -> usize {
        self.pool_size
    }

    pub fn class(&self, reviewer: usize) -> ReviewerClass {
        if self.bits >> reviewer & 1 == 1 {
            ReviewerClass::Friend
        } else {
            ReviewerClass::Rival
        }
    }

    pub fn classes(&self) -> Vec<ReviewerClass> {
        (0..self.pool_size).map(|i| self.class(i)).collect()
    }

    pub fn n_friends(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Number of reviewers labelled differently in the two configurations.
    pub fn hamming(&self, other: &Configuration) -> usize {
        (self.bits ^ other.bits).count_ones() as usize
    }
}

pub(crate) fn low_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

pub(crate) fn check_pool_size(pool_size: usize) -> Result<()> {
    if pool_size == 0 || pool_size > MAX_POOL_SIZE {
        return Err(Error::invalid(format!(
            "pool size {pool_size} outside [1, {MAX_POOL_SIZE}]"
        )));
    }
    Ok(())
}

/// The reviewers an author suggests on one submission. Members are 0-based
/// reviewer indices, kept sorted and distinct.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SuggestedSet {
    members: Vec<usize>,
    mask: u32,
}

impl SuggestedSet {
    pub fn new(mut members: Vec<usize>, pool_size: usize) -> Result<Self> {
        check_pool_size(pool_size)?;
        if members.is_empty() {
            return Err(Error::invalid("suggested set is empty"));
        }
        members.sort_unstable();
        let mut mask = 0u32;
        for w in members.windows(2) {
            if w[0] == w[1] {
                return Err(Error::invalid(format!(
                    "reviewer {} suggested twice",
                    w[0]
                )));
            }
        }
        for &m in &members {
            if m >= pool_size {
                return Err(Error::invalid(format!(
                    "reviewer {m} outside pool of {pool_size}"
                )));
            }
            mask |= 1 << m;
        }
        Ok(SuggestedSet { members, mask })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn contains(&self, reviewer: usize) -> bool {
        reviewer < 32 && self.mask >> reviewer & 1 == 1
    }
}

/// Law of the per-submission quality factor `q`.
///
/// For the Beta case `variance()` is the variance `αβ / ((α+β)²(α+β+1))`.
/// Some texts write this quantity as `σ_q`; it is not a standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QualityDistribution {
    Beta { alpha: f64, beta: f64 },
    Point(f64),
}

impl QualityDistribution {
    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        let d = QualityDistribution::Beta { alpha, beta };
        d.validate()?;
        Ok(d)
    }

    pub fn point(q: f64) -> Result<Self> {
        let d = QualityDistribution::Point(q);
        d.validate()?;
        Ok(d)
    }

    /// A zero variance yields the point mass at `mean`.
    pub fn from_mean_variance(mean: f64, variance: f64) -> Result<Self> {
        if variance == 0.0 {
            return QualityDistribution::point(mean);
        }
        let (alpha, beta) = beta_params_from_mean_variance(mean, variance)?;
        QualityDistribution::beta(alpha, beta)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            QualityDistribution::Beta { alpha, beta } => {
                if !(alpha > 0.0 && alpha.is_finite() && beta > 0.0 && beta.is_finite()) {
                    return Err(Error::invalid(format!(
                        "Beta parameters must be positive and finite, got alpha={alpha}, beta={beta}"
                    )));
                }
            }
            QualityDistribution::Point(q) => {
                if !(0.0..=1.0).contains(&q) {
                    return Err(Error::invalid(format!(
                        "point quality {q} outside [0, 1]"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match *self {
            QualityDistribution::Beta { alpha, beta } => alpha / (alpha + beta),
            QualityDistribution::Point(q) => q,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            QualityDistribution::Beta { alpha, beta } => {
                let s = alpha + beta;
                alpha * beta / (s * s * (s + 1.0))
            }
            QualityDistribution::Point(_) => 0.0,
        }
    }
}

/// Distribution of the positive-report count `a ∈ {0, 1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportPmf([f64; 3]);

impl ReportPmf {
    pub fn new(probs: [f64; 3]) -> Result<Self> {
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::invalid(format!("pmf entries {probs:?} outside [0, 1]")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("pmf {probs:?} sums to {total}")));
        }
        Ok(ReportPmf(probs))
    }

    /// Probability of exactly `a` positive reports; zero for `a > 2`.
    pub fn prob(&self, a: usize) -> f64 {
        self.0.get(a).copied().unwrap_or(0.0)
    }

    pub fn probs(&self) -> [f64; 3] {
        self.0
    }
}

/// How the suggested reviewer `r1` behaves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReviewModel {
    Cynical,
    Quality(QualityDistribution),
}

impl ReviewModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            ReviewModel::Cynical => Ok(()),
            ReviewModel::Quality(d) => d.validate(),
        }
    }

    /// `P(a | r1)` with the quality factor integrated out.
    pub fn report_pmf(&self, r1: ReviewerClass) -> ReportPmf {
        match self {
            ReviewModel::Cynical => cynical_report_pmf(r1),
            ReviewModel::Quality(d) => marginal_report_pmf(r1, d),
        }
    }

    pub fn is_cynical(&self) -> bool {
        matches!(self, ReviewModel::Cynical)
    }
}

/// Fraction of the suggested set that is friendly under `config`.
pub fn friend_fraction(config: &Configuration, s: &SuggestedSet) -> Result<f64> {
    if let Some(&m) = s.members().iter().find(|&&m| m >= config.pool_size()) {
        return Err(Error::invalid(format!(
            "reviewer {m} outside pool of {}",
            config.pool_size()
        )));
    }
    Ok(friend_fraction_unchecked(config.bits(), s))
}

#[inline]
pub(crate) fn friend_count(config_bits: u32, suggested_mask: u32) -> usize {
    (config_bits & suggested_mask).count_ones() as usize
}

#[inline]
fn friend_fraction_unchecked(config_bits: u32, s: &SuggestedSet) -> f64 {
    friend_count(config_bits, s.mask()) as f64 / s.len() as f64
}

pub fn cynical_report_pmf(r1: ReviewerClass) -> ReportPmf {
    match r1 {
        ReviewerClass::Friend => ReportPmf([0.0, 0.5, 0.5]),
        ReviewerClass::Rival => ReportPmf([0.5, 0.5, 0.0]),
    }
}

/// Coefficients of `1, q, q², q³` for each `a`, per class of `r1`.
const FRIEND_POLY: [[f64; 4]; 3] = [
    [1.0, -3.0, 3.0, -1.0],
    [0.0, 3.0, -5.0, 2.0],
    [0.0, 0.0, 2.0, -1.0],
];
const RIVAL_POLY: [[f64; 4]; 3] = [
    [1.0, -1.0, -1.0, 1.0],
    [0.0, 1.0, 1.0, -2.0],
    [0.0, 0.0, 0.0, 1.0],
];

fn poly_for(r1: ReviewerClass) -> &'static [[f64; 4]; 3] {
    match r1 {
        ReviewerClass::Friend => &FRIEND_POLY,
        ReviewerClass::Rival => &RIVAL_POLY,
    }
}

/// Contracts the report polynomials with a vector of moments `E[q^k]`, k = 0..=3.
fn contract(r1: ReviewerClass, moments: &[f64; 4]) -> ReportPmf {
    let poly = poly_for(r1);
    let mut out = [0.0; 3];
    for (a, coeffs) in poly.iter().enumerate() {
        let v: f64 = coeffs.iter().zip(moments).map(|(c, m)| c * m).sum();
        // Cancellation can leave values like -1e-17 at the endpoints.
        out[a] = v.clamp(0.0, 1.0);
    }
    ReportPmf(out)
}

fn powers(q: f64) -> [f64; 4] {
    let mut out = [1.0; 4];
    for k in 1..4 {
        out[k] = out[k - 1] * q;
    }
    out
}

pub fn quality_report_pmf_given_q(r1: ReviewerClass, q: f64) -> Result<ReportPmf> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid(format!("quality {q} outside [0, 1]")));
    }
    Ok(contract(r1, &powers(q)))
}

/// Raw moment `E[q^k]`.
pub fn beta_moment(dist: &QualityDistribution, k: u32) -> f64 {
    match *dist {
        QualityDistribution::Beta { alpha, beta } => (0..k)
            .map(|i| {
                let i = i as f64;
                (alpha + i) / (alpha + beta + i)
            })
            .product(),
        QualityDistribution::Point(q) => (0..k).fold(1.0, |acc, _| acc * q),
    }
}

/// `P(a | r1)` with `q` integrated out analytically.
pub fn marginal_report_pmf(r1: ReviewerClass, dist: &QualityDistribution) -> ReportPmf {
    let moments = [
        1.0,
        beta_moment(dist, 1),
        beta_moment(dist, 2),
        beta_moment(dist, 3),
    ];
    contract(r1, &moments)
}

/// Inverts the Beta mean/variance relations.
pub fn beta_params_from_mean_variance(mean: f64, variance: f64) -> Result<(f64, f64)> {
    if !(mean > 0.0 && mean < 1.0) {
        return Err(Error::invalid(format!("mean {mean} outside (0, 1)")));
    }
    if variance.is_nan() || variance <= 0.0 {
        return Err(Error::invalid(format!("variance {variance} must be positive")));
    }
    let bound = mean * (1.0 - mean);
    if variance >= bound {
        return Err(Error::invalid(format!(
            "variance {variance} must be below mean*(1-mean) = {bound}"
        )));
    }
    let alpha = -mean * (mean * mean - mean + variance) / variance;
    let beta = alpha * (1.0 / mean - 1.0);
    Ok((alpha, beta))
}
