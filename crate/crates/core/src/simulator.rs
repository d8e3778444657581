//! Synthetic submission histories.
//!
//! One submission runs as follows: the author suggests a set `S`, the editor
//! picks `r1` uniformly from it, `r1` and an unbiased `r2` each write a report,
//! and the author learns only the number of positive reports `a`.
//!
//! Randomness comes from [`trajectory_rng`]: ChaCha8 keyed by the base seed,
//! with the trajectory index selecting the stream. Trajectory `t` therefore
//! sees the same draws regardless of how many other trajectories run or in
//! which order.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::{LikelihoodTable, LogPosterior};
use crate::model::{
    check_pool_size, Configuration, QualityDistribution, ReviewModel, ReviewerClass, SuggestedSet,
};

pub type SimRng = ChaCha8Rng;

/// Independent stream `trajectory` of the generator family keyed by `base_seed`.
pub fn trajectory_rng(base_seed: u64, trajectory: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(trajectory);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Every `S_μ` uniform over all subsets of size `|S|`.
    Uniform,
    /// Reviewers picked without replacement with weight `ρ_i(μ − 1)`.
    Aggressive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroundTruth {
    pub config: Configuration,
}

impl GroundTruth {
    pub fn new(config: Configuration) -> Self {
        GroundTruth { config }
    }

    /// Reviewers `0..n_friends` are friends.
    pub fn first_friends(pool_size: usize, n_friends: usize) -> Result<Self> {
        Ok(GroundTruth::new(Configuration::first_friends(pool_size, n_friends)?))
    }

    pub fn pool_size(&self) -> usize {
        self.config.pool_size()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub pool_size: usize,
    pub suggest_size: usize,
    pub n_friends: usize,
    pub model: ReviewModel,
    pub strategy: Strategy,
    /// Submissions per trajectory (`M`).
    pub submissions: usize,
    pub trajectories: usize,
    pub base_seed: u64,
}

impl Scenario {
    /// Ten reviewers, three suggested, five friends, uniform suggestions.
    pub fn cynical() -> Self {
        Scenario {
            pool_size: 10,
            suggest_size: 3,
            n_friends: 5,
            model: ReviewModel::Cynical,
            strategy: Strategy::Uniform,
            submissions: 500,
            trajectories: 1000,
            base_seed: 2023,
        }
    }

    /// As [`Scenario::cynical`] with `q ~ Beta(12, 12)`.
    pub fn quality() -> Self {
        Scenario {
            model: ReviewModel::Quality(QualityDistribution::Beta {
                alpha: 12.0,
                beta: 12.0,
            }),
            submissions: 4000,
            trajectories: 500,
            ..Scenario::cynical()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_pool_size(self.pool_size)?;
        if self.suggest_size == 0 || self.suggest_size > self.pool_size {
            return Err(Error::invalid(format!(
                "suggest_size {} must lie in [1, pool_size={}]",
                self.suggest_size, self.pool_size
            )));
        }
        if self.n_friends > self.pool_size {
            return Err(Error::invalid(format!(
                "n_friends {} exceeds pool_size {}",
                self.n_friends, self.pool_size
            )));
        }
        self.model.validate()
    }

    pub fn ground_truth(&self) -> Result<GroundTruth> {
        GroundTruth::first_friends(self.pool_size, self.n_friends)
    }

    pub fn rng(&self, trajectory: usize) -> SimRng {
        trajectory_rng(self.base_seed, trajectory as u64)
    }
}

/// What the author never sees: who reviewed and how.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HiddenDiagnostics {
    pub r1: usize,
    pub chi_r1: u8,
    pub chi_r2: u8,
    /// Quality factor; absent under the cynical model.
    pub q: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubmissionRecord {
    pub suggested: SuggestedSet,
    pub positives: u8,
    pub hidden: Option<HiddenDiagnostics>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct History {
    pub records: Vec<SubmissionRecord>,
    /// Base seed and stream that generated the records.
    pub seed: u64,
    pub trajectory: u64,
}

pub fn sample_suggested_set_uniform<R: Rng + ?Sized>(
    rng: &mut R,
    pool_size: usize,
    suggest_size: usize,
) -> Result<SuggestedSet> {
    if suggest_size == 0 || suggest_size > pool_size {
        return Err(Error::invalid(format!(
            "cannot suggest {suggest_size} of {pool_size} reviewers"
        )));
    }
    let members = index::sample(rng, pool_size, suggest_size).into_vec();
    SuggestedSet::new(members, pool_size)
}

/// Sequential weighted sampling without replacement, weights `marginals`.
///
/// If every remaining weight is zero the pick is uniform among the remaining
/// reviewers.
pub fn sample_suggested_set_aggressive<R: Rng + ?Sized>(
    rng: &mut R,
    marginals: &[f64],
    suggest_size: usize,
) -> Result<SuggestedSet> {
    let pool_size = marginals.len();
    if suggest_size == 0 || suggest_size > pool_size {
        return Err(Error::invalid(format!(
            "cannot suggest {suggest_size} of {pool_size} reviewers"
        )));
    }
    if marginals.iter().any(|m| !(0.0..=1.0).contains(m)) {
        return Err(Error::invalid("marginals must lie in [0, 1]"));
    }
    let mut weights = marginals.to_vec();
    let mut members = Vec::with_capacity(suggest_size);
    for _ in 0..suggest_size {
        let total: f64 = weights.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for (i, w) in weights.iter().enumerate() {
                if *w <= 0.0 {
                    continue;
                }
                acc += w;
                chosen = Some(i);
                if target < acc {
                    break;
                }
            }
            chosen.expect("positive total has a positive weight")
        } else {
            let remaining: Vec<usize> = (0..pool_size).filter(|i| !members.contains(i)).collect();
            remaining[rng.random_range(0..remaining.len())]
        };
        members.push(pick);
        // Picked reviewers can never be drawn again, in either branch.
        weights[pick] = 0.0;
    }
    SuggestedSet::new(members, pool_size)
}

/// Prepared sampler for one review model.
#[derive(Debug, Clone)]
enum QualitySampler {
    Cynical,
    Beta(Beta<f64>),
    Point(f64),
}

impl QualitySampler {
    fn new(model: &ReviewModel) -> Result<Self> {
        model.validate()?;
        Ok(match *model {
            ReviewModel::Cynical => QualitySampler::Cynical,
            ReviewModel::Quality(QualityDistribution::Beta { alpha, beta }) => QualitySampler::Beta(
                Beta::new(alpha, beta).map_err(|e| Error::invalid(e.to_string()))?,
            ),
            ReviewModel::Quality(QualityDistribution::Point(q)) => QualitySampler::Point(q),
        })
    }

    fn review<R: Rng + ?Sized>(&self, rng: &mut R, r1: ReviewerClass) -> (u8, u8, Option<f64>) {
        match self {
            QualitySampler::Cynical => {
                let chi_r1 = r1.indicator();
                let chi_r2 = rng.random_bool(0.5) as u8;
                (chi_r1, chi_r2, None)
            }
            QualitySampler::Beta(b) => {
                let q = b.sample(rng);
                let (c1, c2) = quality_reports(rng, r1, q);
                (c1, c2, Some(q))
            }
            QualitySampler::Point(q) => {
                let (c1, c2) = quality_reports(rng, r1, *q);
                (c1, c2, Some(*q))
            }
        }
    }
}

fn quality_reports<R: Rng + ?Sized>(rng: &mut R, r1: ReviewerClass, q: f64) -> (u8, u8) {
    let accept_r1 = match r1 {
        ReviewerClass::Friend => q * (2.0 - q),
        ReviewerClass::Rival => q * q,
    };
    let chi_r1 = (rng.random::<f64>() < accept_r1) as u8;
    let chi_r2 = (rng.random::<f64>() < q) as u8;
    (chi_r1, chi_r2)
}

fn sample_submission<R: Rng + ?Sized>(
    rng: &mut R,
    truth: &GroundTruth,
    s: SuggestedSet,
    sampler: &QualitySampler,
) -> SubmissionRecord {
    let r1 = s.members()[rng.random_range(0..s.len())];
    let (chi_r1, chi_r2, q) = sampler.review(rng, truth.config.class(r1));
    SubmissionRecord {
        suggested: s,
        positives: chi_r1 + chi_r2,
        hidden: Some(HiddenDiagnostics {
            r1,
            chi_r1,
            chi_r2,
            q,
        }),
    }
}

/// Simulates the review of one submission with suggested set `s`.
pub fn simulate_submission<R: Rng + ?Sized>(
    rng: &mut R,
    truth: &GroundTruth,
    s: &SuggestedSet,
    model: &ReviewModel,
) -> Result<SubmissionRecord> {
    if s.members().iter().any(|&m| m >= truth.pool_size()) {
        return Err(Error::invalid("suggested set exceeds the ground-truth pool"));
    }
    let sampler = QualitySampler::new(model)?;
    Ok(sample_submission(rng, truth, s.clone(), &sampler))
}

/// Draws submissions one at a time, tracking the posterior when the strategy
/// needs it. Shared by [`simulate_history`] and the ensemble runner so that
/// both consume the generator identically.
pub struct SubmissionStream<'a> {
    scenario: &'a Scenario,
    truth: GroundTruth,
    sampler: QualitySampler,
    table: LikelihoodTable,
    posterior: LogPosterior,
    submitted: usize,
}

impl<'a> SubmissionStream<'a> {
    pub fn new(scenario: &'a Scenario, truth: GroundTruth) -> Result<Self> {
        scenario.validate()?;
        if truth.pool_size() != scenario.pool_size {
            return Err(Error::invalid(format!(
                "ground truth has {} reviewers, scenario {}",
                truth.pool_size(),
                scenario.pool_size
            )));
        }
        Ok(SubmissionStream {
            scenario,
            truth,
            sampler: QualitySampler::new(&scenario.model)?,
            table: LikelihoodTable::new(&scenario.model, scenario.suggest_size),
            posterior: LogPosterior::uniform(scenario.pool_size)?,
            submitted: 0,
        })
    }

    /// Draws the next submission and folds it into the posterior.
    pub fn next_record<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<SubmissionRecord> {
        let s = match self.scenario.strategy {
            Strategy::Uniform => sample_suggested_set_uniform(
                rng,
                self.scenario.pool_size,
                self.scenario.suggest_size,
            )?,
            Strategy::Aggressive => sample_suggested_set_aggressive(
                rng,
                &self.posterior.marginals(),
                self.scenario.suggest_size,
            )?,
        };
        let record = sample_submission(rng, &self.truth, s, &self.sampler);
        self.submitted += 1;
        self.posterior
            .update_with(&self.table, record.positives as usize, &record.suggested)
            .map_err(|e| match e {
                Error::Inconsistent { .. } => Error::Inconsistent {
                    submission: self.submitted,
                },
                other => other,
            })?;
        Ok(record)
    }

    /// Posterior after every record drawn so far.
    pub fn posterior(&self) -> &LogPosterior {
        &self.posterior
    }

    pub fn truth(&self) -> &GroundTruth {
        &self.truth
    }
}

pub fn simulate_history<R: Rng + ?Sized>(
    rng: &mut R,
    scenario: &Scenario,
    truth: &GroundTruth,
) -> Result<History> {
    let mut stream = SubmissionStream::new(scenario, *truth)?;
    let records = (0..scenario.submissions)
        .map(|_| stream.next_record(rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(History {
        records,
        seed: scenario.base_seed,
        trajectory: 0,
    })
}

/// Simulates trajectory `trajectory` of the scenario from its own stream.
pub fn simulate_trajectory_history(scenario: &Scenario, trajectory: usize) -> Result<History> {
    let mut rng = scenario.rng(trajectory);
    let truth = scenario.ground_truth()?;
    let mut history = simulate_history(&mut rng, scenario, &truth)?;
    history.trajectory = trajectory as u64;
    Ok(history)
}
