//! Trajectory ensembles and their summaries.
//!
//! A trajectory is one simulated history together with the posterior metrics
//! after every submission. Trajectory `t` draws from its own generator stream,
//! so an ensemble is reproducible and independent of scheduling; rayon's
//! indexed collect keeps results in trajectory order.

pub mod quantile;
pub mod stats;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::inference::{LikelihoodTable, LogPosterior, MetricSnapshot, T_RANK};
use crate::model::ReviewerClass;
use crate::simulator::{GroundTruth, History, Scenario, SubmissionRecord, SubmissionStream};

pub use quantile::{Bands, DEFAULT_LEVELS};

/// Credibility threshold for stopping times and strong classification.
pub const CREDIBILITY: f64 = 0.95;

/// Entropy (bits) below which a posterior counts as fully classified.
pub const ENTROPY_ZERO_BITS: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub index: usize,
    pub seed: u64,
    pub truth: GroundTruth,
    /// Metrics after submissions `m = 1..=M`.
    pub snapshots: Vec<MetricSnapshot>,
    /// `per_reviewer_rho[i][c]`: probability that reviewer `i` is a friend
    /// given only the first `c + 1` submissions that suggested `i`.
    pub per_reviewer_rho: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn map_errors(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.map_errors as f64).collect()
    }

    pub fn entropy(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.entropy_bits).collect()
    }

    pub fn t3(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t3).collect()
    }

    /// First `m` with `T(m) ≥ threshold`, and the number of rivals among the
    /// top-ranked reviewers at that point.
    pub fn stop(&self, threshold: f64) -> StopRecord {
        let stop_m = stopping_time(&self.t3(), threshold);
        let top3_rival_count = stop_m.map(|m| top_rival_count(&self.snapshots[m - 1].rho, &self.truth));
        StopRecord {
            trajectory: self.index,
            stop_m,
            top3_rival_count,
        }
    }

    fn digest(self, threshold: f64) -> Digest {
        let stop = self.stop(threshold);
        let (mut friend_series, mut rival_series) = (Vec::new(), Vec::new());
        let map_errors = self.map_errors();
        let entropy = self.entropy();
        let t3 = self.t3();
        for (i, series) in self.per_reviewer_rho.into_iter().enumerate() {
            match self.truth.config.class(i) {
                ReviewerClass::Friend => friend_series.push(series),
                ReviewerClass::Rival => rival_series.push(series),
            }
        }
        Digest {
            map_errors,
            entropy,
            t3,
            friend_series,
            rival_series,
            stop,
        }
    }
}

/// Rivals among the `T_RANK` reviewers with the largest marginals
/// (ties broken by lower reviewer index).
fn top_rival_count(rho: &[f64], truth: &GroundTruth) -> usize {
    let mut order: Vec<usize> = (0..rho.len()).collect();
    order.sort_by(|&a, &b| rho[b].total_cmp(&rho[a]).then(a.cmp(&b)));
    order
        .iter()
        .take(T_RANK)
        .filter(|&&i| !truth.config.class(i).is_friend())
        .count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StopRecord {
    pub trajectory: usize,
    /// `None` when the threshold was never reached within `M`.
    pub stop_m: Option<usize>,
    pub top3_rival_count: Option<usize>,
}

/// Simulates trajectory `index` and records all metrics after each submission.
pub fn run_trajectory(scenario: &Scenario, index: usize) -> Result<Trajectory> {
    run_trajectory_with(scenario, index, true)
}

/// As [`run_trajectory`]; with `reviewer_series = false` the per-reviewer
/// series are left empty, which skips one posterior update per suggested
/// reviewer.
pub fn run_trajectory_with(scenario: &Scenario, index: usize, reviewer_series: bool) -> Result<Trajectory> {
    let truth = scenario.ground_truth()?;
    let mut rng = scenario.rng(index);
    let mut stream = SubmissionStream::new(scenario, truth)?;
    let mut tracker = MetricTracker::new(scenario, truth, reviewer_series)?;
    for m in 1..=scenario.submissions {
        let record = stream.next_record(&mut rng)?;
        tracker.push(m, stream.posterior(), &record)?;
    }
    Ok(tracker.finish(index, scenario.base_seed))
}

/// Recomputes the metrics of an existing history from its observable part.
pub fn trajectory_from_history(scenario: &Scenario, history: &History) -> Result<Trajectory> {
    let truth = scenario.ground_truth()?;
    let table = LikelihoodTable::new(&scenario.model, scenario.suggest_size);
    let mut posterior = LogPosterior::uniform(scenario.pool_size)?;
    let mut tracker = MetricTracker::new(scenario, truth, true)?;
    for (k, record) in history.records.iter().enumerate() {
        posterior
            .update_with(&table, record.positives as usize, &record.suggested)
            .map_err(|e| at_submission(e, k + 1))?;
        tracker.push(k + 1, &posterior, record)?;
    }
    Ok(tracker.finish(history.trajectory as usize, history.seed))
}

fn at_submission(e: Error, submission: usize) -> Error {
    match e {
        Error::Inconsistent { .. } => Error::Inconsistent { submission },
        other => other,
    }
}

/// Accumulates snapshots of the global posterior and, for each reviewer, a
/// posterior fed only with the submissions that suggested that reviewer.
struct MetricTracker {
    truth: GroundTruth,
    table: LikelihoodTable,
    snapshots: Vec<MetricSnapshot>,
    reviewer_posteriors: Vec<LogPosterior>,
    per_reviewer: Vec<Vec<f64>>,
}

impl MetricTracker {
    fn new(scenario: &Scenario, truth: GroundTruth, reviewer_series: bool) -> Result<Self> {
        let uniform = LogPosterior::uniform(scenario.pool_size)?;
        let tracked = if reviewer_series { scenario.pool_size } else { 0 };
        Ok(MetricTracker {
            truth,
            table: LikelihoodTable::new(&scenario.model, scenario.suggest_size),
            snapshots: Vec::new(),
            reviewer_posteriors: vec![uniform; tracked],
            per_reviewer: vec![Vec::new(); scenario.pool_size],
        })
    }

    fn push(&mut self, m: usize, posterior: &LogPosterior, record: &SubmissionRecord) -> Result<()> {
        self.snapshots.push(posterior.snapshot(m, &self.truth.config)?);
        if self.reviewer_posteriors.is_empty() {
            return Ok(());
        }
        let a = record.positives as usize;
        for &i in record.suggested.members() {
            let post = &mut self.reviewer_posteriors[i];
            post.update_with(&self.table, a, &record.suggested)
                .map_err(|e| at_submission(e, m))?;
            self.per_reviewer[i].push(post.marginal_friend_probability(i)?);
        }
        Ok(())
    }

    fn finish(self, index: usize, seed: u64) -> Trajectory {
        Trajectory {
            index,
            seed,
            truth: self.truth,
            snapshots: self.snapshots,
            per_reviewer_rho: self.per_reviewer,
        }
    }
}

/// All trajectories of the scenario, in index order.
pub fn run_ensemble(scenario: &Scenario) -> Result<Vec<Trajectory>> {
    scenario.validate()?;
    (0..scenario.trajectories)
        .into_par_iter()
        .map(|t| run_trajectory(scenario, t))
        .collect()
}

/// First 1-based index with `series[m-1] ≥ threshold`; `None` if never reached.
pub fn stopping_time(series: &[f64], threshold: f64) -> Option<usize> {
    series.iter().position(|&v| v >= threshold).map(|i| i + 1)
}

/// First 1-based index with `series[m-1] ≤ bound`.
pub fn first_at_or_below(series: &[f64], bound: f64) -> Option<usize> {
    series.iter().position(|&v| v <= bound).map(|i| i + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Metric {
    MapErrors,
    Entropy,
    T3,
    /// `ρ` of ground-truth friends, indexed by suggestion count.
    RhoFriend,
    /// `ρ` of ground-truth rivals, indexed by suggestion count.
    RhoRival,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::RhoFriend,
        Metric::RhoRival,
        Metric::MapErrors,
        Metric::Entropy,
        Metric::T3,
    ];

    pub fn file_stem(self) -> &'static str {
        match self {
            Metric::MapErrors => "map_errors",
            Metric::Entropy => "entropy",
            Metric::T3 => "t3",
            Metric::RhoFriend => "rho_friend",
            Metric::RhoRival => "rho_rival",
        }
    }
}

fn class_series(t: &Trajectory, class: ReviewerClass) -> impl Iterator<Item = &Vec<f64>> {
    t.per_reviewer_rho
        .iter()
        .enumerate()
        .filter(move |(i, _)| t.truth.config.class(*i) == class)
        .map(|(_, s)| s)
}

/// Per-index quantile bands of one metric over a set of trajectories.
pub fn quantile_bands(trajectories: &[Trajectory], metric: Metric, levels: &[f64]) -> Result<Bands> {
    if trajectories.is_empty() {
        return Err(Error::invalid("cannot summarise an empty ensemble"));
    }
    let series: Vec<Vec<f64>> = match metric {
        Metric::MapErrors => trajectories.iter().map(Trajectory::map_errors).collect(),
        Metric::Entropy => trajectories.iter().map(Trajectory::entropy).collect(),
        Metric::T3 => trajectories.iter().map(Trajectory::t3).collect(),
        Metric::RhoFriend => trajectories
            .iter()
            .flat_map(|t| class_series(t, ReviewerClass::Friend).cloned())
            .collect(),
        Metric::RhoRival => trajectories
            .iter()
            .flat_map(|t| class_series(t, ReviewerClass::Rival).cloned())
            .collect(),
    };
    if series.is_empty() {
        return Ok(Bands {
            levels: levels.to_vec(),
            quantiles: vec![Vec::new(); levels.len()],
            mean: Vec::new(),
            count: Vec::new(),
        });
    }
    Bands::from_series(&series, levels)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Misclassification {
    /// Fraction of non-censored trajectories with at least one rival in the top three.
    /// `None` when every trajectory is censored.
    pub rate: Option<f64>,
    pub counts: Vec<Option<usize>>,
}

pub fn top3_misclassification_rate(trajectories: &[Trajectory], threshold: f64) -> Misclassification {
    let counts: Vec<Option<usize>> = trajectories
        .iter()
        .map(|t| t.stop(threshold).top3_rival_count)
        .collect();
    misclassification_from_counts(counts)
}

fn misclassification_from_counts(counts: Vec<Option<usize>>) -> Misclassification {
    let stopped: Vec<usize> = counts.iter().flatten().copied().collect();
    let rate = if stopped.is_empty() {
        None
    } else {
        Some(stopped.iter().filter(|&&c| c >= 1).count() as f64 / stopped.len() as f64)
    };
    Misclassification { rate, counts }
}

/// Compact per-trajectory data kept for summarising.
struct Digest {
    map_errors: Vec<f64>,
    entropy: Vec<f64>,
    t3: Vec<f64>,
    friend_series: Vec<Vec<f64>>,
    rival_series: Vec<Vec<f64>>,
    stop: StopRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryOptions {
    pub levels: Vec<f64>,
    pub threshold: f64,
    pub entropy_zero_bits: f64,
    /// Track the per-reviewer `ρ` series (the rho_friend / rho_rival bands).
    pub reviewer_series: bool,
}

impl Default for SummaryOptions {
    fn default() -> Self {
        SummaryOptions {
            levels: DEFAULT_LEVELS.to_vec(),
            threshold: CREDIBILITY,
            entropy_zero_bits: ENTROPY_ZERO_BITS,
            reviewer_series: true,
        }
    }
}

/// Bands for every metric plus stopping behaviour of an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub scenario: Scenario,
    pub options: SummaryOptions,
    pub rho_friend: Bands,
    pub rho_rival: Bands,
    pub map_errors: Bands,
    pub entropy: Bands,
    pub t3: Bands,
    pub stopping: Vec<StopRecord>,
    #[serde(skip)]
    pub friend_series: Vec<Vec<f64>>,
    #[serde(skip)]
    pub rival_series: Vec<Vec<f64>>,
}

/// Runs the scenario's ensemble and reduces it without keeping full snapshots.
pub fn summarize(scenario: &Scenario, options: &SummaryOptions) -> Result<EnsembleSummary> {
    scenario.validate()?;
    if scenario.trajectories == 0 {
        return Err(Error::invalid("cannot summarise an empty ensemble"));
    }
    let digests: Vec<Digest> = (0..scenario.trajectories)
        .into_par_iter()
        .map(|t| {
            run_trajectory_with(scenario, t, options.reviewer_series)
                .map(|tr| tr.digest(options.threshold))
        })
        .collect::<Result<_>>()?;
    summary_from_digests(scenario, options, digests)
}

/// Summary of trajectories that are already in memory.
pub fn summarize_trajectories(
    scenario: &Scenario,
    options: &SummaryOptions,
    trajectories: Vec<Trajectory>,
) -> Result<EnsembleSummary> {
    if trajectories.is_empty() {
        return Err(Error::invalid("cannot summarise an empty ensemble"));
    }
    let digests = trajectories
        .into_iter()
        .map(|t| t.digest(options.threshold))
        .collect();
    summary_from_digests(scenario, options, digests)
}

fn summary_from_digests(
    scenario: &Scenario,
    options: &SummaryOptions,
    digests: Vec<Digest>,
) -> Result<EnsembleSummary> {
    let levels = &options.levels;
    let bands_or_empty = |series: &[Vec<f64>]| -> Result<Bands> {
        if series.is_empty() {
            Ok(Bands {
                levels: levels.clone(),
                quantiles: vec![Vec::new(); levels.len()],
                mean: Vec::new(),
                count: Vec::new(),
            })
        } else {
            Bands::from_series(series, levels)
        }
    };
    let map_errors: Vec<&[f64]> = digests.iter().map(|d| d.map_errors.as_slice()).collect();
    let entropy: Vec<&[f64]> = digests.iter().map(|d| d.entropy.as_slice()).collect();
    let t3: Vec<&[f64]> = digests.iter().map(|d| d.t3.as_slice()).collect();
    let map_errors = Bands::from_series(&map_errors, levels)?;
    let entropy = Bands::from_series(&entropy, levels)?;
    let t3 = Bands::from_series(&t3, levels)?;
    let stopping = digests.iter().map(|d| d.stop).collect();
    let mut friend_series = Vec::new();
    let mut rival_series = Vec::new();
    for d in digests {
        friend_series.extend(d.friend_series);
        rival_series.extend(d.rival_series);
    }
    Ok(EnsembleSummary {
        scenario: scenario.clone(),
        options: options.clone(),
        rho_friend: bands_or_empty(&friend_series)?,
        rho_rival: bands_or_empty(&rival_series)?,
        map_errors,
        entropy,
        t3,
        stopping,
        friend_series,
        rival_series,
    })
}

/// Headline numbers read off an [`EnsembleSummary`]. `None` means the event
/// did not happen within the simulated horizon (or the needed quantile level
/// was not computed).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Headline {
    /// Suggestion count at which the median friend `ρ` reaches the threshold.
    pub friend_strong_median: Option<usize>,
    /// Suggestion count at which the median rival `1 − ρ` reaches the threshold.
    pub rival_strong_median: Option<usize>,
    /// First `m` at which the median MAP error count is zero.
    pub map_zero_median: Option<usize>,
    /// First `m` at which the 97.5% quantile of MAP errors is zero.
    pub map_zero_upper: Option<usize>,
    /// First `m` at which the median entropy drops to the zero tolerance.
    pub entropy_zero_median: Option<usize>,
    /// First `m` at which the median `T(m)` reaches the threshold.
    pub t3_median_crossing: Option<usize>,
    pub stop_median: Option<f64>,
    pub stop_mean: Option<f64>,
    pub censored_fraction: f64,
    pub top3_misclassification_rate: Option<f64>,
}

impl EnsembleSummary {
    pub fn stop_times(&self) -> Vec<f64> {
        self.stopping
            .iter()
            .filter_map(|s| s.stop_m.map(|m| m as f64))
            .collect()
    }

    /// Stopping times with censored trajectories mapped to `+inf`.
    pub fn stop_times_censored_inf(&self) -> Vec<f64> {
        self.stopping
            .iter()
            .map(|s| s.stop_m.map_or(f64::INFINITY, |m| m as f64))
            .collect()
    }

    pub fn misclassification(&self) -> Misclassification {
        misclassification_from_counts(self.stopping.iter().map(|s| s.top3_rival_count).collect())
    }

    /// Histogram of non-censored stopping times: `(stop_m, count)` ascending.
    pub fn stop_histogram(&self) -> Vec<(usize, usize)> {
        let mut counts = std::collections::BTreeMap::new();
        for s in self.stopping.iter().filter_map(|s| s.stop_m) {
            *counts.entry(s).or_insert(0usize) += 1;
        }
        counts.into_iter().collect()
    }

    pub fn headline(&self) -> Headline {
        let t = self.options.threshold;
        let median = |b: &Bands| b.median().map(<[f64]>::to_vec);
        let stops = self.stop_times();
        let censored = self.stopping.len() - stops.len();
        Headline {
            friend_strong_median: median(&self.rho_friend).and_then(|s| stopping_time(&s, t)),
            rival_strong_median: median(&self.rho_rival).and_then(|s| first_at_or_below(&s, 1.0 - t)),
            map_zero_median: median(&self.map_errors).and_then(|s| first_at_or_below(&s, 0.0)),
            map_zero_upper: self
                .map_errors
                .level(0.975)
                .and_then(|s| first_at_or_below(s, 0.0)),
            entropy_zero_median: median(&self.entropy)
                .and_then(|s| first_at_or_below(&s, self.options.entropy_zero_bits)),
            t3_median_crossing: median(&self.t3).and_then(|s| stopping_time(&s, t)),
            stop_median: quantile::quantile(&stops, 0.5).ok(),
            stop_mean: (!stops.is_empty()).then(|| stops.iter().sum::<f64>() / stops.len() as f64),
            censored_fraction: censored as f64 / self.stopping.len().max(1) as f64,
            top3_misclassification_rate: self.misclassification().rate,
        }
    }

    /// Per-series suggestion count at which a ground-truth friend first reaches
    /// `ρ ≥ threshold` (`+inf` if never).
    pub fn friend_strong_counts(&self) -> Vec<f64> {
        let t = self.options.threshold;
        self.friend_series
            .iter()
            .map(|s| stopping_time(s, t).map_or(f64::INFINITY, |c| c as f64))
            .collect()
    }

    /// Fraction of rival series that are suggested at least `count` times and
    /// whose `ρ` after that many suggestions is above one half.
    pub fn rival_misclassified_fraction(&self, count: usize) -> Option<f64> {
        let values: Vec<f64> = self
            .rival_series
            .iter()
            .filter_map(|s| s.get(count.checked_sub(1)?).copied())
            .collect();
        (!values.is_empty())
            .then(|| values.iter().filter(|&&r| r > 0.5).count() as f64 / values.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{simulate_trajectory_history, Strategy};

    fn small(submissions: usize) -> Scenario {
        Scenario {
            submissions,
            trajectories: 8,
            ..Scenario::cynical()
        }
    }

    #[test]
    fn stopping_time_examples() {
        let mut s = vec![0.5; 10];
        s[6] = 0.96;
        assert_eq!(stopping_time(&s, 0.95), Some(7));
        assert_eq!(stopping_time(&[0.9; 20], 0.95), None);
        assert_eq!(stopping_time(&[0.1, 0.2], 0.0), Some(1));
    }

    #[test]
    fn single_step_trajectory() {
        let scenario = small(1);
        let t = run_trajectory(&scenario, 0).unwrap();
        assert_eq!(t.snapshots.len(), 1);
        let h = simulate_trajectory_history(&scenario, 0).unwrap();
        let r = &h.records[0];
        let mut post = LogPosterior::uniform(10).unwrap();
        post.update(r.positives as usize, &r.suggested, &scenario.model).unwrap();
        assert_eq!(t.snapshots[0], post.snapshot(1, &t.truth.config).unwrap());
    }

    #[test]
    fn replay_matches_live_run() {
        for strategy in [Strategy::Uniform, Strategy::Aggressive] {
            let scenario = Scenario {
                strategy,
                ..small(150)
            };
            let live = run_trajectory(&scenario, 5).unwrap();
            let h = simulate_trajectory_history(&scenario, 5).unwrap();
            let replay = trajectory_from_history(&scenario, &h).unwrap();
            assert_eq!(live, replay);
            let lens: usize = live.per_reviewer_rho.iter().map(Vec::len).sum();
            assert_eq!(lens, 150 * 3);
        }
    }

    #[test]
    fn all_friend_truth_never_misclassifies() {
        let scenario = Scenario {
            n_friends: 10,
            ..small(200)
        };
        let trajectories = run_ensemble(&scenario).unwrap();
        let mis = top3_misclassification_rate(&trajectories, CREDIBILITY);
        assert_eq!(mis.rate, Some(0.0));
        let rival = quantile_bands(&trajectories, Metric::RhoRival, &DEFAULT_LEVELS).unwrap();
        assert!(rival.is_empty());
    }

    #[test]
    fn summary_matches_in_memory_path() {
        let scenario = small(120);
        let options = SummaryOptions::default();
        let streamed = summarize(&scenario, &options).unwrap();
        let trajectories = run_ensemble(&scenario).unwrap();
        let direct = quantile_bands(&trajectories, Metric::Entropy, &options.levels).unwrap();
        assert_eq!(streamed.entropy, direct);
        let in_memory = summarize_trajectories(&scenario, &options, trajectories).unwrap();
        assert_eq!(streamed, in_memory);
    }

    #[test]
    fn empty_ensemble_rejected() {
        assert!(quantile_bands(&[], Metric::T3, &DEFAULT_LEVELS).is_err());
        let scenario = Scenario {
            trajectories: 0,
            ..small(10)
        };
        assert!(summarize(&scenario, &SummaryOptions::default()).is_err());
    }

    #[test]
    fn top_rival_count_ties() {
        let truth = GroundTruth::first_friends(4, 2).unwrap();
        assert_eq!(top_rival_count(&[0.9, 0.9, 0.9, 0.9], &truth), 1);
        assert_eq!(top_rival_count(&[0.1, 0.2, 0.9, 0.8], &truth), 2);
    }
}
