//! Goodness-of-fit checks of the samplers against their exact laws.
//!
//! Every test uses a fixed seed, so outcomes are deterministic; thresholds are
//! set at the 0.1% level of the corresponding null distribution.

mod common;

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use revclass::model::*;
use revclass::simulator::*;
use statrs::distribution::{Beta, ChiSquared, ContinuousCDF};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Pearson statistic and the 99.9% critical value for `counts` vs `probs`.
fn chi_square(counts: &[usize], probs: &[f64]) -> (f64, f64) {
    let n: usize = counts.iter().sum();
    let stat = counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| {
            let e = p * n as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    let crit = ChiSquared::new((counts.len() - 1) as f64).unwrap().inverse_cdf(0.999);
    (stat, crit)
}

fn subset_counts(draws: impl Iterator<Item = SuggestedSet>, all: &[Vec<usize>]) -> Vec<usize> {
    let index: HashMap<&[usize], usize> = all.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let mut counts = vec![0; all.len()];
    for s in draws {
        counts[index[s.members()]] += 1;
    }
    counts
}

#[test]
fn uniform_subsets_are_uniform() {
    let all = common::subsets(10, 3);
    assert_eq!(all.len(), 120);
    let mut r = rng(1);
    let counts = subset_counts((0..120_000).map(|_| sample_suggested_set_uniform(&mut r, 10, 3).unwrap()), &all);
    let (stat, crit) = chi_square(&counts, &vec![1.0 / 120.0; 120]);
    assert!(stat < crit, "chi2 {stat} >= {crit}");
}

/// Probability of each unordered set under sequential weighted sampling
/// without replacement, by summing over all pick orders.
fn aggressive_set_law(weights: &[f64], k: usize) -> HashMap<Vec<usize>, f64> {
    fn rec(weights: &[f64], k: usize, picked: &mut Vec<usize>, p: f64, out: &mut HashMap<Vec<usize>, f64>) {
        if picked.len() == k {
            let mut key = picked.clone();
            key.sort_unstable();
            *out.entry(key).or_default() += p;
            return;
        }
        let total: f64 = (0..weights.len()).filter(|i| !picked.contains(i)).map(|i| weights[i]).sum();
        for i in 0..weights.len() {
            if picked.contains(&i) || weights[i] == 0.0 {
                continue;
            }
            picked.push(i);
            rec(weights, k, picked, p * weights[i] / total, out);
            picked.pop();
        }
    }
    let mut out = HashMap::new();
    rec(weights, k, &mut Vec::new(), 1.0, &mut out);
    out
}

#[test]
fn aggressive_inclusion_law_matches_enumeration() {
    let weights = [0.9, 0.5, 0.2, 0.05];
    for k in 1..=3 {
        let law = aggressive_set_law(&weights, k);
        let all: Vec<Vec<usize>> = common::subsets(4, k);
        let probs: Vec<f64> = all.iter().map(|s| law[s]).collect();
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let mut r = rng(2 + k as u64);
        let counts = subset_counts(
            (0..100_000).map(|_| sample_suggested_set_aggressive(&mut r, &weights, k).unwrap()),
            &all,
        );
        let (stat, crit) = chi_square(&counts, &probs);
        assert!(stat < crit, "k={k}: chi2 {stat} >= {crit}");
    }
}

#[test]
fn aggressive_with_equal_marginals_is_uniform() {
    let all = common::subsets(5, 3);
    let mut r = rng(7);
    let counts = subset_counts(
        (0..50_000).map(|_| sample_suggested_set_aggressive(&mut r, &[0.5; 5], 3).unwrap()),
        &all,
    );
    let (stat, crit) = chi_square(&counts, &[0.1; 10]);
    assert!(stat < crit, "chi2 {stat} >= {crit}");
}

#[test]
fn aggressive_favours_likely_friends_over_uniform() {
    let marginals = [0.95, 0.9, 0.5, 0.1, 0.05];
    let (mut agg, mut uni) = ([0usize; 5], [0usize; 5]);
    let mut r = rng(8);
    for _ in 0..20_000 {
        for &i in sample_suggested_set_aggressive(&mut r, &marginals, 2).unwrap().members() {
            agg[i] += 1;
        }
        for &i in sample_suggested_set_uniform(&mut r, 5, 2).unwrap().members() {
            uni[i] += 1;
        }
    }
    assert!(agg[0] > uni[0] && agg[1] > uni[1]);
    assert!(agg[3] < uni[3] && agg[4] < uni[4]);
}

#[test]
fn zero_weights_fall_back_to_remaining_reviewers() {
    let mut r = rng(9);
    for _ in 0..1000 {
        let s = sample_suggested_set_aggressive(&mut r, &[1.0, 0.0, 0.0, 0.0], 3).unwrap();
        assert!(s.contains(0));
        assert_eq!(s.len(), 3);
    }
}

fn draw_many(model: &ReviewModel, truth: &GroundTruth, s: &SuggestedSet, n: usize, seed: u64) -> Vec<SubmissionRecord> {
    let mut r = rng(seed);
    (0..n).map(|_| simulate_submission(&mut r, truth, s, model).unwrap()).collect()
}

#[test]
fn quality_factors_follow_the_beta_law() {
    let (alpha, beta) = (2.0, 5.0);
    let model = ReviewModel::Quality(QualityDistribution::beta(alpha, beta).unwrap());
    let truth = GroundTruth::first_friends(4, 2).unwrap();
    let s = SuggestedSet::new(vec![0, 3], 4).unwrap();
    let mut q: Vec<f64> = draw_many(&model, &truth, &s, 20_000, 10)
        .iter()
        .map(|r| r.hidden.unwrap().q.unwrap())
        .collect();
    q.sort_by(f64::total_cmp);
    let cdf = Beta::new(alpha, beta).unwrap();
    let n = q.len() as f64;
    let d = q
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf.cdf(x);
            (f - i as f64 / n).abs().max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max);
    // Kolmogorov critical value at the 0.1% level.
    assert!(d < 1.95 / n.sqrt(), "KS distance {d}");
}

#[test]
fn suggested_reviewer_is_uniform_within_the_set() {
    let truth = GroundTruth::first_friends(10, 5).unwrap();
    let s = SuggestedSet::new(vec![1, 4, 8], 10).unwrap();
    let recs = draw_many(&ReviewModel::Cynical, &truth, &s, 30_000, 11);
    let mut counts = [0usize; 3];
    for r in &recs {
        let pos = s.members().iter().position(|&m| m == r.hidden.unwrap().r1).unwrap();
        counts[pos] += 1;
    }
    let (stat, crit) = chi_square(&counts, &[1.0 / 3.0; 3]);
    assert!(stat < crit, "chi2 {stat} >= {crit}");
}

/// Binomial z-score of `hits` out of `n` against probability `p`.
fn z(hits: usize, n: usize, p: f64) -> f64 {
    (hits as f64 - n as f64 * p) / (n as f64 * p * (1.0 - p)).sqrt()
}

#[test]
fn report_frequencies_match_the_acceptance_table() {
    let q = 0.3;
    let model = ReviewModel::Quality(QualityDistribution::point(q).unwrap());
    let truth = GroundTruth::first_friends(2, 1).unwrap();
    let n = 40_000;
    for (reviewer, accept) in [(0usize, q * (2.0 - q)), (1, q * q)] {
        let s = SuggestedSet::new(vec![reviewer], 2).unwrap();
        let recs = draw_many(&model, &truth, &s, n, 12 + reviewer as u64);
        let r1_hits = recs.iter().filter(|r| r.hidden.unwrap().chi_r1 == 1).count();
        let r2_hits = recs.iter().filter(|r| r.hidden.unwrap().chi_r2 == 1).count();
        assert!(z(r1_hits, n, accept).abs() < 4.0, "reviewer {reviewer}");
        assert!(z(r2_hits, n, q).abs() < 4.0);
        // a is the sum of the two reports.
        assert!(recs.iter().all(|r| {
            let h = r.hidden.unwrap();
            r.positives == h.chi_r1 + h.chi_r2
        }));
    }
}

#[test]
fn cynical_reports() {
    let truth = GroundTruth::first_friends(2, 1).unwrap();
    let n = 20_000;
    for reviewer in [0usize, 1] {
        let s = SuggestedSet::new(vec![reviewer], 2).unwrap();
        let recs = draw_many(&ReviewModel::Cynical, &truth, &s, n, 20 + reviewer as u64);
        let want = u8::from(reviewer == 0);
        assert!(recs.iter().all(|r| r.hidden.unwrap().chi_r1 == want));
        let r2 = recs.iter().filter(|r| r.hidden.unwrap().chi_r2 == 1).count();
        assert!(z(r2, n, 0.5).abs() < 4.0);
    }
}

#[test]
fn report_counts_follow_the_marginal_law() {
    let d = QualityDistribution::beta(12.0, 12.0).unwrap();
    let model = ReviewModel::Quality(d);
    let truth = GroundTruth::first_friends(2, 1).unwrap();
    for (reviewer, class) in [(0usize, ReviewerClass::Friend), (1, ReviewerClass::Rival)] {
        let s = SuggestedSet::new(vec![reviewer], 2).unwrap();
        let mut counts = [0usize; 3];
        for r in draw_many(&model, &truth, &s, 30_000, 30 + reviewer as u64) {
            counts[r.positives as usize] += 1;
        }
        let (stat, crit) = chi_square(&counts, &marginal_report_pmf(class, &d).probs());
        assert!(stat < crit, "{class:?}: chi2 {stat} >= {crit}");
    }
}
