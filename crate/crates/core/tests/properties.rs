//! Property-based checks of the posterior, the report laws and the bands.

use proptest::prelude::*;
use revclass::ensemble::{Bands, DEFAULT_LEVELS};
use revclass::inference::LogPosterior;
use revclass::model::*;

fn model_strategy() -> impl Strategy<Value = ReviewModel> {
    prop_oneof![
        Just(ReviewModel::Cynical),
        (0.5f64..30.0, 0.5f64..30.0).prop_map(|(a, b)| ReviewModel::Quality(QualityDistribution::beta(a, b).unwrap())),
        (0.0f64..=1.0).prop_map(|q| ReviewModel::Quality(QualityDistribution::point(q).unwrap())),
    ]
}

/// Data consistent with a random ground truth, so the posterior never degenerates.
fn data_strategy(pool: usize) -> impl Strategy<Value = Vec<(Vec<usize>, usize)>> {
    let event = (proptest::sample::subsequence((0..pool).collect::<Vec<_>>(), 1..=pool), 0usize..3);
    proptest::collection::vec(event, 0..12)
}

fn posterior(pool: usize, data: &[(Vec<usize>, usize)], model: &ReviewModel) -> Option<LogPosterior> {
    let mut post = LogPosterior::uniform(pool).unwrap();
    for (s, a) in data {
        if post.update(*a, &SuggestedSet::new(s.clone(), pool).unwrap(), model).is_err() {
            return None;
        }
    }
    Some(post)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn report_pmfs_are_normalised(model in model_strategy()) {
        for class in [ReviewerClass::Friend, ReviewerClass::Rival] {
            let p = model.report_pmf(class).probs();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
    }

    #[test]
    fn posterior_is_normalised(model in model_strategy(), data in data_strategy(4)) {
        if let Some(post) = posterior(4, &data, &model) {
            let probs = post.probs();
            prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(post.entropy_bits() >= -1e-12 && post.entropy_bits() <= 4.0 + 1e-12);
            for m in post.marginals() {
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&m));
            }
        }
    }

    #[test]
    fn data_order_does_not_matter(model in model_strategy(), data in data_strategy(4), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut shuffled = data.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let a = posterior(4, &data, &model);
        let b = posterior(4, &shuffled, &model);
        prop_assert_eq!(a.is_some(), b.is_some());
        if let (Some(a), Some(b)) = (a, b) {
            for (x, y) in a.probs().iter().zip(b.probs()) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }
    }

    /// Relabelling reviewers relabels the posterior and its marginals.
    #[test]
    fn permutation_equivariance(
        model in model_strategy(),
        data in data_strategy(4),
        perm in Just((0..4usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let permuted: Vec<(Vec<usize>, usize)> =
            data.iter().map(|(s, a)| (s.iter().map(|&i| perm[i]).collect(), *a)).collect();
        let a = posterior(4, &data, &model);
        let b = posterior(4, &permuted, &model);
        prop_assert_eq!(a.is_some(), b.is_some());
        if let (Some(a), Some(b)) = (a, b) {
            let (pa, pb) = (a.probs(), b.probs());
            for bits in 0..16u32 {
                let mut image = 0u32;
                for (i, &target) in perm.iter().enumerate() {
                    if bits >> i & 1 == 1 {
                        image |= 1 << target;
                    }
                }
                prop_assert!((pa[bits as usize] - pb[image as usize]).abs() < 1e-10);
            }
            let (ma, mb) = (a.marginals(), b.marginals());
            for i in 0..4 {
                prop_assert!((ma[i] - mb[perm[i]]).abs() < 1e-10);
            }
            prop_assert!((a.entropy_bits() - b.entropy_bits()).abs() < 1e-10);
        }
    }

    #[test]
    fn bands_nest(series in proptest::collection::vec(proptest::collection::vec(0.0f64..1.0, 1..30), 1..40)) {
        let b = Bands::from_series(&series, &DEFAULT_LEVELS).unwrap();
        for c in 0..b.len() {
            for l in 1..b.levels.len() {
                prop_assert!(b.quantiles[l - 1][c] <= b.quantiles[l][c]);
            }
            // The median is inside the 50% band, which is inside the 95% band.
            let (lo95, lo50, med, hi50, hi95) =
                (b.quantiles[0][c], b.quantiles[1][c], b.quantiles[2][c], b.quantiles[3][c], b.quantiles[4][c]);
            prop_assert!(lo95 <= lo50 && lo50 <= med && med <= hi50 && hi50 <= hi95);
        }
    }

    #[test]
    fn beta_mean_variance_round_trip(mean in 0.01f64..0.99, frac in 0.001f64..0.999) {
        let var = frac * mean * (1.0 - mean);
        let (a, b) = beta_params_from_mean_variance(mean, var).unwrap();
        let d = QualityDistribution::beta(a, b).unwrap();
        prop_assert!((d.mean() - mean).abs() < 1e-12);
        prop_assert!((d.variance() - var).abs() < 1e-12 * (1.0 + var));
    }

    #[test]
    fn configuration_index_round_trip(bits in 0u32..1024) {
        let x = Configuration::from_bits(bits, 10).unwrap();
        prop_assert_eq!(Configuration::from_index(x.index(), 10).unwrap(), x);
        prop_assert_eq!(Configuration::from_classes(&x.classes()).unwrap(), x);
        prop_assert_eq!(x.n_friends() as u32, bits.count_ones());
    }
}
