//! Ensemble-level behaviour: reproducibility, replay and stochastic orderings.

use revclass::ensemble::stats::mann_whitney_u;
use revclass::ensemble::*;
use revclass::simulator::*;

fn cynical(submissions: usize, trajectories: usize) -> Scenario {
    Scenario {
        submissions,
        trajectories,
        ..Scenario::cynical()
    }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let s = Scenario {
        strategy: Strategy::Aggressive,
        ..cynical(60, 24)
    };
    let opts = SummaryOptions::default();
    let one = in_pool(1, || summarize(&s, &opts).unwrap());
    let four = in_pool(4, || summarize(&s, &opts).unwrap());
    assert_eq!(one, four);
    let t1 = in_pool(1, || run_ensemble(&s).unwrap());
    let t4 = in_pool(4, || run_ensemble(&s).unwrap());
    assert_eq!(t1, t4);
}

#[test]
fn trajectories_are_keyed_by_index() {
    let s = cynical(40, 6);
    let all = run_ensemble(&s).unwrap();
    for (i, t) in all.iter().enumerate() {
        assert_eq!(t.index, i);
        assert_eq!(t, &run_trajectory(&s, i).unwrap());
    }
    // A different seed gives a different ensemble.
    let other = run_ensemble(&Scenario { base_seed: 7, ..s }).unwrap();
    assert_ne!(all, other);
}

#[test]
fn replaying_a_history_reproduces_the_metrics() {
    for model in [
        revclass::model::ReviewModel::Cynical,
        Scenario::quality().model,
    ] {
        let s = Scenario {
            model,
            ..cynical(80, 3)
        };
        for t in 0..3 {
            let history = simulate_trajectory_history(&s, t).unwrap();
            assert_eq!(history.records.len(), 80);
            assert_eq!(trajectory_from_history(&s, &history).unwrap(), run_trajectory(&s, t).unwrap());
        }
    }
}

#[test]
fn summaries_agree_with_in_memory_trajectories() {
    let s = cynical(50, 10);
    let opts = SummaryOptions::default();
    let streamed = summarize(&s, &opts).unwrap();
    let stored = summarize_trajectories(&s, &opts, run_ensemble(&s).unwrap()).unwrap();
    assert_eq!(streamed, stored);
    let trajs = run_ensemble(&s).unwrap();
    assert_eq!(quantile_bands(&trajs, Metric::Entropy, &opts.levels).unwrap(), streamed.entropy);
    assert_eq!(
        quantile_bands(&trajs, Metric::RhoFriend, &opts.levels).unwrap(),
        streamed.rho_friend
    );
    assert_eq!(top3_misclassification_rate(&trajs, opts.threshold), streamed.misclassification());
}

#[test]
fn stopping_times_and_censoring() {
    let s = cynical(30, 40);
    let sum = summarize(&s, &SummaryOptions::default()).unwrap();
    let h = sum.headline();
    let stopped = sum.stop_times();
    assert_eq!(
        h.censored_fraction,
        (sum.stopping.len() - stopped.len()) as f64 / sum.stopping.len() as f64
    );
    if let Some(mean) = h.stop_mean {
        assert!((mean - stopped.iter().sum::<f64>() / stopped.len() as f64).abs() < 1e-12);
    }
    for r in &sum.stopping {
        assert_eq!(r.stop_m.is_some(), r.top3_rival_count.is_some());
        if let Some(m) = r.stop_m {
            assert!(m <= 30);
        }
    }
}

#[test]
fn more_friends_stop_sooner() {
    let opts = SummaryOptions {
        reviewer_series: false,
        ..SummaryOptions::default()
    };
    let five = summarize(&cynical(300, 500), &opts).unwrap();
    let nine = summarize(
        &Scenario {
            n_friends: 9,
            ..cynical(300, 500)
        },
        &opts,
    )
    .unwrap();
    let mw = mann_whitney_u(&nine.stop_times_censored_inf(), &five.stop_times_censored_inf()).unwrap();
    assert!(mw.p_less < 0.01, "{mw:?}");
}

#[test]
fn an_all_friend_pool_is_still_classified() {
    let s = Scenario {
        n_friends: 10,
        ..cynical(200, 4)
    };
    let sum = summarize(&s, &SummaryOptions::default()).unwrap();
    assert!(sum.rho_rival.is_empty());
    assert_eq!(*sum.map_errors.median().unwrap().last().unwrap(), 0.0);
}
