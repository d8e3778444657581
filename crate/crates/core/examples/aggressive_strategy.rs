//! Uniform vs aggressive reviewer suggestion.
//!
//! The aggressive author suggests reviewers sequentially with probability
//! proportional to their current posterior friend probability. This example
//! compares stopping times (Mann–Whitney) and how often the three most
//! trusted reviewers contain a rival when the author stops.
//!
//! ```bash
//! cargo run --release --example aggressive_strategy -- [trajectories]
//! ```

use revclass::ensemble::stats::mann_whitney_u;
use revclass::ensemble::{summarize, SummaryOptions};
use revclass::simulator::{Scenario, Strategy};

pub fn run_example(trajectories: usize) -> revclass::Result<()> {
    let options = SummaryOptions {
        reviewer_series: false,
        ..SummaryOptions::default()
    };
    let mut stops = Vec::new();
    for strategy in [Strategy::Uniform, Strategy::Aggressive] {
        let scenario = Scenario {
            strategy,
            trajectories,
            ..Scenario::cynical()
        };
        let summary = summarize(&scenario, &options)?;
        let h = summary.headline();
        let counts = summary.misclassification().counts;
        let mut hist = [0usize; 4];
        for c in counts.iter().flatten() {
            hist[*c] += 1;
        }
        println!(
            "{strategy:?}: stop median {:?}, mean {:.1}; rivals among top three {:?} -> rate {:.3}",
            h.stop_median,
            h.stop_mean.unwrap_or(f64::NAN),
            hist,
            h.top3_misclassification_rate.unwrap_or(f64::NAN)
        );
        stops.push(summary.stop_times_censored_inf());
    }
    let mw = mann_whitney_u(&stops[1], &stops[0])?;
    println!("aggressive stops sooner: U = {}, one-sided p = {:.2e}", mw.u, mw.p_less);
    Ok(())
}

#[allow(dead_code)]
fn main() -> revclass::Result<()> {
    let n = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2000);
    run_example(n)
}
