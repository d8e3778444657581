//! How the distribution of paper quality changes the number of submissions.
//!
//! Sweeps the mean and variance of the quality factor (plus the zero-variance
//! point mass) and prints, per cell, the median submission at which the
//! posterior entropy vanishes, the MAP configuration becomes correct, and the
//! top-three credibility reaches 0.95.
//!
//! ```bash
//! cargo run --release --example quality_sweep -- [trajectories] [submissions]
//! ```

use revclass::config::GridCell;
use revclass::ensemble::{summarize, SummaryOptions};
use revclass::simulator::Scenario;

pub fn run_example(trajectories: usize, submissions: usize) -> revclass::Result<()> {
    let base = Scenario {
        trajectories,
        submissions,
        ..Scenario::quality()
    };
    let options = SummaryOptions {
        reviewer_series: false,
        ..SummaryOptions::default()
    };
    let mut cells = Vec::new();
    for mean in [0.25, 0.5, 0.75] {
        for variance in [0.05, 0.01, 0.005, 0.0] {
            cells.push(GridCell::MeanVariance { mean, variance });
        }
    }
    cells.push(GridCell::MeanVariance { mean: 0.5, variance: 0.3 });
    println!("{:<22} {:>12} {:>10} {:>10}", "cell", "entropy-zero", "MAP-zero", "stop");
    for cell in cells {
        let scenario = match cell.apply(&base) {
            Ok(s) => s,
            Err(e) => {
                println!("{:<22} skipped: {e}", cell.label());
                continue;
            }
        };
        let h = summarize(&scenario, &options)?.headline();
        let show = |x: Option<usize>| x.map_or(format!(">{submissions}"), |v| v.to_string());
        println!(
            "{:<22} {:>12} {:>10} {:>10}",
            cell.label(),
            show(h.entropy_zero_median),
            show(h.map_zero_median),
            h.stop_median.map_or(format!(">{submissions}"), |v| v.to_string())
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> revclass::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    run_example(args.first().copied().unwrap_or(100), args.get(1).copied().unwrap_or(6000))
}
