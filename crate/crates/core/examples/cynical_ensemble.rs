//! The cynical-model ensemble: bands, stopping times and headline numbers.
//!
//! Runs the ten-reviewer, five-friend scenario and writes the band and
//! stopping-time CSVs to the output directory, then prints when the median
//! trajectory crosses each classification milestone.
//!
//! ```bash
//! cargo run --release --example cynical_ensemble -- [trajectories] [out_dir]
//! ```

use std::path::Path;

use revclass::ensemble::{summarize, SummaryOptions};
use revclass::output::{write_summary, OutputSelection};
use revclass::simulator::Scenario;

pub fn run_example(trajectories: usize, out: &Path) -> revclass::Result<()> {
    let scenario = Scenario {
        trajectories,
        submissions: 400,
        ..Scenario::cynical()
    };
    let summary = summarize(&scenario, &SummaryOptions::default())?;
    let written = write_summary(out, &summary, &OutputSelection::all())?;
    let h = summary.headline();
    println!("{trajectories} trajectories, M = {}", scenario.submissions);
    println!("  friend reaches rho >= 0.95 after {:?} suggestions (median)", h.friend_strong_median);
    println!("  rival reaches rho <= 0.05 after {:?} suggestions (median)", h.rival_strong_median);
    println!("  MAP configuration correct from m = {:?} (median), {:?} (97.5%)", h.map_zero_median, h.map_zero_upper);
    println!("  entropy below {} bit from m = {:?}", summary.options.entropy_zero_bits, h.entropy_zero_median);
    println!(
        "  top-3 credibility 0.95 reached at median {:?}, mean {:?}; {:.1}% censored",
        h.stop_median,
        h.stop_mean,
        100.0 * h.censored_fraction
    );
    println!("  at least one rival in the top three: {:?}", h.top3_misclassification_rate);
    println!("wrote {} files to {}", written.len(), out.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> revclass::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let trajectories = args.first().and_then(|a| a.parse().ok()).unwrap_or(1000);
    let out = args.get(1).map_or("out/cynical", String::as_str);
    run_example(trajectories, Path::new(out))
}
