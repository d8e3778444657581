//! One simulated submission history, dumped as JSON lines and replayed.
//!
//! The history is what an author would observe — suggested reviewers and
//! the number of positive reports — plus, with `--hidden`, the diagnostics
//! only the simulation knows (which suggested reviewer was picked, each
//! report, the quality factor). Replaying the observable part through the
//! classifier reproduces the live run's metrics exactly.
//!
//! ```bash
//! cargo run --example single_history -- [submissions] [--hidden]
//! ```

use revclass::ensemble::{run_trajectory, trajectory_from_history};
use revclass::output::history_jsonl;
use revclass::simulator::{simulate_trajectory_history, Scenario};

pub fn run_example(submissions: usize, hidden: bool) -> revclass::Result<()> {
    let scenario = Scenario {
        submissions,
        trajectories: 1,
        ..Scenario::quality()
    };
    let history = simulate_trajectory_history(&scenario, 0)?;
    let text = history_jsonl(&history, hidden)?;
    for line in text.lines().take(5) {
        println!("{line}");
    }
    println!("... {} lines in total", text.lines().count());

    let replayed = trajectory_from_history(&scenario, &history)?;
    let live = run_trajectory(&scenario, 0)?;
    assert_eq!(replayed, live, "replay must reproduce the live trajectory");
    let last = live.snapshots.last().expect("at least one submission");
    println!(
        "after {} submissions: entropy {:.3} bits, MAP errors {}, T = {:.3}",
        last.m, last.entropy_bits, last.map_errors, last.t3
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> revclass::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let submissions = args.iter().find_map(|a| a.parse().ok()).unwrap_or(200);
    run_example(submissions, args.iter().any(|a| a == "--hidden"))
}
