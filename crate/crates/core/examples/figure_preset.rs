//! Regenerating the data behind a published figure from its preset.
//!
//! Presets pin every scenario parameter; this example lists them and runs
//! one (with a reduced ensemble) through the same code path as
//! `revclass figure <id> --out <dir>`.
//!
//! ```bash
//! cargo run --release --example figure_preset -- [figure_id] [trajectories] [out_dir]
//! ```

use std::path::Path;

use revclass::cli::cmd_figure;
use revclass::presets::{figure_preset, FIGURE_IDS};

pub fn run_example(id: &str, trajectories: usize, out: &Path) -> revclass::Result<()> {
    for known in FIGURE_IDS {
        let p = figure_preset(known)?;
        println!("{known:<6} {:>2} run(s)  {}", p.runs.len(), p.description);
    }
    println!();
    let manifests = cmd_figure(id, out, Some(trajectories))?;
    for m in manifests {
        println!("{} -> {:?}", m.command, m.outputs);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> revclass::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let id = args.first().map_or("fig5", String::as_str);
    let n = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(200);
    let out = args.get(2).map_or("out/figure", String::as_str);
    run_example(id, n, Path::new(out))
}
