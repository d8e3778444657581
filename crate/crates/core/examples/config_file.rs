//! Driving a run from a JSON configuration, as `revclass ensemble` does.
//!
//! Shows the accepted schema, the defaults it fills in, and the
//! line-anchored error for an invalid file.
//!
//! ```bash
//! cargo run --release --example config_file -- [out_dir]
//! ```

use std::path::Path;

use revclass::cli::cmd_ensemble;
use revclass::config::parse_config;

const CONFIG: &str = r#"{
  "pool_size": 8,
  "suggest_size": 2,
  "n_friends": 3,
  "model": {"quality": {"mean": 0.5, "variance": 0.01}},
  "strategy": "aggressive",
  "submissions": 300,
  "trajectories": 40,
  "seed": 11
}
"#;

pub fn run_example(out: &Path) -> revclass::Result<()> {
    let resolved = parse_config(CONFIG, None)?;
    println!("resolved scenario: {:?}", resolved.scenario);

    let bad = "{\n  \"pool_size\": 10,\n  \"n_friends\": 11\n}";
    match parse_config(bad, Some(Path::new("bad.json"))) {
        Err(e) => println!("invalid config: {e}"),
        Ok(_) => unreachable!("eleven friends cannot fit in ten reviewers"),
    }

    std::fs::create_dir_all(out).map_err(|e| revclass::Error::Io { path: out.into(), source: e })?;
    let path = out.join("config.json");
    std::fs::write(&path, CONFIG).map_err(|e| revclass::Error::Io { path: path.clone(), source: e })?;
    let manifest = cmd_ensemble(&path, &out.join("run"))?;
    println!("outputs: {:?}", manifest.outputs);
    println!("headline: {:?}", manifest.headline);
    Ok(())
}

#[allow(dead_code)]
fn main() -> revclass::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out/config_file".into());
    run_example(Path::new(&out))
}
