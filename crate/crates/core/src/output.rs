//! CSV, JSON and JSONL writers for ensemble results.
//!
//! Every CSV has a header row. Integers are written plainly and reals in
//! scientific notation with 17 significant digits (`{:.16e}`), which is
//! locale-independent and round-trips every `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{scenario_to_config, ScenarioConfig};
use crate::ensemble::quantile::level_label;
use crate::ensemble::{Bands, EnsembleSummary, Headline, Metric, StopRecord, SummaryOptions};
use crate::error::{Error, Result};
use crate::simulator::{History, Scenario};

/// Real number in the crate's CSV format.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// `m, mean, <one column per quantile level>`; `m` starts at 1.
pub fn bands_csv(bands: &Bands) -> String {
    let mut out = String::from("m,mean");
    for &l in &bands.levels {
        out.push(',');
        out.push_str(&level_label(l));
    }
    out.push('\n');
    for c in 0..bands.len() {
        let _ = write!(out, "{},{}", c + 1, fmt_real(bands.mean[c]));
        for q in &bands.quantiles {
            out.push(',');
            out.push_str(&fmt_real(q[c]));
        }
        out.push('\n');
    }
    out
}

/// `trajectory_id, stop_m, censored, top3_rival_count`; censored rows leave
/// `stop_m` and `top3_rival_count` empty.
pub fn stopping_csv(records: &[StopRecord]) -> String {
    let mut out = String::from("trajectory_id,stop_m,censored,top3_rival_count\n");
    for r in records {
        match (r.stop_m, r.top3_rival_count) {
            (Some(m), Some(c)) => {
                let _ = writeln!(out, "{},{},0,{}", r.trajectory, m, c);
            }
            _ => {
                let _ = writeln!(out, "{},,1,", r.trajectory);
            }
        }
    }
    out
}

/// `stop_m, count` for every observed (non-censored) stopping time.
pub fn stop_hist_csv(histogram: &[(usize, usize)]) -> String {
    let mut out = String::from("stop_m,count\n");
    for (m, n) in histogram {
        let _ = writeln!(out, "{m},{n}");
    }
    out
}

/// `top3_rival_count, trajectories, fraction` over trajectories that stopped,
/// plus a final `censored` row whose fraction is relative to all trajectories.
pub fn misclassification_csv(records: &[StopRecord], top: usize) -> String {
    let stopped: Vec<usize> = records.iter().filter_map(|r| r.top3_rival_count).collect();
    let censored = records.len() - stopped.len();
    let mut out = String::from("top3_rival_count,trajectories,fraction\n");
    for k in 0..=top {
        let n = stopped.iter().filter(|&&c| c == k).count();
        let frac = if stopped.is_empty() {
            f64::NAN
        } else {
            n as f64 / stopped.len() as f64
        };
        let _ = writeln!(out, "{k},{n},{}", fmt_real(frac));
    }
    let _ = writeln!(
        out,
        "censored,{censored},{}",
        fmt_real(censored as f64 / records.len().max(1) as f64)
    );
    out
}

/// File name of a metric's band CSV.
pub fn band_file_name(metric: Metric) -> String {
    format!("{}.csv", metric.file_stem())
}

fn summary_bands(summary: &EnsembleSummary, metric: Metric) -> &Bands {
    match metric {
        Metric::MapErrors => &summary.map_errors,
        Metric::Entropy => &summary.entropy,
        Metric::T3 => &summary.t3,
        Metric::RhoFriend => &summary.rho_friend,
        Metric::RhoRival => &summary.rho_rival,
    }
}

/// Which files [`write_summary`] produces.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputSelection {
    pub metrics: Vec<Metric>,
    pub stopping: bool,
}

impl OutputSelection {
    pub fn all() -> Self {
        OutputSelection {
            metrics: Metric::ALL.to_vec(),
            stopping: true,
        }
    }
}

/// Writes the selected band CSVs plus (optionally) `stopping.csv`,
/// `stop_hist.csv`, `misclassification.csv`, and always `summary.json`.
/// Returns the written paths in order.
pub fn write_summary(dir: &Path, summary: &EnsembleSummary, selection: &OutputSelection) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let mut written = Vec::new();
    for &metric in &selection.metrics {
        let path = dir.join(band_file_name(metric));
        write_file(&path, &bands_csv(summary_bands(summary, metric)))?;
        written.push(path);
    }
    if selection.stopping {
        let files = [
            ("stopping.csv", stopping_csv(&summary.stopping)),
            ("stop_hist.csv", stop_hist_csv(&summary.stop_histogram())),
            (
                "misclassification.csv",
                misclassification_csv(&summary.stopping, crate::inference::T_RANK.min(summary.scenario.pool_size)),
            ),
        ];
        for (name, body) in files {
            let path = dir.join(name);
            write_file(&path, &body)?;
            written.push(path);
        }
    }
    let path = dir.join("summary.json");
    write_json(&path, &summary.headline())?;
    written.push(path);
    Ok(written)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(path, &text)
}

#[derive(Serialize)]
struct HistoryLine {
    mu: usize,
    /// 1-based reviewer ids.
    suggested: Vec<usize>,
    a: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    hidden: Option<HiddenLine>,
}

#[derive(Serialize)]
struct HiddenLine {
    r1: usize,
    chi_r1: u8,
    chi_r2: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<f64>,
}

/// One JSON object per submission: `{"mu", "suggested" (1-based), "a"}`.
/// With `include_hidden` each line also carries the unobservable
/// `hidden: {r1 (1-based), chi_r1, chi_r2, q}` diagnostics.
pub fn history_jsonl(history: &History, include_hidden: bool) -> Result<String> {
    let mut out = String::new();
    for (i, rec) in history.records.iter().enumerate() {
        let hidden = if include_hidden {
            rec.hidden.map(|h| HiddenLine {
                r1: h.r1 + 1,
                chi_r1: h.chi_r1,
                chi_r2: h.chi_r2,
                q: h.q,
            })
        } else {
            None
        };
        let line = HistoryLine {
            mu: i + 1,
            suggested: rec.suggested.members().iter().map(|&r| r + 1).collect(),
            a: rec.positives,
            hidden,
        };
        out.push_str(&serde_json::to_string(&line)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_history_jsonl(path: &Path, history: &History, include_hidden: bool) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(history_jsonl(history, include_hidden)?.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Everything needed to regenerate a run's CSVs bit-exactly.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub scenario: ScenarioConfig,
    pub options: SummaryOptions,
    pub rng: RngScheme,
    pub outputs: Vec<String>,
    pub threads: usize,
    pub wall_clock_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub headline: Option<Headline>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RngScheme {
    pub generator: &'static str,
    pub base_seed: u64,
    pub streams: String,
}

impl RunManifest {
    pub fn new(command: impl Into<String>, scenario: &Scenario, options: &SummaryOptions) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            scenario: scenario_to_config(scenario, options),
            options: options.clone(),
            rng: RngScheme {
                generator: "ChaCha8Rng::seed_from_u64(base_seed)",
                base_seed: scenario.base_seed,
                streams: format!("stream t for trajectory t in 0..{}", scenario.trajectories),
            },
            outputs: Vec::new(),
            threads: rayon::current_num_threads(),
            wall_clock_seconds: 0.0,
            headline: None,
        }
    }

    /// Records output paths relative to `root`.
    pub fn add_outputs(&mut self, root: &Path, paths: &[PathBuf]) {
        self.outputs.extend(paths.iter().map(|p| {
            p.strip_prefix(root)
                .unwrap_or(p)
                .to_string_lossy()
                .replace('\\', "/")
        }));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::DEFAULT_LEVELS;

    #[test]
    fn real_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, 2.0, 1e-300, 0.0, 123456.789] {
            let s = fmt_real(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_real(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn band_csv_layout() {
        let b = Bands::from_series(&[vec![1.0, 0.5], vec![1.0, 0.5]], &DEFAULT_LEVELS).unwrap();
        let csv = bands_csv(&b);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("m,mean,q2_5,q25,q50,q75,q97_5"));
        assert!(lines.next().unwrap().starts_with("1,1.0000000000000000e0,"));
        assert!(lines.next().unwrap().starts_with("2,5.0000000000000000e-1,"));
        assert!(lines.next().is_none());
    }

    #[test]
    fn stopping_rows() {
        let recs = [
            StopRecord {
                trajectory: 0,
                stop_m: Some(7),
                top3_rival_count: Some(1),
            },
            StopRecord {
                trajectory: 1,
                stop_m: None,
                top3_rival_count: None,
            },
        ];
        assert_eq!(
            stopping_csv(&recs),
            "trajectory_id,stop_m,censored,top3_rival_count\n0,7,0,1\n1,,1,\n"
        );
        let mis = misclassification_csv(&recs, 3);
        assert!(mis.contains("\n1,1,1.0000000000000000e0\n"));
        assert!(mis.ends_with("censored,1,5.0000000000000000e-1\n"));
    }
}
