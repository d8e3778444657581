//! The `revclass` command line: `ensemble`, `figure` and `sweep`.
//!
//! The `cmd_*` functions are the library form of the subcommands and can be
//! called directly; [`run`] parses arguments, configures the thread pool and
//! maps errors to exit codes (0 success, 1 validation, 2 runtime).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::{load_config, GridCell, ResolvedConfig};
use crate::ensemble::quantile::level_label;
use crate::ensemble::{summarize, EnsembleSummary, Headline, Metric, SummaryOptions};
use crate::error::{Error, Result};
use crate::model::{QualityDistribution, ReviewModel};
use crate::output::{
    bands_csv, create_dir, fmt_real, write_history_jsonl, write_json, write_summary, OutputSelection, RunManifest,
};
use crate::presets::figure_preset;
use crate::simulator::{simulate_trajectory_history, Scenario};

/// Environment variable holding the default number of worker threads.
pub const THREADS_ENV: &str = "REVCLASS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "revclass", version, about = "Classify suggested reviewers as friends or rivals from simulated submission histories")]
pub struct Cli {
    /// Worker threads (default: $REVCLASS_THREADS, else all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one ensemble described by a JSON config.
    Ensemble {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the first N trajectories' histories as JSONL.
        #[arg(long, default_value_t = 0)]
        histories: usize,
        /// Include unobservable per-submission diagnostics in the histories.
        #[arg(long)]
        debug_hidden: bool,
    },
    /// Regenerate the data behind a published figure.
    Figure {
        id: String,
        #[arg(long)]
        out: PathBuf,
        /// Override the preset's ensemble size.
        #[arg(long)]
        trajectories: Option<usize>,
    },
    /// Run one ensemble per cell of the config's `grid`.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Extra outputs of [`cmd_ensemble_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EnsembleFlags {
    pub histories: usize,
    pub debug_hidden: bool,
}

/// Runs one scenario and writes its CSVs, `summary.json` and `manifest.json` into `out`.
pub fn run_scenario(
    command: &str,
    scenario: &Scenario,
    options: &SummaryOptions,
    selection: &OutputSelection,
    out: &Path,
) -> Result<(RunManifest, EnsembleSummary)> {
    create_dir(out)?;
    let start = Instant::now();
    let summary = summarize(scenario, options)?;
    let written = write_summary(out, &summary, selection)?;
    let mut manifest = RunManifest::new(command, scenario, options);
    manifest.add_outputs(out, &written);
    manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
    manifest.headline = Some(summary.headline());
    write_json(&out.join("manifest.json"), &manifest)?;
    Ok((manifest, summary))
}

fn reject_grid(config: &ResolvedConfig, path: &Path) -> Result<()> {
    if config.grid.is_some() {
        return Err(Error::Config {
            path: Some(path.to_path_buf()),
            line: None,
            field: "grid".into(),
            message: "parameter grids are only accepted by `sweep`".into(),
        });
    }
    Ok(())
}

pub fn cmd_ensemble(config_path: &Path, out: &Path) -> Result<RunManifest> {
    cmd_ensemble_with(config_path, out, EnsembleFlags::default())
}

pub fn cmd_ensemble_with(config_path: &Path, out: &Path, flags: EnsembleFlags) -> Result<RunManifest> {
    let config = load_config(config_path)?;
    reject_grid(&config, config_path)?;
    let command = format!("ensemble --config {}", config_path.display());
    let (mut manifest, _) = run_scenario(&command, &config.scenario, &config.options, &OutputSelection::all(), out)?;
    if flags.histories > 0 {
        let dir = out.join("histories");
        create_dir(&dir)?;
        let mut written = Vec::new();
        for t in 0..flags.histories.min(config.scenario.trajectories) {
            let history = simulate_trajectory_history(&config.scenario, t)?;
            let path = dir.join(format!("trajectory_{t:05}.jsonl"));
            write_history_jsonl(&path, &history, flags.debug_hidden)?;
            written.push(path);
        }
        manifest.add_outputs(out, &written);
        write_json(&out.join("manifest.json"), &manifest)?;
    }
    Ok(manifest)
}

/// Runs every scenario of a figure preset, printing its parameters.
pub fn cmd_figure(id: &str, out: &Path, trajectories: Option<usize>) -> Result<Vec<RunManifest>> {
    let mut preset = figure_preset(id)?;
    if let Some(n) = trajectories {
        if n == 0 {
            return Err(Error::invalid("--trajectories must be at least 1"));
        }
        preset = preset.with_trajectories(n);
    }
    println!("{}: {}", preset.id, preset.description);
    let mut manifests = Vec::new();
    for run in &preset.runs {
        let dir = if run.label.is_empty() {
            out.to_path_buf()
        } else {
            out.join(&run.label)
        };
        println!(
            "  {} {}",
            if run.label.is_empty() { "-" } else { &run.label },
            serde_json::to_string(&crate::config::scenario_to_config(&run.scenario, &run.options))?
        );
        let command = format!("figure {id}");
        let (manifest, _) = run_scenario(&command, &run.scenario, &run.options, &run.outputs, &dir)?;
        manifests.push(manifest);
    }
    if preset.runs.len() > 1 {
        #[derive(Serialize)]
        struct Index<'a> {
            figure: &'a str,
            description: &'a str,
            runs: Vec<&'a str>,
        }
        write_json(
            &out.join("manifest.json"),
            &Index {
                figure: &preset.id,
                description: preset.description,
                runs: preset.runs.iter().map(|r| r.label.as_str()).collect(),
            },
        )?;
    }
    Ok(manifests)
}

/// Outcome of one sweep cell.
#[derive(Debug, Clone, Serialize)]
pub struct SweepCell {
    pub label: String,
    pub cell: GridCell,
    /// `None` when the cell was infeasible and skipped.
    pub headline: Option<Headline>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub cells: Vec<SweepCell>,
}

impl SweepReport {
    pub fn skipped(&self) -> impl Iterator<Item = &SweepCell> {
        self.cells.iter().filter(|c| c.skipped.is_some())
    }
}

/// Key columns of the long-format sweep CSV.
struct CellKey {
    mean: Option<f64>,
    variance: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    n_friends: usize,
}

impl CellKey {
    fn of(s: &Scenario) -> Self {
        let (mean, variance, alpha, beta) = match s.model {
            ReviewModel::Cynical => (None, None, None, None),
            ReviewModel::Quality(d @ QualityDistribution::Beta { alpha, beta }) => {
                (Some(d.mean()), Some(d.variance()), Some(alpha), Some(beta))
            }
            ReviewModel::Quality(QualityDistribution::Point(q)) => (Some(q), Some(0.0), None, None),
        };
        CellKey {
            mean,
            variance,
            alpha,
            beta,
            n_friends: s.n_friends,
        }
    }

    fn columns(&self) -> String {
        let f = |x: Option<f64>| x.map(fmt_real).unwrap_or_default();
        format!(
            "{},{},{},{},{}",
            f(self.mean),
            f(self.variance),
            f(self.alpha),
            f(self.beta),
            self.n_friends
        )
    }
}

const CELL_KEY_HEADER: &str = "cell,q_mean,q_variance,alpha,beta,n_friends";

/// Runs one ensemble per grid cell. Each feasible cell gets a sub-directory
/// laid out exactly like `ensemble` output; `sweep.csv` stacks every band in
/// long format, `cells.csv` lists per-cell headline numbers (and the reason
/// for skipped cells).
pub fn cmd_sweep(config_path: &Path, out: &Path) -> Result<SweepReport> {
    let config = load_config(config_path)?;
    let grid = config.grid.clone().ok_or_else(|| Error::Config {
        path: Some(config_path.to_path_buf()),
        line: None,
        field: "grid".into(),
        message: "a sweep config needs a `grid` object".into(),
    })?;
    create_dir(out)?;
    let mut long = format!("{CELL_KEY_HEADER},metric,m,mean");
    for &l in &config.options.levels {
        long.push(',');
        long.push_str(&level_label(l));
    }
    long.push('\n');
    let mut cells_csv = format!(
        "{CELL_KEY_HEADER},status,stop_median,stop_mean,censored_fraction,map_zero_median,entropy_zero_median,top3_misclassification_rate,message\n"
    );
    let mut report = SweepReport { cells: Vec::new() };
    for cell in grid {
        let label = cell.label();
        let scenario = match cell.apply(&config.scenario) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("skipping infeasible cell {label}: {e}");
                let _ = writeln!(cells_csv, "{label},,,,,,infeasible,,,,,,,\"{}\"", e.to_string().replace('"', "'"));
                report.cells.push(SweepCell {
                    label,
                    cell,
                    headline: None,
                    skipped: Some(e.to_string()),
                });
                continue;
            }
        };
        let command = format!("sweep --config {} [{label}]", config_path.display());
        let (_, summary) = run_scenario(&command, &scenario, &config.options, &OutputSelection::all(), &out.join(&label))?;
        let key = CellKey::of(&scenario).columns();
        for metric in Metric::ALL {
            let bands = match metric {
                Metric::MapErrors => &summary.map_errors,
                Metric::Entropy => &summary.entropy,
                Metric::T3 => &summary.t3,
                Metric::RhoFriend => &summary.rho_friend,
                Metric::RhoRival => &summary.rho_rival,
            };
            for row in bands_csv(bands).lines().skip(1) {
                let _ = writeln!(long, "{label},{key},{},{row}", metric.file_stem());
            }
        }
        let h = summary.headline();
        let opt_real = |x: Option<f64>| x.map(fmt_real).unwrap_or_default();
        let opt_int = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(
            cells_csv,
            "{label},{key},ok,{},{},{},{},{},{},",
            opt_real(h.stop_median),
            opt_real(h.stop_mean),
            fmt_real(h.censored_fraction),
            opt_int(h.map_zero_median),
            opt_int(h.entropy_zero_median),
            opt_real(h.top3_misclassification_rate),
        );
        report.cells.push(SweepCell {
            label,
            cell,
            headline: Some(h),
            skipped: None,
        });
    }
    std::fs::write(out.join("sweep.csv"), long).map_err(|e| Error::io(out.join("sweep.csv"), e))?;
    std::fs::write(out.join("cells.csv"), cells_csv).map_err(|e| Error::io(out.join("cells.csv"), e))?;
    write_json(&out.join("manifest.json"), &report)?;
    Ok(report)
}

fn thread_count(flag: Option<usize>) -> std::result::Result<Option<usize>, String> {
    if let Some(n) = flag {
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| format!("{THREADS_ENV}={v:?} is not a thread count")),
        _ => Ok(None),
    }
}

/// Parses `args`, runs the subcommand and returns the process exit code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match thread_count(cli.threads) {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("error: cannot configure {n} threads: {e}");
                return ExitCode::from(2);
            }
        }
        Ok(None) => {}
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::Ensemble {
            config,
            out,
            histories,
            debug_hidden,
        } => cmd_ensemble_with(
            config,
            out,
            EnsembleFlags {
                histories: *histories,
                debug_hidden: *debug_hidden,
            },
        )
        .map(|m| println!("wrote {} files to {}", m.outputs.len() + 1, out.display())),
        Command::Figure { id, out, trajectories } => {
            cmd_figure(id, out, *trajectories).map(|_| println!("wrote figure {id} data to {}", out.display()))
        }
        Command::Sweep { config, out } => cmd_sweep(config, out).map(|r| {
            println!(
                "swept {} cells ({} skipped) into {}",
                r.cells.len(),
                r.skipped().count(),
                out.display()
            )
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
