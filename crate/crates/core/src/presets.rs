//! Named scenario bundles, one per published figure.
//!
//! Each preset pins every scenario parameter in code (including ensemble
//! sizes) so that `revclass figure <id>` is reproducible; the parameters are
//! echoed to stdout and into the run manifest.

use crate::ensemble::{Metric, SummaryOptions};
use crate::error::{Error, Result};
use crate::model::{QualityDistribution, ReviewModel};
use crate::output::OutputSelection;
use crate::simulator::{Scenario, Strategy};

/// Every accepted figure id (`si_c` is the full quality sweep).
pub const FIGURE_IDS: &[&str] = &[
    "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "si_a1", "si_a2", "si_a3", "si_a4", "si_a5",
    "si_a6", "si_c", "si_c1", "si_c2", "si_c3", "si_c4", "si_c5", "si_c6", "si_d1", "si_d2", "si_d3", "si_d4",
];

/// Mean/variance cells of the quality sweep.
pub const SWEEP_MEANS: [f64; 3] = [0.25, 0.5, 0.75];
pub const SWEEP_VARIANCES: [f64; 3] = [0.05, 0.01, 0.005];

/// Horizon and ensemble size of the quality sweep presets: long enough for
/// the slowest cell (`⟨q⟩ = 0.25`, variance 0.05) to reach zero entropy.
pub const SWEEP_SUBMISSIONS: usize = 8000;
pub const SWEEP_TRAJECTORIES: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct PresetRun {
    /// Sub-directory name below the output directory (empty: write in place).
    pub label: String,
    pub scenario: Scenario,
    pub options: SummaryOptions,
    pub outputs: OutputSelection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigurePreset {
    pub id: String,
    pub description: &'static str,
    pub runs: Vec<PresetRun>,
}

impl FigurePreset {
    /// Overrides the ensemble size of every run (for quick previews).
    pub fn with_trajectories(mut self, trajectories: usize) -> Self {
        for run in &mut self.runs {
            run.scenario.trajectories = trajectories;
        }
        self
    }
}

fn run(label: impl Into<String>, scenario: Scenario, metrics: &[Metric], stopping: bool) -> PresetRun {
    let reviewer_series = metrics.iter().any(|m| matches!(m, Metric::RhoFriend | Metric::RhoRival));
    PresetRun {
        label: label.into(),
        scenario,
        options: SummaryOptions {
            reviewer_series,
            ..SummaryOptions::default()
        },
        outputs: OutputSelection {
            metrics: metrics.to_vec(),
            stopping,
        },
    }
}

fn with_friends(s: Scenario, n_friends: usize) -> Scenario {
    Scenario { n_friends, ..s }
}

fn with_strategy(s: Scenario, strategy: Strategy) -> Scenario {
    Scenario { strategy, ..s }
}

fn quality_cell(mean: f64, variance: f64) -> Result<Scenario> {
    Ok(Scenario {
        model: ReviewModel::Quality(QualityDistribution::from_mean_variance(mean, variance)?),
        submissions: SWEEP_SUBMISSIONS,
        trajectories: SWEEP_TRAJECTORIES,
        ..Scenario::quality()
    })
}

/// Label of a sweep cell; `variance = 0` is the point-mass column.
pub fn cell_label(mean: f64, variance: f64) -> String {
    if variance == 0.0 {
        format!("mean{mean}_point")
    } else {
        format!("mean{mean}_var{variance}")
    }
}

fn friend_runs(base: Scenario, model: &str, metrics: &[Metric], stopping: bool) -> Vec<PresetRun> {
    [5, 7, 9]
        .into_iter()
        .map(|n| run(format!("{model}_friends{n}"), with_friends(base.clone(), n), metrics, stopping))
        .collect()
}

fn strategy_runs(base: Scenario) -> Vec<PresetRun> {
    [("uniform", Strategy::Uniform), ("aggressive", Strategy::Aggressive)]
        .into_iter()
        .map(|(label, s)| run(label, with_strategy(base.clone(), s), &[Metric::T3], true))
        .collect()
}

fn sweep_runs(cells: &[(f64, f64)], metrics: &[Metric], stopping: bool) -> Result<Vec<PresetRun>> {
    cells
        .iter()
        .map(|&(m, v)| Ok(run(cell_label(m, v), quality_cell(m, v)?, metrics, stopping)))
        .collect()
}

fn table_cells() -> Vec<(f64, f64)> {
    SWEEP_MEANS
        .iter()
        .flat_map(|&m| SWEEP_VARIANCES.iter().map(move |&v| (m, v)))
        .collect()
}

fn point_comparison_cells() -> Vec<(f64, f64)> {
    SWEEP_MEANS.iter().flat_map(|&m| [(m, 0.01), (m, 0.0)]).collect()
}

/// The preset for a figure id, or a validation error listing the valid ids.
pub fn figure_preset(id: &str) -> Result<FigurePreset> {
    use Metric::*;
    let cyn = Scenario::cynical;
    let qual = Scenario::quality;
    let rho: &[Metric] = &[RhoFriend, RhoRival];
    let (description, runs) = match id {
        "fig2" => ("cynical: per-reviewer friend probability", vec![run("", cyn(), rho, false)]),
        "fig3" => ("cynical: MAP errors", vec![run("", cyn(), &[MapErrors], false)]),
        "fig4" => ("cynical: posterior entropy", vec![run("", cyn(), &[Entropy], false)]),
        "fig5" => ("cynical: third-largest marginal and stopping times", vec![run("", cyn(), &[T3], true)]),
        "fig6" => ("quality: per-reviewer friend probability", vec![run("", qual(), rho, false)]),
        "fig7" => ("quality: MAP errors", vec![run("", qual(), &[MapErrors], false)]),
        "fig8" => ("quality: posterior entropy", vec![run("", qual(), &[Entropy], false)]),
        "fig9" => ("quality: third-largest marginal and stopping times", vec![run("", qual(), &[T3], true)]),
        "si_a1" => ("cynical: per-reviewer probability for 5/7/9 friends", friend_runs(cyn(), "cynical", rho, false)),
        "si_a2" => ("quality: per-reviewer probability for 5/7/9 friends", friend_runs(qual(), "quality", rho, false)),
        "si_a3" => ("MAP errors for 5/7/9 friends, both models", {
            let mut r = friend_runs(cyn(), "cynical", &[MapErrors], false);
            r.extend(friend_runs(qual(), "quality", &[MapErrors], false));
            r
        }),
        "si_a4" => ("entropy for 5/7/9 friends, both models", {
            let mut r = friend_runs(cyn(), "cynical", &[Entropy], false);
            r.extend(friend_runs(qual(), "quality", &[Entropy], false));
            r
        }),
        "si_a5" => ("cynical: stopping for 5/7/9 friends", friend_runs(cyn(), "cynical", &[T3], true)),
        "si_a6" => ("quality: stopping for 5/7/9 friends", friend_runs(qual(), "quality", &[T3], true)),
        "si_c" => ("quality sweep over mean/variance including point masses", {
            let mut cells = table_cells();
            cells.extend(SWEEP_MEANS.iter().map(|&m| (m, 0.0)));
            sweep_runs(&cells, &[MapErrors, Entropy, T3], true)?
        }),
        "si_c1" => ("quality sweep: MAP errors", sweep_runs(&table_cells(), &[MapErrors], false)?),
        "si_c2" => ("quality sweep: entropy", sweep_runs(&table_cells(), &[Entropy], false)?),
        "si_c3" => ("quality sweep: stopping", sweep_runs(&table_cells(), &[T3], true)?),
        "si_c4" => ("variance 0.01 vs point mass: MAP errors", sweep_runs(&point_comparison_cells(), &[MapErrors], false)?),
        "si_c5" => ("variance 0.01 vs point mass: entropy", sweep_runs(&point_comparison_cells(), &[Entropy], false)?),
        "si_c6" => ("variance 0.01 vs point mass: stopping", sweep_runs(&point_comparison_cells(), &[T3], true)?),
        "si_d1" => ("cynical, 5 friends: uniform vs aggressive", strategy_runs(cyn())),
        "si_d2" => ("cynical, 9 friends: uniform vs aggressive", strategy_runs(with_friends(cyn(), 9))),
        "si_d3" => ("quality, 5 friends: uniform vs aggressive", strategy_runs(qual())),
        "si_d4" => ("quality, 9 friends: uniform vs aggressive", strategy_runs(with_friends(qual(), 9))),
        other => {
            return Err(Error::invalid(format!(
                "unknown figure id `{other}`; valid ids: {}",
                FIGURE_IDS.join(", ")
            )))
        }
    };
    Ok(FigurePreset {
        id: id.to_string(),
        description,
        runs,
    })
}
