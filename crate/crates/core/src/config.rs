//! JSON scenario configuration.
//!
//! ```json
//! {
//!   "pool_size": 10,
//!   "suggest_size": 3,
//!   "n_friends": 5,
//!   "model": {"quality": {"alpha": 12, "beta": 12}},
//!   "strategy": "uniform",
//!   "submissions": 4000,
//!   "trajectories": 500,
//!   "seed": 2023,
//!   "quantiles": [0.025, 0.25, 0.5, 0.75, 0.975]
//! }
//! ```
//!
//! `model` is either `"cynical"` or `{"quality": {...}}` with exactly one of
//! `{alpha, beta}`, `{mean, variance}` or `{point_q}`. Here `variance` is the
//! variance of the quality factor (not its standard deviation); a variance of
//! zero means every submission has quality `mean`. Every key is optional;
//! the defaults are the ten-reviewer, five-friend setting with 500
//! submissions × 1000 trajectories (cynical) or 4000 × 500 (quality).
//!
//! A sweep file adds a `grid` object holding exactly one of
//! `mean_variance: [[m, v], ...]`, `alpha_beta: [[a, b], ...]` or
//! `n_friends: [k, ...]`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ensemble::{SummaryOptions, DEFAULT_LEVELS};
use crate::error::{Error, Result};
use crate::model::{QualityDistribution, ReviewModel};
use crate::simulator::{Scenario, Strategy};

pub const DEFAULT_SEED: u64 = 2023;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pool_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suggest_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_friends: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<Strategy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub submissions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectories: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantiles: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelConfig {
    Cynical,
    Quality(QualityConfig),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QualityConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point_q: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_variance: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_beta: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_friends: Option<Vec<usize>>,
}

/// One grid point of a sweep, before feasibility checking.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GridCell {
    MeanVariance { mean: f64, variance: f64 },
    AlphaBeta { alpha: f64, beta: f64 },
    NFriends(usize),
}

impl GridCell {
    pub fn label(&self) -> String {
        match *self {
            GridCell::MeanVariance { mean, variance } => format!("mean{mean}_var{variance}"),
            GridCell::AlphaBeta { alpha, beta } => format!("alpha{alpha}_beta{beta}"),
            GridCell::NFriends(n) => format!("friends{n}"),
        }
    }

    /// Applies the cell to a base scenario; infeasible cells yield an error.
    pub fn apply(&self, base: &Scenario) -> Result<Scenario> {
        let mut s = base.clone();
        match *self {
            GridCell::MeanVariance { mean, variance } => {
                s.model = ReviewModel::Quality(QualityDistribution::from_mean_variance(mean, variance)?);
            }
            GridCell::AlphaBeta { alpha, beta } => {
                s.model = ReviewModel::Quality(QualityDistribution::beta(alpha, beta)?);
            }
            GridCell::NFriends(n) => s.n_friends = n,
        }
        s.validate()?;
        Ok(s)
    }
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedConfig {
    pub scenario: Scenario,
    pub options: SummaryOptions,
    pub grid: Option<Vec<GridCell>>,
}

/// Parses and validates configuration text. `path` only labels error messages.
pub fn parse_config(text: &str, path: Option<&Path>) -> Result<ResolvedConfig> {
    let raw: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::Config {
        path: path.map(Path::to_path_buf),
        line: Some(e.line()),
        field: json_error_field(&e),
        message: e.to_string(),
    })?;
    resolve(&raw).map_err(|(field, message)| Error::Config {
        path: path.map(Path::to_path_buf),
        line: locate_key(text, &field),
        field,
        message,
    })
}

pub fn load_config(path: &Path) -> Result<ResolvedConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, Some(path))
}

fn json_error_field(e: &serde_json::Error) -> String {
    // serde reports unknown keys as "unknown field `name`, expected ..."
    let msg = e.to_string();
    msg.split('`').nth(1).unwrap_or("<document>").to_string()
}

/// 1-based line of the first `"key":` occurrence.
fn locate_key(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines().position(|line| {
        line.find(&needle)
            .map(|at| line[at + needle.len()..].trim_start().starts_with(':'))
            .unwrap_or(false)
    })
    .map(|i| i + 1)
}

type FieldError = (String, String);

fn field_err(field: &str, message: impl Into<String>) -> FieldError {
    (field.to_string(), message.into())
}

fn resolve(raw: &ScenarioConfig) -> std::result::Result<ResolvedConfig, FieldError> {
    let model = match &raw.model {
        None | Some(ModelConfig::Cynical) => ReviewModel::Cynical,
        Some(ModelConfig::Quality(q)) => ReviewModel::Quality(resolve_quality(q)?),
    };
    let base = if model.is_cynical() {
        Scenario::cynical()
    } else {
        Scenario::quality()
    };
    let scenario = Scenario {
        pool_size: raw.pool_size.unwrap_or(base.pool_size),
        suggest_size: raw.suggest_size.unwrap_or(base.suggest_size),
        n_friends: raw.n_friends.unwrap_or(base.n_friends),
        model,
        strategy: raw.strategy.unwrap_or(base.strategy),
        submissions: raw.submissions.unwrap_or(base.submissions),
        trajectories: raw.trajectories.unwrap_or(base.trajectories),
        base_seed: raw.seed.unwrap_or(DEFAULT_SEED),
    };
    if scenario.pool_size == 0 || scenario.pool_size > crate::model::MAX_POOL_SIZE {
        return Err(field_err(
            "pool_size",
            format!("{} outside [1, {}]", scenario.pool_size, crate::model::MAX_POOL_SIZE),
        ));
    }
    if scenario.suggest_size == 0 || scenario.suggest_size > scenario.pool_size {
        return Err(field_err(
            "suggest_size",
            format!(
                "{} outside [1, pool_size={}]",
                scenario.suggest_size, scenario.pool_size
            ),
        ));
    }
    if scenario.n_friends > scenario.pool_size {
        return Err(field_err(
            "n_friends",
            format!(
                "{} exceeds pool_size {}",
                scenario.n_friends, scenario.pool_size
            ),
        ));
    }
    if scenario.submissions == 0 {
        return Err(field_err("submissions", "must be at least 1"));
    }
    if scenario.trajectories == 0 {
        return Err(field_err("trajectories", "must be at least 1"));
    }
    let levels = raw.quantiles.clone().unwrap_or_else(|| DEFAULT_LEVELS.to_vec());
    if levels.is_empty() || levels.iter().any(|l| !(*l > 0.0 && *l < 1.0)) {
        return Err(field_err("quantiles", "levels must be a non-empty list inside (0, 1)"));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(field_err("quantiles", "levels must be strictly increasing"));
    }
    let grid = raw.grid.as_ref().map(resolve_grid).transpose()?;
    Ok(ResolvedConfig {
        scenario,
        options: SummaryOptions {
            levels,
            ..SummaryOptions::default()
        },
        grid,
    })
}

fn resolve_quality(q: &QualityConfig) -> std::result::Result<QualityDistribution, FieldError> {
    fn to_err(field: &'static str) -> impl Fn(Error) -> FieldError {
        move |e| field_err(field, e.to_string())
    }
    match (q.alpha, q.beta, q.mean, q.variance, q.point_q) {
        (Some(a), Some(b), None, None, None) => QualityDistribution::beta(a, b).map_err(to_err("alpha")),
        (None, None, Some(m), Some(v), None) => {
            QualityDistribution::from_mean_variance(m, v).map_err(to_err("variance"))
        }
        (None, None, None, None, Some(p)) => QualityDistribution::point(p).map_err(to_err("point_q")),
        _ => Err(field_err(
            "quality",
            "give exactly one of {alpha, beta}, {mean, variance} or {point_q}",
        )),
    }
}

fn resolve_grid(g: &Grid) -> std::result::Result<Vec<GridCell>, FieldError> {
    match (&g.mean_variance, &g.alpha_beta, &g.n_friends) {
        (Some(mv), None, None) => Ok(mv
            .iter()
            .map(|&[mean, variance]| GridCell::MeanVariance { mean, variance })
            .collect()),
        (None, Some(ab), None) => Ok(ab
            .iter()
            .map(|&[alpha, beta]| GridCell::AlphaBeta { alpha, beta })
            .collect()),
        (None, None, Some(nf)) => Ok(nf.iter().map(|&n| GridCell::NFriends(n)).collect()),
        _ => Err(field_err(
            "grid",
            "give exactly one of mean_variance, alpha_beta or n_friends",
        )),
    }
}

/// Serialisable echo of a resolved scenario, written into manifests.
pub fn scenario_to_config(s: &Scenario, options: &SummaryOptions) -> ScenarioConfig {
    let model = match s.model {
        ReviewModel::Cynical => ModelConfig::Cynical,
        ReviewModel::Quality(QualityDistribution::Beta { alpha, beta }) => ModelConfig::Quality(QualityConfig {
            alpha: Some(alpha),
            beta: Some(beta),
            ..QualityConfig::default()
        }),
        ReviewModel::Quality(QualityDistribution::Point(q)) => ModelConfig::Quality(QualityConfig {
            point_q: Some(q),
            ..QualityConfig::default()
        }),
    };
    ScenarioConfig {
        pool_size: Some(s.pool_size),
        suggest_size: Some(s.suggest_size),
        n_friends: Some(s.n_friends),
        model: Some(model),
        strategy: Some(s.strategy),
        submissions: Some(s.submissions),
        trajectories: Some(s.trajectories),
        seed: Some(s.base_seed),
        quantiles: Some(options.levels.clone()),
        grid: None,
    }
}
