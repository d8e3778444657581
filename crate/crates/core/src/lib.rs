//! Simulation of single-blind peer review with author-suggested reviewers,
//! and exact Bayesian classification of those reviewers as friends or rivals.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: configurations, suggested sets and the report-count laws of
//!   the cynical and quality reviewer models;
//! * [`simulator`]: seeded generation of submission histories;
//! * [`inference`]: the dense log-posterior over all `2^|R|` configurations
//!   and its metrics;
//! * [`ensemble`]: many trajectories, quantile bands and stopping times;
//! * [`config`], [`output`], [`presets`] and [`cli`]: JSON scenarios, CSV
//!   output, per-figure presets and the `revclass` command line.

pub mod cli;
pub mod config;
pub mod ensemble;
pub mod error;
pub mod inference;
pub mod model;
pub mod output;
pub mod presets;
pub mod simulator;

pub use error::{Error, Result};
