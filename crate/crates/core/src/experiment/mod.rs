//! Configuration files, named experiments and parameter sweeps.

pub mod config;
pub mod result;
pub mod runs;
pub mod sweep;

pub use config::ExperimentConfig;
pub use result::{Cell, Diagnostics, ExperimentResult, Table};
pub use runs::{check_keys, encoding_run, run_experiment, EncodingRun, RunContext, EXPERIMENTS};
pub use sweep::{run_sweep, sweep_points, SweepResult};

use crate::Result;

/// Parses every value of every sweep point without running anything.
///
/// Returns the number of points checked.
pub fn validate_config(cfg: &ExperimentConfig) -> Result<usize> {
    check_keys(cfg)?;
    let points = sweep::sweep_points(cfg);
    for p in &points {
        runs::dry_run(&cfg.with_overrides(p))?;
    }
    Ok(points.len())
}
