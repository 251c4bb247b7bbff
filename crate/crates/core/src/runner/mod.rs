//! Experiment orchestration: configuration, the shot loop, artifacts, sweeps.
//!
//! Every failure is reported as a [`RunnerError`] carrying the pipeline
//! [`Stage`] where it happened.

mod config;
mod experiment;
mod manifest;
mod mask;
mod sweep;

pub use config::{parse_mode, ExperimentConfig, ReferenceKind};
pub use experiment::{
    run_experiment, simulate, thermal_reports, Experiment, RunMetrics, Simulation, ThermalReports, SHOT_CHUNK,
};
pub use manifest::{ArtifactEntry, RunManifest};
pub use mask::{inverted, load_mask, make_three_hole_mask, object_mask, write_mask};
pub use sweep::{sweep, SweepParameter, SWEEP_HEADER};

use std::fmt;

use thiserror::Error;

use crate::correlation::CorrelationError;
use crate::downconversion::DownconversionError;
use crate::io::IoError;
use crate::optics::OpticsError;
use crate::source::SourceError;
use crate::stats::StatsError;

/// Environment variable holding the worker-thread count.
pub const WORKERS_ENV: &str = "CHAOTIC_IMAGING_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Mask,
    Pump,
    Source,
    Downconversion,
    Correlation,
    Statistics,
    Metrics,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Mask => "mask",
            Stage::Pump => "pump",
            Stage::Source => "source",
            Stage::Downconversion => "downconversion",
            Stage::Correlation => "correlation",
            Stage::Statistics => "statistics",
            Stage::Metrics => "metrics",
            Stage::Output => "output",
        })
    }
}

#[derive(Debug, Error)]
pub enum StageError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Sanity(String),
    #[error(transparent)]
    Optics(#[from] OpticsError),
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error(transparent)]
    Downconversion(#[from] DownconversionError),
    #[error(transparent)]
    Correlation(#[from] CorrelationError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    File(#[from] std::io::Error),
}

#[derive(Debug, Error)]
#[error("{stage} stage failed: {source}")]
pub struct RunnerError {
    pub stage: Stage,
    #[source]
    pub source: StageError,
}

impl RunnerError {
    pub fn new(stage: Stage, source: StageError) -> Self {
        Self { stage, source }
    }

    pub(crate) fn sanity(stage: Stage, msg: impl Into<String>) -> Self {
        Self::new(stage, StageError::Sanity(msg.into()))
    }
}

/// Tags a module error with the stage it came from.
pub trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, RunnerError>;
}

impl<T, E: Into<StageError>> AtStage<T> for Result<T, E> {
    fn at(self, stage: Stage) -> Result<T, RunnerError> {
        self.map_err(|e| RunnerError::new(stage, e.into()))
    }
}

/// Sizes the global worker pool from [`WORKERS_ENV`] when set.
///
/// Numerical outputs do not depend on the worker count.
pub fn configure_workers() -> Result<(), RunnerError> {
    let Ok(value) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = value.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        RunnerError::new(
            Stage::Config,
            StageError::Config(format!("{WORKERS_ENV} must be a positive integer, got {value:?}")),
        )
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| RunnerError::new(Stage::Config, StageError::Config(format!("worker pool: {e}"))))
}
