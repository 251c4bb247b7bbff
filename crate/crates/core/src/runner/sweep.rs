use std::fmt::Write as _;
use std::str::FromStr;

use super::experiment::METRICS_HEADER;
use super::{simulate, ExperimentConfig, RunnerError, Stage, StageError};

pub const SWEEP_HEADER: &str = "parameter,value,";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Shots,
    Components,
    /// `g_eff · L`, varied through `g_eff` at fixed `L`.
    Coupling,
    MaxAngle,
}

impl FromStr for SweepParameter {
    type Err = RunnerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "shots" => Ok(Self::Shots),
            "N" => Ok(Self::Components),
            "g_eff_L" => Ok(Self::Coupling),
            "max_angle" => Ok(Self::MaxAngle),
            _ => Err(RunnerError::new(
                Stage::Config,
                StageError::Config(format!("unknown sweep parameter {s:?}; expected shots, N, g_eff_L or max_angle")),
            )),
        }
    }
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            Self::Shots => "shots",
            Self::Components => "N",
            Self::Coupling => "g_eff_L",
            Self::MaxAngle => "max_angle",
        }
    }

    fn apply(self, cfg: &mut ExperimentConfig, value: f64) -> Result<(), RunnerError> {
        let count = || {
            if value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
                Ok(value as u64)
            } else {
                Err(RunnerError::new(
                    Stage::Config,
                    StageError::Config(format!("{} must be a whole number, got {value}", self.name())),
                ))
            }
        };
        match self {
            Self::Shots => cfg.shots = count()?,
            Self::Components => cfg.source.n_components = count()? as usize,
            Self::Coupling => cfg.crystal.g_eff = value / cfg.crystal.length,
            Self::MaxAngle => cfg.source.max_angle = value,
        }
        cfg.validate()
    }
}

/// One full simulation per value; a CSV row of run metrics per value.
pub fn sweep(cfg: &ExperimentConfig, parameter: &str, values: &[f64]) -> Result<String, RunnerError> {
    let parameter: SweepParameter = parameter.parse()?;
    let mut out = format!("{SWEEP_HEADER}{METRICS_HEADER}\n");
    for &v in values {
        let mut c = cfg.clone();
        parameter.apply(&mut c, v)?;
        let sim = simulate(&c)?;
        let _ = writeln!(out, "{},{},{}", parameter.name(), v, sim.metrics_row());
    }
    Ok(out)
}
