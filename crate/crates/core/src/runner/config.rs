use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::downconversion::{CrystalConfig, IntensityMode, PhaseMatchWeight};
use crate::optics::{GridSpec, ImagingGeometry};
use crate::source::SourceConfig;

use super::{AtStage, RunnerError, Stage, StageError};

/// Which seed intensity is correlated with the generated map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReferenceKind {
    /// `|a₁,j|²` of component `j`.
    #[default]
    Component,
    /// The Fourier-plane pixel that component `j` lands on.
    Pixel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub nx: usize,
    pub ny: usize,
    pub pitch: f64,
    /// `[λ₁, λ₂, λ₃]`, meters.
    pub wavelengths: [f64; 3],
    pub focal_f: f64,
    pub d_f: f64,
    pub crystal: CrystalConfig,
    pub source: SourceConfig,
    pub shots: u64,
    /// Shots used for the single-pixel temporal histogram.
    pub thermal_shots: u64,
    /// PGM amplitude mask; `None` draws the built-in three-hole mask.
    pub mask_path: Option<PathBuf>,
    pub hole_diameter: f64,
    /// Hole centers `(x, y)`, meters from the optical axis.
    pub hole_centers: [(f64, f64); 3],
    pub output_dir: Option<PathBuf>,
    pub mode: IntensityMode,
    pub plane_wave_reference: bool,
    pub reference: ReferenceKind,
    pub reference_component: usize,
}

/// Hole layout of the built-in mask, meters. Centers sit on pixel corners of
/// the default 16 µm grid so each disc is symmetric in pixels.
const DEFAULT_HOLES: [(f64, f64); 3] = [(-168e-6, -120e-6), (152e-6, -120e-6), (-8e-6, 168e-6)];

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            nx: 64,
            ny: 64,
            pitch: 16e-6,
            wavelengths: [1064e-9, 1064e-9, 532e-9],
            focal_f: 0.20,
            d_f: 0.15,
            crystal: CrystalConfig {
                length: 4e-3,
                g_eff: 25.0,
                pm_weight: PhaseMatchWeight::Uniform,
                exact_gain: false,
            },
            source: SourceConfig { n_components: 32, max_angle: 4e-3, amplitude_scale: 1.0, rng_seed: 1 },
            shots: 2000,
            thermal_shots: 4096,
            mask_path: None,
            hole_diameter: 256e-6,
            hole_centers: DEFAULT_HOLES,
            output_dir: None,
            mode: IntensityMode::Coherent,
            plane_wave_reference: true,
            reference: ReferenceKind::Component,
            reference_component: 0,
        }
    }
}

fn config_err(msg: impl Into<String>) -> RunnerError {
    RunnerError::new(Stage::Config, StageError::Config(msg.into()))
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, RunnerError> {
    value.parse().map_err(|_| config_err(format!("{key}: cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, RunnerError> {
    match value {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(config_err(format!("{key}: expected a boolean, got {value:?}"))),
    }
}

pub fn parse_mode(value: &str) -> Result<IntensityMode, RunnerError> {
    match value {
        "coherent" => Ok(IntensityMode::Coherent),
        "incoherent" => Ok(IntensityMode::Incoherent),
        _ => Err(config_err(format!("mode: expected coherent|incoherent, got {value:?}"))),
    }
}

fn mode_name(mode: IntensityMode) -> &'static str {
    match mode {
        IntensityMode::Coherent => "coherent",
        IntensityMode::Incoherent => "incoherent",
    }
}

fn parse_centers(value: &str) -> Result<[(f64, f64); 3], RunnerError> {
    let points: Vec<(f64, f64)> = value
        .split(';')
        .map(|p| {
            let (x, y) =
                p.split_once(',').ok_or_else(|| config_err(format!("object.hole_centers: bad point {p:?}")))?;
            Ok((parse_value("object.hole_centers", x.trim())?, parse_value("object.hole_centers", y.trim())?))
        })
        .collect::<Result<_, RunnerError>>()?;
    points.try_into().map_err(|_| config_err("object.hole_centers: expected exactly three x,y points separated by ';'"))
}

impl ExperimentConfig {
    /// Applies `key=value` lines on top of `self`. `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), RunnerError> {
        let mut seen = BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| config_err(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(config_err(format!("line {}: duplicate key {key}", lineno + 1)));
            }
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, RunnerError> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, RunnerError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    /// Sets one dotted key.
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), RunnerError> {
        match key {
            "grid.nx" => self.nx = parse_value(key, v)?,
            "grid.ny" => self.ny = parse_value(key, v)?,
            "grid.pitch" => self.pitch = parse_value(key, v)?,
            "wavelength.lambda1" => self.wavelengths[0] = parse_value(key, v)?,
            "wavelength.lambda2" => self.wavelengths[1] = parse_value(key, v)?,
            "wavelength.lambda3" => self.wavelengths[2] = parse_value(key, v)?,
            "geometry.f" => self.focal_f = parse_value(key, v)?,
            "geometry.d_F" => self.d_f = parse_value(key, v)?,
            "crystal.L" => self.crystal.length = parse_value(key, v)?,
            "crystal.g_eff" => self.crystal.g_eff = parse_value(key, v)?,
            "crystal.pm" => {
                self.crystal.pm_weight = match v {
                    "uniform" => PhaseMatchWeight::Uniform,
                    "sinc" => PhaseMatchWeight::Sinc,
                    _ => return Err(config_err(format!("{key}: expected uniform|sinc, got {v:?}"))),
                }
            }
            "crystal.exact_gain" => self.crystal.exact_gain = parse_bool(key, v)?,
            "source.N" => self.source.n_components = parse_value(key, v)?,
            "source.max_angle" => self.source.max_angle = parse_value(key, v)?,
            "source.sigma_a" => self.source.amplitude_scale = parse_value(key, v)?,
            "source.rng_seed" => self.source.rng_seed = parse_value(key, v)?,
            "run.shots" => self.shots = parse_value(key, v)?,
            "run.thermal_shots" => self.thermal_shots = parse_value(key, v)?,
            "run.mode" => self.mode = parse_mode(v)?,
            "run.plane_wave_reference" => self.plane_wave_reference = parse_bool(key, v)?,
            "correlation.reference" => {
                self.reference = match v {
                    "component" => ReferenceKind::Component,
                    "pixel" => ReferenceKind::Pixel,
                    _ => return Err(config_err(format!("{key}: expected component|pixel, got {v:?}"))),
                }
            }
            "correlation.component" => self.reference_component = parse_value(key, v)?,
            "object.mask" => self.mask_path = (!v.is_empty()).then(|| PathBuf::from(v)),
            "object.hole_diameter" => self.hole_diameter = parse_value(key, v)?,
            "object.hole_centers" => self.hole_centers = parse_centers(v)?,
            "output.dir" => self.output_dir = (!v.is_empty()).then(|| PathBuf::from(v)),
            _ => return Err(config_err(format!("unknown key {key}"))),
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<GridSpec, RunnerError> {
        GridSpec::new(self.nx, self.ny, self.pitch).at(Stage::Config)
    }

    pub fn geometry(&self) -> Result<ImagingGeometry, RunnerError> {
        ImagingGeometry::new(self.focal_f, self.d_f, self.wavelengths).at(Stage::Config)
    }

    pub fn validate(&self) -> Result<(), RunnerError> {
        let [l1, l2, l3] = self.wavelengths;
        if !self.wavelengths.iter().all(|l| l.is_finite() && *l > 0.0) {
            return Err(config_err("wavelengths must be positive"));
        }
        let mismatch = (1.0 / l3 - (1.0 / l1 + 1.0 / l2)) * l3;
        if mismatch.abs() > 1e-9 {
            return Err(config_err(format!(
                "frequency conservation violated: 1/λ3 − 1/λ1 − 1/λ2 is {mismatch:e} relative to 1/λ3"
            )));
        }
        self.grid()?;
        self.geometry()?;
        self.crystal.validate().at(Stage::Config)?;
        self.source.validate().at(Stage::Config)?;
        if self.shots == 0 {
            return Err(config_err("run.shots must be at least 1"));
        }
        if self.thermal_shots == 0 {
            return Err(config_err("run.thermal_shots must be at least 1"));
        }
        if self.reference_component >= self.source.n_components {
            return Err(config_err(format!(
                "correlation.component {} out of range for N = {}",
                self.reference_component, self.source.n_components
            )));
        }
        if !(self.hole_diameter.is_finite() && self.hole_diameter >= 0.0) {
            return Err(config_err("object.hole_diameter must be nonnegative"));
        }
        Ok(())
    }

    /// Every key with its resolved value; parsing it back reproduces `self`.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k}={v}");
        };
        kv("grid.nx", self.nx.to_string());
        kv("grid.ny", self.ny.to_string());
        kv("grid.pitch", self.pitch.to_string());
        kv("wavelength.lambda1", self.wavelengths[0].to_string());
        kv("wavelength.lambda2", self.wavelengths[1].to_string());
        kv("wavelength.lambda3", self.wavelengths[2].to_string());
        kv("geometry.f", self.focal_f.to_string());
        kv("geometry.d_F", self.d_f.to_string());
        kv("crystal.L", self.crystal.length.to_string());
        kv("crystal.g_eff", self.crystal.g_eff.to_string());
        kv(
            "crystal.pm",
            match self.crystal.pm_weight {
                PhaseMatchWeight::Uniform => "uniform",
                PhaseMatchWeight::Sinc => "sinc",
            }
            .into(),
        );
        kv("crystal.exact_gain", self.crystal.exact_gain.to_string());
        kv("source.N", self.source.n_components.to_string());
        kv("source.max_angle", self.source.max_angle.to_string());
        kv("source.sigma_a", self.source.amplitude_scale.to_string());
        kv("source.rng_seed", self.source.rng_seed.to_string());
        kv("run.shots", self.shots.to_string());
        kv("run.thermal_shots", self.thermal_shots.to_string());
        kv("run.mode", mode_name(self.mode).into());
        kv("run.plane_wave_reference", self.plane_wave_reference.to_string());
        kv(
            "correlation.reference",
            match self.reference {
                ReferenceKind::Component => "component",
                ReferenceKind::Pixel => "pixel",
            }
            .into(),
        );
        kv("correlation.component", self.reference_component.to_string());
        kv("object.mask", self.mask_path.as_ref().map(|p| p.display().to_string()).unwrap_or_default());
        kv("object.hole_diameter", self.hole_diameter.to_string());
        kv(
            "object.hole_centers",
            self.hole_centers.iter().map(|(x, y)| format!("{x},{y}")).collect::<Vec<_>>().join(";"),
        );
        kv("output.dir", self.output_dir.as_ref().map(|p| p.display().to_string()).unwrap_or_default());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn echo_roundtrips() {
        let mut cfg = ExperimentConfig::default();
        cfg.source.rng_seed = u64::MAX;
        cfg.pitch = 0.1 + 0.2;
        cfg.mask_path = Some("masks/a b.pgm".into());
        cfg.mode = IntensityMode::Incoherent;
        cfg.reference = ReferenceKind::Pixel;
        assert_eq!(ExperimentConfig::from_text(&cfg.echo()).unwrap(), cfg);
    }

    #[test]
    fn comments_and_blank_lines() {
        let cfg = ExperimentConfig::from_text("# header\n\nsource.N = 8   # fewer modes\nrun.shots=10\n").unwrap();
        assert_eq!(cfg.source.n_components, 8);
        assert_eq!(cfg.shots, 10);
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "source.N",
            "bogus.key=1",
            "run.shots=1\nrun.shots=2",
            "run.mode=partial",
            "source.N=0",
            "wavelength.lambda3=530e-9",
            "object.hole_centers=0,0;1,1",
            "correlation.component=32",
        ] {
            let err = ExperimentConfig::from_text(text).unwrap_err();
            assert_eq!(err.stage, Stage::Config, "{text}");
        }
    }

    #[test]
    fn frequency_conservation_tolerance() {
        let mut cfg = ExperimentConfig { wavelengths: [800e-9, 1600e-9, 1600e-9 / 3.0], ..Default::default() };
        cfg.validate().unwrap();
        cfg.wavelengths[2] *= 1.0 + 1e-8;
        assert!(cfg.validate().is_err());
    }
}
