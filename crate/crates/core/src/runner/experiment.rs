use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::correlation::{
    image_metrics, locate_image, CorrelationAccumulator, CorrelationError, CorrelationResult, ImageMetrics,
    ReferenceSelection, ShotRecord,
};
use crate::downconversion::{generate_shot_field, image_plane_intensity, IntensityMode, ShotSynthesizer};
use crate::io::{pgm, raw};
use crate::optics::{image_pump_2f2f, intensity, roll, ComplexField, ImagingGeometry, IntensityMap};
use crate::source::{
    component_amplitude, draw_shot_amplitudes, fix_component_directions, fourier_pixel, fourier_plane_intensity,
    seed_field_on_grid, ChaoticSeed, Direction,
};
use crate::stats::{thermal_statistics_report, ThermalReport};

use super::manifest::{ArtifactWriter, RunManifest};
use super::mask::{inverted, object_mask};
use super::{AtStage, ExperimentConfig, ReferenceKind, RunnerError, Stage};

/// Shots per work unit. Partial sums are formed per chunk and merged in chunk
/// order, so results do not depend on how chunks are scheduled.
pub const SHOT_CHUNK: u64 = 64;

/// Everything that stays fixed across shots.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub geometry: ImagingGeometry,
    /// Amplitude transmission `U_O` of the object.
    pub mask: IntensityMap,
    pub pump: ComplexField,
    pub directions: Vec<Direction>,
    pub synthesizer: ShotSynthesizer,
    /// `|U_O(−x, −y)|²` on the image grid: the unshifted image.
    pub ground_truth: IntensityMap,
}

impl Experiment {
    pub fn prepare(cfg: &ExperimentConfig) -> Result<Self, RunnerError> {
        cfg.validate()?;
        let geometry = cfg.geometry()?;
        let mask = object_mask(cfg)?;
        let object = ComplexField::new(
            *mask.grid(),
            cfg.wavelengths[2],
            mask.values().iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
        .at(Stage::Pump)?;
        let pump = image_pump_2f2f(&object, &geometry).at(Stage::Pump)?;
        let directions = fix_component_directions(&cfg.source, pump.grid(), cfg.wavelengths[0]).at(Stage::Source)?;
        let synthesizer =
            ShotSynthesizer::new(&directions, &pump, &cfg.crystal, &geometry).at(Stage::Downconversion)?;
        let truth: Vec<f64> = inverted(&mask).values().iter().map(|v| v * v).collect();
        let ground_truth = IntensityMap::new(*synthesizer.image_grid(), truth).at(Stage::Metrics)?;
        Ok(Self { config: cfg.clone(), geometry, mask, pump, directions, synthesizer, ground_truth })
    }

    /// Image-plane translation `(x₂,j, y₂,j)` of the reference component.
    pub fn reference_shift(&self) -> (f64, f64) {
        self.synthesizer.components()[self.config.reference_component].shift
    }

    /// Ground truth translated to the reference component's image position.
    pub fn shifted_ground_truth(&self) -> IntensityMap {
        let g = *self.ground_truth.grid();
        let (sx, sy) = self.reference_shift();
        let v = roll(
            self.ground_truth.values(),
            g.nx(),
            g.ny(),
            (sx / g.pitch()).round() as isize,
            (sy / g.pitch()).round() as isize,
        );
        IntensityMap::new(g, v).expect("same grid")
    }

    /// Generated intensity for a single unit plane wave along the reference
    /// component's direction (diffuser removed).
    pub fn plane_wave_reference(&self) -> Result<IntensityMap, RunnerError> {
        let dir = self.directions[self.config.reference_component];
        let seed = ChaoticSeed::plane_wave(dir, Complex64::new(1.0, 0.0), self.config.wavelengths[0]);
        let generated =
            generate_shot_field(&seed, &self.pump, &self.config.crystal, &self.geometry).at(Stage::Downconversion)?;
        image_plane_intensity(&generated, &self.geometry, IntensityMode::Coherent).at(Stage::Downconversion)
    }

    pub fn shot_amplitudes(&self, shot: u64) -> Vec<Complex64> {
        (0..self.directions.len()).map(|n| component_amplitude(&self.config.source, shot, n)).collect()
    }

    pub fn shot_intensity(&self, shot: u64) -> Result<IntensityMap, RunnerError> {
        self.synthesizer.intensity(&self.shot_amplitudes(shot), self.config.mode).at(Stage::Downconversion)
    }

    pub fn shot_record(&self, shot: u64) -> Result<ShotRecord, RunnerError> {
        let amps = self.shot_amplitudes(shot);
        let map = self.synthesizer.intensity(&amps, self.config.mode).at(Stage::Downconversion)?;
        let record = ShotRecord::new(shot, amps.iter().map(|a| a.norm_sqr()).collect(), map).at(Stage::Correlation)?;
        Ok(match self.config.reference {
            ReferenceKind::Component => record,
            ReferenceKind::Pixel => {
                let seed =
                    draw_shot_amplitudes(&self.directions, &self.config.source, shot, self.config.wavelengths[0]);
                record.with_fourier_plane(fourier_plane_intensity(&seed, self.pump.grid()).at(Stage::Source)?)
            }
        })
    }

    pub fn selection(&self) -> ReferenceSelection {
        let j = self.config.reference_component;
        match self.config.reference {
            ReferenceKind::Component => ReferenceSelection::Component(j),
            ReferenceKind::Pixel => {
                let seed =
                    ChaoticSeed::plane_wave(self.directions[j], Complex64::new(1.0, 0.0), self.config.wavelengths[0]);
                let (ix, iy) = fourier_pixel(&seed.components[0], self.pump.grid());
                ReferenceSelection::FourierPixel { ix, iy }
            }
        }
    }

    /// Accumulates shots `range` into one accumulator.
    pub fn accumulate(&self, range: std::ops::Range<u64>) -> Result<CorrelationAccumulator, RunnerError> {
        let mut acc = CorrelationAccumulator::new(*self.synthesizer.image_grid(), self.selection());
        for shot in range {
            acc.accumulate(&self.shot_record(shot)?).at(Stage::Correlation)?;
        }
        Ok(acc)
    }

    /// `G` over shots `0..shots`, computed in parallel chunks.
    pub fn correlate(&self, shots: u64) -> Result<CorrelationResult, RunnerError> {
        if shots < 2 {
            return Err(CorrelationError::InsufficientShots { found: shots, needed: 2 }).at(Stage::Correlation);
        }
        let chunks = shots.div_ceil(SHOT_CHUNK);
        let partials: Vec<CorrelationAccumulator> = (0..chunks)
            .into_par_iter()
            .map(|c| self.accumulate(c * SHOT_CHUNK..((c + 1) * SHOT_CHUNK).min(shots)))
            .collect::<Result<_, _>>()?;
        let mut total = CorrelationAccumulator::new(*self.synthesizer.image_grid(), self.selection());
        for p in &partials {
            total.merge(p).at(Stage::Correlation)?;
        }
        total.finalize().at(Stage::Correlation)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermalReports {
    /// `P_r`: all pixels of one shot's seed intensity on the crystal grid.
    pub spatial: ThermalReport,
    /// `P_t`: one pixel (on axis) over many shots.
    pub temporal: ThermalReport,
}

pub fn thermal_reports(exp: &Experiment) -> Result<ThermalReports, RunnerError> {
    let cfg = &exp.config;
    let seed = draw_shot_amplitudes(&exp.directions, &cfg.source, 0, cfg.wavelengths[0]);
    let field = seed_field_on_grid(&seed, exp.pump.grid()).at(Stage::Statistics)?;
    let spatial = thermal_statistics_report(intensity(&field).values()).at(Stage::Statistics)?;
    // On axis every plane wave has unit phase, so E₁ = Σₙ aₙ.
    let samples: Vec<f64> = (0..cfg.thermal_shots)
        .into_par_iter()
        .map(|s| exp.shot_amplitudes(s).iter().sum::<Complex64>().norm_sqr())
        .collect();
    let temporal = thermal_statistics_report(&samples).at(Stage::Statistics)?;
    Ok(ThermalReports { spatial, temporal })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunMetrics {
    /// Normalized `G` against the translated ground truth.
    pub g: ImageMetrics,
    pub mean: ImageMetrics,
    pub single_shot: ImageMetrics,
    pub plane_wave: Option<ImageMetrics>,
    /// Cross-correlation peak of `G` minus the predicted translation, pixels.
    pub peak_offset_px: (f64, f64),
    /// `σ²(I₁,j) / ⟨I₁,j⟩²`; 1 for thermal light.
    pub reference_variance_ratio: f64,
}

pub const METRICS_HEADER: &str = "shots,N,g_eff_L,max_angle,mode,ncc,g_contrast,mean_contrast,single_shot_contrast,\
single_shot_ncc,plane_wave_ncc,peak_offset_x_px,peak_offset_y_px,reference_variance_ratio,ks_spatial,ks_temporal";

#[derive(Debug, Clone)]
pub struct Simulation {
    pub experiment: Experiment,
    pub plane_wave_reference: Option<IntensityMap>,
    pub single_shot: IntensityMap,
    pub correlation: CorrelationResult,
    pub normalized_g: IntensityMap,
    pub thermal: ThermalReports,
    pub metrics: RunMetrics,
    pub shots_seconds: f64,
}

impl Simulation {
    pub fn metrics_row(&self) -> String {
        let cfg = &self.experiment.config;
        let m = &self.metrics;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.correlation.shots,
            cfg.source.n_components,
            cfg.crystal.coupling(),
            cfg.source.max_angle,
            match cfg.mode {
                IntensityMode::Coherent => "coherent",
                IntensityMode::Incoherent => "incoherent",
            },
            m.g.ncc,
            m.g.contrast,
            m.mean.contrast,
            m.single_shot.contrast,
            m.single_shot.ncc,
            opt(m.plane_wave.map(|p| p.ncc)),
            m.peak_offset_px.0,
            m.peak_offset_px.1,
            m.reference_variance_ratio,
            self.thermal.spatial.ks_distance,
            self.thermal.temporal.ks_distance,
        )
    }

    pub fn metrics_csv(&self) -> String {
        format!("{METRICS_HEADER}\n{}\n", self.metrics_row())
    }
}

fn finish(
    experiment: Experiment,
    plane_wave_reference: Option<IntensityMap>,
    correlation: CorrelationResult,
    shots_seconds: f64,
) -> Result<Simulation, RunnerError> {
    let normalized_g = correlation.normalized.clone().ok_or_else(|| {
        RunnerError::sanity(Stage::Correlation, "reference intensity does not fluctuate; G cannot be normalized")
    })?;
    for (name, map) in [("G", &correlation.g), ("mean I2", &correlation.mean_i2)] {
        if !map.is_finite() {
            return Err(RunnerError::sanity(Stage::Correlation, format!("{name} map has non-finite values")));
        }
    }
    let single_shot = experiment.shot_intensity(0)?;
    let truth = &experiment.ground_truth;
    let shift = experiment.reference_shift();
    let metric = |m: &IntensityMap| image_metrics(m, truth, shift).at(Stage::Metrics);
    let located = locate_image(&normalized_g, truth).at(Stage::Metrics)?;
    let pitch = truth.grid().pitch();
    let plane_wave = plane_wave_reference.as_ref().map(metric).transpose()?;
    let metrics = RunMetrics {
        g: metric(&normalized_g)?,
        mean: metric(&correlation.mean_i2)?,
        single_shot: metric(&single_shot)?,
        plane_wave,
        peak_offset_px: ((located.0 - shift.0) / pitch, (located.1 - shift.1) / pitch),
        reference_variance_ratio: correlation.sigma2_i1j / (correlation.mean_i1j * correlation.mean_i1j),
    };
    let thermal = thermal_reports(&experiment)?;
    Ok(Simulation {
        experiment,
        plane_wave_reference,
        single_shot,
        correlation,
        normalized_g,
        thermal,
        metrics,
        shots_seconds,
    })
}

/// Runs the whole pipeline in memory.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Simulation, RunnerError> {
    let exp = Experiment::prepare(cfg)?;
    let pw = cfg.plane_wave_reference.then(|| exp.plane_wave_reference()).transpose()?;
    let t = Instant::now();
    let corr = exp.correlate(cfg.shots)?;
    finish(exp, pw, corr, t.elapsed().as_secs_f64())
}

fn write_map(
    w: &mut ArtifactWriter,
    stem: &str,
    map: &IntensityMap,
    wavelength: Option<f64>,
) -> Result<(), RunnerError> {
    if !map.is_finite() {
        return Err(RunnerError::sanity(Stage::Output, format!("{stem} has non-finite values")));
    }
    let g = map.grid();
    let raw_path = w.path(&format!("{stem}.f64"));
    raw::write_real_map(&raw_path, map, wavelength).at(Stage::Output)?;
    w.record(&format!("{stem}.f64"))?;
    w.record(&format!("{stem}.hdr"))?;
    let preview = w.path(&format!("{stem}.pgm"));
    pgm::write_preview(&preview, map.values(), g.nx(), g.ny()).at(Stage::Output)?;
    w.record(&format!("{stem}.pgm"))?;
    w.record(&format!("{stem}.pgm.txt"))
}

/// Runs the pipeline and writes every artifact into `cfg.output_dir`.
///
/// The plane-wave reference is written before the correlation stage runs, so
/// it survives a correlation failure. A manifest is written in both cases.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunManifest, RunnerError> {
    let start = Instant::now();
    cfg.validate()?;
    let dir = cfg.output_dir.clone().ok_or_else(|| RunnerError::sanity(Stage::Config, "no output directory"))?;
    let mut w = ArtifactWriter::create(&dir, cfg)?;
    w.write_text("config.txt", &cfg.echo())?;

    let exp = Experiment::prepare(cfg)?;
    let prepare_seconds = start.elapsed().as_secs_f64();
    w.write_text("components.csv", &exp.synthesizer.component_table_csv())?;
    super::mask::write_mask(&w.path("object_mask.pgm"), &exp.mask)?;
    w.record("object_mask.pgm")?;
    write_map(&mut w, "ground_truth", &exp.shifted_ground_truth(), None)?;

    let pw = cfg.plane_wave_reference.then(|| exp.plane_wave_reference()).transpose()?;
    if let Some(map) = &pw {
        write_map(&mut w, "plane_wave_reference", map, Some(cfg.wavelengths[1]))?;
    }
    w.timing("prepare_seconds", prepare_seconds);

    let t = Instant::now();
    let corr = match exp.correlate(cfg.shots) {
        Ok(c) => c,
        Err(e) => return Err(w.fail(e)),
    };
    let sim = match finish(exp, pw, corr, t.elapsed().as_secs_f64()) {
        Ok(s) => s,
        Err(e) => return Err(w.fail(e)),
    };
    if let Err(e) = write_simulation(&mut w, &sim) {
        return Err(w.fail(e));
    }
    w.timing("shots_seconds", sim.shots_seconds);
    w.timing("shots_per_second", cfg.shots as f64 / sim.shots_seconds.max(1e-12));
    w.timing("total_seconds", start.elapsed().as_secs_f64());
    w.finish()
}

fn write_simulation(w: &mut ArtifactWriter, sim: &Simulation) -> Result<(), RunnerError> {
    let l2 = Some(sim.experiment.config.wavelengths[1]);
    write_map(w, "g_normalized", &sim.normalized_g, l2)?;
    write_map(w, "g_raw", &sim.correlation.g, l2)?;
    write_map(w, "single_shot_i2", &sim.single_shot, l2)?;
    write_map(w, "mean_i2", &sim.correlation.mean_i2, l2)?;
    w.write_text("metrics.csv", &sim.metrics_csv())?;
    let t = &sim.thermal;
    w.write_text("thermal_spatial_histogram.csv", &t.spatial.histogram_csv())?;
    w.write_text("thermal_temporal_histogram.csv", &t.temporal.histogram_csv())?;
    let c = &sim.correlation;
    w.write_text(
        "thermal_report.txt",
        &format!(
            "{}{}reference.mean={}\nreference.variance={}\n",
            t.spatial.key_values("spatial"),
            t.temporal.key_values("temporal"),
            c.mean_i1j,
            c.sigma2_i1j
        ),
    )
}

pub(super) fn ensure_dir(dir: &Path) -> Result<(), RunnerError> {
    std::fs::create_dir_all(dir).at(Stage::Output)
}
