use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chaotic_imaging::correlation::covariance_identity_check;
use chaotic_imaging::downconversion::IntensityMode;
use chaotic_imaging::runner::{
    configure_workers, make_three_hole_mask, run_experiment, sweep, thermal_reports, write_mask, AtStage, Experiment,
    ExperimentConfig, RunnerError, Stage,
};

#[derive(Parser)]
#[command(version, about = "Image recovery by intensity correlations in chaotically seeded downconversion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full experiment: maps, reports and a manifest in the output directory.
    Run(Common),
    /// One metrics row per parameter value.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// shots, N, g_eff_L or max_angle.
        #[arg(long)]
        parameter: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Vec<f64>,
    },
    /// Write the configured three-hole object as a PGM.
    Mask(Common),
    /// Thermal statistics and the covariance identity of the seed alone.
    Stats(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Coherent,
    Incoherent,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (run, stats), CSV file (sweep) or PGM file (mask).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Also produce the single-plane-wave reference image.
    #[arg(long)]
    plane_wave_reference: bool,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig, RunnerError> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.source.rng_seed = s;
        }
        if let Some(m) = self.shots {
            cfg.shots = m;
        }
        if let Some(mode) = self.mode {
            cfg.mode = match mode {
                Mode::Coherent => IntensityMode::Coherent,
                Mode::Incoherent => IntensityMode::Incoherent,
            };
        }
        if self.plane_wave_reference {
            cfg.plane_wave_reference = true;
        }
        if let Some(o) = &self.out {
            cfg.output_dir = Some(o.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write_or_print(out: Option<&PathBuf>, text: &str) -> Result<(), RunnerError> {
    match out {
        Some(p) => std::fs::write(p, text).at(Stage::Output),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn stats(cfg: &ExperimentConfig) -> Result<String, RunnerError> {
    let exp = Experiment::prepare(cfg)?;
    let t = thermal_reports(&exp)?;
    let refs: Vec<Vec<f64>> =
        (0..cfg.shots.max(2)).map(|s| exp.shot_amplitudes(s).iter().map(|a| a.norm_sqr()).collect()).collect();
    let j = cfg.reference_component;
    let mut text = t.spatial.key_values("spatial") + &t.temporal.key_values("temporal");
    let same = covariance_identity_check(&refs, j, j).at(Stage::Statistics)?;
    text += &format!("covariance.shots={}\ncovariance.same.ratio={}\n", same.shots, same.ratio.unwrap_or(f64::NAN));
    if cfg.source.n_components > 1 {
        let n = (j + 1) % cfg.source.n_components;
        let other = covariance_identity_check(&refs, j, n).at(Stage::Statistics)?;
        text +=
            &format!("covariance.other.component={n}\ncovariance.other.ratio={}\n", other.ratio.unwrap_or(f64::NAN));
    }
    Ok(text)
}

fn execute(cli: Cli) -> Result<(), RunnerError> {
    configure_workers()?;
    match cli.command {
        Command::Run(common) => {
            let mut cfg = common.resolve()?;
            cfg.output_dir.get_or_insert_with(|| PathBuf::from("out"));
            let manifest = run_experiment(&cfg)?;
            eprintln!("wrote {} artifacts to {}", manifest.artifacts.len(), manifest.dir.display());
            print!("{}", std::fs::read_to_string(manifest.dir.join("metrics.csv")).at(Stage::Output)?);
        }
        Command::Sweep { common, parameter, values } => {
            let cfg = common.resolve()?;
            write_or_print(common.out.as_ref(), &sweep(&cfg, &parameter, &values)?)?;
        }
        Command::Mask(common) => {
            let cfg = common.resolve()?;
            let mask = make_three_hole_mask(&cfg.grid()?, cfg.hole_diameter, &cfg.hole_centers)?;
            let out = common.out.unwrap_or_else(|| PathBuf::from("mask.pgm"));
            write_mask(&out, &mask)?;
            eprintln!("wrote {} ({} open pixels)", out.display(), mask.sum());
        }
        Command::Stats(common) => {
            let cfg = common.resolve()?;
            let text = stats(&cfg)?;
            match &common.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir).at(Stage::Output)?;
                    std::fs::write(dir.join("stats.txt"), text).at(Stage::Output)?;
                }
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
