//! Chaotic seed: a frozen set of plane-wave directions with circular-Gaussian
//! amplitudes redrawn every shot.
//!
//! Amplitudes come from counter-based ChaCha substreams: shot `s` uses stream
//! `s` and component `n` starts at word `n << 32`, so any `(shot, component)`
//! pair can be generated independently of all others, in any order, on any
//! worker.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::optics::{centered_dft2, ComplexField, FftDirection, GridSpec, IntensityMap, OpticsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SourceError {
    #[error("invalid source config: {0}")]
    InvalidConfig(String),
    #[error("mode oversampling: {requested} components requested but only {available} distinguishable grid modes fit in the cone")]
    ModeOversampling { requested: usize, available: usize },
    #[error(transparent)]
    Optics(#[from] OpticsError),
}

/// Stream reserved for the one-off direction draw.
const DIRECTION_STREAM: u64 = u64::MAX;
/// Words reserved per component inside a shot's stream.
const COMPONENT_WORD_SHIFT: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceConfig {
    /// Number of plane-wave components `N`.
    pub n_components: usize,
    /// Half-angle of the seed cone, radians.
    pub max_angle: f64,
    /// `σ_a`; `⟨|a|²⟩ = σ_a²`.
    pub amplitude_scale: f64,
    pub rng_seed: u64,
}

impl SourceConfig {
    pub fn validate(&self) -> Result<(), SourceError> {
        if self.n_components == 0 {
            return Err(SourceError::InvalidConfig("N must be at least 1".into()));
        }
        if !(self.max_angle > 0.0 && self.max_angle <= 0.1) {
            return Err(SourceError::InvalidConfig(format!(
                "max_angle must lie in (0, 0.1] rad, got {}",
                self.max_angle
            )));
        }
        if !(self.amplitude_scale.is_finite() && self.amplitude_scale > 0.0) {
            return Err(SourceError::InvalidConfig(format!(
                "amplitude scale must be positive, got {}",
                self.amplitude_scale
            )));
        }
        Ok(())
    }
}

/// Propagation angles of a plane wave: the unit wavevector is
/// `(sin β, cos β sin ϑ, cos β cos ϑ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub theta: f64,
    pub beta: f64,
}

impl Direction {
    pub const AXIAL: Direction = Direction { theta: 0.0, beta: 0.0 };

    /// Direction whose wavevector of magnitude `k` has transverse part `(kx, ky)`.
    pub fn from_transverse(kx: f64, ky: f64, k: f64) -> Self {
        let beta = (kx / k).asin();
        let theta = (ky / (k * beta.cos())).asin();
        Self { theta, beta }
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (sb, cb) = self.beta.sin_cos();
        let (st, ct) = self.theta.sin_cos();
        [sb, cb * st, cb * ct]
    }

    pub fn wavevector(&self, k: f64) -> [f64; 3] {
        self.unit_vector().map(|u| u * k)
    }

    /// Angle between the wavevector and the z axis.
    pub fn polar_angle(&self) -> f64 {
        let [x, y, _] = self.unit_vector();
        x.hypot(y).asin()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveComponent {
    pub amplitude: Complex64,
    pub direction: Direction,
    /// Full wavevector, rad/m.
    pub k: [f64; 3],
}

impl PlaneWaveComponent {
    pub fn new(amplitude: Complex64, direction: Direction, wavelength: f64) -> Self {
        Self { amplitude, direction, k: direction.wavevector(TAU / wavelength) }
    }

    pub fn kx(&self) -> f64 {
        self.k[0]
    }

    pub fn ky(&self) -> f64 {
        self.k[1]
    }

    pub fn wavenumber(&self) -> f64 {
        (self.k[0] * self.k[0] + self.k[1] * self.k[1] + self.k[2] * self.k[2]).sqrt()
    }

    pub fn intensity(&self) -> f64 {
        self.amplitude.norm_sqr()
    }
}

/// One shot of the chaotic seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ChaoticSeed {
    pub components: Vec<PlaneWaveComponent>,
    pub shot_index: u64,
    pub rng_stream_id: u64,
    pub wavelength: f64,
}

impl ChaoticSeed {
    /// Deterministic single plane wave (diffuser removed).
    pub fn plane_wave(direction: Direction, amplitude: Complex64, wavelength: f64) -> Self {
        Self {
            components: vec![PlaneWaveComponent::new(amplitude, direction, wavelength)],
            shot_index: 0,
            rng_stream_id: 0,
            wavelength,
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Draws `N` distinct directions uniformly from the transverse-wavevector
/// lattice of `lattice` (the crystal-face grid) inside the cone of half-angle
/// `max_angle`.
///
/// Each lattice point is one resolvable spatial mode: it is one pixel in the
/// Fourier plane of the seed and translates the generated image by a whole
/// number of image-plane pixels.
pub fn fix_component_directions(
    cfg: &SourceConfig,
    lattice: &GridSpec,
    wavelength: f64,
) -> Result<Vec<Direction>, SourceError> {
    cfg.validate()?;
    let k = TAU / wavelength;
    let modes = cone_modes(cfg.max_angle, lattice, k);
    if cfg.n_components > modes.len() {
        return Err(SourceError::ModeOversampling { requested: cfg.n_components, available: modes.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(DIRECTION_STREAM);
    let picks = rand::seq::index::sample(&mut rng, modes.len(), cfg.n_components);
    Ok(picks
        .into_iter()
        .map(|i| {
            let (qx, qy) = modes[i];
            Direction::from_transverse(qx, qy, k)
        })
        .collect())
}

/// Lattice points strictly inside the grid's Nyquist band and inside the cone.
fn cone_modes(max_angle: f64, lattice: &GridSpec, k: f64) -> Vec<(f64, f64)> {
    let (dqx, dqy) = lattice.frequency_step();
    let q_max = k * max_angle.sin() * (1.0 + 1e-12);
    let hx = (lattice.nx() / 2) as i64 - 1;
    let hy = (lattice.ny() / 2) as i64 - 1;
    let mut modes = Vec::new();
    for my in -hy..=hy {
        for mx in -hx..=hx {
            let (qx, qy) = (mx as f64 * dqx, my as f64 * dqy);
            if qx.hypot(qy) <= q_max {
                modes.push((qx, qy));
            }
        }
    }
    modes
}

/// Number of distinguishable seed modes inside the cone for a given lattice.
pub fn available_modes(max_angle: f64, lattice: &GridSpec, wavelength: f64) -> usize {
    cone_modes(max_angle, lattice, TAU / wavelength).len()
}

/// Circular-Gaussian amplitude of component `n` in shot `shot_index`.
pub fn component_amplitude(cfg: &SourceConfig, shot_index: u64, n: usize) -> Complex64 {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(shot_index);
    rng.set_word_pos((n as u128) << COMPONENT_WORD_SHIFT);
    let re: f64 = StandardNormal.sample(&mut rng);
    let im: f64 = StandardNormal.sample(&mut rng);
    Complex64::new(re, im) * (cfg.amplitude_scale * FRAC_1_SQRT_2)
}

/// Redraws every component amplitude for one shot; directions are kept.
pub fn draw_shot_amplitudes(
    directions: &[Direction],
    cfg: &SourceConfig,
    shot_index: u64,
    wavelength: f64,
) -> ChaoticSeed {
    let components = directions
        .iter()
        .enumerate()
        .map(|(n, &d)| PlaneWaveComponent::new(component_amplitude(cfg, shot_index, n), d, wavelength))
        .collect();
    ChaoticSeed { components, shot_index, rng_stream_id: shot_index, wavelength }
}

/// `E₁(x, y) = Σ a_n exp(−i (k_x,n x + k_y,n y))` at `z = 0`.
pub fn seed_field_on_grid(seed: &ChaoticSeed, grid: &GridSpec) -> Result<ComplexField, SourceError> {
    let nyq = grid.nyquist();
    if seed.components.iter().any(|c| c.kx().abs() > nyq || c.ky().abs() > nyq) {
        return Err(OpticsError::Aliasing.into());
    }
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut data = vec![Complex64::default(); grid.len()];
    let mut row = vec![Complex64::default(); nx];
    for c in &seed.components {
        for (ix, r) in row.iter_mut().enumerate() {
            *r = c.amplitude * Complex64::cis(-c.kx() * grid.x(ix));
        }
        for iy in 0..ny {
            let py = Complex64::cis(-c.ky() * grid.y(iy));
            for (d, r) in data[iy * nx..(iy + 1) * nx].iter_mut().zip(&row) {
                *d += r * py;
            }
        }
    }
    Ok(ComplexField::new(*grid, seed.wavelength, data)?)
}

/// `I₁,n = |a₁,n|²`: the focal-plane spot intensities behind the seed's Fourier lens.
pub fn reference_intensities(seed: &ChaoticSeed) -> Vec<f64> {
    seed.components.iter().map(|c| c.intensity()).collect()
}

/// Fourier-plane intensity of the seed binned on the DFT lattice of `grid`,
/// normalized so a lattice-aligned component of amplitude `a` yields `|a|²`
/// in its pixel.
pub fn fourier_plane_intensity(seed: &ChaoticSeed, grid: &GridSpec) -> Result<IntensityMap, SourceError> {
    let field = seed_field_on_grid(seed, grid)?;
    let (nx, ny) = (grid.nx(), grid.ny());
    let spectrum = centered_dft2(field.data(), nx, ny, FftDirection::Inverse);
    let norm = 1.0 / ((nx * ny) as f64).powi(2);
    let lattice = grid.with_pitch(1.0)?;
    Ok(IntensityMap::new(lattice, spectrum.iter().map(|c| c.norm_sqr() * norm).collect())?)
}

/// Pixel of [`fourier_plane_intensity`] that a component lands on.
pub fn fourier_pixel(component: &PlaneWaveComponent, grid: &GridSpec) -> (usize, usize) {
    let (dqx, dqy) = grid.frequency_step();
    let wrap = |m: f64, n: usize| ((m.round() as i64 + (n / 2) as i64).rem_euclid(n as i64)) as usize;
    (wrap(component.kx() / dqx, grid.nx()), wrap(component.ky() / dqy, grid.ny()))
}
