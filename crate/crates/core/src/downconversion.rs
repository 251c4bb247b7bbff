//! Seeded difference-frequency generation in the undepleted-pump regime.
//!
//! Every seed component `a₁,n` that is phase matched with the pump writes a
//! copy of the pump onto the generated field, `a₂ ∝ i g L f a₁,n* a₃`, tilted
//! by the conjugate transverse wavevector. After free propagation to
//! `s₂ = (k₂/k₃) d` each copy forms an image of the object translated by
//! `(x₂,n, y₂,n) = s₂ (sin β₂,n, cos β₂,n sin ϑ₂,n)`.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::optics::{
    fresnel_output_grid, fresnel_transform_shifted, ComplexField, GridSpec, ImagingGeometry, IntensityMap, OpticsError,
};
use crate::source::{ChaoticSeed, Direction, PlaneWaveComponent};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DownconversionError {
    #[error("invalid crystal: {0}")]
    InvalidCrystal(String),
    #[error("evanescent: unmatchable component")]
    Evanescent,
    #[error("image shifted off grid")]
    ImageOffGrid,
    #[error("no generated components")]
    NoComponents,
    #[error("amplitude count {found} does not match component count {expected}")]
    AmplitudeCount { expected: usize, found: usize },
    #[error(transparent)]
    Optics(#[from] OpticsError),
}

/// Angular gain factor standing in for `f(ϑ, β)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseMatchWeight {
    /// `f ≡ 1` over the paraxial cone.
    #[default]
    Uniform,
    /// `f = |sinc(Δk_z L / 2)|`.
    Sinc,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrystalConfig {
    /// Thickness `L`, meters.
    pub length: f64,
    /// Coupling `g_eff`, 1/(m·amplitude).
    pub g_eff: f64,
    pub pm_weight: PhaseMatchWeight,
    /// Use `sinh` gain instead of its linearization.
    pub exact_gain: bool,
}

impl CrystalConfig {
    pub fn validate(&self) -> Result<(), DownconversionError> {
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(DownconversionError::InvalidCrystal(format!("length {}", self.length)));
        }
        if !(self.g_eff.is_finite() && self.g_eff >= 0.0) {
            return Err(DownconversionError::InvalidCrystal(format!("g_eff {}", self.g_eff)));
        }
        Ok(())
    }

    /// `g_eff · L`.
    pub fn coupling(&self) -> f64 {
        self.g_eff * self.length
    }

    pub fn weight(&self, delta_kz: f64) -> f64 {
        match self.pm_weight {
            PhaseMatchWeight::Uniform => 1.0,
            PhaseMatchWeight::Sinc => {
                let x = 0.5 * delta_kz * self.length;
                if x == 0.0 {
                    1.0
                } else {
                    (x.sin() / x).abs()
                }
            }
        }
    }

    /// `f(ϑ, β)` for a seed travelling along `direction`.
    pub fn pm_weight(&self, direction: Direction, geom: &ImagingGeometry) -> Result<f64, DownconversionError> {
        let probe = PlaneWaveComponent::new(Complex64::new(1.0, 0.0), direction, geom.wavelength(1));
        Ok(self.weight(phase_match(&probe, geom)?.delta_kz))
    }
}

/// Generated amplitude at the crystal exit for seed `a1`, pump `a3` and
/// angular weight `weight`.
///
/// Linear mode returns `i g L f a₁* a₃`. Exact mode returns
/// `i a₁* (a₃/|a₃|) sinh(g L f |a₃|)`, which agrees to first order and is 0
/// at `a₃ = 0`.
pub fn mix_low_gain(a1: Complex64, a3: Complex64, crystal: &CrystalConfig, weight: f64) -> Complex64 {
    let gain = crystal.coupling() * weight;
    if crystal.exact_gain {
        let m = a3.norm();
        if m == 0.0 {
            return Complex64::default();
        }
        Complex64::i() * a1.conj() * (a3 / m) * (gain * m).sinh()
    } else {
        Complex64::i() * gain * a1.conj() * a3
    }
}

/// Generated wavevector for one seed component with the pump along `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMatch {
    pub direction: Direction,
    pub k2: [f64; 3],
    /// `k₃ − k₁,z − k₂,z`
    pub delta_kz: f64,
}

/// Transverse momentum is conserved exactly (`k₂,⊥ = −k₁,⊥`) and `|k₂| = k₂`;
/// the residual longitudinal mismatch is reported.
pub fn phase_match(seed: &PlaneWaveComponent, geom: &ImagingGeometry) -> Result<PhaseMatch, DownconversionError> {
    let (k1x, k1y, k1z) = (seed.k[0], seed.k[1], seed.k[2]);
    let k_perp = k1x.hypot(k1y);
    let k2 = geom.k2();
    if k_perp > geom.k1().min(k2) {
        return Err(DownconversionError::Evanescent);
    }
    let (k2x, k2y) = (-k1x, -k1y);
    let k2z = (k2 * k2 - k_perp * k_perp).sqrt();
    Ok(PhaseMatch {
        direction: Direction::from_transverse(k2x, k2y, k2),
        k2: [k2x, k2y, k2z],
        delta_kz: geom.k3() - k1z - k2z,
    })
}

/// Image translation `(s₂ sin β₂, s₂ cos β₂ sin ϑ₂)`; refraction at the exit face is neglected.
pub fn image_shift(generated: Direction, geom: &ImagingGeometry) -> (f64, f64) {
    let s2 = geom.s2();
    (s2 * generated.beta.sin(), s2 * generated.beta.cos() * generated.theta.sin())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedComponent {
    /// Index of the seed component that produced it.
    pub source_index: usize,
    /// Generated amplitude on the crystal exit face, without the tilt carrier.
    pub amplitude_map: ComplexField,
    pub seed_direction: Direction,
    pub direction: Direction,
    pub k2: [f64; 3],
    pub delta_kz: f64,
    /// Image-plane translation, meters.
    pub shift: (f64, f64),
    /// `c_n = i g L f(ϑ_n, β_n)`; the unit-magnification propagation constants are exact and folded into the map.
    pub coefficient: Complex64,
    pub seed_intensity: f64,
}

/// One generated component per seed component (Eq.-3 superposition before propagation).
pub fn generate_shot_field(
    seed: &ChaoticSeed,
    pump: &ComplexField,
    crystal: &CrystalConfig,
    geom: &ImagingGeometry,
) -> Result<Vec<GeneratedComponent>, DownconversionError> {
    crystal.validate()?;
    let lambda3 = geom.wavelength(3);
    if ((pump.wavelength() - lambda3) / lambda3).abs() > 1e-12 {
        return Err(OpticsError::WavelengthMismatch { expected: lambda3, found: pump.wavelength() }.into());
    }
    let lambda1 = geom.wavelength(1);
    if ((seed.wavelength - lambda1) / lambda1).abs() > 1e-12 {
        return Err(OpticsError::WavelengthMismatch { expected: lambda1, found: seed.wavelength }.into());
    }
    let lambda2 = geom.wavelength(2);
    seed.components
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let pm = phase_match(c, geom)?;
            let w = crystal.weight(pm.delta_kz);
            let data = pump.data().iter().map(|&a3| mix_low_gain(c.amplitude, a3, crystal, w)).collect();
            Ok(GeneratedComponent {
                source_index: n,
                amplitude_map: ComplexField::new(*pump.grid(), lambda2, data)?,
                seed_direction: c.direction,
                direction: pm.direction,
                k2: pm.k2,
                delta_kz: pm.delta_kz,
                shift: image_shift(pm.direction, geom),
                coefficient: Complex64::new(0.0, crystal.coupling() * w),
                seed_intensity: c.intensity(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntensityMode {
    /// `|Σ_n E₂,n|²`: the physical single-shot intensity.
    #[default]
    Coherent,
    /// `Σ_n |E₂,n|²`: interference terms dropped.
    Incoherent,
}

fn check_on_grid(shift: (f64, f64), grid: &GridSpec) -> Result<(), DownconversionError> {
    if shift.0.abs() > 0.5 * grid.width() || shift.1.abs() > 0.5 * grid.height() {
        return Err(DownconversionError::ImageOffGrid);
    }
    Ok(())
}

/// Propagates one component to the image plane with its translation applied.
fn image_field(component: &GeneratedComponent, geom: &ImagingGeometry) -> Result<ComplexField, DownconversionError> {
    let map = &component.amplitude_map;
    check_on_grid(component.shift, &fresnel_output_grid(map.grid(), map.wavelength(), geom.s2())?)?;
    Ok(fresnel_transform_shifted(map, geom.s2(), component.shift)?)
}

/// Intensity on the plane `z = s₂`.
pub fn image_plane_intensity(
    components: &[GeneratedComponent],
    geom: &ImagingGeometry,
    mode: IntensityMode,
) -> Result<IntensityMap, DownconversionError> {
    let first = components.first().ok_or(DownconversionError::NoComponents)?;
    let first_field = image_field(first, geom)?;
    let grid = *first_field.grid();
    let mut coherent = first_field.data().to_vec();
    let mut incoherent: Vec<f64> = coherent.iter().map(|c| c.norm_sqr()).collect();
    for c in &components[1..] {
        let f = image_field(c, geom)?;
        if f.grid() != &grid {
            return Err(OpticsError::InvalidGrid("components live on different grids".into()).into());
        }
        for ((acc, inc), v) in coherent.iter_mut().zip(incoherent.iter_mut()).zip(f.data()) {
            *acc += v;
            *inc += v.norm_sqr();
        }
    }
    let values = match mode {
        IntensityMode::Coherent => coherent.iter().map(|c| c.norm_sqr()).collect(),
        IntensityMode::Incoherent => incoherent,
    };
    Ok(IntensityMap::new(grid, values)?)
}

/// Per-component bookkeeping of a [`ShotSynthesizer`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentInfo {
    pub index: usize,
    pub seed_direction: Direction,
    pub direction: Direction,
    pub shift: (f64, f64),
    pub coefficient: Complex64,
    pub delta_kz: f64,
}

/// Precomputed image-plane fields for a frozen direction set.
///
/// The generated field is linear in `a₁,n*` in both gain modes, so each
/// component's image-plane field for unit seed amplitude is computed once and
/// a shot reduces to a weighted sum of these basis fields.
#[derive(Debug, Clone)]
pub struct ShotSynthesizer {
    grid: GridSpec,
    basis: Vec<Vec<Complex64>>,
    basis_intensity: Vec<Vec<f64>>,
    info: Vec<ComponentInfo>,
}

impl ShotSynthesizer {
    pub fn new(
        directions: &[Direction],
        pump: &ComplexField,
        crystal: &CrystalConfig,
        geom: &ImagingGeometry,
    ) -> Result<Self, DownconversionError> {
        if directions.is_empty() {
            return Err(DownconversionError::NoComponents);
        }
        let lambda1 = geom.wavelength(1);
        let unit = ChaoticSeed {
            components: directions
                .iter()
                .map(|&d| PlaneWaveComponent::new(Complex64::new(1.0, 0.0), d, lambda1))
                .collect(),
            shot_index: 0,
            rng_stream_id: 0,
            wavelength: lambda1,
        };
        let generated = generate_shot_field(&unit, pump, crystal, geom)?;
        let fields: Vec<ComplexField> = generated.par_iter().map(|c| image_field(c, geom)).collect::<Result<_, _>>()?;
        let grid = *fields[0].grid();
        let info = generated
            .iter()
            .map(|c| ComponentInfo {
                index: c.source_index,
                seed_direction: c.seed_direction,
                direction: c.direction,
                shift: c.shift,
                coefficient: c.coefficient,
                delta_kz: c.delta_kz,
            })
            .collect();
        let basis: Vec<Vec<Complex64>> = fields.into_iter().map(ComplexField::into_data).collect();
        let basis_intensity = basis.iter().map(|b| b.iter().map(|c| c.norm_sqr()).collect()).collect();
        Ok(Self { grid, basis, basis_intensity, info })
    }

    pub fn image_grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn components(&self) -> &[ComponentInfo] {
        &self.info
    }

    pub fn len(&self) -> usize {
        self.info.len()
    }

    pub fn is_empty(&self) -> bool {
        self.info.is_empty()
    }

    /// Image-plane field of component `n` for unit seed amplitude.
    pub fn basis_field(&self, n: usize) -> &[Complex64] {
        &self.basis[n]
    }

    pub fn intensity(
        &self,
        amplitudes: &[Complex64],
        mode: IntensityMode,
    ) -> Result<IntensityMap, DownconversionError> {
        if amplitudes.len() != self.basis.len() {
            return Err(DownconversionError::AmplitudeCount { expected: self.basis.len(), found: amplitudes.len() });
        }
        let mut values = vec![0.0; self.grid.len()];
        match mode {
            IntensityMode::Coherent => {
                let mut field = vec![Complex64::default(); self.grid.len()];
                for (a, b) in amplitudes.iter().zip(&self.basis) {
                    let w = a.conj();
                    field.iter_mut().zip(b).for_each(|(f, &v)| *f += w * v);
                }
                values.iter_mut().zip(&field).for_each(|(v, f)| *v = f.norm_sqr());
            }
            IntensityMode::Incoherent => {
                for (a, b) in amplitudes.iter().zip(&self.basis_intensity) {
                    let w = a.norm_sqr();
                    values.iter_mut().zip(b).for_each(|(v, &i)| *v += w * i);
                }
            }
        }
        Ok(IntensityMap::new(self.grid, values)?)
    }

    /// CSV table `n,theta1,beta1,theta2,beta2,x2,y2,c_abs2,delta_kz`.
    pub fn component_table_csv(&self) -> String {
        let mut out = String::from("n,theta1,beta1,theta2,beta2,x2,y2,c_abs2,delta_kz\n");
        for c in &self.info {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                c.index,
                c.seed_direction.theta,
                c.seed_direction.beta,
                c.direction.theta,
                c.direction.beta,
                c.shift.0,
                c.shift.1,
                c.coefficient.norm_sqr(),
                c.delta_kz
            );
        }
        out
    }
}
