use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::fft::{centered_dft2, FftDirection};
use super::{ComplexField, OpticsError};

/// Pump imaging and mixing geometry.
///
/// The imaging lens (focal length `f`) sits `d_F` before the crystal and forms
/// the object image `d = 2f − d_F` beyond it. A plane-wave seed then produces
/// a generated-field image at `s₂ = (k₂/k₃)·d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImagingGeometry {
    focal_f: f64,
    d_f: f64,
    d: f64,
    k: [f64; 3],
    s2: f64,
}

impl ImagingGeometry {
    /// `wavelengths` are `[λ₁, λ₂, λ₃]` (seed, generated, pump).
    pub fn new(focal_f: f64, d_f: f64, wavelengths: [f64; 3]) -> Result<Self, OpticsError> {
        if !(focal_f.is_finite() && focal_f > 0.0) {
            return Err(OpticsError::InvalidGeometry(format!("focal length {focal_f} m")));
        }
        if !(d_f.is_finite() && d_f > 0.0 && d_f < 2.0 * focal_f) {
            return Err(OpticsError::InvalidGeometry(format!(
                "lens-to-crystal distance {d_f} m must lie in (0, 2f = {} m)",
                2.0 * focal_f
            )));
        }
        for &w in &wavelengths {
            if !(w.is_finite() && w > 0.0) {
                return Err(OpticsError::InvalidWavelength(w));
            }
        }
        let k = wavelengths.map(|w| TAU / w);
        let d = 2.0 * focal_f - d_f;
        Ok(Self { focal_f, d_f, d, k, s2: k[1] / k[2] * d })
    }

    pub fn focal_f(&self) -> f64 {
        self.focal_f
    }

    pub fn d_f(&self) -> f64 {
        self.d_f
    }

    /// Crystal-to-pump-image distance `2f − d_F`.
    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn k1(&self) -> f64 {
        self.k[0]
    }

    pub fn k2(&self) -> f64 {
        self.k[1]
    }

    pub fn k3(&self) -> f64 {
        self.k[2]
    }

    pub fn wavelength(&self, which: usize) -> f64 {
        TAU / self.k[which - 1]
    }

    /// Distance from the crystal to the generated-field image plane.
    pub fn s2(&self) -> f64 {
        self.s2
    }

    /// Coefficient `a` of the object-plane chirp `exp(i a ρ²)`,
    /// `a = k₃ (d_F − f) / (2 d f)`.
    pub fn object_chirp(&self) -> f64 {
        self.k[2] * (self.d_f - self.focal_f) / (2.0 * self.d * self.focal_f)
    }

    /// Pitch of the crystal-face grid for an `n`-sample object grid of pitch `pitch_o`.
    pub fn crystal_pitch(&self, n: usize, pitch_o: f64) -> f64 {
        TAU * self.d / (self.k[2] * n as f64 * pitch_o)
    }
}

/// Pump amplitude on the crystal entrance face from the object-plane amplitude.
///
/// ```text
/// U_F(x_F) = k₃/(2π i d) · e^{i k₃ x_F²/2d} ∫ U_O(x_O) e^{i k₃ (d_F−f) x_O²/(2 d f)} e^{i k₃ x_F·x_O/d} dx_O
/// ```
///
/// Computed as one centered DFT between chirp masks. The output grid pitch is
/// `2π d / (k₃ n pitch_O)`, which makes the cross kernel an exact DFT kernel.
pub fn image_pump_2f2f(object: &ComplexField, geom: &ImagingGeometry) -> Result<ComplexField, OpticsError> {
    if geom.d() <= 0.0 {
        return Err(OpticsError::InvalidGeometry("d <= 0".into()));
    }
    let lambda3 = geom.wavelength(3);
    if ((object.wavelength() - lambda3) / lambda3).abs() > 1e-12 {
        return Err(OpticsError::WavelengthMismatch { expected: lambda3, found: object.wavelength() });
    }
    let grid = *object.grid();
    if !grid.is_square() {
        return Err(OpticsError::NonSquareGrid { nx: grid.nx(), ny: grid.ny() });
    }
    let n = grid.nx();
    let out_grid = grid.with_pitch(geom.crystal_pitch(n, grid.pitch()))?;

    let a = geom.object_chirp();
    let mut buf = object.data().to_vec();
    if a != 0.0 {
        for iy in 0..n {
            let y = grid.y(iy);
            for ix in 0..n {
                let x = grid.x(ix);
                buf[iy * n + ix] *= Complex64::cis(a * (x * x + y * y));
            }
        }
    }
    let mut out = centered_dft2(&buf, n, n, FftDirection::Inverse);

    let k3 = geom.k3();
    let d = geom.d();
    let prefactor = Complex64::new(k3 / (2.0 * PI * d), 0.0) / Complex64::i() * grid.pitch() * grid.pitch();
    let b = k3 / (2.0 * d);
    for iy in 0..n {
        let y = out_grid.y(iy);
        for ix in 0..n {
            let x = out_grid.x(ix);
            out[iy * n + ix] *= prefactor * Complex64::cis(b * (x * x + y * y));
        }
    }
    ComplexField::new(out_grid, lambda3, out)
}
