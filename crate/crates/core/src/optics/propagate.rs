use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::fft::{centered_dft2, fft2_in_place, signed_bin, FftDirection};
use super::{shift_periodic, ComplexField, GridSpec, OpticsError};

/// Paraxial angular-spectrum propagation over `distance` on the input grid.
///
/// The transfer function `exp(+i q² z / 2k)` is applied relative to the
/// on-axis carrier. It is unitary, so energy is preserved and negative
/// distances back-propagate. Beyond `|z| = n·pitch²/λ` the sampled transfer
/// function itself aliases and the call is refused.
pub fn propagate_free(field: &ComplexField, distance: f64) -> Result<ComplexField, OpticsError> {
    if !distance.is_finite() {
        return Err(OpticsError::InvalidGeometry(format!("propagation distance {distance}")));
    }
    if distance == 0.0 {
        return Ok(field.clone());
    }
    let grid = *field.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    let p = grid.pitch();
    let n_min = nx.min(ny) as f64;
    if distance.abs() * field.wavelength() > n_min * p * p {
        return Err(OpticsError::Aliasing);
    }

    let k = field.wavenumber();
    let mut buf = field.data().to_vec();
    fft2_in_place(&mut buf, nx, ny, FftDirection::Forward);
    let coeff = distance / (2.0 * k);
    for iy in 0..ny {
        let qy = TAU * signed_bin(iy, ny) / (ny as f64 * p);
        for ix in 0..nx {
            let qx = TAU * signed_bin(ix, nx) / (nx as f64 * p);
            buf[iy * nx + ix] *= Complex64::cis((qx * qx + qy * qy) * coeff);
        }
    }
    fft2_in_place(&mut buf, nx, ny, FftDirection::Inverse);
    let norm = 1.0 / (nx * ny) as f64;
    buf.iter_mut().for_each(|c| *c *= norm);
    ComplexField::new(grid, field.wavelength(), buf)
}

/// Single-transform Fresnel propagation over `distance > 0`.
///
/// Evaluates
/// `u(x) = (i k / 2π z) e^{-ik x²/2z} ∫ u(x') e^{-ik x'²/2z} e^{ik x·x'/z} dx'`
/// with one DFT. The output lives on the dual grid of pitch `λ z / (n · pitch)`.
pub fn fresnel_transform(field: &ComplexField, distance: f64) -> Result<ComplexField, OpticsError> {
    fresnel_transform_shifted(field, distance, (0.0, 0.0))
}

/// [`fresnel_transform`] of `field · exp(-i q·x')` where the tilt `q` is the one
/// that translates the output by `shift` (meters): `q = k · shift / z`.
///
/// The tilt is never sampled on the input grid. The DFT result is translated
/// by the Fourier shift theorem and the output quadratic phase is applied
/// afterwards, which is exact for any translation that is a whole number of
/// output samples.
pub fn fresnel_transform_shifted(
    field: &ComplexField,
    distance: f64,
    shift: (f64, f64),
) -> Result<ComplexField, OpticsError> {
    if !(distance.is_finite() && distance > 0.0) {
        return Err(OpticsError::InvalidGeometry(format!(
            "Fresnel transform needs a positive distance, got {distance}"
        )));
    }
    let grid = *field.grid();
    if !grid.is_square() {
        return Err(OpticsError::NonSquareGrid { nx: grid.nx(), ny: grid.ny() });
    }
    let n = grid.nx();
    let k = field.wavenumber();
    let out_pitch = field.wavelength() * distance / (n as f64 * grid.pitch());
    let out_grid = grid.with_pitch(out_pitch)?;

    let half_k_over_z = k / (2.0 * distance);
    let mut buf = field.data().to_vec();
    for iy in 0..n {
        let y = grid.y(iy);
        for ix in 0..n {
            let x = grid.x(ix);
            buf[iy * n + ix] *= Complex64::cis(-half_k_over_z * (x * x + y * y));
        }
    }
    let mut out = centered_dft2(&buf, n, n, FftDirection::Inverse);
    if shift != (0.0, 0.0) {
        out = shift_periodic(&out, n, n, shift.0 / out_pitch, shift.1 / out_pitch);
    }
    let scale = Complex64::new(0.0, k / (2.0 * PI * distance)) * grid.pitch() * grid.pitch();
    for iy in 0..n {
        let y = out_grid.y(iy);
        for ix in 0..n {
            let x = out_grid.x(ix);
            out[iy * n + ix] *= scale * Complex64::cis(-half_k_over_z * (x * x + y * y));
        }
    }
    ComplexField::new(out_grid, field.wavelength(), out)
}

/// Output grid of [`fresnel_transform`] for a given input grid.
pub fn fresnel_output_grid(grid: &GridSpec, wavelength: f64, distance: f64) -> Result<GridSpec, OpticsError> {
    grid.with_pitch(wavelength * distance / (grid.nx() as f64 * grid.pitch()))
}
