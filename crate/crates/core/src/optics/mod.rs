//! Scalar paraxial optics on uniform, centered sampling grids.
//!
//! Sign convention: monochromatic fields carry the spatial phase `exp(-i k·r)`,
//! the same convention used for the seed plane waves. In this convention a
//! converging spherical wave has the transverse phase `exp(+i k ρ²/2R)` and the
//! paraxial free-space transfer function is `exp(+i q² z / 2k)`.

mod fft;
mod field;
mod grid;
mod imaging;
mod propagate;

pub use fft::{centered_dft2, roll, shift_periodic, FftDirection};
pub use field::{intensity, ComplexField, IntensityMap};
pub use grid::GridSpec;
pub use imaging::{image_pump_2f2f, ImagingGeometry};
pub use propagate::{fresnel_output_grid, fresnel_transform, fresnel_transform_shifted, propagate_free};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpticsError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid wavelength {0} m")]
    InvalidWavelength(f64),
    #[error("aliasing: maximum transverse frequency exceeds grid Nyquist")]
    Aliasing,
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("wavelength mismatch: expected {expected} m, found {found} m")]
    WavelengthMismatch { expected: f64, found: f64 },
    #[error("operation requires a square grid, got {nx}x{ny}")]
    NonSquareGrid { nx: usize, ny: usize },
    #[error("sample count {found} does not match grid size {expected}")]
    SizeMismatch { expected: usize, found: usize },
}
