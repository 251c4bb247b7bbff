use num_complex::Complex64;

use super::{GridSpec, OpticsError};

/// Sampled complex amplitude on a [`GridSpec`] at a fixed wavelength.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: GridSpec,
    wavelength: f64,
    data: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: GridSpec, wavelength: f64, data: Vec<Complex64>) -> Result<Self, OpticsError> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(OpticsError::InvalidWavelength(wavelength));
        }
        if data.len() != grid.len() {
            return Err(OpticsError::SizeMismatch { expected: grid.len(), found: data.len() });
        }
        Ok(Self { grid, wavelength, data })
    }

    pub fn zeros(grid: GridSpec, wavelength: f64) -> Result<Self, OpticsError> {
        Self::new(grid, wavelength, vec![Complex64::default(); grid.len()])
    }

    /// Builds a field by evaluating `f(x, y)` at every sample position.
    pub fn from_fn(
        grid: GridSpec,
        wavelength: f64,
        mut f: impl FnMut(f64, f64) -> Complex64,
    ) -> Result<Self, OpticsError> {
        let mut data = Vec::with_capacity(grid.len());
        for iy in 0..grid.ny() {
            let y = grid.y(iy);
            for ix in 0..grid.nx() {
                data.push(f(grid.x(ix), y));
            }
        }
        Self::new(grid, wavelength, data)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn wavenumber(&self) -> f64 {
        std::f64::consts::TAU / self.wavelength
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.data[self.grid.index(ix, iy)]
    }

    /// `Σ |u|² · pitch²`
    pub fn energy(&self) -> f64 {
        let p2 = self.grid.pitch() * self.grid.pitch();
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>() * p2
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self { grid: self.grid, wavelength: self.wavelength, data: self.data.iter().map(|&c| c * factor).collect() }
    }
}

/// Real-valued map on a grid.
///
/// Intensities are nonnegative; correlation maps built on the same type may
/// carry negative estimator noise.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityMap {
    grid: GridSpec,
    values: Vec<f64>,
}

impl IntensityMap {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self, OpticsError> {
        if values.len() != grid.len() {
            return Err(OpticsError::SizeMismatch { expected: grid.len(), found: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[self.grid.index(ix, iy)]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Grid position `(ix, iy)` of the largest value.
    pub fn argmax(&self) -> (usize, usize) {
        let (i, _) =
            self.values
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
        (i % self.grid.nx(), i / self.grid.nx())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v * factor).collect() }
    }
}

/// Element-wise squared modulus.
pub fn intensity(field: &ComplexField) -> IntensityMap {
    IntensityMap { grid: field.grid, values: field.data.iter().map(|c| c.norm_sqr()).collect() }
}
