use super::OpticsError;

/// Uniform transverse sampling grid with square pixels.
///
/// Index `(nx/2, ny/2)` sits at `x = y = 0`, so sample `i` is at
/// `(i - nx/2) * pitch`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    nx: usize,
    ny: usize,
    pitch: f64,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, pitch: f64) -> Result<Self, OpticsError> {
        if nx < 2 || ny < 2 || !nx.is_multiple_of(2) || !ny.is_multiple_of(2) {
            return Err(OpticsError::InvalidGrid(format!("sample counts must be even and at least 2, got {nx}x{ny}")));
        }
        if !(pitch.is_finite() && pitch > 0.0) {
            return Err(OpticsError::InvalidGrid(format!("pitch must be positive, got {pitch}")));
        }
        Ok(Self { nx, ny, pitch })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_square(&self) -> bool {
        self.nx == self.ny
    }

    pub fn x(&self, ix: usize) -> f64 {
        (ix as f64 - (self.nx / 2) as f64) * self.pitch
    }

    pub fn y(&self, iy: usize) -> f64 {
        (iy as f64 - (self.ny / 2) as f64) * self.pitch
    }

    /// Row-major flat index.
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    /// Physical extent along x.
    pub fn width(&self) -> f64 {
        self.nx as f64 * self.pitch
    }

    pub fn height(&self) -> f64 {
        self.ny as f64 * self.pitch
    }

    /// Largest representable transverse angular frequency along x, `π / pitch`.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.pitch
    }

    /// Angular-frequency spacing of the grid's DFT lattice along x and y.
    pub fn frequency_step(&self) -> (f64, f64) {
        let tau = std::f64::consts::TAU;
        (tau / self.width(), tau / self.height())
    }

    pub fn with_pitch(&self, pitch: f64) -> Result<Self, OpticsError> {
        Self::new(self.nx, self.ny, pitch)
    }
}
