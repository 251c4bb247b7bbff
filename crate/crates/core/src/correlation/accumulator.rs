use crate::optics::{GridSpec, IntensityMap};
use crate::stats::NeumaierSum;

use super::CorrelationError;

/// One laser shot: reference intensities `I₁,n` and the generated map `I₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotRecord {
    pub shot_index: u64,
    pub reference: Vec<f64>,
    pub intensity_map: IntensityMap,
    /// Focal-plane map of the seed, needed only for [`ReferenceSelection::FourierPixel`].
    pub fourier_plane: Option<IntensityMap>,
}

impl ShotRecord {
    pub fn new(shot_index: u64, reference: Vec<f64>, intensity_map: IntensityMap) -> Result<Self, CorrelationError> {
        let ok = |v: &f64| v.is_finite() && *v >= 0.0;
        if !reference.iter().all(ok) {
            return Err(CorrelationError::InvalidShot("reference intensities must be finite and nonnegative"));
        }
        if !intensity_map.values().iter().all(ok) {
            return Err(CorrelationError::InvalidShot("intensity map must be finite and nonnegative"));
        }
        Ok(Self { shot_index, reference, intensity_map, fourier_plane: None })
    }

    pub fn with_fourier_plane(mut self, map: IntensityMap) -> Self {
        self.fourier_plane = Some(map);
        self
    }
}

/// Which seed intensity plays `I₁,j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceSelection {
    /// Component index `j` of the frozen direction set.
    Component(usize),
    /// One pixel of the binned Fourier-plane map.
    FourierPixel { ix: usize, iy: usize },
}

/// Mergeable running sums for `G`, all compensated.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationAccumulator {
    grid: GridSpec,
    selection: ReferenceSelection,
    count: u64,
    sum_i1: NeumaierSum,
    sum_i1_sq: NeumaierSum,
    sum_i2: Vec<NeumaierSum>,
    sum_i1_i2: Vec<NeumaierSum>,
}

/// Finalized estimator output.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationResult {
    pub shots: u64,
    /// `G(I₁,j, I₂)` with unbiased `M−1` normalization; may be negative.
    pub g: IntensityMap,
    pub mean_i2: IntensityMap,
    pub mean_i1j: f64,
    pub sigma2_i1j: f64,
    /// `G / σ²(I₁,j)`; `None` when the reference does not fluctuate.
    pub normalized: Option<IntensityMap>,
    pub degenerate: bool,
}

impl CorrelationAccumulator {
    pub fn new(grid: GridSpec, selection: ReferenceSelection) -> Self {
        Self {
            grid,
            selection,
            count: 0,
            sum_i1: NeumaierSum::default(),
            sum_i1_sq: NeumaierSum::default(),
            sum_i2: vec![NeumaierSum::default(); grid.len()],
            sum_i1_i2: vec![NeumaierSum::default(); grid.len()],
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn selection(&self) -> ReferenceSelection {
        self.selection
    }

    pub fn sum_i1(&self) -> f64 {
        self.sum_i1.sum()
    }

    pub fn sum_i1_sq(&self) -> f64 {
        self.sum_i1_sq.sum()
    }

    pub fn sum_i2(&self) -> Vec<f64> {
        self.sum_i2.iter().map(NeumaierSum::sum).collect()
    }

    pub fn sum_i1_i2(&self) -> Vec<f64> {
        self.sum_i1_i2.iter().map(NeumaierSum::sum).collect()
    }

    fn selected(&self, shot: &ShotRecord) -> Result<f64, CorrelationError> {
        match self.selection {
            ReferenceSelection::Component(j) => shot
                .reference
                .get(j)
                .copied()
                .ok_or(CorrelationError::ReferenceOutOfRange { index: j, len: shot.reference.len() }),
            ReferenceSelection::FourierPixel { ix, iy } => {
                let map = shot.fourier_plane.as_ref().ok_or(CorrelationError::MissingFourierPlane)?;
                if ix >= map.grid().nx() || iy >= map.grid().ny() {
                    return Err(CorrelationError::ReferenceOutOfRange {
                        index: iy * map.grid().nx() + ix,
                        len: map.grid().len(),
                    });
                }
                Ok(map.at(ix, iy))
            }
        }
    }

    pub fn accumulate(&mut self, shot: &ShotRecord) -> Result<(), CorrelationError> {
        let g = shot.intensity_map.grid();
        if g.nx() != self.grid.nx() || g.ny() != self.grid.ny() {
            return Err(CorrelationError::GridMismatch(format!(
                "shot is {}x{}, accumulator is {}x{}",
                g.nx(),
                g.ny(),
                self.grid.nx(),
                self.grid.ny()
            )));
        }
        let i1 = self.selected(shot)?;
        self.count += 1;
        self.sum_i1 += i1;
        self.sum_i1_sq += i1 * i1;
        for ((s2, s12), &i2) in self.sum_i2.iter_mut().zip(self.sum_i1_i2.iter_mut()).zip(shot.intensity_map.values()) {
            *s2 += i2;
            *s12 += i1 * i2;
        }
        Ok(())
    }

    /// Folds `other` in; equal to accumulating both shot streams into one.
    pub fn merge(&mut self, other: &Self) -> Result<(), CorrelationError> {
        if self.grid.nx() != other.grid.nx() || self.grid.ny() != other.grid.ny() {
            return Err(CorrelationError::GridMismatch("accumulators cover different grids".into()));
        }
        if self.selection != other.selection {
            return Err(CorrelationError::SelectionMismatch);
        }
        self.count += other.count;
        self.sum_i1 += other.sum_i1;
        self.sum_i1_sq += other.sum_i1_sq;
        for (a, b) in self.sum_i2.iter_mut().zip(&other.sum_i2) {
            *a += *b;
        }
        for (a, b) in self.sum_i1_i2.iter_mut().zip(&other.sum_i1_i2) {
            *a += *b;
        }
        Ok(())
    }

    pub fn finalize(&self) -> Result<CorrelationResult, CorrelationError> {
        if self.count < 2 {
            return Err(CorrelationError::InsufficientShots { found: self.count, needed: 2 });
        }
        let m = self.count as f64;
        let mean_i1 = self.sum_i1.sum() / m;
        let mut sigma2 = (self.sum_i1_sq.sum() - mean_i1 * self.sum_i1.sum()) / (m - 1.0);
        // Below this the variance is rounding noise of identical references.
        let degenerate = sigma2 <= 64.0 * f64::EPSILON * mean_i1 * mean_i1;
        if degenerate {
            sigma2 = 0.0;
        }
        let g: Vec<f64> = self
            .sum_i1_i2
            .iter()
            .zip(&self.sum_i2)
            .map(|(s12, s2)| (s12.sum() - mean_i1 * s2.sum()) / (m - 1.0))
            .collect();
        let mean_i2 = self.sum_i2.iter().map(|s| s.sum() / m).collect();
        let normalized = (!degenerate).then(|| g.iter().map(|v| v / sigma2).collect::<Vec<_>>());
        Ok(CorrelationResult {
            shots: self.count,
            g: IntensityMap::new(self.grid, g)?,
            mean_i2: IntensityMap::new(self.grid, mean_i2)?,
            mean_i1j: mean_i1,
            sigma2_i1j: sigma2,
            normalized: normalized.map(|v| IntensityMap::new(self.grid, v)).transpose()?,
            degenerate,
        })
    }
}
