//! Ensemble intensity correlations between one seed reference and the
//! generated-field intensity map.
//!
//! `G(I₁,j, I₂) = ⟨I₁,j I₂⟩ − ⟨I₁,j⟩⟨I₂⟩`, with the ensemble average realized as
//! a shot average. For a chaotic seed only the `n = j` term survives, so
//! `G / σ²(I₁,j)` is the image written by component `j` alone.

mod accumulator;
mod metrics;

pub use accumulator::{CorrelationAccumulator, CorrelationResult, ReferenceSelection, ShotRecord};
pub use metrics::{image_metrics, locate_image, ImageMetrics};

use thiserror::Error;

use crate::optics::OpticsError;
use crate::stats::NeumaierSum;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorrelationError {
    #[error("insufficient shots: {found}, need at least {needed}")]
    InsufficientShots { found: u64, needed: u64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("reference index {index} out of range for {len} components")]
    ReferenceOutOfRange { index: usize, len: usize },
    #[error("accumulators select different references")]
    SelectionMismatch,
    #[error("shot record needs a Fourier-plane map for pixel selection")]
    MissingFourierPlane,
    #[error("invalid shot record: {0}")]
    InvalidShot(&'static str),
    #[error("empty image")]
    EmptyImage,
    #[error("reference image has no background pixels")]
    NoBackground,
    #[error(transparent)]
    Optics(#[from] OpticsError),
}

/// Output of [`covariance_identity_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceCheck {
    pub shots: usize,
    /// Sample covariance of `I₁,j` and `I₁,n`.
    pub cov: f64,
    /// Sample variance of `I₁,n`.
    pub sigma2: f64,
    /// `cov / sigma2`; `None` when the variance vanishes.
    pub ratio: Option<f64>,
    /// `sigma2 / ⟨I₁,n⟩²`, the thermal-light prediction being 1.
    pub chaotic_ratio: f64,
}

/// Checks `⟨I_j I_n⟩ − ⟨I_j⟩⟨I_n⟩ = σ²(I_n) δ_jn` on a series of per-shot
/// reference intensity vectors.
pub fn covariance_identity_check(
    references: &[Vec<f64>],
    j: usize,
    n: usize,
) -> Result<CovarianceCheck, CorrelationError> {
    let m = references.len();
    if m < 2 {
        return Err(CorrelationError::InsufficientShots { found: m as u64, needed: 2 });
    }
    let len = references[0].len();
    for idx in [j, n] {
        if references.iter().any(|r| idx >= r.len()) {
            return Err(CorrelationError::ReferenceOutOfRange { index: idx, len });
        }
    }
    let mean = |k: usize| {
        let mut s = NeumaierSum::default();
        references.iter().for_each(|r| s += r[k]);
        s.sum() / m as f64
    };
    let (mj, mn) = (mean(j), mean(n));
    let (mut cov, mut var) = (NeumaierSum::default(), NeumaierSum::default());
    for r in references {
        let (dj, dn) = (r[j] - mj, r[n] - mn);
        cov += dj * dn;
        var += dn * dn;
    }
    let denom = (m - 1) as f64;
    let (cov, sigma2) = (cov.sum() / denom, var.sum() / denom);
    Ok(CovarianceCheck {
        shots: m,
        cov,
        sigma2,
        ratio: (sigma2 > 0.0).then(|| cov / sigma2),
        chaotic_ratio: sigma2 / (mn * mn),
    })
}
