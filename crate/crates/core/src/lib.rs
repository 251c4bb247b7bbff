//! Wave-optics Monte Carlo of image recovery by spatial intensity correlations
//! in seeded difference-frequency generation driven by a chaotic seed.
//!
//! The pipeline mirrors the optical bench:
//!
//! ```text
//! object mask ──2f–2f lens──▶ pump on crystal face ──┐
//!                                                     ├─ low-gain mixing ─▶ generated field
//! chaotic seed (N random plane waves per shot) ──────┘                         │
//!                                                          free propagation to s₂
//!                                                                              ▼
//!                 reference intensities I₁ₙ ─────────▶ correlation G(I₁ⱼ, I₂) ◀── I₂(x₂, y₂)
//! ```
//!
//! * [`optics`]: sampled complex fields, free-space propagators and the pump
//!   imaging kernel.
//! * [`source`]: the chaotic seed, counter-based per-shot amplitudes and
//!   thermal-statistics checks.
//! * [`downconversion`]: parametric mixing, phase matching and the image-plane
//!   intensity in coherent and incoherent modes.
//! * [`correlation`]: mergeable streaming estimator of `G`, the chaotic
//!   covariance identity and image-quality metrics.
//! * [`runner`]: configuration, experiment orchestration, sweeps and artifacts.

pub mod correlation;
pub mod downconversion;
pub mod io;
pub mod optics;
pub mod runner;
pub mod source;
pub mod stats;

pub use correlation::{CorrelationAccumulator, CorrelationResult, ShotRecord};
pub use optics::{ComplexField, GridSpec, ImagingGeometry, IntensityMap};
pub use runner::{ExperimentConfig, RunManifest};
