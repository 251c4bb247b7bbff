//! Compensated summation and thermal (exponential-law) statistics.

use std::fmt::Write as _;
use std::ops::{Add, AddAssign};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("insufficient statistics: {found} samples, need at least {needed}")]
    InsufficientStatistics { found: usize, needed: usize },
    #[error("degenerate sample: {0}")]
    Degenerate(&'static str),
}

/// Kahan–Neumaier compensated sum.
#[derive(Debug, Default, Clone, Copy, PartialEq)]
pub struct NeumaierSum {
    s: f64,
    c: f64,
}

impl NeumaierSum {
    pub fn sum(&self) -> f64 {
        self.s + self.c
    }
}

impl From<f64> for NeumaierSum {
    fn from(value: f64) -> Self {
        Self { s: value, c: 0.0 }
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, rhs: f64) {
        let (s, c) = two_sum(self.s, rhs);
        self.s = s;
        self.c += c;
    }
}

impl AddAssign for NeumaierSum {
    fn add_assign(&mut self, rhs: Self) {
        let (s, c) = two_sum(self.s, rhs.s);
        self.s = s;
        self.c += c + rhs.c;
    }
}

impl Add for NeumaierSum {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let c = if a.abs() >= b.abs() { (a - s) + b } else { (b - s) + a };
    (s, c)
}

/// Kolmogorov–Smirnov distance between the empirical distribution of
/// `samples` and the exponential law with the given mean.
pub fn ks_distance_exponential(samples: &[f64], mean: f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0, |d: f64, (i, &x)| {
        let cdf = 1.0 - (-x.max(0.0) / mean).exp();
        d.max(cdf - i as f64 / n).max((i + 1) as f64 / n - cdf)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub bin_center: f64,
    pub count: u64,
    /// Expected count under `Exp(sample mean)`.
    pub exponential_fit: f64,
}

/// Summary of an intensity sample against the thermal law.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalReport {
    pub samples: usize,
    pub mean: f64,
    pub variance: f64,
    pub ks_distance: f64,
    pub histogram: Vec<HistogramBin>,
}

pub const MIN_THERMAL_SAMPLES: usize = 100;
const HISTOGRAM_BINS: usize = 40;

/// Mean, unbiased variance, KS distance against `Exp(mean)` and a histogram
/// over `[0, max]`.
pub fn thermal_statistics_report(samples: &[f64]) -> Result<ThermalReport, StatsError> {
    if samples.len() < MIN_THERMAL_SAMPLES {
        return Err(StatsError::InsufficientStatistics { found: samples.len(), needed: MIN_THERMAL_SAMPLES });
    }
    if samples.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(StatsError::Degenerate("intensities must be finite and nonnegative"));
    }
    let n = samples.len() as f64;
    let mut sum = NeumaierSum::default();
    samples.iter().for_each(|&v| sum += v);
    let mean = sum.sum() / n;
    if mean <= 0.0 {
        return Err(StatsError::Degenerate("zero mean intensity"));
    }
    let mut ss = NeumaierSum::default();
    samples.iter().for_each(|&v| ss += (v - mean) * (v - mean));
    let variance = ss.sum() / (n - 1.0);

    let top = samples.iter().copied().fold(0.0, f64::max);
    let width = top / HISTOGRAM_BINS as f64;
    let mut counts = vec![0u64; HISTOGRAM_BINS];
    for &v in samples {
        let b = ((v / width) as usize).min(HISTOGRAM_BINS - 1);
        counts[b] += 1;
    }
    let histogram = counts
        .iter()
        .enumerate()
        .map(|(b, &count)| {
            let lo = b as f64 * width;
            let hi = lo + width;
            HistogramBin {
                bin_center: lo + 0.5 * width,
                count,
                exponential_fit: n * ((-lo / mean).exp() - (-hi / mean).exp()),
            }
        })
        .collect();

    Ok(ThermalReport {
        samples: samples.len(),
        mean,
        variance,
        ks_distance: ks_distance_exponential(samples, mean),
        histogram,
    })
}

impl ThermalReport {
    /// `σ²(I) / ⟨I⟩²`, equal to one for chaotic light.
    pub fn variance_ratio(&self) -> f64 {
        self.variance / (self.mean * self.mean)
    }

    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("bin_center,count,exponential_fit\n");
        for b in &self.histogram {
            let _ = writeln!(out, "{},{},{}", b.bin_center, b.count, b.exponential_fit);
        }
        out
    }

    /// Plain-text `key=value` lines, each key prefixed with `prefix.`.
    pub fn key_values(&self, prefix: &str) -> String {
        format!(
            "{prefix}.samples={}\n{prefix}.mean={}\n{prefix}.variance={}\n{prefix}.variance_ratio={}\n{prefix}.ks_distance={}\n",
            self.samples,
            self.mean,
            self.variance,
            self.variance_ratio(),
            self.ks_distance
        )
    }
}
