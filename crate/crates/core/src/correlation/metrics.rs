use num_complex::Complex64;

use crate::optics::{centered_dft2, roll, FftDirection, IntensityMap};

use super::CorrelationError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageMetrics {
    /// Pearson correlation with the reference translated to the expected shift.
    pub ncc: f64,
    /// `(⟨in⟩ − ⟨bg⟩) / (⟨in⟩ + ⟨bg⟩)` over the translated reference's support.
    pub contrast: f64,
    /// RMS of the background pixels relative to the in-image mean.
    pub background_rms: f64,
}

fn check_same_shape(a: &IntensityMap, b: &IntensityMap) -> Result<(), CorrelationError> {
    let (ga, gb) = (a.grid(), b.grid());
    if ga.nx() != gb.nx() || ga.ny() != gb.ny() || ((ga.pitch() - gb.pitch()) / gb.pitch()).abs() > 1e-9 {
        return Err(CorrelationError::GridMismatch("recovered and reference maps differ".into()));
    }
    Ok(())
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        (sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0)
    }
}

/// Compares a recovered map with a reference image placed at `expected_shift`
/// (meters, rounded to whole pixels, periodic).
///
/// The reference is the unshifted image (for instance the on-axis plane-wave
/// image); pixels above half its maximum form the in-image region.
pub fn image_metrics(
    recovered: &IntensityMap,
    reference: &IntensityMap,
    expected_shift: (f64, f64),
) -> Result<ImageMetrics, CorrelationError> {
    check_same_shape(recovered, reference)?;
    if recovered.values().iter().all(|&v| v == 0.0) || reference.values().iter().all(|&v| v == 0.0) {
        return Err(CorrelationError::EmptyImage);
    }
    let g = reference.grid();
    let sx = (expected_shift.0 / g.pitch()).round() as isize;
    let sy = (expected_shift.1 / g.pitch()).round() as isize;
    let shifted = roll(reference.values(), g.nx(), g.ny(), sx, sy);
    let ncc = pearson(recovered.values(), &shifted);

    let threshold = 0.5 * reference.max();
    let (mut sum_in, mut n_in, mut sum_bg, mut sq_bg, mut n_bg) = (0.0, 0usize, 0.0, 0.0, 0usize);
    for (&v, &r) in recovered.values().iter().zip(&shifted) {
        if r > threshold {
            sum_in += v;
            n_in += 1;
        } else {
            sum_bg += v;
            sq_bg += v * v;
            n_bg += 1;
        }
    }
    if n_bg == 0 {
        return Err(CorrelationError::NoBackground);
    }
    let mean_in = sum_in / n_in as f64;
    let mean_bg = sum_bg / n_bg as f64;
    Ok(ImageMetrics {
        ncc,
        contrast: (mean_in - mean_bg) / (mean_in + mean_bg),
        background_rms: (sq_bg / n_bg as f64).sqrt() / mean_in.abs(),
    })
}

/// Translation (meters) that best maps `reference` onto `recovered`: the peak
/// of their periodic cross-correlation.
pub fn locate_image(recovered: &IntensityMap, reference: &IntensityMap) -> Result<(f64, f64), CorrelationError> {
    check_same_shape(recovered, reference)?;
    let g = *recovered.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let to_c = |m: &IntensityMap| m.values().iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>();
    let a = centered_dft2(&to_c(recovered), nx, ny, FftDirection::Forward);
    let b = centered_dft2(&to_c(reference), nx, ny, FftDirection::Forward);
    let prod: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y.conj()).collect();
    let corr = centered_dft2(&prod, nx, ny, FftDirection::Inverse);
    let (best, _) =
        corr.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, c)| if c.re > acc.1 { (i, c.re) } else { acc });
    let (ix, iy) = (best % nx, best / nx);
    Ok((g.x(ix), g.y(iy)))
}
