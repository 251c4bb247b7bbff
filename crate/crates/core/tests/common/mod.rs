//! Independent reference computations shared by the integration suites.
#![allow(dead_code)]

use std::f64::consts::PI;

use chaotic_imaging::optics::roll;
use chaotic_imaging::{ComplexField, GridSpec, ImagingGeometry, IntensityMap};
use num_complex::Complex64;

pub const L1: f64 = 1064e-9;
pub const L3: f64 = 532e-9;

pub fn paper_geometry() -> ImagingGeometry {
    ImagingGeometry::new(0.20, 0.15, [L1, L1, L3]).unwrap()
}

/// `‖a − b‖ / ‖b‖`.
pub fn rel_l2_complex(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

pub fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

/// `w(z) = w₀ √(1 + (z/z_R)²)`, `z_R = π w₀² / λ`.
pub fn gaussian_width(w0: f64, z: f64, wavelength: f64) -> f64 {
    let zr = PI * w0 * w0 / wavelength;
    w0 * (1.0 + (z / zr).powi(2)).sqrt()
}

/// `1/e²` intensity radius from the second moment along x: `w = 2 √⟨x²⟩`.
pub fn second_moment_width(field: &ComplexField) -> f64 {
    let g = field.grid();
    let (mut m0, mut m2) = (0.0, 0.0);
    for iy in 0..g.ny() {
        for ix in 0..g.nx() {
            let i = field.at(ix, iy).norm_sqr();
            m0 += i;
            m2 += i * g.x(ix).powi(2);
        }
    }
    2.0 * (m2 / m0).sqrt()
}

/// Brute-force quadrature of the lens imaging integral at every output point.
pub fn direct_pump_image(object: &ComplexField, geom: &ImagingGeometry, out: &GridSpec) -> Vec<Complex64> {
    let g = object.grid();
    let (k3, d, f, d_f) = (geom.k3(), geom.d(), geom.focal_f(), geom.d_f());
    let area = g.pitch() * g.pitch();
    let mut result = Vec::with_capacity(out.len());
    for fy in 0..out.ny() {
        for fx in 0..out.nx() {
            let (xf, yf) = (out.x(fx), out.y(fy));
            let mut acc = Complex64::default();
            for oy in 0..g.ny() {
                for ox in 0..g.nx() {
                    let (xo, yo) = (g.x(ox), g.y(oy));
                    let phase = k3 / (2.0 * d) * (d_f - f) / f * (xo * xo + yo * yo) + k3 / d * (xf * xo + yf * yo);
                    acc += object.at(ox, oy) * Complex64::cis(phase);
                }
            }
            let pre = Complex64::new(0.0, -k3 / (2.0 * PI * d)) * Complex64::cis(k3 / (2.0 * d) * (xf * xf + yf * yf));
            result.push(pre * acc * area);
        }
    }
    result
}

/// `m(−x, −y)` translated by whole pixels `(sx, sy)` on the periodic grid.
pub fn inverted_shifted(map: &IntensityMap, sx: isize, sy: isize) -> Vec<f64> {
    let g = map.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let mut inv = vec![0.0; g.len()];
    for iy in 0..ny {
        for ix in 0..nx {
            inv[((ny - iy) % ny) * nx + (nx - ix) % nx] = map.at(ix, iy);
        }
    }
    roll(&inv, nx, ny, sx, sy)
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

/// Three 16-pixel discs on a 64×64, 16 µm grid, written out pixel by pixel.
pub fn three_hole_mask() -> IntensityMap {
    let g = GridSpec::new(64, 64, 16e-6).unwrap();
    let centers = [(-10.5, -7.5), (9.5, -7.5), (-0.5, 10.5)];
    let mut v = vec![0.0; g.len()];
    for iy in 0..64 {
        for ix in 0..64 {
            let (x, y) = (ix as f64 - 32.0, iy as f64 - 32.0);
            if centers.iter().any(|(cx, cy)| (x - cx).powi(2) + (y - cy).powi(2) < 64.0) {
                v[iy * 64 + ix] = 1.0;
            }
        }
    }
    IntensityMap::new(g, v).unwrap()
}

pub fn as_field(map: &IntensityMap, wavelength: f64) -> ComplexField {
    ComplexField::new(*map.grid(), wavelength, map.values().iter().map(|&v| Complex64::new(v, 0.0)).collect()).unwrap()
}

/// Deterministic pseudo-random complex field for property tests.
pub fn noise_field(grid: GridSpec, wavelength: f64, seed: u64) -> ComplexField {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let data =
        (0..grid.len()).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    ComplexField::new(grid, wavelength, data).unwrap()
}
