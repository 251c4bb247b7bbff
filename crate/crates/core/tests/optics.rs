mod common;

use chaotic_imaging::optics::{fresnel_transform, image_pump_2f2f, propagate_free, OpticsError};
use chaotic_imaging::{ComplexField, GridSpec, ImagingGeometry};
use common::*;
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn gaussian_beam_width_follows_analytic_law() {
    let grid = GridSpec::new(256, 256, 10e-6).unwrap();
    let w0 = 6.0 * grid.pitch();
    let beam =
        ComplexField::from_fn(grid, L1, |x, y| Complex64::new((-(x * x + y * y) / (w0 * w0)).exp(), 0.0)).unwrap();
    let zr = std::f64::consts::PI * w0 * w0 / L1;
    for step in 0..=8 {
        let z = 2.0 * zr * step as f64 / 8.0;
        let w = second_moment_width(&propagate_free(&beam, z).unwrap());
        let expected = gaussian_width(w0, z, L1);
        assert!((w / expected - 1.0).abs() < 0.01, "z = {z}: {w} vs {expected}");
    }
}

#[test]
fn propagation_conserves_energy() {
    let f = noise_field(GridSpec::new(64, 48, 12e-6).unwrap(), L1, 7);
    for z in [1e-4, 3e-3, -2e-3, 6e-3] {
        let e = propagate_free(&f, z).unwrap().energy();
        assert!((e / f.energy() - 1.0).abs() < 1e-10, "z = {z}");
    }
    let sq = noise_field(GridSpec::new(64, 64, 16e-6).unwrap(), L1, 8);
    let out = fresnel_transform(&sq, 0.125).unwrap();
    assert!((out.energy() / sq.energy() - 1.0).abs() < 1e-10);
}

#[test]
fn aliasing_distance_is_refused() {
    let f = noise_field(GridSpec::new(32, 32, 10e-6).unwrap(), L1, 1);
    let limit = 32.0 * 1e-10 / L1;
    assert!(propagate_free(&f, 0.99 * limit).is_ok());
    assert_eq!(propagate_free(&f, 1.01 * limit).unwrap_err(), OpticsError::Aliasing);
}

#[test]
fn pump_kernel_matches_direct_quadrature() {
    let geom = paper_geometry();
    let object = noise_field(GridSpec::new(32, 32, 16e-6).unwrap(), L3, 11);
    let fast = image_pump_2f2f(&object, &geom).unwrap();
    let pitch_f = L3 * geom.d() / (32.0 * 16e-6);
    assert!((fast.grid().pitch() / pitch_f - 1.0).abs() < 1e-12);
    let slow = direct_pump_image(&object, &geom, fast.grid());
    assert!(rel_l2_complex(fast.data(), &slow) < 1e-8);
}

#[test]
fn pump_kernel_checks_wavelength_and_shape() {
    let geom = paper_geometry();
    let wrong = noise_field(GridSpec::new(16, 16, 16e-6).unwrap(), L1, 1);
    assert!(matches!(image_pump_2f2f(&wrong, &geom), Err(OpticsError::WavelengthMismatch { .. })));
    let oblong = noise_field(GridSpec::new(16, 8, 16e-6).unwrap(), L3, 1);
    assert!(matches!(image_pump_2f2f(&oblong, &geom), Err(OpticsError::NonSquareGrid { .. })));
}

#[test]
fn point_object_gives_uniform_pump_modulus() {
    let grid = GridSpec::new(32, 32, 16e-6).unwrap();
    let mut delta = ComplexField::zeros(grid, L3).unwrap();
    delta.data_mut()[grid.index(16, 16)] = Complex64::new(1.0, 0.0);
    let out = image_pump_2f2f(&delta, &paper_geometry()).unwrap();
    let m0 = out.data()[0].norm();
    assert!(out.data().iter().all(|c| (c.norm() / m0 - 1.0).abs() < 1e-12));
}

#[test]
fn three_hole_pump_matches_direct_quadrature() {
    let geom = paper_geometry();
    let grid = GridSpec::new(32, 32, 16e-6).unwrap();
    let holes = [(-6.5, -4.5), (5.5, -4.5), (-0.5, 6.5)];
    let object = ComplexField::from_fn(grid, L3, |x, y| {
        let (px, py) = (x / 16e-6, y / 16e-6);
        let inside = holes.iter().any(|(cx, cy)| (px - cx).powi(2) + (py - cy).powi(2) < 16.0);
        Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
    })
    .unwrap();
    let fast = image_pump_2f2f(&object, &geom).unwrap();
    assert!(rel_l2_complex(fast.data(), &direct_pump_image(&object, &geom, fast.grid())) < 1e-8);
}

fn reflect(data: &[Complex64], n: usize) -> Vec<Complex64> {
    (0..n * n).map(|i| data[((n - i / n) % n) * n + (n - i % n) % n]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn propagation_is_invertible(seed in any::<u64>(), z in -5e-3f64..5e-3) {
        let f = noise_field(GridSpec::new(32, 16, 20e-6).unwrap(), L1, seed);
        let back = propagate_free(&propagate_free(&f, z).unwrap(), -z).unwrap();
        prop_assert!(rel_l2_complex(back.data(), f.data()) < 1e-9);
    }

    #[test]
    fn propagation_composes(seed in any::<u64>(), z1 in -2e-3f64..2e-3, z2 in -2e-3f64..2e-3) {
        let f = noise_field(GridSpec::new(16, 32, 20e-6).unwrap(), L1, seed);
        let two = propagate_free(&propagate_free(&f, z1).unwrap(), z2).unwrap();
        let one = propagate_free(&f, z1 + z2).unwrap();
        prop_assert!(rel_l2_complex(two.data(), one.data()) < 1e-9);
    }

    #[test]
    fn propagation_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), re in -3.0f64..3.0, im in -3.0f64..3.0, z in 0.0f64..5e-3) {
        let grid = GridSpec::new(16, 16, 20e-6).unwrap();
        let (a, b) = (noise_field(grid, L1, s1), noise_field(grid, L1, s2));
        let c = Complex64::new(re, im);
        let mix = ComplexField::new(grid, L1, a.data().iter().zip(b.data()).map(|(x, y)| c * x + y).collect()).unwrap();
        let (pa, pb) = (propagate_free(&a, z).unwrap(), propagate_free(&b, z).unwrap());
        let expected: Vec<Complex64> = pa.data().iter().zip(pb.data()).map(|(x, y)| c * x + y).collect();
        prop_assert!(rel_l2_complex(propagate_free(&mix, z).unwrap().data(), &expected) < 1e-12);
    }

    #[test]
    fn pump_imaging_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), re in -3.0f64..3.0, im in -3.0f64..3.0, d_f in 0.05f64..0.35) {
        let geom = ImagingGeometry::new(0.2, d_f, [L1, L1, L3]).unwrap();
        let grid = GridSpec::new(16, 16, 16e-6).unwrap();
        let (a, b) = (noise_field(grid, L3, s1), noise_field(grid, L3, s2));
        let c = Complex64::new(re, im);
        let mix = ComplexField::new(grid, L3, a.data().iter().zip(b.data()).map(|(x, y)| c * x + y).collect()).unwrap();
        let (pa, pb) = (image_pump_2f2f(&a, &geom).unwrap(), image_pump_2f2f(&b, &geom).unwrap());
        let expected: Vec<Complex64> = pa.data().iter().zip(pb.data()).map(|(x, y)| c * x + y).collect();
        prop_assert!(rel_l2_complex(image_pump_2f2f(&mix, &geom).unwrap().data(), &expected) < 1e-12);
    }

    #[test]
    fn focal_placement_gives_an_exact_fourier_transform(seed in any::<u64>()) {
        // With d_F = f the object chirp vanishes; a real even object then has a
        // real spectrum behind the output chirp and the factor 1/i.
        let n = 16;
        let geom = ImagingGeometry::new(0.2, 0.2, [L1, L1, L3]).unwrap();
        let raw = noise_field(GridSpec::new(n, n, 16e-6).unwrap(), L3, seed);
        let flipped = reflect(raw.data(), n);
        let even: Vec<Complex64> = raw.data().iter().zip(&flipped).map(|(a, b)| Complex64::new(a.re + b.re, 0.0)).collect();
        let object = ComplexField::new(*raw.grid(), L3, even).unwrap();
        let out = image_pump_2f2f(&object, &geom).unwrap();
        let g = out.grid();
        let b = geom.k3() / (2.0 * geom.d());
        let scale = out.data().iter().map(|c| c.norm()).fold(0.0, f64::max);
        for iy in 0..n {
            for ix in 0..n {
                let core = out.at(ix, iy) * Complex64::i() * Complex64::cis(-b * (g.x(ix).powi(2) + g.y(iy).powi(2)));
                prop_assert!(core.im.abs() < 1e-12 * scale);
            }
        }
        let out_flipped = reflect(out.data(), n);
        prop_assert!(rel_l2_complex(&out_flipped, out.data()) < 1e-12);
    }
}
