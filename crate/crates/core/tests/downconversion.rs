mod common;

use chaotic_imaging::correlation::locate_image;
use chaotic_imaging::downconversion::{
    generate_shot_field, image_plane_intensity, CrystalConfig, DownconversionError, IntensityMode, PhaseMatchWeight,
    ShotSynthesizer,
};
use chaotic_imaging::optics::image_pump_2f2f;
use chaotic_imaging::source::{
    component_amplitude, draw_shot_amplitudes, fix_component_directions, ChaoticSeed, Direction, SourceConfig,
};
use chaotic_imaging::{ComplexField, IntensityMap};
use common::*;
use num_complex::Complex64;

fn crystal(pm: PhaseMatchWeight) -> CrystalConfig {
    CrystalConfig { length: 4e-3, g_eff: 25.0, pm_weight: pm, exact_gain: false }
}

fn pump() -> ComplexField {
    image_pump_2f2f(&as_field(&three_hole_mask(), L3), &paper_geometry()).unwrap()
}

fn source(n: usize) -> SourceConfig {
    SourceConfig { n_components: n, max_angle: 4e-3, amplitude_scale: 1.0, rng_seed: 21 }
}

fn directions(n: usize) -> Vec<Direction> {
    fix_component_directions(&source(n), pump().grid(), L1).unwrap()
}

/// `−s₂ k₁⊥ / k₂` in whole image pixels.
fn predicted_shift_px(d: Direction) -> (isize, isize) {
    let geom = paper_geometry();
    let u = d.unit_vector();
    let (k1, k2) = (geom.k1(), geom.k2());
    let to_px = |q: f64| (-geom.s2() * k1 * q / k2 / 16e-6).round() as isize;
    (to_px(u[0]), to_px(u[1]))
}

/// `(gL)² Σ |a_n|² |U_O(−x − shift_n)|²`.
fn incoherent_oracle(dirs: &[Direction], amps: &[Complex64], gl: f64) -> Vec<f64> {
    let mask = three_hole_mask();
    let sq = IntensityMap::new(*mask.grid(), mask.values().iter().map(|v| v * v).collect()).unwrap();
    let mut out = vec![0.0; sq.grid().len()];
    for (d, a) in dirs.iter().zip(amps) {
        let (sx, sy) = predicted_shift_px(*d);
        for (o, v) in out.iter_mut().zip(inverted_shifted(&sq, sx, sy)) {
            *o += gl * gl * a.norm_sqr() * v;
        }
    }
    out
}

fn amplitudes(n: usize, shot: u64) -> Vec<Complex64> {
    (0..n).map(|i| component_amplitude(&source(n), shot, i)).collect()
}

#[test]
fn single_component_has_no_interference() {
    let dirs = directions(1);
    let synth = ShotSynthesizer::new(&dirs, &pump(), &crystal(PhaseMatchWeight::Uniform), &paper_geometry()).unwrap();
    let a = amplitudes(1, 4);
    let coh = synth.intensity(&a, IntensityMode::Coherent).unwrap();
    let inc = synth.intensity(&a, IntensityMode::Incoherent).unwrap();
    assert!(rel_l2(coh.values(), inc.values()) < 1e-12);
}

#[test]
fn incoherent_sum_is_a_set_of_translated_object_images() {
    let dirs = directions(8);
    let synth = ShotSynthesizer::new(&dirs, &pump(), &crystal(PhaseMatchWeight::Uniform), &paper_geometry()).unwrap();
    let a = amplitudes(8, 0);
    let got = synth.intensity(&a, IntensityMode::Incoherent).unwrap();
    assert!(rel_l2(got.values(), &incoherent_oracle(&dirs, &a, 0.1)) < 1e-9);
}

#[test]
fn coherent_ensemble_mean_matches_incoherent_formula() {
    let dirs = directions(2);
    let synth = ShotSynthesizer::new(&dirs, &pump(), &crystal(PhaseMatchWeight::Uniform), &paper_geometry()).unwrap();
    let mut mean = vec![0.0; synth.image_grid().len()];
    let shots = 2000;
    for s in 0..shots {
        let map = synth.intensity(&amplitudes(2, s), IntensityMode::Coherent).unwrap();
        mean.iter_mut().zip(map.values()).for_each(|(m, v)| *m += v / shots as f64);
    }
    let oracle = incoherent_oracle(&dirs, &[Complex64::new(1.0, 0.0); 2], 0.1);
    let err = rel_l2(&mean, &oracle);
    assert!(err < 0.05, "{err}");
}

#[test]
fn axial_plane_wave_images_the_object() {
    let geom = paper_geometry();
    let seed = ChaoticSeed::plane_wave(Direction::AXIAL, Complex64::new(1.0, 0.0), L1);
    let gen = generate_shot_field(&seed, &pump(), &crystal(PhaseMatchWeight::Uniform), &geom).unwrap();
    let img = image_plane_intensity(&gen, &geom, IntensityMode::Coherent).unwrap();
    let mask = three_hole_mask();
    let ncc = pearson(img.values(), &inverted_shifted(&mask, 0, 0));
    assert!(ncc >= 0.99, "{ncc}");
    assert!((img.max() - 0.01).abs() < 1e-9);
}

#[test]
fn synthesizer_matches_generic_pipeline() {
    let geom = paper_geometry();
    let c = crystal(PhaseMatchWeight::Sinc);
    let dirs = directions(6);
    let synth = ShotSynthesizer::new(&dirs, &pump(), &c, &geom).unwrap();
    let seed = draw_shot_amplitudes(&dirs, &source(6), 9, L1);
    let gen = generate_shot_field(&seed, &pump(), &c, &geom).unwrap();
    let amps: Vec<Complex64> = seed.components.iter().map(|p| p.amplitude).collect();
    for mode in [IntensityMode::Coherent, IntensityMode::Incoherent] {
        let slow = image_plane_intensity(&gen, &geom, mode).unwrap();
        let fast = synth.intensity(&amps, mode).unwrap();
        assert!(rel_l2(fast.values(), slow.values()) < 1e-10);
    }
}

#[test]
fn global_phase_and_scale() {
    let dirs = directions(5);
    let synth = ShotSynthesizer::new(&dirs, &pump(), &crystal(PhaseMatchWeight::Uniform), &paper_geometry()).unwrap();
    let a = amplitudes(5, 2);
    let base = synth.intensity(&a, IntensityMode::Coherent).unwrap();
    let rotated: Vec<Complex64> = a.iter().map(|x| x * Complex64::cis(1.234)).collect();
    let scaled: Vec<Complex64> = a.iter().map(|x| x * 3.0).collect();
    assert!(rel_l2(synth.intensity(&rotated, IntensityMode::Coherent).unwrap().values(), base.values()) < 1e-12);
    let nine: Vec<f64> = base.values().iter().map(|v| 9.0 * v).collect();
    assert!(rel_l2(synth.intensity(&scaled, IntensityMode::Coherent).unwrap().values(), &nine) < 1e-12);
}

#[test]
fn each_component_lands_at_its_predicted_shift() {
    let dirs = directions(6);
    let synth = ShotSynthesizer::new(&dirs, &pump(), &crystal(PhaseMatchWeight::Uniform), &paper_geometry()).unwrap();
    let mask = three_hole_mask();
    let truth = IntensityMap::new(*synth.image_grid(), inverted_shifted(&mask, 0, 0)).unwrap();
    for (n, d) in dirs.iter().enumerate() {
        let mut a = vec![Complex64::default(); 6];
        a[n] = Complex64::new(1.0, 0.0);
        let img = synth.intensity(&a, IntensityMode::Coherent).unwrap();
        let (x, y) = locate_image(&img, &truth).unwrap();
        let (sx, sy) = predicted_shift_px(*d);
        let wrap = |v: isize| (v + 32).rem_euclid(64) - 32;
        assert_eq!(((x / 16e-6).round() as isize, (y / 16e-6).round() as isize), (wrap(sx), wrap(sy)));
        let info = synth.components()[n].shift;
        assert_eq!(((info.0 / 16e-6).round() as isize, (info.1 / 16e-6).round() as isize), (sx, sy));
    }
}

#[test]
fn sinc_weight_follows_axial_mismatch() {
    let geom = paper_geometry();
    let dirs = directions(10);
    let synth = ShotSynthesizer::new(&dirs, &pump(), &crystal(PhaseMatchWeight::Sinc), &geom).unwrap();
    for (info, d) in synth.components().iter().zip(&dirs) {
        let u = d.unit_vector();
        let (k1, k2, k3) = (geom.k1(), geom.k2(), geom.k3());
        let kt2 = k1 * k1 * (u[0] * u[0] + u[1] * u[1]);
        let dk = k3 - k1 * u[2] - (k2 * k2 - kt2).sqrt();
        let x = dk * 4e-3 / 2.0;
        let w = if x == 0.0 { 1.0 } else { (x.sin() / x).abs() };
        assert!((info.delta_kz - dk).abs() < 1e-12 * k3);
        assert!((info.coefficient.norm() - 0.1 * w).abs() < 1e-12);
    }
}

#[test]
fn exact_gain_reduces_to_linear_at_low_gain() {
    let geom = paper_geometry();
    let dirs = directions(4);
    let mut c = crystal(PhaseMatchWeight::Uniform);
    c.g_eff = 2.5;
    let lin = ShotSynthesizer::new(&dirs, &pump(), &c, &geom).unwrap();
    c.exact_gain = true;
    let exact = ShotSynthesizer::new(&dirs, &pump(), &c, &geom).unwrap();
    let a = amplitudes(4, 1);
    let (l, e) =
        (lin.intensity(&a, IntensityMode::Coherent).unwrap(), exact.intensity(&a, IntensityMode::Coherent).unwrap());
    // sinh(x)/x − 1 ≈ x²/6 with x = gL·|a₃| ≤ 0.01.
    let err = rel_l2(e.values(), l.values());
    assert!(err > 0.0 && err < 1e-4, "{err}");
}

#[test]
fn steep_components_are_refused() {
    let geom = paper_geometry();
    let k = std::f64::consts::TAU / L1;
    let steep = Direction::from_transverse(k * 6e-3, 0.0, k);
    let seed = ChaoticSeed::plane_wave(steep, Complex64::new(1.0, 0.0), L1);
    let gen = generate_shot_field(&seed, &pump(), &crystal(PhaseMatchWeight::Uniform), &geom).unwrap();
    assert_eq!(
        image_plane_intensity(&gen, &geom, IntensityMode::Coherent).unwrap_err(),
        DownconversionError::ImageOffGrid
    );
    assert_eq!(
        image_plane_intensity(&[], &geom, IntensityMode::Coherent).unwrap_err(),
        DownconversionError::NoComponents
    );
}

#[test]
fn component_maps_carry_seed_energy_and_conjugate_momentum() {
    let geom = paper_geometry();
    let p = pump();
    let dirs = directions(5);
    let seed = draw_shot_amplitudes(&dirs, &source(5), 3, L1);
    let gen = generate_shot_field(&seed, &p, &crystal(PhaseMatchWeight::Uniform), &geom).unwrap();
    for (g, c) in gen.iter().zip(&seed.components) {
        let expected = c.intensity() * 0.1 * 0.1 * p.energy();
        assert!((g.amplitude_map.energy() / expected - 1.0).abs() < 1e-12);
        assert!((g.k2[0] + c.kx()).abs() < 1e-9 && (g.k2[1] + c.ky()).abs() < 1e-9);
        assert!((g.k2.iter().map(|v| v * v).sum::<f64>().sqrt() / geom.k2() - 1.0).abs() < 1e-12);
    }
    let silent = ChaoticSeed {
        components: seed
            .components
            .iter()
            .map(|c| chaotic_imaging::source::PlaneWaveComponent::new(Complex64::default(), c.direction, L1))
            .collect(),
        ..seed.clone()
    };
    let gen = generate_shot_field(&silent, &p, &crystal(PhaseMatchWeight::Uniform), &geom).unwrap();
    assert!(gen.iter().all(|g| g.amplitude_map.data().iter().all(|v| *v == Complex64::default())));
}

#[test]
fn interference_survives_a_single_shot_but_not_phases_incoherently() {
    let dirs = directions(6);
    let synth = ShotSynthesizer::new(&dirs, &pump(), &crystal(PhaseMatchWeight::Uniform), &paper_geometry()).unwrap();
    let a = amplitudes(6, 5);
    let coh = synth.intensity(&a, IntensityMode::Coherent).unwrap();
    let inc = synth.intensity(&a, IntensityMode::Incoherent).unwrap();
    assert!(rel_l2(coh.values(), inc.values()) > 0.1);
    let twisted: Vec<Complex64> = a.iter().enumerate().map(|(n, x)| x * Complex64::cis(0.7 * n as f64 + 0.3)).collect();
    assert!(rel_l2(synth.intensity(&twisted, IntensityMode::Incoherent).unwrap().values(), inc.values()) < 1e-14);
}
