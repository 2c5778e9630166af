use std::f64::consts::PI;

use qpack_core::em::FrequencyGrid;
use qpack_core::resonator::*;
use qpack_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn random_model(rng: &mut ChaCha8Rng) -> NotchResonanceModel {
    let qi = 10f64.powf(rng.gen_range(3.0..6.0));
    let qc = qi * 10f64.powf(rng.gen_range(-0.5..0.5));
    let mut m = NotchResonanceModel::from_internal(rng.gen_range(3e9..8e9), qi, qc);
    m.phi = rng.gen_range(-0.5..0.5);
    m.amplitude = rng.gen_range(0.2..2.0);
    m.phase_offset = rng.gen_range(-PI..PI);
    m.cable_delay = rng.gen_range(0.0..60e-9);
    // keep Qi fixed under the asymmetry: cos(phi) / |Qc| = 1 / qc
    m.q_coupling_mag = qc * m.phi.cos();
    m
}

fn grid_for(m: &NotchResonanceModel, points: usize) -> FrequencyGrid {
    let lw = m.linewidth();
    FrequencyGrid::linspace(m.f0 - 10.0 * lw, m.f0 + 10.0 * lw, points).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn noiseless_round_trip_recovers_every_parameter() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..40 {
        let m = random_model(&mut rng);
        let qi = qi_from_fit(&m).unwrap();
        let grid = grid_for(&m, 201);
        let fit = fit_resonance(&model_s21(&m, &grid), &grid).unwrap();
        let g = fit.model;
        let span = grid.points()[200] - grid.points()[0];
        assert!(rel(g.f0, m.f0) < 1e-6, "{m:?}");
        assert!(rel(g.q_loaded, m.q_loaded) < 5e-3, "{m:?} -> {g:?}");
        assert!(rel(g.q_coupling_mag, m.q_coupling_mag) < 5e-3);
        assert!(rel(g.amplitude, m.amplitude) < 5e-3);
        assert!(rel(fit.q_internal, qi) < 5e-3);
        assert!((g.phi - m.phi).abs() < 5e-3);
        let dphase = (g.phase_offset - m.phase_offset + PI).rem_euclid(2.0 * PI) - PI;
        assert!(dphase.abs() < 5e-3);
        // delay is resolved relative to the inverse span of the sweep
        assert!((g.cable_delay - m.cable_delay).abs() * 2.0 * PI * span < 5e-3);
    }
}

#[test]
fn noisy_round_trip_keeps_qi_within_ten_percent() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let m = random_model(&mut rng);
        let qi = qi_from_fit(&m).unwrap();
        let grid = grid_for(&m, 401);
        let noise = Normal::new(0.0, 0.01 * m.amplitude).unwrap();
        let trace: Vec<Complex64> = model_s21(&m, &grid)
            .into_iter()
            .map(|s| s + Complex64::new(noise.sample(&mut rng), noise.sample(&mut rng)))
            .collect();
        let fit = fit_resonance(&trace, &grid).unwrap();
        worst = worst.max(rel(fit.q_internal, qi));
    }
    assert!(worst < 0.10, "worst Qi error {worst}");
}

#[test]
fn invariant_under_global_phase_and_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let m = random_model(&mut rng);
        let grid = grid_for(&m, 201);
        let base = model_s21(&m, &grid);
        let reference = fit_resonance(&base, &grid).unwrap().q_internal;
        let rot = Complex64::from_polar(rng.gen_range(0.1..10.0), rng.gen_range(-PI..PI));
        let moved: Vec<Complex64> = base.iter().map(|s| s * rot).collect();
        let q = fit_resonance(&moved, &grid).unwrap().q_internal;
        assert!(rel(q, reference) < 1e-3);
    }
}

#[test]
fn qi_monotone_in_loaded_q() {
    let base = NotchResonanceModel::from_internal(5e9, 50_000.0, 30_000.0);
    let mut prev = f64::INFINITY;
    for ql in [18_000.0, 15_000.0, 12_000.0, 9_000.0] {
        let qi = qi_from_fit(&NotchResonanceModel { q_loaded: ql, ..base }).unwrap();
        assert!(qi < prev);
        prev = qi;
    }
}
