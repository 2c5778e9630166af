use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use qpack_core::cqed::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Closed-form resonant Rabi solution of the two-level master equation.
/// With Bloch components (y, z) and `z = +1` in the ground state:
/// `y' = -g2 y - W z`, `z' = W y - g1 (z - 1)`, `W = 2 pi rate`.
/// The 2x2 exponential uses `exp(Mt) = e^{mu t} (cosh(nu t) I + sinh(nu t)/nu (M - mu I))`.
fn analytic_population(rate: f64, t1: f64, t2: f64, t: f64) -> f64 {
    let (g1, g2, w) = (1.0 / t1, 1.0 / t2, 2.0 * PI * rate);
    let m = [[-g2, -w], [w, -g1]];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    // steady state solves M s = -(0, g1)
    let ss = [(m[0][1] * g1) / det, (-m[0][0] * g1) / det];
    let u0 = [0.0 - ss[0], 1.0 - ss[1]];
    let mu = 0.5 * (m[0][0] + m[1][1]);
    let nu = Complex64::new(mu * mu - det, 0.0).sqrt();
    let nt = nu * t;
    let ch = nt.cosh();
    let sh_over = if nu.norm() > 0.0 { nt.sinh() / nu } else { Complex64::new(t, 0.0) };
    let e = (mu * t).exp();
    let z = e * (ch * u0[1] + sh_over * (m[1][0] * u0[0] + (m[1][1] - mu) * u0[1]));
    0.5 * (1.0 - (z.re + ss[1]))
}

#[test]
fn integrator_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let rate = rng.gen_range(0.5e6..20e6);
        let t1 = rng.gen_range(0.5e-6..50e-6);
        let t2 = rng.gen_range(0.1..2.0) * t1;
        let q = QubitSpec { f01: 5e9, t1, t2 };
        let d = DriveSpec::resonant(&q, rate, 10e-6);
        let times: Vec<f64> = (0..200).map(|i| i as f64 * 5e-6 / 199.0).collect();
        let tr = simulate_rabi(&q, &d, &times).unwrap();
        // error relative to the full population scale of the trace
        for (&t, &p) in times.iter().zip(&tr.excited_population) {
            let exact = analytic_population(rate, t1, t2, t);
            assert!((p - exact).abs() < 1e-4 * exact.abs().max(1e-2), "t={t} {p} vs {exact}");
            assert!((-1e-9..=1.0 + 1e-9).contains(&p));
        }
    }
}

#[test]
fn envelope_matches_coherence_constant() {
    let q = QubitSpec { f01: 5e9, t1: 3.47e-6, t2: 3.47e-6 };
    let d = DriveSpec::resonant(&q, 2e6, 5e-6);
    let times: Vec<f64> = (0..=500).map(|i| i as f64 * 10e-9).collect();
    let fit = fit_rabi(&simulate_rabi(&q, &d, &times).unwrap()).unwrap();
    assert!((fit.tau - q.rabi_decay_time()).abs() / q.rabi_decay_time() < 0.05, "{}", fit.tau);
}

#[test]
fn fit_round_trip_over_seeded_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let noise = Normal::new(0.0, 0.01).unwrap();
    for _ in 0..100 {
        let tau = rng.gen_range(2e-6..6e-6);
        let rate = rng.gen_range(1e6..5e6);
        let times: Vec<f64> = (0..400).map(|i| i as f64 * 12.5e-9).collect();
        let y: Vec<f64> = times
            .iter()
            .map(|&t| 0.5 - 0.5 * (-t / tau).exp() * (2.0 * PI * rate * t).cos() + noise.sample(&mut rng))
            .collect();
        let fit = fit_rabi(&RabiTrace::new(times, y).unwrap()).unwrap();
        assert!((fit.omega - rate).abs() / rate < 5e-3, "{rate} -> {}", fit.omega);
        assert!((fit.tau - tau).abs() / tau < 0.05, "{tau} -> {}", fit.tau);
    }
}

#[test]
fn time_rescaling_preserves_products() {
    let make = |scale: f64| {
        let times: Vec<f64> = (0..300).map(|i| scale * i as f64 * 10e-9).collect();
        let y = times
            .iter()
            .map(|&t| 0.5 - 0.4 * (-t / (scale * 2e-6)).exp() * (2.0 * PI * 3e6 / scale * t).cos())
            .collect();
        fit_rabi(&RabiTrace::new(times, y).unwrap()).unwrap()
    };
    let (a, b) = (make(1.0), make(2.0));
    assert!((a.omega * 1e-6 - b.omega * 2e-6).abs() < 1e-9);
    assert!((a.tau / 1e-6 - b.tau / 2e-6).abs() < 1e-6);
}

fn system(rate0: f64, rate1: f64, tau0: f64, tau1: f64) -> TwoQubitSystem {
    let q = QubitSpec { f01: 5e9, t1: 3.47e-6, t2: 3.47e-6 };
    TwoQubitSystem::from_conditional_rates(q, q, rate0, rate1, [tau0, tau1])
}

#[test]
fn calibration_agrees_with_brute_force_scan() {
    let s = system(1.0 / 0.35e-6, 1.5 / 0.35e-6, 1.0, 1.0);
    let cal = calibrate_cnot(&s, 1e-6).unwrap();
    // oracle: 0.01 ns scan over the same window
    let (mut best_t, mut best) = (0.0, -1.0);
    for i in 0..=100_000 {
        let t = i as f64 * 1e-11;
        let c = cnot_contrast(&s, t);
        if c > best + 1e-12 {
            best = c;
            best_t = t;
        }
    }
    assert!((cal.gate_time - best_t).abs() < 0.1e-9, "{} vs {best_t}", cal.gate_time);
    assert!((cal.gate_time - 350e-9).abs() / 350e-9 < 0.02);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gate_processes_are_physical(
        r0 in 1e6..6e6f64, r1 in 1e6..6e6f64, tau0 in 100e-9..5e-6f64, tau1 in 100e-9..5e-6f64, t in 10e-9..500e-9f64
    ) {
        let p = simulate_cnot_process(&system(r0, r1, tau0, tau1), t).unwrap();
        prop_assert!(p.trace_preservation_error() <= 1e-6);
        prop_assert!(p.choi_min_eigenvalue() >= -1e-6);
        let r = average_gate_fidelity(&p, &cnot_unitary()).unwrap();
        prop_assert!((r.average_fidelity - (4.0 * r.process_fidelity + 1.0) / 5.0).abs() < 1e-15);
        prop_assert!((0.0..=1.0 + 1e-9).contains(&r.average_fidelity));
    }

    #[test]
    fn single_qubit_processes_are_physical(t1 in 0.2e-6..20e-6f64, frac in 0.1..2.0f64, rate in 1e6..50e6f64) {
        let q = QubitSpec { f01: 5e9, t1, t2: frac * t1 };
        let p = simulate_single_qubit_process(&q, &DriveSpec::resonant(&q, rate, 40e-9)).unwrap();
        prop_assert!(p.trace_preservation_error() <= 1e-6);
        prop_assert!(p.choi_min_eigenvalue() >= -1e-6);
        let r = average_gate_fidelity(&p, &pauli_x_unitary()).unwrap();
        prop_assert!((r.average_fidelity - (2.0 * r.process_fidelity + 1.0) / 3.0).abs() < 1e-15);
    }
}
