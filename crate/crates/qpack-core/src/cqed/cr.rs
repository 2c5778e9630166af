use alloc::vec::Vec;
use core::f64::consts::PI;

use super::types::{ControlState, RabiTrace, TwoQubitSystem};
use crate::error::{domain, Error, Result};

/// Minimum conditional contrast accepted as a CNOT.
pub const CONTRAST_THRESHOLD: f64 = 0.5;

const SCAN_STEP: f64 = 1e-9;
const REFINE_TOLERANCE: f64 = 0.1e-9;

/// Target excited population after driving the control for `t` with the
/// control held in `control`: `(1 - exp(-t/tau_c) cos(2 pi rate_c t)) / 2`.
pub fn target_population(system: &TwoQubitSystem, control: ControlState, t: f64) -> f64 {
    let rate = system.target_rate(control);
    let tau = system.coherence(control);
    0.5 * (1.0 - libm::exp(-t / tau) * libm::cos(2.0 * PI * rate * t))
}

pub fn simulate_cr(system: &TwoQubitSystem, control: ControlState, times: &[f64]) -> Result<RabiTrace> {
    system.validate()?;
    let pops: Vec<f64> = times.iter().map(|&t| target_population(system, control, t)).collect();
    RabiTrace::new(times.to_vec(), pops)
}

/// `|P(t; |1>) - P(t; |0>)|`.
pub fn cnot_contrast(system: &TwoQubitSystem, t: f64) -> f64 {
    (target_population(system, ControlState::One, t) - target_population(system, ControlState::Zero, t)).abs()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CnotCalibration {
    pub gate_time: f64,
    pub contrast: f64,
}

/// Earliest CR pulse length up to `t_max` reaching the largest conditional
/// contrast: a 1 ns scan followed by golden-section refinement to 0.1 ns.
pub fn calibrate_cnot(system: &TwoQubitSystem, t_max: f64) -> Result<CnotCalibration> {
    system.validate()?;
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(domain!("t_max must be positive, got {t_max}"));
    }
    let steps = libm::floor(t_max / SCAN_STEP + 1e-9) as usize;
    let scan: Vec<f64> = (0..=steps).map(|i| cnot_contrast(system, i as f64 * SCAN_STEP)).collect();
    let best = scan.iter().cloned().fold(0.0, f64::max);
    let index = scan.iter().position(|&v| v >= best - 1e-9).unwrap_or(0);
    let coarse = index as f64 * SCAN_STEP;

    let (mut lo, mut hi) = ((coarse - SCAN_STEP).max(0.0), (coarse + SCAN_STEP).min(t_max));
    let ratio = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (cnot_contrast(system, x1), cnot_contrast(system, x2));
    while hi - lo > REFINE_TOLERANCE {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = cnot_contrast(system, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = cnot_contrast(system, x2);
        }
    }
    let refined = 0.5 * (lo + hi);
    let (gate_time, contrast) = match cnot_contrast(system, refined) {
        c if c >= scan[index] => (refined, c),
        _ => (coarse, scan[index]),
    };
    if contrast < CONTRAST_THRESHOLD {
        return Err(Error::CalibrationFailure { best_time: gate_time, best_contrast: contrast });
    }
    Ok(CnotCalibration { gate_time, contrast })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cqed::types::QubitSpec;

    fn qubit() -> QubitSpec {
        QubitSpec { f01: 5e9, t1: 1e-3, t2: 1e-3 }
    }

    fn derived(coherence: [f64; 2]) -> TwoQubitSystem {
        TwoQubitSystem::from_conditional_rates(qubit(), qubit(), 1.0 / 0.35e-6, 1.5 / 0.35e-6, coherence)
    }

    #[test]
    fn no_conditional_term_gives_identical_traces() {
        let s = TwoQubitSystem { zx_rate: 0.0, ..derived([1e-6, 1e-6]) };
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 10e-9).collect();
        let a = simulate_cr(&s, ControlState::Zero, &times).unwrap();
        let b = simulate_cr(&s, ControlState::One, &times).unwrap();
        assert_eq!(a, b);
        assert!(matches!(calibrate_cnot(&s, 1e-6), Err(Error::CalibrationFailure { .. })));
    }

    #[test]
    fn conditional_populations_at_gate_time() {
        let s = derived([1.0, 1.0]);
        assert!(target_population(&s, ControlState::Zero, 350e-9) < 1e-6);
        assert!(target_population(&s, ControlState::One, 350e-9) > 1.0 - 1e-6);
    }

    #[test]
    fn calibration_finds_gate_time() {
        let cal = calibrate_cnot(&derived([1.0, 1.0]), 600e-9).unwrap();
        assert!((cal.gate_time - 350e-9).abs() < 0.1e-9, "{}", cal.gate_time);
        assert!(cal.contrast > 0.999);
    }

    #[test]
    fn faster_rates_halve_gate_time() {
        let s = derived([1.0, 1.0]);
        let fast = TwoQubitSystem { zx_rate: 2.0 * s.zx_rate, ix_rate: 2.0 * s.ix_rate, ..s };
        let a = calibrate_cnot(&s, 600e-9).unwrap().gate_time;
        let b = calibrate_cnot(&fast, 600e-9).unwrap().gate_time;
        assert!((b - 0.5 * a).abs() < 0.2e-9);
    }

    #[test]
    fn strong_decay_moves_the_optimum_earlier() {
        // with 750/340 ns the 350 ns point is below threshold; an earlier peak wins
        let s = derived([750e-9, 340e-9]);
        assert!(cnot_contrast(&s, 350e-9) < CONTRAST_THRESHOLD);
        let cal = calibrate_cnot(&s, 600e-9).unwrap();
        assert!(cal.gate_time < 300e-9);
    }
}
