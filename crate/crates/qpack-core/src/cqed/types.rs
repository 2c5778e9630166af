use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{domain, Result};

/// Bare transmon parameters. `t2` includes the relaxation contribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitSpec {
    pub f01: f64,
    pub t1: f64,
    pub t2: f64,
}

impl QubitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.f01 > 0.0 && self.f01.is_finite()) {
            return Err(domain!("qubit frequency must be positive, got {}", self.f01));
        }
        if !(self.t1 > 0.0 && self.t2 > 0.0) {
            return Err(domain!("coherence times must be positive (t1={}, t2={})", self.t1, self.t2));
        }
        if self.t2 > 2.0 * self.t1 {
            return Err(domain!("t2 = {} exceeds 2 t1 = {}", self.t2, 2.0 * self.t1));
        }
        Ok(())
    }

    pub fn relaxation_rate(&self) -> f64 {
        if self.t1.is_finite() {
            1.0 / self.t1
        } else {
            0.0
        }
    }

    /// Pure dephasing rate `1/t2 - 1/(2 t1)`.
    pub fn dephasing_rate(&self) -> f64 {
        let g2 = if self.t2.is_finite() { 1.0 / self.t2 } else { 0.0 };
        (g2 - 0.5 * self.relaxation_rate()).max(0.0)
    }

    /// Decay constant of the Rabi envelope under strong resonant drive,
    /// `2 / (1/t1 + 1/t2)`.
    pub fn rabi_decay_time(&self) -> f64 {
        2.0 / (1.0 / self.t1 + 1.0 / self.t2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    Rectangular,
    /// Raised-cosine ramps of length `rise` at both ends of the pulse.
    Shaped {
        rise: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    /// Population oscillation frequency on resonance, Hz.
    pub rabi_rate: f64,
    pub drive_frequency: f64,
    /// The drive is on during `[0, duration]`.
    pub duration: f64,
    pub envelope: Envelope,
}

impl DriveSpec {
    pub fn resonant(qubit: &QubitSpec, rabi_rate: f64, duration: f64) -> Self {
        Self { rabi_rate, drive_frequency: qubit.f01, duration, envelope: Envelope::Rectangular }
    }

    /// Rectangular pulse of length `duration` whose area is a pi rotation.
    pub fn pi_pulse(qubit: &QubitSpec, duration: f64) -> Self {
        Self::resonant(qubit, 1.0 / (2.0 * duration), duration)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rabi_rate >= 0.0 && self.rabi_rate.is_finite()) {
            return Err(domain!("rabi rate must be non-negative, got {}", self.rabi_rate));
        }
        if !(self.duration >= 0.0) {
            return Err(domain!("drive duration must be non-negative, got {}", self.duration));
        }
        if let Envelope::Shaped { rise } = self.envelope {
            if !(rise > 0.0 && rise.is_finite()) {
                return Err(domain!("rise time must be positive, got {rise}"));
            }
        }
        Ok(())
    }

    /// Relative drive amplitude at time `t`, in [0, 1].
    pub fn envelope_at(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.duration {
            return 0.0;
        }
        match self.envelope {
            Envelope::Rectangular => 1.0,
            Envelope::Shaped { rise } => {
                let ramp = |x: f64| {
                    if x >= rise {
                        1.0
                    } else {
                        let s = libm::sin(0.5 * PI * x / rise);
                        s * s
                    }
                };
                ramp(t).min(ramp(self.duration - t))
            }
        }
    }
}

/// Excited-state population sampled at increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct RabiTrace {
    pub times: Vec<f64>,
    pub excited_population: Vec<f64>,
}

impl RabiTrace {
    pub fn new(times: Vec<f64>, excited_population: Vec<f64>) -> Result<Self> {
        if times.len() != excited_population.len() {
            return Err(domain!("{} times for {} populations", times.len(), excited_population.len()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(domain!("times must be non-negative and strictly increasing"));
        }
        if excited_population.iter().any(|p| !p.is_finite()) {
            return Err(domain!("non-finite population"));
        }
        Ok(Self { times, excited_population })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ControlState {
    Zero,
    One,
}

impl ControlState {
    pub fn index(self) -> usize {
        match self {
            ControlState::Zero => 0,
            ControlState::One => 1,
        }
    }
}

/// Which control state sees the slower target rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CrSignConvention {
    /// `rate(|0>) = ix - zx/2`, `rate(|1>) = ix + zx/2`.
    #[default]
    ControlZeroSlower,
    /// `rate(|0>) = ix + zx/2`, `rate(|1>) = ix - zx/2`.
    ControlZeroFaster,
}

/// Two transmons under a cross-resonance drive, described by the effective
/// IX and ZX rotation rates (Hz, as population oscillation frequencies).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitSystem {
    pub control: QubitSpec,
    pub target: QubitSpec,
    pub zx_rate: f64,
    pub ix_rate: f64,
    /// Target Rabi envelope decay constant for control in |0> and |1>.
    pub target_t2_by_control_state: [f64; 2],
    pub convention: CrSignConvention,
}

impl TwoQubitSystem {
    /// System whose target rotates at `rate0` / `rate1` for control |0> / |1>.
    pub fn from_conditional_rates(
        control: QubitSpec,
        target: QubitSpec,
        rate0: f64,
        rate1: f64,
        target_t2_by_control_state: [f64; 2],
    ) -> Self {
        let convention =
            if rate0 <= rate1 { CrSignConvention::ControlZeroSlower } else { CrSignConvention::ControlZeroFaster };
        Self {
            control,
            target,
            zx_rate: (rate1 - rate0).abs(),
            ix_rate: 0.5 * (rate0 + rate1),
            target_t2_by_control_state,
            convention,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.control.validate()?;
        self.target.validate()?;
        if !(self.zx_rate >= 0.0 && self.ix_rate >= 0.0 && self.zx_rate.is_finite() && self.ix_rate.is_finite()) {
            return Err(domain!("CR rates must be non-negative (zx={}, ix={})", self.zx_rate, self.ix_rate));
        }
        if self.target_t2_by_control_state.iter().any(|t| !(*t > 0.0)) {
            return Err(domain!("state-dependent coherence times must be positive"));
        }
        Ok(())
    }

    /// `+1` when control |0> gets `ix + zx/2`.
    pub(crate) fn zero_sign(&self) -> f64 {
        match self.convention {
            CrSignConvention::ControlZeroSlower => -1.0,
            CrSignConvention::ControlZeroFaster => 1.0,
        }
    }

    /// Signed target rotation rate for a control state.
    pub fn target_rate(&self, control: ControlState) -> f64 {
        let sign = match control {
            ControlState::Zero => self.zero_sign(),
            ControlState::One => -self.zero_sign(),
        };
        self.ix_rate + sign * 0.5 * self.zx_rate
    }

    pub fn coherence(&self, control: ControlState) -> f64 {
        self.target_t2_by_control_state[control.index()]
    }
}

/// Process and average gate fidelity of a channel against a target unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateFidelityReport {
    pub process_fidelity: f64,
    pub average_fidelity: f64,
    pub dimension: usize,
}

impl GateFidelityReport {
    pub fn from_process_fidelity(process_fidelity: f64, dimension: usize) -> Self {
        let d = dimension as f64;
        Self { process_fidelity, average_fidelity: (d * process_fidelity + 1.0) / (d + 1.0), dimension }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_validation() {
        let q = QubitSpec { f01: 5e9, t1: 1e-6, t2: 2e-6 };
        assert!(q.validate().is_ok());
        assert!(QubitSpec { t2: 2.1e-6, ..q }.validate().is_err());
        assert!(QubitSpec { t1: 0.0, ..q }.validate().is_err());
        assert_eq!(q.dephasing_rate(), 0.0);
    }

    #[test]
    fn shaped_envelope_ramps() {
        let d = DriveSpec {
            rabi_rate: 1e6,
            drive_frequency: 5e9,
            duration: 100e-9,
            envelope: Envelope::Shaped { rise: 10e-9 },
        };
        assert_eq!(d.envelope_at(0.0), 0.0);
        assert!((d.envelope_at(5e-9) - 0.5).abs() < 1e-12);
        assert_eq!(d.envelope_at(50e-9), 1.0);
        assert!((d.envelope_at(95e-9) - 0.5).abs() < 1e-9);
        assert_eq!(d.envelope_at(101e-9), 0.0);
    }

    #[test]
    fn conditional_rates_round_trip() {
        let q = QubitSpec { f01: 5e9, t1: 1e-3, t2: 1e-3 };
        let s = TwoQubitSystem::from_conditional_rates(q, q, 2.857e6, 4.286e6, [1.0, 1.0]);
        assert_eq!(s.convention, CrSignConvention::ControlZeroSlower);
        assert!((s.target_rate(ControlState::Zero) - 2.857e6).abs() < 1e-6);
        assert!((s.target_rate(ControlState::One) - 4.286e6).abs() < 1e-6);
        let f = TwoQubitSystem::from_conditional_rates(q, q, 4.0e6, 3.0e6, [1.0, 1.0]);
        assert!((f.target_rate(ControlState::Zero) - 4.0e6).abs() < 1e-6);
    }

    #[test]
    fn affine_fidelity_law() {
        let r = GateFidelityReport::from_process_fidelity(1.0 / 16.0, 4);
        assert!((r.average_fidelity - 0.25).abs() < 1e-15);
    }
}
