use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::lindblad::Lindbladian;
use super::types::{DriveSpec, QubitSpec, RabiTrace};
use crate::error::{Error, Result};
use crate::lm::{minimize, LeastSquaresProblem, LmConfig};

type CMatrix = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub(crate) fn sigma_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
}

pub(crate) fn sigma_y() -> CMatrix {
    let i = Complex64::new(0.0, 1.0);
    CMatrix::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)])
}

pub(crate) fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)])
}

/// Basis order is (|0>, |1>), so `sigma_z |0> = |0>`.
pub(crate) fn qubit_lindbladian(qubit: &QubitSpec, drive: &DriveSpec) -> Lindbladian {
    let detuning = qubit.f01 - drive.drive_frequency;
    let h0 = sigma_z() * c(-PI * detuning);
    let h1 = sigma_x() * c(PI * drive.rabi_rate);
    let lower = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
    let mut jumps = Vec::new();
    let g1 = qubit.relaxation_rate();
    if g1 > 0.0 {
        jumps.push(lower * c(libm::sqrt(g1)));
    }
    let gphi = qubit.dephasing_rate();
    if gphi > 0.0 {
        jumps.push(sigma_z() * c(libm::sqrt(0.5 * gphi)));
    }
    Lindbladian::new(h0, h1, jumps)
}

/// Longest RK4 step used for a drive: 1/200 of the generalized Rabi period,
/// and at most `t2 / 50`.
pub fn rabi_step_limit(qubit: &QubitSpec, drive: &DriveSpec) -> f64 {
    let detuning = qubit.f01 - drive.drive_frequency;
    let rate = libm::hypot(drive.rabi_rate, detuning);
    let coherence = qubit.t2 / 50.0;
    if rate > 0.0 {
        (1.0 / (200.0 * rate)).min(coherence)
    } else {
        coherence
    }
}

/// Excited-state population of a qubit starting in |0> at `t = 0`.
pub fn simulate_rabi(qubit: &QubitSpec, drive: &DriveSpec, times: &[f64]) -> Result<RabiTrace> {
    qubit.validate()?;
    drive.validate()?;
    RabiTrace::new(times.to_vec(), alloc::vec![0.0; times.len()])?;
    let model = qubit_lindbladian(qubit, drive);
    let step = rabi_step_limit(qubit, drive);
    let envelope = |t: f64| drive.envelope_at(t);
    let mut rho = CMatrix::zeros(2, 2);
    rho[(0, 0)] = c(1.0);
    let mut now = 0.0;
    let mut pops = Vec::with_capacity(times.len());
    for &t in times {
        rho = model.evolve(&rho, now, t, step, &envelope);
        now = t;
        pops.push(rho[(1, 1)].re);
    }
    RabiTrace::new(times.to_vec(), pops)
}

/// `P(t) = amplitude * exp(-t / tau) * cos(2 pi omega t + phase) + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiFit {
    pub omega: f64,
    /// Infinite when the fit finds no decay.
    pub tau: f64,
    pub amplitude: f64,
    pub offset: f64,
    pub phase: f64,
    pub residual_rms: f64,
    pub converged: bool,
}

impl RabiFit {
    pub fn evaluate(&self, t: f64) -> f64 {
        self.amplitude * libm::exp(-t / self.tau) * libm::cos(2.0 * PI * self.omega * t + self.phase) + self.offset
    }
}

/// Parameters: [omega, decay rate 1/tau, amplitude, offset, phase].
struct RabiProblem<'a> {
    t: &'a [f64],
    y: &'a [f64],
    span: f64,
}

impl LeastSquaresProblem for RabiProblem<'_> {
    fn num_params(&self) -> usize {
        5
    }

    fn num_residuals(&self) -> usize {
        self.t.len()
    }

    fn residuals(&self, p: &[f64], out: &mut [f64]) {
        for (i, (&t, &y)) in self.t.iter().zip(self.y).enumerate() {
            out[i] = p[2] * libm::exp(-p[1] * t) * libm::cos(2.0 * PI * p[0] * t + p[4]) + p[3] - y;
        }
    }

    fn jacobian(&self, p: &[f64], out: &mut DMatrix<f64>) {
        for (i, &t) in self.t.iter().enumerate() {
            let e = libm::exp(-p[1] * t);
            let (s, co) = libm::sincos(2.0 * PI * p[0] * t + p[4]);
            out[(i, 0)] = -p[2] * e * s * 2.0 * PI * t;
            out[(i, 1)] = -t * p[2] * e * co;
            out[(i, 2)] = e * co;
            out[(i, 3)] = 1.0;
            out[(i, 4)] = -p[2] * e * s;
        }
    }

    fn is_feasible(&self, p: &[f64]) -> bool {
        p[0] > 0.0 && p[1] >= 0.0
    }

    fn step_scale(&self, index: usize, value: f64) -> f64 {
        match index {
            1 => 1.0 / self.span,
            3 | 4 => 1.0,
            _ => value.abs(),
        }
    }
}

fn fit_failure(msg: &str) -> Error {
    Error::FitFailure(alloc::string::String::from(msg))
}

/// Dominant frequency of the mean-subtracted trace and the complex
/// projection onto it. The spectrum is four times oversampled in frequency.
fn spectral_peak(t: &[f64], y: &[f64]) -> Option<(f64, Complex64)> {
    let n = t.len();
    let span = t[n - 1] - t[0];
    let bins = 2 * (n - 1);
    let project =
        |f: f64| -> Complex64 { t.iter().zip(y).map(|(&t, &y)| Complex64::from_polar(y, -2.0 * PI * f * t)).sum() };
    let mut mags = Vec::with_capacity(bins);
    let mut best = (0.0, 0.0);
    for j in 1..=bins {
        let f = j as f64 / (4.0 * span);
        let m = project(f).norm();
        mags.push(m);
        if m > best.1 {
            best = (f, m);
        }
    }
    mags.sort_by(f64::total_cmp);
    let median = mags[mags.len() / 2];
    let amplitude = 2.0 * best.1 / n as f64;
    if !(amplitude > 1e-9) || best.1 < 4.0 * median {
        return None;
    }
    Some((best.0, project(best.0)))
}

/// Per-period maxima of the centred trace, fitted as `ln peak = ln A - k t`.
fn envelope_guess(t: &[f64], y: &[f64], omega: f64) -> Option<(f64, f64)> {
    let period = 1.0 / omega;
    let mut peaks: Vec<(f64, f64)> = Vec::new();
    let mut window = 0usize;
    for (&ti, &yi) in t.iter().zip(y) {
        let w = libm::floor((ti - t[0]) / period) as usize;
        if w != window || peaks.is_empty() {
            window = w;
            peaks.push((ti, yi.abs()));
        } else if let Some(last) = peaks.last_mut() {
            if yi.abs() > last.1 {
                *last = (ti, yi.abs());
            }
        }
    }
    let pts: Vec<(f64, f64)> = peaks.into_iter().filter(|p| p.1 > 0.0).map(|(t, v)| (t, libm::log(v))).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some(((-slope).max(0.0), libm::exp(my - slope * mt)))
}

/// Damped-cosine fit of a Rabi trace. Needs at least three visible periods.
pub fn fit_rabi(trace: &RabiTrace) -> Result<RabiFit> {
    let (t, y) = (&trace.times[..], &trace.excited_population[..]);
    if t.len() < 8 {
        return Err(fit_failure("a Rabi fit needs at least 8 samples"));
    }
    let span = t[t.len() - 1] - t[0];
    let offset = y.iter().sum::<f64>() / y.len() as f64;
    let centred: Vec<f64> = y.iter().map(|v| v - offset).collect();
    let (omega, projection) = spectral_peak(t, &centred).ok_or_else(|| fit_failure("no dominant spectral peak"))?;
    if omega * span < 3.0 {
        return Err(fit_failure("fewer than three oscillation periods in the trace"));
    }
    let phase = projection.arg();
    let (rate, amplitude) =
        envelope_guess(t, &centred, omega).unwrap_or((1.0 / span, 2.0 * projection.norm() / t.len() as f64));

    let problem = RabiProblem { t, y, span };
    let out = minimize(&problem, &[omega, rate, amplitude, offset, phase], &LmConfig::default());
    let p = &out.params;
    let (mut amplitude, mut phase) = (p[2], p[4]);
    if amplitude < 0.0 {
        amplitude = -amplitude;
        phase += PI;
    }
    phase = libm::remainder(phase, 2.0 * PI);
    let tau = if p[1] > 0.0 { 1.0 / p[1] } else { f64::INFINITY };
    Ok(RabiFit {
        omega: p[0],
        tau,
        amplitude,
        offset: p[3],
        phase,
        residual_rms: libm::sqrt(2.0 * out.cost / t.len() as f64),
        converged: out.converged,
    })
}
