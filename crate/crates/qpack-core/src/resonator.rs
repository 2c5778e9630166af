//! Notch-type (hanger) resonator transmission and internal quality factor
//! extraction.
//!
//! The model is the diameter-corrected notch response with a complex
//! environment factor:
//!
//! ```text
//! S21(f) = a e^{i alpha} e^{-2 pi i f tau} [1 - (Ql/|Qc|) e^{i phi} / (1 + 2 i Ql (f/f0 - 1))]
//! ```
//!
//! `phi` rotates the resonance circle to absorb impedance mismatch around the
//! resonator, and the internal quality factor follows from
//! `1/Qi = 1/Ql - cos(phi)/|Qc|`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::em::FrequencyGrid;
use crate::error::{domain, Error, Result};
use crate::lm::{self, LeastSquaresProblem, LmConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotchResonanceModel {
    pub f0: f64,
    pub q_loaded: f64,
    pub q_coupling_mag: f64,
    /// Impedance-mismatch rotation, radians.
    pub phi: f64,
    pub amplitude: f64,
    /// Global phase of the environment, radians.
    pub phase_offset: f64,
    /// Electrical delay of the measurement lines, seconds.
    pub cable_delay: f64,
}

/// Names of the fitted parameters, in the order used by [`ResonanceFit::covariance_diag`].
pub const PARAMETER_NAMES: [&str; 7] =
    ["f0", "q_loaded", "q_coupling_mag", "phi", "amplitude", "phase_offset", "cable_delay"];

impl NotchResonanceModel {
    /// Model with a matched environment (`phi = 0`, unit amplitude, no delay)
    /// whose coupling is chosen so that the internal quality factor is `q_internal`.
    pub fn from_internal(f0: f64, q_internal: f64, q_coupling: f64) -> Self {
        let q_loaded = 1.0 / (1.0 / q_internal + 1.0 / q_coupling);
        Self { f0, q_loaded, q_coupling_mag: q_coupling, phi: 0.0, amplitude: 1.0, phase_offset: 0.0, cable_delay: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("f0", self.f0),
            ("q_loaded", self.q_loaded),
            ("q_coupling_mag", self.q_coupling_mag),
            ("amplitude", self.amplitude),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain!("{name} must be positive, got {v}"));
            }
        }
        if !(self.phi.is_finite() && self.phase_offset.is_finite() && self.cable_delay.is_finite()) {
            return Err(domain!("non-finite phase or delay"));
        }
        Ok(())
    }

    pub fn s21(&self, f: f64) -> Complex64 {
        let env = Complex64::from_polar(self.amplitude, self.phase_offset - TAU * f * self.cable_delay);
        env * self.resonance(f)
    }

    fn resonance(&self, f: f64) -> Complex64 {
        let x = f / self.f0 - 1.0;
        let coupling = Complex64::from_polar(self.q_loaded / self.q_coupling_mag, self.phi);
        Complex64::new(1.0, 0.0) - coupling / Complex64::new(1.0, 2.0 * self.q_loaded * x)
    }

    /// Full width of the dip at half depth (in power), `f0 / Ql`.
    pub fn linewidth(&self) -> f64 {
        self.f0 / self.q_loaded
    }
}

pub fn model_s21(model: &NotchResonanceModel, grid: &FrequencyGrid) -> Vec<Complex64> {
    grid.points().iter().map(|&f| model.s21(f)).collect()
}

/// Internal quality factor from `1/Qi = 1/Ql - cos(phi)/|Qc|`.
pub fn qi_from_fit(model: &NotchResonanceModel) -> Result<f64> {
    model.validate()?;
    let inv = 1.0 / model.q_loaded - libm::cos(model.phi) / model.q_coupling_mag;
    if inv <= 0.0 {
        return Err(domain!(
            "over-coupled inconsistency: 1/Ql = {:e} <= cos(phi)/|Qc| = {:e}",
            1.0 / model.q_loaded,
            libm::cos(model.phi) / model.q_coupling_mag
        ));
    }
    Ok(1.0 / inv)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceFit {
    pub model: NotchResonanceModel,
    pub q_internal: f64,
    /// RMS magnitude of the complex residual, in units of S21.
    pub residual_rms: f64,
    /// Variance estimates ordered as [`PARAMETER_NAMES`].
    pub covariance_diag: [f64; 7],
    pub iterations: usize,
    pub converged: bool,
}

/// Residual problem in the parameter vector
/// `[f0, Ql, |Qc|, phi, a, alpha_ref, tau]`, where `alpha_ref` is the
/// environment phase at the grid center. Referencing the phase to the center
/// decouples it from the delay.
struct NotchProblem<'a> {
    freqs: &'a [f64],
    data: &'a [Complex64],
    f_ref: f64,
    delay_scale: f64,
}

impl NotchProblem<'_> {
    fn model(&self, p: &[f64]) -> NotchResonanceModel {
        NotchResonanceModel {
            f0: p[0],
            q_loaded: p[1],
            q_coupling_mag: p[2],
            phi: p[3],
            amplitude: p[4],
            phase_offset: wrap_phase(p[5] + TAU * self.f_ref * p[6]),
            cable_delay: p[6],
        }
    }

    fn environment(&self, p: &[f64], f: f64) -> Complex64 {
        Complex64::from_polar(p[4], p[5] - TAU * (f - self.f_ref) * p[6])
    }
}

impl LeastSquaresProblem for NotchProblem<'_> {
    fn num_params(&self) -> usize {
        7
    }

    fn num_residuals(&self) -> usize {
        2 * self.freqs.len()
    }

    fn residuals(&self, p: &[f64], out: &mut [f64]) {
        let shape = NotchResonanceModel { amplitude: 1.0, phase_offset: 0.0, cable_delay: 0.0, ..self.model(p) };
        for (i, (&f, &d)) in self.freqs.iter().zip(self.data).enumerate() {
            let r = self.environment(p, f) * shape.resonance(f) - d;
            out[2 * i] = r.re;
            out[2 * i + 1] = r.im;
        }
    }

    fn jacobian(&self, p: &[f64], out: &mut DMatrix<f64>) {
        let (f0, ql, qc, phi) = (p[0], p[1], p[2], p[3]);
        let i = Complex64::new(0.0, 1.0);
        for (row, &f) in self.freqs.iter().enumerate() {
            let env = self.environment(p, f);
            let x = f / f0 - 1.0;
            let den = Complex64::new(1.0, 2.0 * ql * x);
            let g = Complex64::from_polar(ql / qc, phi);
            let frac = g / den;
            let s = env * (Complex64::new(1.0, 0.0) - frac);
            let d_f0 = env * frac / den * i * (-2.0 * ql * f / (f0 * f0));
            let d_ql = -env * (frac / ql - frac / den * i * (2.0 * x));
            let d_qc = env * frac / qc;
            let d_phi = -env * i * frac;
            let d_a = s / p[4];
            let d_alpha = i * s;
            let d_tau = -i * TAU * (f - self.f_ref) * s;
            for (col, d) in [d_f0, d_ql, d_qc, d_phi, d_a, d_alpha, d_tau].into_iter().enumerate() {
                out[(2 * row, col)] = d.re;
                out[(2 * row + 1, col)] = d.im;
            }
        }
    }

    fn is_feasible(&self, p: &[f64]) -> bool {
        p[0] > 0.0 && p[1] > 0.0 && p[2] > 0.0 && p[4] > 0.0
    }

    fn step_scale(&self, index: usize, value: f64) -> f64 {
        match index {
            3 | 5 => 1.0,
            6 => self.delay_scale,
            _ => value.abs(),
        }
    }
}

fn wrap_phase(x: f64) -> f64 {
    let y = libm::remainder(x, TAU);
    if y <= -PI {
        y + TAU
    } else {
        y
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Indices of the outer tenth of the sweep on both sides.
fn wing_indices(n: usize) -> Vec<usize> {
    let w = (n / 10).max(1);
    (0..w).chain(n - w..n).collect()
}

fn unwrap(phases: &mut [f64]) {
    for k in 1..phases.len() {
        let jump = phases[k] - phases[k - 1];
        phases[k] -= TAU * libm::round(jump / TAU);
    }
}

/// Least-squares line `y = slope * x + intercept`.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// Deterministic starting point: f0 at the magnitude minimum, amplitude from
/// the median of the wings, Ql from the half-depth width, environment phase
/// and delay from a line through the unwrapped wing phase, and |Qc|, phi from
/// the normalized dip.
fn initial_guess(freqs: &[f64], data: &[Complex64], f_ref: f64) -> Result<[f64; 7]> {
    let n = freqs.len();
    let mags: Vec<f64> = data.iter().map(|s| s.norm()).collect();
    let wings = wing_indices(n);
    let amplitude = median(wings.iter().map(|&i| mags[i]).collect());

    let (imin, min_mag) = mags
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::FitFailure("empty trace".into()))?;

    // noise floor from sample-to-sample scatter in the wings
    let w = (n / 10).max(2).min(n);
    let diffs: Vec<f64> =
        (1..w).map(|k| mags[k] - mags[k - 1]).chain((n - w + 1..n).map(|k| mags[k] - mags[k - 1])).collect();
    let noise = if diffs.is_empty() {
        0.0
    } else {
        libm::sqrt(diffs.iter().map(|d| d * d).sum::<f64>() / (2.0 * diffs.len() as f64))
    };
    let depth = amplitude - min_mag;
    if !(amplitude > 0.0) || depth <= 3.0 * noise || depth <= 1e-6 * amplitude {
        return Err(Error::FitFailure(format!("no resonance dip: depth {depth:.3e} against noise floor {noise:.3e}")));
    }

    let half_power = 0.5 * (amplitude * amplitude + min_mag * min_mag);
    let crossing = |range: &mut dyn Iterator<Item = usize>| -> Option<f64> {
        let mut prev = imin;
        for k in range {
            if mags[k] * mags[k] >= half_power {
                let (p0, p1) = (mags[prev] * mags[prev], mags[k] * mags[k]);
                let t = if p1 > p0 { (half_power - p0) / (p1 - p0) } else { 0.0 };
                return Some(freqs[prev] + t * (freqs[k] - freqs[prev]));
            }
            prev = k;
        }
        None
    };
    let f0 = freqs[imin];
    let left = crossing(&mut (0..imin).rev());
    let right = crossing(&mut (imin + 1..n));
    let half_width = match (left, right) {
        (Some(l), Some(r)) => 0.5 * (r - l),
        (Some(l), None) => f0 - l,
        (None, Some(r)) => r - f0,
        (None, None) => 0.5 * (freqs[n - 1] - freqs[0]),
    };
    let min_step = freqs.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let q_loaded = f0 / (2.0 * half_width.max(0.5 * min_step));

    let mut phase: Vec<f64> = data.iter().map(|s| s.arg()).collect();
    unwrap(&mut phase);
    let wx: Vec<f64> = wings.iter().map(|&i| freqs[i] - f_ref).collect();
    let wy: Vec<f64> = wings.iter().map(|&i| phase[i]).collect();
    let (slope, intercept) = linear_fit(&wx, &wy);
    let delay = -slope / TAU;
    let alpha_ref = wrap_phase(intercept);

    let env = Complex64::from_polar(amplitude, alpha_ref - TAU * (f0 - f_ref) * delay);
    let dip = Complex64::new(1.0, 0.0) - data[imin] / env;
    let ratio = dip.norm();
    if !(ratio > 0.0) {
        return Err(Error::FitFailure("degenerate dip".into()));
    }
    Ok([f0, q_loaded, q_loaded / ratio, dip.arg(), amplitude, alpha_ref, delay])
}

/// Fits the notch model to a complex transmission trace.
///
/// Needs at least seven samples spanning the dip. A trace without a dip that
/// clears three times the wing noise floor is a [`Error::FitFailure`]; an
/// iteration budget running out is reported through
/// [`ResonanceFit::converged`] with the best point found.
pub fn fit_resonance(trace: &[Complex64], grid: &FrequencyGrid) -> Result<ResonanceFit> {
    fit_resonance_with(trace, grid, &LmConfig::default())
}

pub fn fit_resonance_with(trace: &[Complex64], grid: &FrequencyGrid, config: &LmConfig) -> Result<ResonanceFit> {
    let freqs = grid.points();
    if trace.len() != freqs.len() {
        return Err(domain!("{} samples for {} frequencies", trace.len(), freqs.len()));
    }
    if freqs.len() < 7 {
        return Err(Error::FitFailure(format!("need at least 7 samples, got {}", freqs.len())));
    }
    if trace.iter().any(|s| !(s.re.is_finite() && s.im.is_finite())) {
        return Err(domain!("trace contains non-finite samples"));
    }
    let span = freqs[freqs.len() - 1] - freqs[0];
    let f_ref = 0.5 * (freqs[0] + freqs[freqs.len() - 1]);
    let problem = NotchProblem { freqs, data: trace, f_ref, delay_scale: 1.0 / (TAU * span) };
    let start = initial_guess(freqs, trace, f_ref)?;
    let outcome = lm::minimize(&problem, &start, config);

    let model = problem.model(&outcome.params);
    let q_internal = qi_from_fit(&model)?;
    let mut residuals = vec![0.0; problem.num_residuals()];
    problem.residuals(&outcome.params, &mut residuals);
    let residual_rms = libm::sqrt(residuals.iter().map(|r| r * r).sum::<f64>() / freqs.len() as f64);
    let mut covariance_diag = [0.0; 7];
    covariance_diag.copy_from_slice(&outcome.variances);
    // the phase offset is reported at f = 0, so its variance picks up the delay term
    covariance_diag[5] += (TAU * f_ref) * (TAU * f_ref) * outcome.variances[6];

    Ok(ResonanceFit {
        model,
        q_internal,
        residual_rms,
        covariance_diag,
        iterations: outcome.iterations,
        converged: outcome.converged,
    })
}
