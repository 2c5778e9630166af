use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::lindblad::Lindbladian;
use super::rabi::{qubit_lindbladian, rabi_step_limit, sigma_x, sigma_y, sigma_z};
use super::types::{ControlState, DriveSpec, GateFidelityReport, QubitSpec, TwoQubitSystem};
use crate::error::{domain, Result};

type CMatrix = DMatrix<Complex64>;

/// Tolerance on trace preservation and Choi positivity.
pub const PHYSICALITY_TOLERANCE: f64 = 1e-6;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Normalized-free Pauli strings on `n` qubits, ordered I, X, Y, Z with the
/// first qubit most significant.
pub fn pauli_basis(qubits: usize) -> Vec<CMatrix> {
    let single = [CMatrix::identity(2, 2), sigma_x(), sigma_y(), sigma_z()];
    let mut basis = alloc::vec![CMatrix::identity(1, 1)];
    for _ in 0..qubits {
        basis = basis.iter().flat_map(|b| single.iter().map(move |p| b.kronecker(p))).collect();
    }
    basis
}

fn qubit_count(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(domain!("process dimension must be a power of two >= 2, got {dim}"));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Quantum channel in Pauli transfer form, `R_ij = tr(P_i L(P_j)) / d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessMatrix {
    dim: usize,
    ptm: DMatrix<f64>,
}

impl ProcessMatrix {
    pub fn from_ptm(dim: usize, ptm: DMatrix<f64>) -> Result<Self> {
        qubit_count(dim)?;
        if ptm.nrows() != dim * dim || ptm.ncols() != dim * dim {
            return Err(domain!("transfer matrix must be {0}x{0}", dim * dim));
        }
        Ok(Self { dim, ptm })
    }

    /// Transfer matrix of the linear map `channel` on `dim`-level operators.
    pub fn from_channel<F: Fn(&CMatrix) -> CMatrix>(dim: usize, channel: F) -> Result<Self> {
        let basis = pauli_basis(qubit_count(dim)?);
        let n = basis.len();
        let images: Vec<CMatrix> = basis.iter().map(&channel).collect();
        let ptm = DMatrix::from_fn(n, n, |i, j| (&basis[i] * &images[j]).trace().re / dim as f64);
        Ok(Self { dim, ptm })
    }

    pub fn from_unitary(u: &CMatrix) -> Result<Self> {
        if !u.is_square() {
            return Err(domain!("unitary must be square"));
        }
        let ud = u.adjoint();
        Self::from_channel(u.nrows(), |rho| u * rho * &ud)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        qubit_count(dim)?;
        Ok(Self { dim, ptm: DMatrix::identity(dim * dim, dim * dim) })
    }

    /// Every input goes to the maximally mixed state.
    pub fn depolarizing(dim: usize) -> Result<Self> {
        qubit_count(dim)?;
        let mut ptm = DMatrix::zeros(dim * dim, dim * dim);
        ptm[(0, 0)] = 1.0;
        Ok(Self { dim, ptm })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ptm(&self) -> &DMatrix<f64> {
        &self.ptm
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &ProcessMatrix) -> Result<Self> {
        if self.dim != next.dim {
            return Err(domain!("cannot compose processes of dimension {} and {}", self.dim, next.dim));
        }
        Ok(Self { dim: self.dim, ptm: &next.ptm * &self.ptm })
    }

    /// Largest deviation of the first row from `(1, 0, ..., 0)`.
    pub fn trace_preservation_error(&self) -> f64 {
        (0..self.ptm.ncols()).map(|j| (self.ptm[(0, j)] - if j == 0 { 1.0 } else { 0.0 }).abs()).fold(0.0, f64::max)
    }

    /// Unit-trace Choi matrix `sum_ij R_ij P_j^T (x) P_i / d^2`.
    pub fn choi(&self) -> CMatrix {
        let basis = pauli_basis(self.dim.trailing_zeros() as usize);
        let d2 = (self.dim * self.dim) as f64;
        let mut out = CMatrix::zeros(self.dim * self.dim, self.dim * self.dim);
        for (j, pj) in basis.iter().enumerate() {
            let pjt = pj.transpose();
            for (i, pi) in basis.iter().enumerate() {
                let r = self.ptm[(i, j)];
                if r != 0.0 {
                    out += pjt.kronecker(pi) * c(r / d2);
                }
            }
        }
        out
    }

    pub fn choi_min_eigenvalue(&self) -> f64 {
        self.choi().symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `tr(R_ideal^T R) / d^2`.
    pub fn process_fidelity(&self, ideal: &ProcessMatrix) -> f64 {
        self.ptm.component_mul(&ideal.ptm).sum() / (self.dim * self.dim) as f64
    }
}

/// Process and average fidelity against `ideal`, after checking that the
/// process is trace preserving and completely positive.
pub fn average_gate_fidelity(process: &ProcessMatrix, ideal: &CMatrix) -> Result<GateFidelityReport> {
    if ideal.nrows() != process.dim() || ideal.ncols() != process.dim() {
        return Err(domain!(
            "ideal gate is {}x{} but the process acts on dimension {}",
            ideal.nrows(),
            ideal.ncols(),
            process.dim()
        ));
    }
    let tp = process.trace_preservation_error();
    if tp > PHYSICALITY_TOLERANCE {
        return Err(domain!("process is not trace preserving (error {tp:.3e})"));
    }
    let min_eig = process.choi_min_eigenvalue();
    if min_eig < -PHYSICALITY_TOLERANCE {
        return Err(domain!("process is not completely positive (Choi eigenvalue {min_eig:.3e})"));
    }
    let target = ProcessMatrix::from_unitary(ideal)?;
    Ok(GateFidelityReport::from_process_fidelity(process.process_fidelity(&target), process.dim()))
}

/// Control is the first (most significant) qubit.
pub fn cnot_unitary() -> CMatrix {
    let mut u = CMatrix::zeros(4, 4);
    for (r, col) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        u[(r, col)] = c(1.0);
    }
    u
}

pub fn pauli_x_unitary() -> CMatrix {
    sigma_x()
}

fn evolve_basis(
    model: &Lindbladian,
    dim: usize,
    duration: f64,
    step: f64,
    envelope: &dyn Fn(f64) -> f64,
) -> Result<ProcessMatrix> {
    ProcessMatrix::from_channel(dim, |p| model.evolve(p, 0.0, duration, step, &envelope))
}

/// Single-qubit process generated by one drive pulse of length `drive.duration`.
pub fn simulate_single_qubit_process(qubit: &QubitSpec, drive: &DriveSpec) -> Result<ProcessMatrix> {
    qubit.validate()?;
    drive.validate()?;
    let model = qubit_lindbladian(qubit, drive);
    evolve_basis(&model, 2, drive.duration, rabi_step_limit(qubit, drive), &|t| drive.envelope_at(t))
}

fn projector(state: ControlState) -> CMatrix {
    let mut p = CMatrix::zeros(2, 2);
    p[(state.index(), state.index())] = c(1.0);
    p
}

/// `exp(-i angle X / 2)`.
fn x_rotation(angle: f64) -> CMatrix {
    let (s, co) = libm::sincos(0.5 * angle);
    let mut r = CMatrix::identity(2, 2) * c(co);
    r += sigma_x() * Complex64::new(0.0, -s);
    r
}

/// CR pulse of length `gate_time` on the effective IX/ZX model, with
/// conditional target depolarization at the state-dependent coherence
/// rates, followed by the ideal local rotations that turn the resulting
/// conditional X rotation into a CNOT.
pub fn simulate_cnot_process(system: &TwoQubitSystem, gate_time: f64) -> Result<ProcessMatrix> {
    system.validate()?;
    if !(gate_time >= 0.0 && gate_time.is_finite()) {
        return Err(domain!("gate time must be non-negative, got {gate_time}"));
    }
    let id = CMatrix::identity(2, 2);
    let zx_sign = system.zero_sign();
    let h = id.kronecker(&sigma_x()) * c(PI * system.ix_rate)
        + sigma_z().kronecker(&sigma_x()) * c(PI * zx_sign * 0.5 * system.zx_rate);
    let mut jumps = Vec::new();
    for state in [ControlState::Zero, ControlState::One] {
        let amp = c(libm::sqrt(0.25 / system.coherence(state)));
        for s in [sigma_x(), sigma_y(), sigma_z()] {
            jumps.push(projector(state).kronecker(&s) * amp);
        }
    }
    let model = Lindbladian::new(h, CMatrix::zeros(4, 4), jumps);

    let fastest = system.target_rate(ControlState::Zero).abs().max(system.target_rate(ControlState::One).abs());
    let shortest = system.target_t2_by_control_state[0].min(system.target_t2_by_control_state[1]);
    let step = if fastest > 0.0 { (1.0 / (200.0 * fastest)).min(shortest / 50.0) } else { shortest / 50.0 };
    let cr = evolve_basis(&model, 4, gate_time, step, &|_| 0.0)?;

    let theta0 = 2.0 * PI * system.target_rate(ControlState::Zero) * gate_time;
    let theta1 = 2.0 * PI * system.target_rate(ControlState::One) * gate_time;
    let chi = if libm::sin(0.5 * (theta1 - theta0)) >= 0.0 { 0.5 * PI } else { -0.5 * PI };
    let mut phase = CMatrix::identity(2, 2);
    phase[(1, 1)] = Complex64::from_polar(1.0, chi);
    let correction = ProcessMatrix::from_unitary(&phase.kronecker(&x_rotation(-theta0)))?;
    cr.then(&correction)
}
