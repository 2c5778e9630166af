use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

type CMatrix = DMatrix<Complex64>;

/// Master-equation generator `H(t) = H0 + e(t) H1` with fixed collapse
/// operators (already scaled by the square root of their rates).
#[derive(Debug, Clone)]
pub struct Lindbladian {
    pub static_hamiltonian: CMatrix,
    pub drive_hamiltonian: CMatrix,
    collapse: Vec<CMatrix>,
    collapse_dag: Vec<CMatrix>,
    /// Sum of `L^dag L`.
    decay: CMatrix,
}

impl Lindbladian {
    pub fn new(static_hamiltonian: CMatrix, drive_hamiltonian: CMatrix, collapse: Vec<CMatrix>) -> Self {
        let n = static_hamiltonian.nrows();
        let collapse_dag: Vec<CMatrix> = collapse.iter().map(|l| l.adjoint()).collect();
        let mut decay = CMatrix::zeros(n, n);
        for (l, ld) in collapse.iter().zip(&collapse_dag) {
            decay += ld * l;
        }
        Self { static_hamiltonian, drive_hamiltonian, collapse, collapse_dag, decay }
    }

    pub fn dimension(&self) -> usize {
        self.static_hamiltonian.nrows()
    }

    /// `-i[H, rho] + sum_k L rho L^dag - 1/2 {L^dag L, rho}`.
    pub fn rhs(&self, drive: f64, rho: &CMatrix) -> CMatrix {
        let i = Complex64::new(0.0, 1.0);
        let h = &self.static_hamiltonian + &self.drive_hamiltonian * Complex64::new(drive, 0.0);
        let mut out = (&h * rho - rho * &h) * (-i);
        for (l, ld) in self.collapse.iter().zip(&self.collapse_dag) {
            out += l * rho * ld;
        }
        out -= (&self.decay * rho + rho * &self.decay) * Complex64::new(0.5, 0.0);
        out
    }

    /// Fixed-step RK4 from `t0` to `t1` with steps no longer than `max_step`.
    pub fn evolve<E: Fn(f64) -> f64>(&self, rho: &CMatrix, t0: f64, t1: f64, max_step: f64, envelope: &E) -> CMatrix {
        let span = t1 - t0;
        if span <= 0.0 {
            return rho.clone();
        }
        let steps = libm::ceil(span / max_step).max(1.0) as usize;
        let h = span / steps as f64;
        let c = |x: f64| Complex64::new(x, 0.0);
        let mut state = rho.clone();
        for k in 0..steps {
            let t = t0 + h * k as f64;
            let (e0, em, e1) = (envelope(t), envelope(t + 0.5 * h), envelope(t + h));
            let k1 = self.rhs(e0, &state);
            let k2 = self.rhs(em, &(&state + &k1 * c(0.5 * h)));
            let k3 = self.rhs(em, &(&state + &k2 * c(0.5 * h)));
            let k4 = self.rhs(e1, &(&state + &k3 * c(h)));
            state += (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(h / 6.0);
        }
        state
    }
}
