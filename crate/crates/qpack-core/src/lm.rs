//! Damped least squares (Levenberg-Marquardt) for small dense problems.
//!
//! Minimizes `0.5 * |r(p)|^2` for a residual vector `r` with an analytic
//! Jacobian. The damping term is scaled by `diag(J^T J)` (Marquardt's
//! variant), which makes the iteration insensitive to the very different
//! magnitudes of physical parameters such as a 5 GHz resonance frequency next
//! to a nanosecond cable delay.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

pub trait LeastSquaresProblem {
    fn num_params(&self) -> usize;

    fn num_residuals(&self) -> usize;

    fn residuals(&self, params: &[f64], out: &mut [f64]);

    /// Row `i`, column `j` holds `d r_i / d p_j`.
    fn jacobian(&self, params: &[f64], out: &mut DMatrix<f64>);

    /// Steps landing outside the feasible set are rejected like uphill steps.
    fn is_feasible(&self, _params: &[f64]) -> bool {
        true
    }

    /// Magnitude against which a step in parameter `index` counts as small.
    fn step_scale(&self, _index: usize, value: f64) -> f64 {
        value.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmConfig {
    pub max_iterations: usize,
    /// Converged once every `|step_i| / step_scale_i` falls below this.
    pub step_tolerance: f64,
    pub initial_damping: f64,
}

impl Default for LmConfig {
    fn default() -> Self {
        Self { max_iterations: 200, step_tolerance: 1e-9, initial_damping: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmOutcome {
    pub params: Vec<f64>,
    /// `0.5 * |r|^2` at `params`.
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `sigma^2 * diag((J^T J)^-1)` with `sigma^2 = |r|^2 / (m - n)`;
    /// `NaN` where the normal matrix is singular.
    pub variances: Vec<f64>,
}

fn half_norm_sqr(r: &[f64]) -> f64 {
    0.5 * r.iter().map(|x| x * x).sum::<f64>()
}

pub fn minimize<P: LeastSquaresProblem>(problem: &P, initial: &[f64], config: &LmConfig) -> LmOutcome {
    let n = problem.num_params();
    let m = problem.num_residuals();
    assert_eq!(initial.len(), n, "initial guess has the wrong length");

    let mut params = initial.to_vec();
    let mut r = vec![0.0; m];
    let mut trial_r = vec![0.0; m];
    let mut jac = DMatrix::zeros(m, n);
    problem.residuals(&params, &mut r);
    problem.jacobian(&params, &mut jac);
    let mut cost = half_norm_sqr(&r);
    let mut damping = config.initial_damping;
    let mut converged = false;
    let mut iterations = 0;
    // running maximum of the column norms, as in MINPACK
    let mut diag = vec![0.0f64; n];

    while iterations < config.max_iterations {
        iterations += 1;
        let jtj = jac.transpose() * &jac;
        let gradient = jac.transpose() * DVector::from_column_slice(&r);
        for (j, d) in diag.iter_mut().enumerate() {
            *d = d.max(jtj[(j, j)]).max(f64::MIN_POSITIVE);
        }

        let mut system = jtj.clone();
        for j in 0..n {
            system[(j, j)] += damping * diag[j];
        }
        let step = match system.cholesky() {
            Some(ch) => ch.solve(&(-&gradient)),
            None => {
                damping *= 10.0;
                continue;
            }
        };

        let trial: Vec<f64> = params.iter().zip(step.iter()).map(|(p, s)| p + s).collect();
        let feasible = trial.iter().all(|v| v.is_finite()) && problem.is_feasible(&trial);
        let trial_cost = if feasible {
            problem.residuals(&trial, &mut trial_r);
            half_norm_sqr(&trial_r)
        } else {
            f64::INFINITY
        };

        if trial_cost <= cost && trial_cost.is_finite() {
            let small = (0..n).all(|j| {
                let scale = problem.step_scale(j, trial[j]).max(f64::MIN_POSITIVE);
                step[j].abs() <= config.step_tolerance * scale
            });
            params = trial;
            core::mem::swap(&mut r, &mut trial_r);
            cost = trial_cost;
            problem.jacobian(&params, &mut jac);
            damping = (damping / 10.0).max(1e-15);
            if small {
                converged = true;
                break;
            }
        } else {
            damping *= 10.0;
            if damping > 1e16 {
                // no downhill step exists at working precision
                converged = true;
                break;
            }
        }
    }

    let dof = m.saturating_sub(n).max(1) as f64;
    let sigma2 = 2.0 * cost / dof;
    let variances = match (jac.transpose() * &jac).try_inverse() {
        Some(inv) => (0..n).map(|j| sigma2 * inv[(j, j)]).collect(),
        None => vec![f64::NAN; n],
    };

    LmOutcome { params, cost, iterations, converged, variances }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exponential decay `y = A exp(-k t)` sampled without noise.
    struct Decay {
        t: Vec<f64>,
        y: Vec<f64>,
    }

    impl LeastSquaresProblem for Decay {
        fn num_params(&self) -> usize {
            2
        }
        fn num_residuals(&self) -> usize {
            self.t.len()
        }
        fn residuals(&self, p: &[f64], out: &mut [f64]) {
            for (i, (&t, &y)) in self.t.iter().zip(&self.y).enumerate() {
                out[i] = p[0] * libm::exp(-p[1] * t) - y;
            }
        }
        fn jacobian(&self, p: &[f64], out: &mut DMatrix<f64>) {
            for (i, &t) in self.t.iter().enumerate() {
                let e = libm::exp(-p[1] * t);
                out[(i, 0)] = e;
                out[(i, 1)] = -p[0] * t * e;
            }
        }
    }

    #[test]
    fn recovers_exponential() {
        let t: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let y = t.iter().map(|t| 2.5 * libm::exp(-0.7 * t)).collect();
        let out = minimize(&Decay { t, y }, &[1.0, 0.1], &LmConfig::default());
        assert!(out.converged);
        assert!((out.params[0] - 2.5).abs() < 1e-9);
        assert!((out.params[1] - 0.7).abs() < 1e-9);
        assert!(out.cost < 1e-20);
    }

    /// Rosenbrock as residuals (1 - x, 10 (y - x^2)).
    struct Rosenbrock;

    impl LeastSquaresProblem for Rosenbrock {
        fn num_params(&self) -> usize {
            2
        }
        fn num_residuals(&self) -> usize {
            2
        }
        fn residuals(&self, p: &[f64], out: &mut [f64]) {
            out[0] = 1.0 - p[0];
            out[1] = 10.0 * (p[1] - p[0] * p[0]);
        }
        fn jacobian(&self, p: &[f64], out: &mut DMatrix<f64>) {
            out[(0, 0)] = -1.0;
            out[(0, 1)] = 0.0;
            out[(1, 0)] = -20.0 * p[0];
            out[(1, 1)] = 10.0;
        }
        fn step_scale(&self, _: usize, v: f64) -> f64 {
            v.abs().max(1.0)
        }
    }

    #[test]
    fn solves_rosenbrock() {
        let out = minimize(&Rosenbrock, &[-1.2, 1.0], &LmConfig::default());
        assert!(out.converged);
        assert!((out.params[0] - 1.0).abs() < 1e-8 && (out.params[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let cfg = LmConfig { max_iterations: 2, ..LmConfig::default() };
        let out = minimize(&Rosenbrock, &[-1.2, 1.0], &cfg);
        assert!(!out.converged);
        assert_eq!(out.iterations, 2);
    }
}
