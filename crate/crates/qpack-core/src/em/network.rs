use alloc::format;
use alloc::vec::Vec;
use core::ops::Mul;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

/// Strictly increasing list of positive frequencies, in hertz.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    points: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(domain!("frequency grid is empty"));
        }
        if let Some(bad) = points.iter().find(|f| !(**f > 0.0 && f.is_finite())) {
            return Err(domain!("grid frequency {bad} is not positive"));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(domain!("grid is not strictly increasing"));
        }
        Ok(Self { points })
    }

    /// `n` evenly spaced points from `start` to `stop` inclusive.
    pub fn linspace(start: f64, stop: f64, n: usize) -> Result<Self> {
        match n {
            0 => Err(domain!("grid needs at least one point")),
            1 => Self::new(alloc::vec![start]),
            _ => {
                let step = (stop - start) / (n - 1) as f64;
                Self::new((0..n).map(|i| if i == n - 1 { stop } else { start + step * i as f64 }).collect())
            }
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// 2x2 scattering matrix, `s[row][col]`, so `s[1][0]` is S21.
pub type SMatrix = [[Complex64; 2]; 2];

/// Chain (ABCD) matrix of a two-port at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abcd {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Abcd {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self { a: one, b: zero, c: zero, d: one }
    }

    pub fn series_impedance(z: Complex64) -> Self {
        Self { b: z, ..Self::identity() }
    }

    pub fn shunt_admittance(y: Complex64) -> Self {
        Self { c: y, ..Self::identity() }
    }

    pub fn to_s(&self, z0: f64) -> SMatrix {
        let (a, b, c, d) = (self.a, self.b / z0, self.c * z0, self.d);
        let den = a + b + c + d;
        let det = self.a * self.d - self.b * self.c;
        [[(a + b - c - d) / den, 2.0 * det / den], [2.0 / den, (-a + b - c + d) / den]]
    }

    /// Inverse of [`Abcd::to_s`]; fails when S21 vanishes.
    pub fn from_s(s: &SMatrix, z0: f64) -> Result<Self> {
        let (s11, s12, s21, s22) = (s[0][0], s[0][1], s[1][0], s[1][1]);
        if s21.norm() < 1e-300 {
            return Err(domain!("S21 = 0 has no chain-matrix representation"));
        }
        let one = Complex64::new(1.0, 0.0);
        let two_s21 = 2.0 * s21;
        let cross = s12 * s21;
        Ok(Self {
            a: ((one + s11) * (one - s22) + cross) / two_s21,
            b: z0 * ((one + s11) * (one + s22) - cross) / two_s21,
            c: ((one - s11) * (one - s22) - cross) / (two_s21 * z0),
            d: ((one - s11) * (one + s22) + cross) / two_s21,
        })
    }
}

impl Mul for Abcd {
    type Output = Abcd;

    fn mul(self, rhs: Abcd) -> Abcd {
        Abcd {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }
}

/// Largest singular value of a 2x2 complex matrix.
pub(crate) fn spectral_norm(s: &SMatrix) -> f64 {
    // eigenvalues of the Hermitian matrix S^H S
    let col = |j: usize| [s[0][j], s[1][j]];
    let (c0, c1) = (col(0), col(1));
    let p = c0[0].norm_sqr() + c0[1].norm_sqr();
    let q = c1[0].norm_sqr() + c1[1].norm_sqr();
    let r = c0[0].conj() * c1[0] + c0[1].conj() * c1[1];
    let half_diff = 0.5 * (p - q);
    let lambda = 0.5 * (p + q) + libm::sqrt(half_diff * half_diff + r.norm_sqr());
    libm::sqrt(lambda.max(0.0))
}

/// Frequency-sampled scattering description of a two-port.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPortNetwork {
    grid: FrequencyGrid,
    s: Vec<SMatrix>,
    reference_impedance: f64,
}

impl TwoPortNetwork {
    pub fn new(grid: FrequencyGrid, s: Vec<SMatrix>, reference_impedance: f64) -> Result<Self> {
        if s.len() != grid.len() {
            return Err(domain!("{} matrices for {} grid points", s.len(), grid.len()));
        }
        if !(reference_impedance > 0.0 && reference_impedance.is_finite()) {
            return Err(domain!("reference impedance must be positive, got {reference_impedance}"));
        }
        Ok(Self { grid, s, reference_impedance })
    }

    /// Builds a network by evaluating a chain matrix at every grid point.
    pub fn from_abcd<F>(grid: &FrequencyGrid, reference_impedance: f64, abcd: F) -> Result<Self>
    where
        F: Fn(f64) -> Abcd,
    {
        let s = grid.points().iter().map(|&f| abcd(f).to_s(reference_impedance)).collect();
        Self::new(grid.clone(), s, reference_impedance)
    }

    pub fn identity(grid: &FrequencyGrid, reference_impedance: f64) -> Result<Self> {
        Self::from_abcd(grid, reference_impedance, |_| Abcd::identity())
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn s_matrices(&self) -> &[SMatrix] {
        &self.s
    }

    pub fn reference_impedance(&self) -> f64 {
        self.reference_impedance
    }

    pub fn s21(&self) -> Vec<Complex64> {
        self.s.iter().map(|m| m[1][0]).collect()
    }

    pub fn s11(&self) -> Vec<Complex64> {
        self.s.iter().map(|m| m[0][0]).collect()
    }

    /// Largest `|S12 - S21|` over the grid.
    pub fn reciprocity_error(&self) -> f64 {
        self.s.iter().map(|m| (m[0][1] - m[1][0]).norm()).fold(0.0, f64::max)
    }

    /// Largest spectral norm over the grid; a passive network stays at or below 1.
    pub fn max_gain(&self) -> f64 {
        self.s.iter().map(spectral_norm).fold(0.0, f64::max)
    }

    pub fn is_reciprocal(&self, tol: f64) -> bool {
        self.reciprocity_error() <= tol
    }

    pub fn is_passive(&self, tol: f64) -> bool {
        self.max_gain() <= 1.0 + tol
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Incompatible(format!(
                "frequency grids differ ({} vs {} points)",
                self.grid.len(),
                other.grid.len()
            )));
        }
        if self.reference_impedance != other.reference_impedance {
            return Err(Error::Incompatible(format!(
                "reference impedances differ ({} vs {} ohm)",
                self.reference_impedance, other.reference_impedance
            )));
        }
        Ok(())
    }
}

/// Connects networks output-to-input in list order by multiplying chain matrices.
pub fn cascade(networks: &[TwoPortNetwork]) -> Result<TwoPortNetwork> {
    let (first, rest) =
        networks.split_first().ok_or_else(|| Error::Incompatible("cannot cascade an empty chain".into()))?;
    for n in rest {
        first.compatible(n)?;
    }
    let z0 = first.reference_impedance;
    let mut s = Vec::with_capacity(first.grid.len());
    for i in 0..first.grid.len() {
        let mut acc = Abcd::from_s(&first.s[i], z0)?;
        for n in rest {
            acc = acc * Abcd::from_s(&n.s[i], z0)?;
        }
        s.push(acc.to_s(z0));
    }
    TwoPortNetwork::new(first.grid.clone(), s, z0)
}
