use alloc::vec::Vec;

use crate::error::{domain, Result};
use crate::SPEED_OF_LIGHT;

/// Rectangular metal enclosure, optionally filled with a uniform dielectric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityBox {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub relative_permittivity: f64,
}

impl CavityBox {
    pub fn vacuum(a: f64, b: f64, d: f64) -> Self {
        Self { a, b, d, relative_permittivity: 1.0 }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("d", self.d)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain!("cavity dimension {name} must be positive, got {v}"));
            }
        }
        if !(self.relative_permittivity >= 1.0 && self.relative_permittivity.is_finite()) {
            return Err(domain!("relative permittivity must be >= 1, got {}", self.relative_permittivity));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityMode {
    pub indices: (u32, u32, u32),
    pub frequency: f64,
}

/// Resonance of mode (m, n, p): `c / (2 sqrt(er)) * sqrt((m/a)^2 + (n/b)^2 + (p/d)^2)`.
pub fn mode_frequency(cavity: &CavityBox, m: u32, n: u32, p: u32) -> f64 {
    let (x, y, z) = (m as f64 / cavity.a, n as f64 / cavity.b, p as f64 / cavity.d);
    SPEED_OF_LIGHT / (2.0 * libm::sqrt(cavity.relative_permittivity)) * libm::sqrt(x * x + y * y + z * z)
}

fn is_valid_mode(m: u32, n: u32, p: u32) -> bool {
    [m, n, p].iter().filter(|&&i| i > 0).count() >= 2
}

/// The `count` lowest-frequency modes with at least two non-zero indices,
/// ascending. Ties are broken by index triple so the order is deterministic.
pub fn cavity_modes(cavity: &CavityBox, count: usize) -> Result<Vec<CavityMode>> {
    cavity.validate()?;
    if count == 0 {
        return Err(domain!("mode count must be at least 1"));
    }
    let longest = cavity.a.max(cavity.b).max(cavity.d);
    let scale = SPEED_OF_LIGHT / (2.0 * libm::sqrt(cavity.relative_permittivity));
    let mut limit: u32 = 2;
    loop {
        let mut modes = Vec::new();
        for m in 0..=limit {
            for n in 0..=limit {
                for p in 0..=limit {
                    if is_valid_mode(m, n, p) {
                        modes.push(CavityMode { indices: (m, n, p), frequency: mode_frequency(cavity, m, n, p) });
                    }
                }
            }
        }
        modes.sort_by(|x, y| x.frequency.total_cmp(&y.frequency).then(x.indices.cmp(&y.indices)));
        // any mode with an index above `limit` lies at or above this frequency
        let unseen_floor = scale * (limit as f64 + 1.0) / longest;
        if modes.len() >= count && modes[count - 1].frequency < unseen_floor {
            modes.truncate(count);
            return Ok(modes);
        }
        limit = limit.checked_mul(2).ok_or_else(|| domain!("mode search overflow"))?;
    }
}
