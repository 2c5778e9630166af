use core::f64::consts::PI;

use super::elliptic_k;
use crate::error::{domain, Error, Result};

/// Bracket searched by [`solve_gap_for_impedance`], in meters.
pub const GAP_SEARCH_RANGE: (f64, f64) = (1e-6, 1e-2);

/// Characteristic impedance of a CPW fully embedded in a homogeneous dielectric
/// (effective permittivity equal to `relative_permittivity`):
/// `Z0 = 30 pi / sqrt(er) * K(k') / K(k)` with `k = w / (w + 2s)`.
pub fn cpw_char_impedance(strip_width: f64, gap: f64, relative_permittivity: f64) -> Result<f64> {
    if !(strip_width > 0.0 && strip_width.is_finite() && gap > 0.0 && gap.is_finite()) {
        return Err(domain!("CPW strip width and gap must be positive (w={strip_width}, s={gap})"));
    }
    if !(relative_permittivity >= 1.0 && relative_permittivity.is_finite()) {
        return Err(domain!("relative permittivity must be >= 1, got {relative_permittivity}"));
    }
    let total = strip_width + 2.0 * gap;
    let k = strip_width / total;
    // 1 - k = 2s / (w + 2s), exact even for narrow gaps
    let one_minus_k = 2.0 * gap / total;
    let kp = libm::sqrt(one_minus_k * (1.0 + k));
    Ok(30.0 * PI / libm::sqrt(relative_permittivity) * elliptic_k(kp)? / elliptic_k(k)?)
}

/// Inverse design: the gap giving `target_z0` for a fixed strip width, found by
/// bisection over [`GAP_SEARCH_RANGE`]. Z0 is strictly increasing in the gap.
pub fn solve_gap_for_impedance(strip_width: f64, relative_permittivity: f64, target_z0: f64) -> Result<f64> {
    let (mut lo, mut hi) = GAP_SEARCH_RANGE;
    let z_lo = cpw_char_impedance(strip_width, lo, relative_permittivity)?;
    let z_hi = cpw_char_impedance(strip_width, hi, relative_permittivity)?;
    if !(target_z0 >= z_lo && target_z0 <= z_hi) {
        return Err(Error::NoSolution(alloc::format!(
            "target {target_z0} ohm outside achievable range [{z_lo:.3}, {z_hi:.3}] ohm"
        )));
    }
    for _ in 0..200 {
        // geometric midpoint: the bracket spans four decades
        let mid = libm::sqrt(lo * hi);
        if hi / lo - 1.0 < 4.0 * f64::EPSILON {
            break;
        }
        if cpw_char_impedance(strip_width, mid, relative_permittivity)? < target_z0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let gap = libm::sqrt(lo * hi);
    let z = cpw_char_impedance(strip_width, gap, relative_permittivity)?;
    if (z - target_z0).abs() >= 0.01 {
        return Err(Error::NoSolution(alloc::format!("bisection stalled at {z} ohm")));
    }
    Ok(gap)
}
