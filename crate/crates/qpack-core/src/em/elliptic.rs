use core::f64::consts::FRAC_PI_2;

use crate::error::{domain, Result};

/// Complete elliptic integral of the first kind `K(k)` (modulus convention),
/// by the arithmetic-geometric mean: `K(k) = pi / (2 AGM(1, sqrt(1 - k^2)))`.
pub fn elliptic_k(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(domain!("elliptic modulus must lie in [0, 1), got {k}"));
    }
    // (1 - k)(1 + k) keeps precision as k -> 1
    let mut a = 1.0;
    let mut b = libm::sqrt((1.0 - k) * (1.0 + k));
    for _ in 0..64 {
        if (a - b).abs() <= 4.0 * f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = libm::sqrt(a * b);
        a = next;
    }
    Ok(FRAC_PI_2 / (0.5 * (a + b)))
}
