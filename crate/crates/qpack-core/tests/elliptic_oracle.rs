//! Complete elliptic integral against Carlson's symmetric form,
//! `K(k) = R_F(0, 1 - k^2, 1)`, evaluated by the duplication theorem.

use qpack_core::em::elliptic_k;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn carlson_rf(mut x: f64, mut y: f64, mut z: f64) -> f64 {
    loop {
        let mu = (x + y + z) / 3.0;
        let dev = [(mu - x) / mu, (mu - y) / mu, (mu - z) / mu].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if dev < 1e-4 {
            let (ex, ey, ez) = (1.0 - x / mu, 1.0 - y / mu, 1.0 - z / mu);
            let e2 = ex * ey + ey * ez + ez * ex;
            let e3 = ex * ey * ez;
            // the dev^6 remainder is below 1e-24
            return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / mu.sqrt();
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sy * sz + sz * sx;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
    }
}

#[test]
fn agrees_with_carlson_on_random_moduli() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let k: f64 = rng.gen_range(0.0..0.999);
        let oracle = carlson_rf(0.0, 1.0 - k * k, 1.0);
        let got = elliptic_k(k).unwrap();
        assert!((got - oracle).abs() <= 1e-12 * oracle, "k={k}: {got} vs {oracle}");
    }
}

#[test]
fn out_of_range_modulus_rejected() {
    assert!(elliptic_k(1.0).is_err());
    assert!(elliptic_k(-0.1).is_err());
}
