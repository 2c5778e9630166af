use proptest::prelude::*;
use qpack_core::em::*;
use qpack_core::{presets, Complex64};

fn band() -> FrequencyGrid {
    FrequencyGrid::linspace(1e9, 12e9, 23).unwrap()
}

fn element() -> impl Strategy<Value = NetworkElement> {
    prop_oneof![
        (5.0..200.0f64, 1.0..12.0f64, 0.0..0.1f64, 0.0..5.0f64).prop_map(|(z0, er, l, a)| {
            NetworkElement::Line(TransmissionLineSegment { z0, effective_permittivity: er, length: l, attenuation: a })
        }),
        (0.0..3e-9f64, 0.0..1e-12f64).prop_map(|(l, c)| NetworkElement::Via(ViaDiscontinuity {
            series_inductance: l,
            shunt_capacitance: c,
            height: 0.5e-3
        })),
        (0.0..100.0f64).prop_map(NetworkElement::SeriesResistor),
    ]
}

fn close(a: &SMatrix, b: &SMatrix, rel: f64) -> bool {
    (0..2).all(|i| (0..2).all(|j| (a[i][j] - b[i][j]).norm() <= rel * (1.0 + a[i][j].norm())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chains_are_passive_and_reciprocal(chain in prop::collection::vec(element(), 0..6)) {
        let net = chain_network(&chain, &band(), 50.0).unwrap();
        prop_assert!(net.reciprocity_error() < 1e-9);
        prop_assert!(net.max_gain() <= 1.0 + 1e-9);
    }

    #[test]
    fn abcd_s_round_trip(e in element(), f in 1e9..12e9f64, z0 in 10.0..100.0f64) {
        let s = e.abcd(f).to_s(z0);
        prop_assume!(s[1][0].norm() > 1e-6);
        let back = Abcd::from_s(&s, z0).unwrap().to_s(z0);
        prop_assert!(close(&s, &back, 1e-10));
    }

    #[test]
    fn cascade_is_associative(a in element(), b in element(), c in element()) {
        let g = band();
        let (na, nb, nc) = (a.network(&g, 50.0).unwrap(), b.network(&g, 50.0).unwrap(), c.network(&g, 50.0).unwrap());
        let left = cascade(&[cascade(&[na.clone(), nb.clone()]).unwrap(), nc.clone()]).unwrap();
        let right = cascade(&[na, cascade(&[nb, nc]).unwrap()]).unwrap();
        for (x, y) in left.s_matrices().iter().zip(right.s_matrices()) {
            prop_assert!(close(x, y, 1e-9));
        }
    }

    #[test]
    fn cpw_scale_invariance(w in 1e-5..1e-3f64, s in 1e-5..1e-3f64, er in 1.0..12.0f64, k in 0.1..10.0f64) {
        let a = cpw_char_impedance(w, s, er).unwrap();
        let b = cpw_char_impedance(k * w, k * s, er).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn crosstalk_ordering(kb in 0.0..0.5f64, extra in 1e-6..0.4f64) {
        let line = presets::nju13_coupled_line();
        let buried = CoupledPair::new(line, kb, IsolationPreset::BuriedCpw).unwrap();
        let bond = CoupledPair::new(line, kb + extra, IsolationPreset::WireBond).unwrap();
        let g = FrequencyGrid::linspace(3e9, 8e9, 101).unwrap();
        for (b, w) in crosstalk_s21(&buried, &g).iter().zip(crosstalk_s21(&bond, &g)) {
            prop_assert!(w >= *b);
            prop_assert!(w <= 0.0);
        }
    }
}

#[test]
fn identity_network_has_unit_transmission() {
    let net = TwoPortNetwork::identity(&band(), 50.0).unwrap();
    assert!(net.s21().iter().all(|s| *s == Complex64::new(1.0, 0.0)));
}

#[test]
fn mismatched_grids_are_incompatible() {
    let a = TwoPortNetwork::identity(&band(), 50.0).unwrap();
    let b = TwoPortNetwork::identity(&FrequencyGrid::linspace(1e9, 2e9, 3).unwrap(), 50.0).unwrap();
    assert!(matches!(cascade(&[a, b]), Err(qpack_core::Error::Incompatible(_))));
}
