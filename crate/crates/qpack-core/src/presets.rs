//! Built-in "nju13" configuration: the seven-layer RO4350B package for a
//! thirteen-transmon chip. Every acceptance fixture starts from here.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::em::{
    cpw_char_impedance, solve_gap_for_impedance, NetworkElement, TransmissionLineSegment, ViaDiscontinuity,
};
use crate::package::{ChipWindow, Contact, CpwTrace, Layer, LayerStack};

pub const NAME: &str = "nju13";

/// Measured resistivity of the electrolytic copper layers, ohm m.
pub const COPPER_RESISTIVITY: f64 = 9e-8;
pub const DIELECTRIC_THICKNESS: f64 = 0.508e-3;
pub const DIELECTRIC_PERMITTIVITY: f64 = 3.66;
pub const WINDOW_SIZE: f64 = 16.2e-3;
/// Qubit chip edge length.
pub const CHIP_SIZE: f64 = 16e-3;
pub const STRIP_WIDTH: f64 = 0.5e-3;
pub const LONGEST_TRACE_LENGTH: f64 = 28.9e-3;
pub const CONTACT_RESISTANCE: f64 = 50e-3;
pub const CONTACT_COUNT: usize = 13;
pub const TARGET_IMPEDANCE: f64 = 50.0;

/// SMA launch: PTFE-filled 50 ohm coax, length in meters.
pub const CONNECTOR_LENGTH: f64 = 10e-3;
pub const CONNECTOR_PERMITTIVITY: f64 = 2.1;

/// Parallel run of two neighbouring control lines used for crosstalk.
pub const COUPLED_LENGTH: f64 = 6e-3;

pub fn nju13_stack() -> LayerStack {
    let metal = |name: &str, t: f64| Layer::metal(name, t, COPPER_RESISTIVITY);
    let dielectric = |name: &str| Layer::dielectric(name, DIELECTRIC_THICKNESS, DIELECTRIC_PERMITTIVITY);
    LayerStack {
        layers: alloc::vec![
            metal("L1", 35e-6),
            dielectric("L2"),
            metal("L3", 35e-6),
            dielectric("L4"),
            metal("L5", 87e-6),
            dielectric("L6"),
            metal("L7", 35e-6),
        ],
        chip_window: Some(ChipWindow {
            width: WINDOW_SIZE,
            height: WINDOW_SIZE,
            depth_layers: ["L6", "L7"].into_iter().map(String::from).collect::<BTreeSet<_>>(),
        }),
    }
}

/// CPW gap on L3 that yields 50 ohm for the 0.5 mm strip.
pub fn nju13_gap() -> f64 {
    solve_gap_for_impedance(STRIP_WIDTH, DIELECTRIC_PERMITTIVITY, TARGET_IMPEDANCE)
        .expect("50 ohm is reachable for the preset strip")
}

pub fn nju13_longest_trace() -> CpwTrace {
    CpwTrace {
        strip_width: STRIP_WIDTH,
        gap: nju13_gap(),
        length: LONGEST_TRACE_LENGTH,
        metal_thickness: 35e-6,
        layer: "L3".into(),
        resistivity: COPPER_RESISTIVITY,
    }
}

pub fn nju13_contact() -> Contact {
    Contact { area: 1e-6, protrusion: 0.1e-3, contact_resistance: CONTACT_RESISTANCE }
}

pub fn nju13_contacts() -> Vec<Contact> {
    alloc::vec![nju13_contact(); CONTACT_COUNT]
}

fn buried_line(length: f64) -> TransmissionLineSegment {
    let z0 = cpw_char_impedance(STRIP_WIDTH, nju13_gap(), DIELECTRIC_PERMITTIVITY).expect("valid preset geometry");
    TransmissionLineSegment::lossless(z0, DIELECTRIC_PERMITTIVITY, length)
}

pub fn nju13_coupled_line() -> TransmissionLineSegment {
    buried_line(COUPLED_LENGTH)
}

/// Control-line signal path: connector, buried CPW, via, pressure contact.
pub fn nju13_signal_chain() -> Vec<NetworkElement> {
    alloc::vec![
        NetworkElement::Line(TransmissionLineSegment::lossless(
            TARGET_IMPEDANCE,
            CONNECTOR_PERMITTIVITY,
            CONNECTOR_LENGTH
        )),
        NetworkElement::Line(buried_line(LONGEST_TRACE_LENGTH)),
        NetworkElement::Via(ViaDiscontinuity::CALIBRATED),
        NetworkElement::SeriesResistor(CONTACT_RESISTANCE),
    ]
}
