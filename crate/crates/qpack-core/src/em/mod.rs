//! Quasi-static microwave engine for the package: CPW impedance, two-port
//! network algebra, via discontinuities, enclosure cavity modes and crosstalk.

mod cavity;
mod cpw;
mod crosstalk;
mod elements;
mod elliptic;
mod network;

pub use cavity::{cavity_modes, mode_frequency, CavityBox, CavityMode};
pub use cpw::{cpw_char_impedance, solve_gap_for_impedance, GAP_SEARCH_RANGE};
pub use crosstalk::{crosstalk_s21, CoupledPair, IsolationPreset};
pub use elements::{
    chain_network, line_network, series_resistor_network, sweep_s21, via_network, NetworkElement,
    TransmissionLineSegment, ViaDiscontinuity,
};
pub use elliptic::elliptic_k;
pub use network::{cascade, Abcd, FrequencyGrid, SMatrix, TwoPortNetwork};

use num_complex::Complex64;

/// Floor applied to every dB value so that reports never carry `-inf`.
pub const DB_FLOOR: f64 = -200.0;

/// `20 log10 |x|`, floored at [`DB_FLOOR`].
pub fn to_db(magnitude: f64) -> f64 {
    if magnitude <= 0.0 {
        return DB_FLOOR;
    }
    (20.0 * libm::log10(magnitude)).max(DB_FLOOR)
}

pub fn s_db(s: Complex64) -> f64 {
    to_db(s.norm())
}

/// Worst insertion loss of a transmission trace, in dB (positive number).
pub fn max_insertion_loss_db(trace: &[Complex64]) -> f64 {
    trace.iter().map(|s| -s_db(*s)).fold(0.0, f64::max)
}
