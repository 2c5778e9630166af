//! Transmon dynamics in the two-level approximation: Rabi oscillations,
//! cross-resonance conditional rotations, CNOT calibration and gate
//! fidelities from Pauli transfer matrices.

mod cr;
mod lindblad;
mod process;
mod rabi;
mod types;

pub use cr::{calibrate_cnot, cnot_contrast, simulate_cr, target_population, CnotCalibration, CONTRAST_THRESHOLD};
pub use lindblad::Lindbladian;
pub use process::{
    average_gate_fidelity, cnot_unitary, pauli_basis, pauli_x_unitary, simulate_cnot_process as simulate_gate_process,
    simulate_cnot_process, simulate_single_qubit_process, ProcessMatrix, PHYSICALITY_TOLERANCE,
};
pub use rabi::{fit_rabi, rabi_step_limit, simulate_rabi, RabiFit};
pub use types::{
    ControlState, CrSignConvention, DriveSpec, Envelope, GateFidelityReport, QubitSpec, RabiTrace, TwoQubitSystem,
};
