//! Named recipes that rebuild each headline number of the package study
//! from the built-in "nju13" preset and compare it with the reported value.

use qpack_core::cqed::{
    average_gate_fidelity, calibrate_cnot, cnot_contrast, cnot_unitary, fit_rabi, pauli_x_unitary,
    simulate_cnot_process, simulate_rabi, simulate_single_qubit_process, ControlState, DriveSpec, ProcessMatrix,
    QubitSpec, RabiTrace, TwoQubitSystem,
};
use qpack_core::em::{
    cavity_modes, chain_network, crosstalk_s21, max_insertion_loss_db, CavityBox, CoupledPair, FrequencyGrid,
    IsolationPreset,
};
use qpack_core::package::{dc_resistance, resistivity_from_measurement, series_path_resistance};
use qpack_core::resonator::{fit_resonance, model_s21, qi_from_fit, NotchResonanceModel};
use qpack_core::{presets, Complex64, Result, SPEED_OF_LIGHT};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::report::Report;

pub const DEFAULT_SEED: u64 = 20_170_101;

/// Four-point resistance of the longest strip.
pub const MEASURED_STRIP_RESISTANCE: f64 = 0.15;
/// Rabi envelope constant of a typical qubit.
pub const TYPICAL_DECOHERENCE_TIME: f64 = 3.47e-6;
pub const CR_GATE_TIME: f64 = 350e-9;
/// Target Rabi decay constants with control in |0> and |1>.
pub const CR_COHERENCE: [f64; 2] = [750e-9, 340e-9];
pub const NOT_PULSE: f64 = 20e-9;
/// (f0, Qi, Qc) of the two resonators whose Qi is reported.
pub const REFERENCE_RESONATORS: [(f64, f64, f64); 2] = [(5.372e9, 62_000.0, 29_520.0), (5.459e9, 13_000.0, 20_800.0)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Scenario {
    Dc,
    Cavity,
    ViaLoss,
    Xtalk,
    Qi,
    Rabi,
    Cnot,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::Dc,
        Scenario::Cavity,
        Scenario::ViaLoss,
        Scenario::Xtalk,
        Scenario::Qi,
        Scenario::Rabi,
        Scenario::Cnot,
    ];
}

pub fn run(scenario: Scenario, seed: u64) -> Result<Report> {
    match scenario {
        Scenario::Dc => dc(),
        Scenario::Cavity => cavity(),
        Scenario::ViaLoss => via_loss(),
        Scenario::Xtalk => xtalk(),
        Scenario::Qi => qi(seed),
        Scenario::Rabi => rabi(seed),
        Scenario::Cnot => cnot(),
    }
}

pub fn typical_qubit() -> QubitSpec {
    QubitSpec { f01: 5e9, t1: TYPICAL_DECOHERENCE_TIME, t2: TYPICAL_DECOHERENCE_TIME }
}

/// Target completes one rotation period at 350 ns with control |0> and one
/// and a half with control |1>.
pub fn derived_cr_system(coherence: [f64; 2]) -> TwoQubitSystem {
    let q = typical_qubit();
    TwoQubitSystem::from_conditional_rates(q, q, 1.0 / CR_GATE_TIME, 1.5 / CR_GATE_TIME, coherence)
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * target.abs()
}

fn dc() -> Result<Report> {
    let trace = presets::nju13_longest_trace();
    let r = dc_resistance(&trace)?;
    let rho = resistivity_from_measurement(MEASURED_STRIP_RESISTANCE, &trace)?;
    let path = series_path_resistance(&trace, &[presets::nju13_contact()])?;
    let mut rep = Report::new("dc: longest L3 strip");
    rep.set("length_m", trace.length)
        .set("cross_section_m2", trace.cross_section())
        .set("resistivity_ohm_m", trace.resistivity)
        .set("resistance_ohm", r)
        .set("measured_resistance_ohm", MEASURED_STRIP_RESISTANCE)
        .set("resistivity_from_measurement_ohm_m", rho)
        .set("contact_resistance_ohm", presets::CONTACT_RESISTANCE)
        .set("strip_plus_contact_ohm", path);
    rep.check("resistance within 1% of 0.15 ohm", within(r, MEASURED_STRIP_RESISTANCE, 0.01), format!("{r:.4} ohm"))
        .check("inverted resistivity 9.08e-8", within(rho, 9.08e-8, 1e-3), format!("{rho:.4e} ohm m"));
    Ok(rep)
}

fn cavity() -> Result<Report> {
    let window = CavityBox::vacuum(presets::WINDOW_SIZE, presets::WINDOW_SIZE, 2e-3);
    let modes = cavity_modes(&window, 5)?;
    let lowest = modes[0];
    let analytic = SPEED_OF_LIGHT / 2.0 * (2.0f64).sqrt() / presets::WINDOW_SIZE;
    let mut rep = Report::new("cavity: chip window enclosure");
    rep.set("a_m", window.a).set("b_m", window.b).set("d_m", window.d);
    for (i, m) in modes.iter().enumerate() {
        let (a, b, c) = m.indices;
        rep.set(&format!("mode{i}_{a}{b}{c}_hz"), m.frequency);
    }
    rep.check("lowest mode above 10 GHz", lowest.frequency > 10e9, format!("{:.3} GHz", lowest.frequency / 1e9)).check(
        "matches analytic TE110 within 0.1%",
        within(lowest.frequency, analytic, 1e-3),
        format!("{:.4} GHz", analytic / 1e9),
    );
    Ok(rep)
}

pub fn band(points: usize) -> FrequencyGrid {
    FrequencyGrid::linspace(3e9, 8e9, points).expect("fixed band is valid")
}

fn via_loss() -> Result<Report> {
    let grid = band(501);
    let net = chain_network(&presets::nju13_signal_chain(), &grid, presets::TARGET_IMPEDANCE)?;
    let dip = max_insertion_loss_db(&net.s21());
    let mut rep = Report::new("via-loss: connector, buried line, via, contact");
    rep.set("points", grid.len())
        .set("max_dip_db", dip)
        .set("max_reciprocity_error", net.reciprocity_error())
        .set("max_gain", net.max_gain());
    rep.check("dip at most 1.5 dB", dip <= 1.5, format!("{dip:.3} dB"))
        .check("passive", net.is_passive(1e-9), format!("max gain {:.12}", net.max_gain()))
        .check("reciprocal", net.is_reciprocal(1e-9), format!("{:.2e}", net.reciprocity_error()));
    Ok(rep)
}

fn xtalk() -> Result<Report> {
    let grid = band(501);
    let line = presets::nju13_coupled_line();
    let buried = crosstalk_s21(&CoupledPair::from_preset(IsolationPreset::BuriedCpw, line)?, &grid);
    let bond = crosstalk_s21(&CoupledPair::from_preset(IsolationPreset::WireBond, line)?, &grid);
    let span = |v: &[f64]| {
        (v.iter().cloned().fold(f64::INFINITY, f64::min), v.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
    };
    let (bmin, bmax) = span(&buried);
    let (wmin, wmax) = span(&bond);
    let mut rep = Report::new("xtalk: neighbouring control lines");
    rep.set("buried_min_db", bmin)
        .set("buried_max_db", bmax)
        .set("wire_bond_min_db", wmin)
        .set("wire_bond_max_db", wmax);
    rep.check("buried within [-60, -40] dB", bmin >= -60.0 && bmax <= -40.0, format!("{bmin:.1} .. {bmax:.1} dB"))
        .check("wire bond about -30 dB", wmin >= -35.0 && wmax <= -25.0, format!("{wmin:.1} .. {wmax:.1} dB"))
        .check("wire bond worse everywhere", bond.iter().zip(&buried).all(|(w, b)| w > b), "pointwise");
    Ok(rep)
}

/// Notch model for a reported resonator with a little asymmetry, cable
/// delay and background phase so the fit has something to remove.
pub fn reference_resonator(f0: f64, qi: f64, qc: f64) -> NotchResonanceModel {
    let mut m = NotchResonanceModel::from_internal(f0, qi, qc);
    m.phi = 0.05;
    m.q_coupling_mag = qc * m.phi.cos();
    m.amplitude = 0.8;
    m.phase_offset = 0.3;
    m.cable_delay = 12e-9;
    m
}

pub fn resonator_grid(m: &NotchResonanceModel, points: usize) -> FrequencyGrid {
    let lw = m.linewidth();
    FrequencyGrid::linspace(m.f0 - 10.0 * lw, m.f0 + 10.0 * lw, points).expect("linewidth is positive")
}

pub fn noisy(trace: &[Complex64], sigma: f64, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let n = Normal::new(0.0, sigma).expect("sigma is finite");
    trace.iter().map(|s| s + Complex64::new(n.sample(rng), n.sample(rng))).collect()
}

fn qi(seed: u64) -> Result<Report> {
    let mut rep = Report::new("qi: notch fits of the reported resonators");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (i, &(f0, qi, qc)) in REFERENCE_RESONATORS.iter().enumerate() {
        let m = reference_resonator(f0, qi, qc);
        let truth = qi_from_fit(&m)?;
        let grid = resonator_grid(&m, 401);
        let clean = model_s21(&m, &grid);
        let fit = fit_resonance(&clean, &grid)?;
        let f0_ppm = (fit.model.f0 - f0).abs() / f0 * 1e6;
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let f = fit_resonance(&noisy(&clean, 0.01 * m.amplitude, &mut rng), &grid)?;
            worst = worst.max((f.q_internal - truth).abs() / truth);
        }
        let tag = format!("r{}", i + 1);
        rep.set(&format!("{tag}_f0_hz"), fit.model.f0)
            .set(&format!("{tag}_qi"), fit.q_internal)
            .set(&format!("{tag}_qi_true"), truth)
            .set(&format!("{tag}_noisy_worst_rel_error"), worst);
        rep.check(
            &format!("{tag} Qi within 0.5%"),
            within(fit.q_internal, truth, 5e-3),
            format!("{:.0}", fit.q_internal),
        )
        .check(&format!("{tag} f0 within 1 ppm"), f0_ppm < 1.0, format!("{f0_ppm:.2e} ppm"))
        .check(&format!("{tag} noisy Qi within 10%"), worst < 0.1, format!("worst {:.2}%", 100.0 * worst));
    }
    Ok(rep)
}

/// Lindblad trace of the typical qubit under a 2 MHz resonant drive with
/// 1% additive population noise.
pub fn typical_rabi_trace(seed: u64) -> Result<RabiTrace> {
    let q = typical_qubit();
    let d = DriveSpec::resonant(&q, 2e6, 5e-6);
    let times: Vec<f64> = (0..=500).map(|i| i as f64 * 10e-9).collect();
    let clean = simulate_rabi(&q, &d, &times)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = Normal::new(0.0, 0.01).expect("fixed sigma");
    let pops = clean.excited_population.iter().map(|p| p + n.sample(&mut rng)).collect();
    RabiTrace::new(times, pops)
}

fn rabi(seed: u64) -> Result<Report> {
    let fit = fit_rabi(&typical_rabi_trace(seed)?)?;
    let mut rep = Report::new("rabi: damped oscillation of a typical qubit");
    rep.set("omega_hz", fit.omega).set("tau_s", fit.tau).set("amplitude", fit.amplitude).set("offset", fit.offset);
    rep.check(
        "tau within 5% of 3.47 us",
        within(fit.tau, TYPICAL_DECOHERENCE_TIME, 0.05),
        format!("{:.3} us", fit.tau * 1e6),
    )
    .check("omega within 0.5% of 2 MHz", within(fit.omega, 2e6, 5e-3), format!("{:.4} MHz", fit.omega / 1e6));
    Ok(rep)
}

/// Earliest time on a fine grid attaining the largest contrast.
pub fn brute_force_gate_time(system: &TwoQubitSystem, t_max: f64, step: f64) -> f64 {
    let n = (t_max / step).floor() as usize;
    let (mut best_t, mut best) = (0.0, f64::NEG_INFINITY);
    for i in 0..=n {
        let t = i as f64 * step;
        let c = cnot_contrast(system, t);
        if c > best + 1e-12 {
            best = c;
            best_t = t;
        }
    }
    best_t
}

fn cnot() -> Result<Report> {
    let ideal = derived_cr_system([1.0, 1.0]);
    let cal = calibrate_cnot(&ideal, 600e-9)?;
    let oracle = brute_force_gate_time(&ideal, 600e-9, 0.01e-9);

    let lossy = derived_cr_system(CR_COHERENCE);
    let cnot = average_gate_fidelity(&simulate_cnot_process(&lossy, CR_GATE_TIME)?, &cnot_unitary())?;
    let q = typical_qubit();
    let not = average_gate_fidelity(
        &simulate_single_qubit_process(&q, &DriveSpec::pi_pulse(&q, NOT_PULSE))?,
        &pauli_x_unitary(),
    )?;
    let mut identity = cnot_unitary();
    identity.fill_with_identity();
    let id = average_gate_fidelity(&ProcessMatrix::identity(4)?, &identity)?;
    let dep = average_gate_fidelity(&ProcessMatrix::depolarizing(4)?, &cnot_unitary())?;

    let mut rep = Report::new("cnot: cross-resonance gate");
    rep.set("rate0_hz", lossy.target_rate(ControlState::Zero))
        .set("rate1_hz", lossy.target_rate(ControlState::One))
        .set("calibrated_gate_time_s", cal.gate_time)
        .set("calibrated_contrast", cal.contrast)
        .set("scan_oracle_gate_time_s", oracle)
        .set("cnot_average_fidelity", cnot.average_fidelity)
        .set("cnot_process_fidelity", cnot.process_fidelity)
        .set("not_average_fidelity", not.average_fidelity)
        .set("contrast_at_350ns_lossy", cnot_contrast(&lossy, CR_GATE_TIME));
    rep.check(
        "gate time 350 ns within 2%",
        within(cal.gate_time, CR_GATE_TIME, 0.02),
        format!("{:.2} ns", cal.gate_time * 1e9),
    )
    .check("agrees with scan oracle", (cal.gate_time - oracle).abs() < 0.1e-9, format!("{:.2} ns", oracle * 1e9))
    .check("identity fidelity 1", (id.average_fidelity - 1.0).abs() < 1e-12, format!("{}", id.average_fidelity))
    .check(
        "depolarizing fidelity 0.25",
        (dep.average_fidelity - 0.25).abs() < 1e-12,
        format!("{}", dep.average_fidelity),
    )
    .check(
        "cnot fidelity in [0.55, 0.80]",
        (0.55..=0.80).contains(&cnot.average_fidelity),
        format!("{:.3}", cnot.average_fidelity),
    )
    .check("not fidelity at least 0.97", not.average_fidelity >= 0.97, format!("{:.4}", not.average_fidelity));
    Ok(rep)
}
