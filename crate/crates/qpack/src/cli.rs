//! The `qpack` command line. Exit status: 0 success, 1 validation, fit or
//! calibration failure, 2 usage or input error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qpack_core::cqed::{
    average_gate_fidelity, calibrate_cnot, cnot_unitary, fit_rabi, pauli_x_unitary, simulate_cnot_process, simulate_cr,
    simulate_rabi, simulate_single_qubit_process, ControlState, CrSignConvention, DriveSpec, Envelope, QubitSpec,
    RabiTrace, TwoQubitSystem,
};
use qpack_core::em::{
    cavity_modes, chain_network, cpw_char_impedance, crosstalk_s21, max_insertion_loss_db, solve_gap_for_impedance,
    CavityBox, CoupledPair, FrequencyGrid, IsolationPreset,
};
use qpack_core::lattice::{self, validate_layout, ChipLayout};
use qpack_core::lm::LmConfig;
use qpack_core::package::{dc_resistance, resistivity_from_measurement, series_path_resistance, validate_stackup};
use qpack_core::resonator::{fit_resonance_with, model_s21, NotchResonanceModel, PARAMETER_NAMES};
use qpack_core::{presets, Error as CoreError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::config::{ConfigError, RunConfig};
use crate::csvio::{self, CsvError};
use crate::netlist::{export_netlist, parse_netlist, NetlistError};
use crate::report::Report;
use crate::reproduce::{self, Scenario, DEFAULT_SEED};
use crate::units::{arg, Capacitance, Frequency, Inductance, Length, Resistance, Time};

/// Printed after configuration errors.
pub const CONFIG_HELP: &str = "\
config schema (TOML, quantities as \"0.508mm\", \"5.372GHz\", \"50mOhm\" or bare SI numbers):
  seed = <int>
  [stackup]  layers = [{ kind = \"metal\"|\"dielectric\", name, thickness, resistivity | relative_permittivity }]
             chip_window = { width, height, depth_layers = [..] }
             contacts = [{ area, protrusion, resistance, count }]
             trace = { layer, strip_width, gap, length, metal_thickness?, resistivity? }
  [sweep]    start, stop, points, reference_impedance?, elements = [{ kind = \"line\"|\"via\"|\"resistor\", .. }]
  [fit]      max_iterations?, step_tolerance?
  [rabi]     qubit = { f01, t1, t2 }, rabi_rate, drive_frequency?, duration?, rise?, stop, points, noise?
  [cr]       control, target (qubits), rate0 + rate1 | zx_rate + ix_rate + convention?, coherence0, coherence1, t_max?, gate_time?
  [layout]   preset? , chip_size = [w, h], qubits = [{ id, role, position = [r, c] }],
             buses = [{ id, hub, branches = [..] }], readout = { <qubit> = <contact> }";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Domain(_) | CoreError::Incompatible(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Core(c) => c.into(),
            other => CliError::Usage(format!("{other}\n\n{CONFIG_HELP}")),
        }
    }
}

impl From<CsvError> for CliError {
    fn from(e: CsvError) -> Self {
        match e {
            CsvError::Core(c) => c.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<NetlistError> for CliError {
    fn from(e: NetlistError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "qpack", version, about = "Package, line, resonator and gate models for multi-qubit chips")]
pub struct Cli {
    /// Also write the report as a TOML document.
    #[arg(long, global = true, value_name = "PATH")]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the layer stack rules.
    StackupCheck(Source),
    /// DC resistance of the strip, optionally inverting a measurement.
    Dc(DcArgs),
    /// CPW impedance, or the gap giving a target impedance.
    Cpw(CpwArgs),
    /// Lowest resonances of a rectangular enclosure.
    CavityModes(CavityArgs),
    /// S21 of a signal chain.
    Sweep(SweepArgs),
    /// Far-end crosstalk between neighbouring lines.
    Xtalk(XtalkArgs),
    /// Write a synthetic notch resonator trace.
    SimResonator(SimResonatorArgs),
    /// Fit a notch resonator trace and report Qi.
    FitResonator(FitResonatorArgs),
    /// Simulate a driven, decaying qubit.
    SimRabi(SimRabiArgs),
    /// Fit a damped Rabi oscillation.
    FitRabi(InputArgs),
    /// Target population under a cross-resonance drive.
    SimCr(SimCrArgs),
    /// Find the CR pulse length that makes a CNOT.
    CalibrateCnot(CalibrateArgs),
    /// Average gate fidelity of a simulated CNOT or NOT.
    Fidelity(FidelityArgs),
    /// Check the qubit lattice and its readout assignment.
    LayoutValidate(LayoutSource),
    /// Export the lattice as a sorted text netlist.
    Netlist(NetlistArgs),
    /// Rebuild one of the headline package checks.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct Source {
    /// Built-in configuration.
    #[arg(long, conflicts_with = "config")]
    pub preset: Option<String>,
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DcArgs {
    #[command(flatten)]
    pub source: Source,
    /// Measured strip resistance to invert for resistivity.
    #[arg(long, value_parser = arg::<Resistance>)]
    pub measured: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CpwArgs {
    /// Strip width.
    #[arg(long, value_parser = arg::<Length>)]
    pub w: f64,
    /// Gap to the coplanar grounds.
    #[arg(long, value_parser = arg::<Length>, required_unless_present = "solve_gap")]
    pub s: Option<f64>,
    /// Relative permittivity of the surrounding dielectric.
    #[arg(long, default_value_t = presets::DIELECTRIC_PERMITTIVITY)]
    pub er: f64,
    /// Solve for the gap instead of computing the impedance.
    #[arg(long, conflicts_with = "s")]
    pub solve_gap: bool,
    /// Target impedance for --solve-gap.
    #[arg(long, value_parser = arg::<Resistance>, default_value = "50")]
    pub z0: f64,
}

#[derive(Debug, Args)]
pub struct CavityArgs {
    #[arg(long, value_parser = arg::<Length>)]
    pub a: f64,
    #[arg(long, value_parser = arg::<Length>)]
    pub b: f64,
    #[arg(long, value_parser = arg::<Length>)]
    pub d: f64,
    #[arg(long, default_value_t = 1.0)]
    pub er: f64,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// CSV output `m,n,p,freq_hz`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, value_parser = arg::<Frequency>)]
    pub start: Option<f64>,
    #[arg(long, value_parser = arg::<Frequency>)]
    pub stop: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

impl GridArgs {
    fn grid(&self, fallback: (f64, f64, usize)) -> CliResult<FrequencyGrid> {
        Ok(FrequencyGrid::linspace(
            self.start.unwrap_or(fallback.0),
            self.stop.unwrap_or(fallback.1),
            self.points.unwrap_or(fallback.2),
        )?)
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Override the via series inductance of the preset chain.
    #[arg(long, value_parser = arg::<Inductance>)]
    pub via_l: Option<f64>,
    /// Override the via shunt capacitance of the preset chain.
    #[arg(long, value_parser = arg::<Capacitance>)]
    pub via_c: Option<f64>,
    /// CSV output `freq_hz,s21_re,s21_im,s21_db`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum IsolationArg {
    BuriedCpw,
    WireBond,
}

#[derive(Debug, Args)]
pub struct XtalkArgs {
    #[arg(long, value_enum, default_value = "buried-cpw")]
    pub isolation: IsolationArg,
    /// Override the calibrated coupling coefficient.
    #[arg(long)]
    pub coefficient: Option<f64>,
    /// Coupled length.
    #[arg(long, value_parser = arg::<Length>)]
    pub length: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// CSV output `freq_hz,s21_db`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimResonatorArgs {
    #[arg(long, value_parser = arg::<Frequency>)]
    pub f0: f64,
    #[arg(long)]
    pub qi: f64,
    #[arg(long)]
    pub qc: f64,
    /// Impedance-mismatch rotation of the dip (rad).
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    /// Background phase (rad).
    #[arg(long, default_value_t = 0.0)]
    pub phase: f64,
    #[arg(long, value_parser = arg::<Time>, default_value = "0")]
    pub delay: f64,
    #[arg(long, default_value_t = 401)]
    pub points: usize,
    /// Half-span in loaded linewidths.
    #[arg(long, default_value_t = 10.0)]
    pub linewidths: f64,
    /// Complex Gaussian noise, relative to the amplitude.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// CSV output `freq_hz,s21_re,s21_im`.
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitResonatorArgs {
    /// CSV `freq_hz,s21_re,s21_im`.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Optional [fit] settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV `time_s,population`.
    #[arg(short, long)]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct QubitArgs {
    #[arg(long, value_parser = arg::<Frequency>)]
    pub f01: Option<f64>,
    #[arg(long, value_parser = arg::<Time>)]
    pub t1: Option<f64>,
    #[arg(long, value_parser = arg::<Time>)]
    pub t2: Option<f64>,
}

impl QubitArgs {
    fn resolve(&self, base: QubitSpec) -> QubitSpec {
        QubitSpec { f01: self.f01.unwrap_or(base.f01), t1: self.t1.unwrap_or(base.t1), t2: self.t2.unwrap_or(base.t2) }
    }
}

#[derive(Debug, Args)]
pub struct SimRabiArgs {
    /// TOML with a [rabi] block; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub qubit: QubitArgs,
    #[arg(long, value_parser = arg::<Frequency>)]
    pub rate: Option<f64>,
    #[arg(long, value_parser = arg::<Frequency>)]
    pub drive_frequency: Option<f64>,
    #[arg(long, value_parser = arg::<Time>)]
    pub duration: Option<f64>,
    #[arg(long, value_parser = arg::<Time>)]
    pub rise: Option<f64>,
    #[arg(long, value_parser = arg::<Time>)]
    pub stop: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Gaussian noise added to the populations.
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// CSV output `time_s,population`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConventionArg {
    ControlZeroSlower,
    ControlZeroFaster,
}

#[derive(Debug, Args)]
pub struct CrArgs {
    /// TOML with a [cr] block; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Target rotation rate with control in |0>.
    #[arg(long, value_parser = arg::<Frequency>, requires = "rate1", conflicts_with_all = ["zx_rate", "ix_rate"])]
    pub rate0: Option<f64>,
    /// Target rotation rate with control in |1>.
    #[arg(long, value_parser = arg::<Frequency>, requires = "rate0")]
    pub rate1: Option<f64>,
    #[arg(long, value_parser = arg::<Frequency>, requires = "ix_rate")]
    pub zx_rate: Option<f64>,
    #[arg(long, value_parser = arg::<Frequency>, requires = "zx_rate")]
    pub ix_rate: Option<f64>,
    #[arg(long, value_enum, requires = "zx_rate")]
    pub convention: Option<ConventionArg>,
    /// Target decay constant with control in |0>.
    #[arg(long, value_parser = arg::<Time>)]
    pub coherence0: Option<f64>,
    /// Target decay constant with control in |1>.
    #[arg(long, value_parser = arg::<Time>)]
    pub coherence1: Option<f64>,
}

impl CrArgs {
    /// Defaults: the derived system (one and one and a half target periods
    /// in 350 ns) with 750 / 340 ns coherences.
    fn system(&self) -> CliResult<(TwoQubitSystem, RunConfig)> {
        let cfg = load_optional(self.config.as_deref())?;
        let mut s = match &cfg.cr {
            Some(block) => block.build()?,
            None => reproduce::derived_cr_system(reproduce::CR_COHERENCE),
        };
        if let (Some(r0), Some(r1)) = (self.rate0, self.rate1) {
            let fresh =
                TwoQubitSystem::from_conditional_rates(s.control, s.target, r0, r1, s.target_t2_by_control_state);
            s = fresh;
        }
        if let (Some(zx), Some(ix)) = (self.zx_rate, self.ix_rate) {
            s.zx_rate = zx;
            s.ix_rate = ix;
            s.convention = match self.convention.unwrap_or(ConventionArg::ControlZeroSlower) {
                ConventionArg::ControlZeroSlower => CrSignConvention::ControlZeroSlower,
                ConventionArg::ControlZeroFaster => CrSignConvention::ControlZeroFaster,
            };
        }
        if let Some(t) = self.coherence0 {
            s.target_t2_by_control_state[0] = t;
        }
        if let Some(t) = self.coherence1 {
            s.target_t2_by_control_state[1] = t;
        }
        s.validate()?;
        Ok((s, cfg))
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ControlArg {
    #[value(name = "0")]
    Zero,
    #[value(name = "1")]
    One,
}

#[derive(Debug, Args)]
pub struct SimCrArgs {
    #[command(flatten)]
    pub cr: CrArgs,
    #[arg(long, value_enum)]
    pub control_state: ControlArg,
    #[arg(long, value_parser = arg::<Time>, default_value = "1us")]
    pub stop: f64,
    #[arg(long, default_value_t = 1001)]
    pub points: usize,
    /// CSV output `time_s,population`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub cr: CrArgs,
    /// Longest pulse considered.
    #[arg(long, value_parser = arg::<Time>)]
    pub t_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GateArg {
    Cnot,
    Not,
}

#[derive(Debug, Args)]
pub struct FidelityArgs {
    #[arg(long, value_enum)]
    pub gate: GateArg,
    #[command(flatten)]
    pub cr: CrArgs,
    /// CR pulse length; calibrated from the rates when absent.
    #[arg(long, value_parser = arg::<Time>)]
    pub gate_time: Option<f64>,
    #[command(flatten)]
    pub qubit: QubitArgs,
    /// Length of the rectangular pi pulse for --gate not.
    #[arg(long, value_parser = arg::<Time>, default_value = "20ns")]
    pub pulse: f64,
}

#[derive(Debug, Args)]
pub struct LayoutSource {
    #[arg(long, conflicts_with_all = ["config", "netlist"])]
    pub preset: Option<String>,
    /// TOML with a [layout] block.
    #[arg(long, conflicts_with = "netlist")]
    pub config: Option<PathBuf>,
    /// Previously exported netlist.
    #[arg(long)]
    pub netlist: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NetlistArgs {
    #[command(flatten)]
    pub source: LayoutSource,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub scenario: Scenario,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

fn load_optional(path: Option<&Path>) -> CliResult<RunConfig> {
    Ok(match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    })
}

fn check_preset(name: &str) -> CliResult {
    if name == presets::NAME {
        Ok(())
    } else {
        Err(CliError::Usage(format!("unknown preset '{name}' (available: {})", presets::NAME)))
    }
}

/// Loads the config of a `--preset/--config` pair; `None` means the preset.
fn source_config(source: &Source) -> CliResult<Option<RunConfig>> {
    match (&source.preset, &source.config) {
        (Some(p), _) => check_preset(p).map(|_| None),
        (None, Some(path)) => Ok(Some(RunConfig::load(path)?)),
        (None, None) => Ok(None),
    }
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn layout_from(source: &LayoutSource) -> CliResult<ChipLayout> {
    if let Some(path) = &source.netlist {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        return Ok(parse_netlist(&text)?);
    }
    if let Some(path) = &source.config {
        return Ok(RunConfig::load(path)?.layout()?.build()?);
    }
    check_preset(source.preset.as_deref().unwrap_or(presets::NAME))?;
    Ok(lattice::nju13_layout())
}

fn add_noise(trace: RabiTrace, sigma: f64, seed: u64) -> CliResult<RabiTrace> {
    if sigma == 0.0 {
        return Ok(trace);
    }
    let n = Normal::new(0.0, sigma).map_err(|e| CliError::Usage(format!("noise: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pops = trace.excited_population.iter().map(|p| p + n.sample(&mut rng)).collect();
    Ok(RabiTrace::new(trace.times, pops)?)
}

fn linspace_times(stop: f64, points: usize) -> CliResult<Vec<f64>> {
    if points < 2 || !(stop > 0.0) {
        return Err(CliError::Usage("need at least 2 points and a positive stop time".into()));
    }
    Ok((0..points).map(|i| stop * i as f64 / (points - 1) as f64).collect())
}

fn stackup_check(source: &Source) -> CliResult<Report> {
    let (stack, title) = match source_config(source)? {
        None => (presets::nju13_stack(), format!("stackup-check: {}", presets::NAME)),
        Some(cfg) => (cfg.stackup()?.stack(), "stackup-check".to_string()),
    };
    let result = validate_stackup(&stack);
    let mut rep = Report::new(&title);
    rep.set("layers", stack.layers.len()).set("total_thickness_m", stack.total_thickness());
    rep.check("stack rules", result.is_valid(), result.to_string());
    Ok(rep)
}

fn dc(args: &DcArgs) -> CliResult<Report> {
    let (trace, contacts) = match source_config(&args.source)? {
        None => (presets::nju13_longest_trace(), presets::nju13_contacts()),
        Some(cfg) => {
            let s = cfg.stackup()?;
            (s.trace()?, s.contacts())
        }
    };
    let mut rep = Report::new("dc");
    rep.set("length_m", trace.length)
        .set("cross_section_m2", trace.cross_section())
        .set("resistivity_ohm_m", trace.resistivity)
        .set("resistance_ohm", dc_resistance(&trace)?)
        .set("contacts", contacts.len());
    if let Some(c) = contacts.first() {
        rep.set("strip_plus_one_contact_ohm", series_path_resistance(&trace, std::slice::from_ref(c))?);
    }
    if let Some(r) = args.measured {
        rep.set("measured_resistance_ohm", r)
            .set("resistivity_from_measurement_ohm_m", resistivity_from_measurement(r, &trace)?);
    }
    Ok(rep)
}

fn cpw(args: &CpwArgs) -> CliResult<Report> {
    let mut rep = Report::new("cpw");
    rep.set("strip_width_m", args.w).set("relative_permittivity", args.er);
    if args.solve_gap {
        let gap = solve_gap_for_impedance(args.w, args.er, args.z0)?;
        rep.set("target_z0_ohm", args.z0).set("gap_m", gap).set("z0_ohm", cpw_char_impedance(args.w, gap, args.er)?);
    } else {
        let s = args.s.expect("clap requires --s without --solve-gap");
        rep.set("gap_m", s).set("z0_ohm", cpw_char_impedance(args.w, s, args.er)?);
    }
    Ok(rep)
}

fn cavity(args: &CavityArgs) -> CliResult<Report> {
    let b = CavityBox { a: args.a, b: args.b, d: args.d, relative_permittivity: args.er };
    let modes = cavity_modes(&b, args.count)?;
    if let Some(path) = &args.output {
        csvio::write_modes(create(path)?, &modes)?;
    }
    let mut rep = Report::new("cavity-modes");
    for m in &modes {
        let (i, j, k) = m.indices;
        rep.set(&format!("mode_{i}_{j}_{k}_hz"), m.frequency);
    }
    Ok(rep)
}

fn sweep(args: &SweepArgs) -> CliResult<Report> {
    let (mut chain, z0, fallback) = match source_config(&args.source)? {
        None => (presets::nju13_signal_chain(), presets::TARGET_IMPEDANCE, (3e9, 8e9, 501)),
        Some(cfg) => {
            let s = cfg.sweep()?;
            (s.chain(), s.reference(), (s.start.si(), s.stop.si(), s.points))
        }
    };
    for e in &mut chain {
        if let qpack_core::em::NetworkElement::Via(v) = e {
            v.series_inductance = args.via_l.unwrap_or(v.series_inductance);
            v.shunt_capacitance = args.via_c.unwrap_or(v.shunt_capacitance);
        }
    }
    let grid = args.grid.grid(fallback)?;
    let net = chain_network(&chain, &grid, z0)?;
    let s21 = net.s21();
    if let Some(path) = &args.output {
        csvio::write_sweep(create(path)?, &grid, &s21)?;
    }
    let mut rep = Report::new("sweep");
    rep.set("elements", chain.len())
        .set("points", grid.len())
        .set("max_dip_db", max_insertion_loss_db(&s21))
        .set("max_gain", net.max_gain())
        .set("max_reciprocity_error", net.reciprocity_error());
    rep.check("passive", net.is_passive(1e-9), format!("{:.12}", net.max_gain())).check(
        "reciprocal",
        net.is_reciprocal(1e-9),
        format!("{:.2e}", net.reciprocity_error()),
    );
    Ok(rep)
}

fn xtalk(args: &XtalkArgs) -> CliResult<Report> {
    let preset = match args.isolation {
        IsolationArg::BuriedCpw => IsolationPreset::BuriedCpw,
        IsolationArg::WireBond => IsolationPreset::WireBond,
    };
    let mut line = presets::nju13_coupled_line();
    line.length = args.length.unwrap_or(line.length);
    let pair = CoupledPair::new(line, args.coefficient.unwrap_or(preset.coefficient()), preset)?;
    let grid = args.grid.grid((3e9, 8e9, 501))?;
    let db = crosstalk_s21(&pair, &grid);
    if let Some(path) = &args.output {
        csvio::write_db(create(path)?, &grid, &db)?;
    }
    let mut rep = Report::new(&format!("xtalk: {}", preset.as_str()));
    rep.set("coupling_coefficient", pair.coupling_coefficient)
        .set("min_db", db.iter().cloned().fold(f64::INFINITY, f64::min))
        .set("max_db", db.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    Ok(rep)
}

fn sim_resonator(args: &SimResonatorArgs) -> CliResult<Report> {
    let mut m = NotchResonanceModel::from_internal(args.f0, args.qi, args.qc);
    m.phi = args.phi;
    // keep Qi as requested when the dip is rotated
    m.q_coupling_mag = args.qc * args.phi.cos();
    m.amplitude = args.amplitude;
    m.phase_offset = args.phase;
    m.cable_delay = args.delay;
    m.validate()?;
    let lw = m.linewidth();
    let grid = FrequencyGrid::linspace(m.f0 - args.linewidths * lw, m.f0 + args.linewidths * lw, args.points)?;
    let mut trace = model_s21(&m, &grid);
    if args.noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed.unwrap_or(DEFAULT_SEED));
        trace = reproduce::noisy(&trace, args.noise * args.amplitude, &mut rng);
    }
    csvio::write_s21(create(&args.output)?, &grid, &trace)?;
    let mut rep = Report::new("sim-resonator");
    rep.set("f0_hz", m.f0).set("q_loaded", m.q_loaded).set("points", grid.len());
    Ok(rep)
}

fn fit_resonator(args: &FitResonatorArgs) -> CliResult<Report> {
    let cfg = load_optional(args.config.as_deref())?;
    let mut lm = LmConfig::default();
    if let Some(f) = &cfg.fit {
        lm.max_iterations = f.max_iterations.unwrap_or(lm.max_iterations);
        lm.step_tolerance = f.step_tolerance.unwrap_or(lm.step_tolerance);
    }
    let (grid, trace) = csvio::read_s21(open(&args.input)?)?;
    let fit = fit_resonance_with(&trace, &grid, &lm)?;
    let m = fit.model;
    let mut rep = Report::new("fit-resonator");
    let values = [m.f0, m.q_loaded, m.q_coupling_mag, m.phi, m.amplitude, m.phase_offset, m.cable_delay];
    for (name, v) in PARAMETER_NAMES.iter().zip(values) {
        rep.set(name, v);
    }
    for (name, v) in PARAMETER_NAMES.iter().zip(fit.covariance_diag) {
        rep.set(&format!("{name}_stderr"), v.sqrt());
    }
    rep.set("q_internal", fit.q_internal)
        .set("residual_rms", fit.residual_rms)
        .set("iterations", fit.iterations)
        .set("converged", fit.converged);
    Ok(rep)
}

fn sim_rabi(args: &SimRabiArgs) -> CliResult<Report> {
    let cfg = load_optional(args.config.as_deref())?;
    let (base_q, base_d, base_stop, base_points, base_noise) = match &cfg.rabi {
        Some(r) => {
            let (q, d) = r.build();
            (q, Some(d), r.stop.si(), r.points, r.noise)
        }
        None => (reproduce::typical_qubit(), None, 5e-6, 501, 0.0),
    };
    let qubit = args.qubit.resolve(base_q);
    let stop = args.stop.unwrap_or(base_stop);
    let base_d = base_d.unwrap_or(DriveSpec {
        rabi_rate: 2e6,
        drive_frequency: qubit.f01,
        duration: stop,
        envelope: Envelope::Rectangular,
    });
    let drive = DriveSpec {
        rabi_rate: args.rate.unwrap_or(base_d.rabi_rate),
        drive_frequency: args.drive_frequency.or(args.qubit.f01).unwrap_or(base_d.drive_frequency),
        duration: args.duration.unwrap_or(base_d.duration),
        envelope: args.rise.map_or(base_d.envelope, |rise| Envelope::Shaped { rise }),
    };
    let times = linspace_times(stop, args.points.unwrap_or(base_points))?;
    let trace = simulate_rabi(&qubit, &drive, &times)?;
    let trace = add_noise(trace, args.noise.unwrap_or(base_noise), args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED))?;
    if let Some(path) = &args.output {
        csvio::write_population(create(path)?, &trace)?;
    }
    let mut rep = Report::new("sim-rabi");
    rep.set("rabi_rate_hz", drive.rabi_rate)
        .set("detuning_hz", qubit.f01 - drive.drive_frequency)
        .set("t1_s", qubit.t1)
        .set("t2_s", qubit.t2)
        .set("envelope_decay_s", qubit.rabi_decay_time())
        .set("points", trace.len())
        .set("final_population", *trace.excited_population.last().unwrap_or(&0.0));
    Ok(rep)
}

fn fit_rabi_cmd(args: &InputArgs) -> CliResult<Report> {
    let fit = fit_rabi(&csvio::read_population(open(&args.input)?)?)?;
    let mut rep = Report::new("fit-rabi");
    rep.set("omega_hz", fit.omega)
        .set("tau_s", fit.tau)
        .set("amplitude", fit.amplitude)
        .set("offset", fit.offset)
        .set("phase_rad", fit.phase)
        .set("residual_rms", fit.residual_rms)
        .set("converged", fit.converged);
    Ok(rep)
}

fn sim_cr(args: &SimCrArgs) -> CliResult<Report> {
    let (system, _) = args.cr.system()?;
    let state = match args.control_state {
        ControlArg::Zero => ControlState::Zero,
        ControlArg::One => ControlState::One,
    };
    let trace = simulate_cr(&system, state, &linspace_times(args.stop, args.points)?)?;
    if let Some(path) = &args.output {
        csvio::write_population(create(path)?, &trace)?;
    }
    let mut rep = Report::new(&format!("sim-cr: control |{}>", state.index()));
    rep.set("target_rate_hz", system.target_rate(state))
        .set("coherence_s", system.coherence(state))
        .set("points", trace.len());
    Ok(rep)
}

fn calibrate(args: &CalibrateArgs) -> CliResult<Report> {
    let (system, cfg) = args.cr.system()?;
    let t_max = args.t_max.or(cfg.cr.as_ref().and_then(|c| c.t_max.map(|q| q.si()))).unwrap_or(1e-6);
    let mut rep = Report::new("calibrate-cnot");
    rep.set("rate0_hz", system.target_rate(ControlState::Zero)).set("rate1_hz", system.target_rate(ControlState::One));
    match calibrate_cnot(&system, t_max) {
        Ok(cal) => {
            rep.set("gate_time_s", cal.gate_time).set("contrast", cal.contrast);
            Ok(rep)
        }
        Err(CoreError::CalibrationFailure { best_time, best_contrast }) => Err(CliError::Failure(format!(
            "no pulse up to {t_max:e} s reaches contrast 0.5 (best {best_contrast:.3} at {best_time:e} s)"
        ))),
        Err(e) => Err(e.into()),
    }
}

fn fidelity(args: &FidelityArgs) -> CliResult<Report> {
    match args.gate {
        GateArg::Cnot => {
            let (system, cfg) = args.cr.system()?;
            let gate_time = match args.gate_time.or(cfg.cr.as_ref().and_then(|c| c.gate_time.map(|q| q.si()))) {
                Some(t) => t,
                None => {
                    // calibrate on the rates alone; decoherence only enters the fidelity
                    let coherent = TwoQubitSystem { target_t2_by_control_state: [1.0, 1.0], ..system };
                    calibrate_cnot(&coherent, 1e-6)?.gate_time
                }
            };
            let r = average_gate_fidelity(&simulate_cnot_process(&system, gate_time)?, &cnot_unitary())?;
            let mut rep = Report::new("fidelity: cnot");
            rep.set("gate_time_s", gate_time)
                .set("process_fidelity", r.process_fidelity)
                .set("average_fidelity", r.average_fidelity)
                .set("dimension", r.dimension);
            Ok(rep)
        }
        GateArg::Not => {
            let q = args.qubit.resolve(reproduce::typical_qubit());
            let r = average_gate_fidelity(
                &simulate_single_qubit_process(&q, &DriveSpec::pi_pulse(&q, args.pulse))?,
                &pauli_x_unitary(),
            )?;
            let mut rep = Report::new("fidelity: not");
            rep.set("pulse_s", args.pulse)
                .set("process_fidelity", r.process_fidelity)
                .set("average_fidelity", r.average_fidelity)
                .set("dimension", r.dimension);
            Ok(rep)
        }
    }
}

fn layout_validate(source: &LayoutSource) -> CliResult<Report> {
    let layout = layout_from(source)?;
    let result = validate_layout(&layout);
    let mut rep = Report::new("layout-validate");
    rep.set("qubits", layout.qubits.len())
        .set("buses", layout.buses.len())
        .set("readout_lines", layout.readout_assignments.len());
    rep.check("layout rules", result.is_valid(), result.to_string());
    Ok(rep)
}

fn netlist(args: &NetlistArgs, out: &mut dyn Write) -> CliResult<Option<Report>> {
    let text = export_netlist(&layout_from(&args.source)?);
    match &args.output {
        Some(path) => {
            create(path)?.write_all(text.as_bytes())?;
            let mut rep = Report::new("netlist");
            rep.set("path", path.display().to_string()).set("lines", text.lines().count());
            Ok(Some(rep))
        }
        None => {
            out.write_all(text.as_bytes())?;
            Ok(None)
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult<Option<Report>> {
    let rep = match &cli.command {
        Command::StackupCheck(s) => stackup_check(s)?,
        Command::Dc(a) => dc(a)?,
        Command::Cpw(a) => cpw(a)?,
        Command::CavityModes(a) => cavity(a)?,
        Command::Sweep(a) => sweep(a)?,
        Command::Xtalk(a) => xtalk(a)?,
        Command::SimResonator(a) => sim_resonator(a)?,
        Command::FitResonator(a) => fit_resonator(a)?,
        Command::SimRabi(a) => sim_rabi(a)?,
        Command::FitRabi(a) => fit_rabi_cmd(a)?,
        Command::SimCr(a) => sim_cr(a)?,
        Command::CalibrateCnot(a) => calibrate(a)?,
        Command::Fidelity(a) => fidelity(a)?,
        Command::LayoutValidate(s) => layout_validate(s)?,
        Command::Netlist(a) => return netlist(a, out),
        Command::Reproduce(a) => reproduce::run(a.scenario, a.seed)?,
    };
    Ok(Some(rep))
}

/// Runs the command line and returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    let result = execute(&cli, out).and_then(|rep| {
        let Some(rep) = rep else { return Ok(0) };
        out.write_all(rep.table().as_bytes())?;
        if let Some(path) = &cli.report {
            create(path)?.write_all(rep.to_toml().as_bytes())?;
        }
        Ok(if rep.all_passed() { 0 } else { 1 })
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
