use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qpack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpack")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value(out: &str, key: &str) -> f64 {
    let line = out
        .lines()
        .find(|l| l.split_whitespace().next() == Some(key))
        .unwrap_or_else(|| panic!("{key} missing in\n{out}"));
    line.split_whitespace().nth(1).unwrap().parse().unwrap()
}

#[test]
fn dc_reproduces_strip_resistance() {
    let o = qpack(&["reproduce", "dc"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!((value(&out, "resistance_ohm") - 0.1486).abs() < 1e-4);
    assert!((value(&out, "resistivity_from_measurement_ohm_m") - 9.08e-8).abs() < 1e-10);
}

#[test]
fn cpw_gap_with_units() {
    let o = qpack(&["cpw", "--w", "0.5mm", "--er", "3.66", "--solve-gap", "--z0", "50ohm"]);
    assert_eq!(o.status.code(), Some(0));
    let gap = value(&stdout(&o), "gap_m");
    assert!((0.09e-3..0.12e-3).contains(&gap), "{gap}");
}

#[test]
fn unreachable_impedance_is_a_failure() {
    let o = qpack(&["cpw", "--w", "0.5mm", "--solve-gap", "--z0", "2000"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(qpack(&["cpw", "--w", "0.5 furlongs", "--s", "1mm"]).status.code(), Some(2));
    assert_eq!(qpack(&["layout-validate", "--preset", "nope"]).status.code(), Some(2));
    assert_eq!(qpack(&["bogus"]).status.code(), Some(2));
}

#[test]
fn preset_layout_is_valid() {
    let o = qpack(&["layout-validate", "--preset", "nju13"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS"));
}

#[test]
fn broken_layout_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("layout.toml");
    fs::write(
        &cfg,
        r#"
[layout]
chip_size = ["16mm", "16mm"]
qubits = [
  { id = "D1", role = "data", position = [1, 1] },
  { id = "D2", role = "data", position = [1, 3] },
]
buses = [{ id = "B1", hub = "D1", branches = ["D2"] }]
readout = { D1 = "C01", D2 = "C02" }
"#,
    )
    .unwrap();
    let o = qpack(&["layout-validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("same-role coupling"), "{}", stdout(&o));
}

#[test]
fn config_errors_print_the_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[rabi]\nqubit = { f01 = \"5GHz\" }\n").unwrap();
    let o = qpack(&["sim-rabi", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("config schema"));
}

#[test]
fn netlist_round_trips_through_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nju13.net");
    assert_eq!(qpack(&["netlist", "--preset", "nju13", "-o", path.to_str().unwrap()]).status.code(), Some(0));
    let o = qpack(&["layout-validate", "--netlist", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&qpack(&["netlist"])), fs::read_to_string(&path).unwrap());
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> Vec<u8> {
    let path = dir.join(name);
    let mut full = args.to_vec();
    full.extend(["-o", path.to_str().unwrap()]);
    let o = qpack(&full);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    fs::read(path).unwrap()
}

#[test]
fn seeded_outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let res = ["sim-resonator", "--f0", "5.372GHz", "--qi", "62000", "--qc", "29520", "--noise", "0.01", "--seed", "3"];
    assert_eq!(run_to(dir.path(), "a.csv", &res), run_to(dir.path(), "b.csv", &res));
    let rabi = ["sim-rabi", "--noise", "0.01", "--seed", "5", "--points", "101"];
    assert_eq!(run_to(dir.path(), "c.csv", &rabi), run_to(dir.path(), "d.csv", &rabi));
    assert_eq!(run_to(dir.path(), "e.csv", &["sweep"]), run_to(dir.path(), "f.csv", &["sweep"]));
}

#[test]
fn simulated_traces_fit_back() {
    let dir = tempfile::tempdir().unwrap();
    let res = dir.path().join("res.csv");
    let o =
        qpack(&["sim-resonator", "--f0", "5.459GHz", "--qi", "13000", "--qc", "20800", "-o", res.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let fit = stdout(&qpack(&["fit-resonator", "-i", res.to_str().unwrap()]));
    assert!((value(&fit, "q_internal") / 13000.0 - 1.0).abs() < 5e-3, "{fit}");

    let pop = dir.path().join("rabi.csv");
    assert_eq!(qpack(&["sim-rabi", "--noise", "0.01", "-o", pop.to_str().unwrap()]).status.code(), Some(0));
    let fit = stdout(&qpack(&["fit-rabi", "-i", pop.to_str().unwrap()]));
    assert!((value(&fit, "tau_s") / 3.47e-6 - 1.0).abs() < 0.05, "{fit}");
}

#[test]
fn calibration_and_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("cal.toml");
    let o = qpack(&[
        "calibrate-cnot",
        "--rate0",
        "2.857MHz",
        "--rate1",
        "4.286MHz",
        "--coherence0",
        "1s",
        "--coherence1",
        "1s",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let t = value(&stdout(&o), "gate_time_s");
    assert!((t / 350e-9 - 1.0).abs() < 0.02, "{t}");
    let text = fs::read_to_string(report).unwrap();
    assert!(text.contains("gate_time_s"));
}

#[test]
fn calibration_without_contrast_exits_1() {
    let o = qpack(&["calibrate-cnot", "--rate0", "3MHz", "--rate1", "3MHz"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn cnot_fidelity_lands_in_band() {
    let o = qpack(&["fidelity", "--gate", "cnot"]);
    assert_eq!(o.status.code(), Some(0));
    let f = value(&stdout(&o), "average_fidelity");
    assert!((0.55..=0.80).contains(&f), "{f}");
}

#[test]
fn sample_config_drives_every_block() {
    let cfg = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/example.toml");
    for cmd in [
        &["stackup-check"][..],
        &["dc"],
        &["sweep"],
        &["sim-rabi"],
        &["calibrate-cnot"],
        &["fidelity", "--gate", "cnot"],
        &["layout-validate"],
    ] {
        let mut args = cmd.to_vec();
        args.extend(["--config", cfg]);
        let o = qpack(&args);
        assert_eq!(o.status.code(), Some(0), "{cmd:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}
