//! Line-oriented layout netlist. Records are sorted so exports diff cleanly:
//!
//! ```text
//! qpack-netlist 1
//! chip <width_m> <height_m>
//! preset <name>
//! qubit <id> <role> <row> <col>
//! bus <id> <kind> <hub> <branch>...
//! readout <qubit> <contact>
//! contact <id>
//! ```

use std::collections::BTreeSet;
use std::fmt::Write;

use qpack_core::lattice::{BusResonator, ChipLayout, QubitNode};

pub const MAGIC: &str = "qpack-netlist 1";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("netlist line {line}: {msg}")]
pub struct NetlistError {
    pub line: usize,
    pub msg: String,
}

pub fn export_netlist(layout: &ChipLayout) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "chip {} {}", layout.chip_size.0, layout.chip_size.1);
    if let Some(p) = &layout.preset {
        let _ = writeln!(out, "preset {p}");
    }
    let mut qubits: Vec<&QubitNode> = layout.qubits.iter().collect();
    qubits.sort();
    for q in qubits {
        let _ = writeln!(out, "qubit {} {} {} {}", q.id, q.role.as_str(), q.position.0, q.position.1);
    }
    let mut buses: Vec<&BusResonator> = layout.buses.iter().collect();
    buses.sort();
    for b in buses {
        let branches: Vec<&str> = b.branches.iter().map(String::as_str).collect();
        let _ = writeln!(out, "bus {} {} {} {}", b.id, b.kind.as_str(), b.hub, branches.join(" "));
    }
    for (q, c) in &layout.readout_assignments {
        let _ = writeln!(out, "readout {q} {c}");
    }
    let contacts: BTreeSet<&String> = layout.readout_assignments.values().collect();
    for c in contacts {
        let _ = writeln!(out, "contact {c}");
    }
    out
}

pub fn parse_netlist(text: &str) -> Result<ChipLayout, NetlistError> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, MAGIC)) => {}
        Some((line, other)) => return Err(NetlistError { line, msg: format!("expected '{MAGIC}', found '{other}'") }),
        None => return Err(NetlistError { line: 1, msg: "empty netlist".into() }),
    }
    let mut layout = ChipLayout {
        qubits: Vec::new(),
        buses: Vec::new(),
        readout_assignments: Default::default(),
        chip_size: (0.0, 0.0),
        preset: None,
    };
    let mut chip_seen = false;
    let mut contacts = BTreeSet::new();
    for (line, text) in lines {
        let err = |msg: String| NetlistError { line, msg };
        let fields: Vec<&str> = text.split_whitespace().collect();
        let num = |s: &str| s.parse::<f64>().map_err(|_| err(format!("'{s}' is not a number")));
        let int = |s: &str| s.parse::<i32>().map_err(|_| err(format!("'{s}' is not an integer")));
        match fields.as_slice() {
            ["chip", w, h] => {
                layout.chip_size = (num(w)?, num(h)?);
                chip_seen = true;
            }
            ["preset", name] => layout.preset = Some(name.to_string()),
            ["qubit", id, role, r, c] => {
                let role = role.parse().map_err(|e: qpack_core::Error| err(e.to_string()))?;
                layout.qubits.push(QubitNode { id: id.to_string(), role, position: (int(r)?, int(c)?) });
            }
            ["bus", id, kind, hub, branches @ ..] => layout.buses.push(BusResonator {
                id: id.to_string(),
                hub: hub.to_string(),
                branches: branches.iter().map(|b| b.to_string()).collect(),
                kind: kind.parse().map_err(|e: qpack_core::Error| err(e.to_string()))?,
            }),
            ["readout", q, c] => {
                if layout.readout_assignments.insert(q.to_string(), c.to_string()).is_some() {
                    return Err(err(format!("qubit {q} has two readout lines")));
                }
            }
            ["contact", c] => {
                contacts.insert(c.to_string());
            }
            _ => return Err(err(format!("unrecognised record '{text}'"))),
        }
    }
    if !chip_seen {
        return Err(NetlistError { line: 1, msg: "missing chip record".into() });
    }
    let assigned: BTreeSet<String> = layout.readout_assignments.values().cloned().collect();
    if assigned != contacts {
        return Err(NetlistError { line: 1, msg: "contact records do not match readout lines".into() });
    }
    Ok(layout)
}
