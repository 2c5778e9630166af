//! Qubit lattice of a surface-code chip: qubit roles and grid positions,
//! branched bus resonators, and the readout-contact assignment.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{domain, Result};
use crate::presets;
use crate::report::ValidationReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QubitRole {
    Data,
    MeasureX,
    MeasureZ,
}

impl QubitRole {
    pub fn as_str(self) -> &'static str {
        match self {
            QubitRole::Data => "data",
            QubitRole::MeasureX => "measure_x",
            QubitRole::MeasureZ => "measure_z",
        }
    }

    pub fn is_measure(self) -> bool {
        self != QubitRole::Data
    }
}

impl core::str::FromStr for QubitRole {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "data" => Ok(QubitRole::Data),
            "measure_x" => Ok(QubitRole::MeasureX),
            "measure_z" => Ok(QubitRole::MeasureZ),
            other => Err(domain!("unknown qubit role '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct QubitNode {
    pub id: String,
    pub role: QubitRole,
    /// (row, col) on the layout grid.
    pub position: (i32, i32),
}

impl QubitNode {
    pub fn new(id: &str, role: QubitRole, position: (i32, i32)) -> Self {
        Self { id: id.to_string(), role, position }
    }

    /// Nearest neighbours sit one step away along both grid axes.
    pub fn is_adjacent(&self, other: &QubitNode) -> bool {
        (self.position.0 - other.position.0).abs() == 1 && (self.position.1 - other.position.1).abs() == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub enum BusKind {
    #[default]
    HalfWavelengthBranched,
}

impl BusKind {
    pub fn as_str(self) -> &'static str {
        "half_wavelength_branched"
    }
}

impl core::str::FromStr for BusKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "half_wavelength_branched" => Ok(BusKind::HalfWavelengthBranched),
            other => Err(domain!("unknown bus kind '{other}'")),
        }
    }
}

/// A resonator with branches: the hub qubit is coupled to each branch qubit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BusResonator {
    pub id: String,
    pub hub: String,
    pub branches: BTreeSet<String>,
    pub kind: BusKind,
}

impl BusResonator {
    pub fn new(id: &str, hub: &str, branches: &[&str]) -> Self {
        Self {
            id: id.to_string(),
            hub: hub.to_string(),
            branches: branches.iter().map(|b| b.to_string()).collect(),
            kind: BusKind::HalfWavelengthBranched,
        }
    }

    pub fn endpoints(&self) -> BTreeSet<&str> {
        core::iter::once(self.hub.as_str()).chain(self.branches.iter().map(String::as_str)).collect()
    }

    /// (hub, branch) pairs.
    pub fn couplings(&self) -> impl Iterator<Item = (&str, &str)> {
        self.branches.iter().map(move |b| (self.hub.as_str(), b.as_str()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChipLayout {
    pub qubits: Vec<QubitNode>,
    pub buses: Vec<BusResonator>,
    /// Qubit id to package contact id.
    pub readout_assignments: BTreeMap<String, String>,
    /// Chip edge lengths (m).
    pub chip_size: (f64, f64),
    /// Named preset whose counts the layout must match.
    pub preset: Option<String>,
}

impl ChipLayout {
    pub fn qubit(&self, id: &str) -> Option<&QubitNode> {
        self.qubits.iter().find(|q| q.id == id)
    }

    pub fn count(&self, role: QubitRole) -> usize {
        self.qubits.iter().filter(|q| q.role == role).count()
    }

    /// Sorted, de-duplicated unordered coupled pairs.
    pub fn coupled_pairs(&self) -> BTreeSet<(String, String)> {
        self.buses
            .iter()
            .flat_map(|b| b.couplings())
            .map(|(a, b)| if a <= b { (a.to_string(), b.to_string()) } else { (b.to_string(), a.to_string()) })
            .collect()
    }
}

/// Counts a preset layout must reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayoutCounts {
    pub data: usize,
    pub measure: usize,
    pub buses: usize,
    pub contacts: usize,
}

pub fn preset_counts(name: &str) -> Option<LayoutCounts> {
    (name == presets::NAME).then_some(LayoutCounts { data: 4, measure: 9, buses: 6, contacts: presets::CONTACT_COUNT })
}

/// Thirteen qubits on a 5x5 grid: measure qubits on the even-even cells
/// (X and Z alternating), data qubits on the four odd-odd cells. Six
/// branched buses give every data qubit a coupling to each diagonal
/// measure neighbour.
pub fn nju13_layout() -> ChipLayout {
    let mut qubits = Vec::new();
    let (mut nx, mut nz, mut nd) = (0, 0, 0);
    for r in 0..5 {
        for c in 0..5 {
            let (role, id) = match (r % 2, c % 2) {
                (0, 0) if (r / 2 + c / 2) % 2 == 0 => {
                    nx += 1;
                    (QubitRole::MeasureX, format!("X{nx}"))
                }
                (0, 0) => {
                    nz += 1;
                    (QubitRole::MeasureZ, format!("Z{nz}"))
                }
                (1, 1) => {
                    nd += 1;
                    (QubitRole::Data, format!("D{nd}"))
                }
                _ => continue,
            };
            qubits.push(QubitNode { id, role, position: (r, c) });
        }
    }
    // X1 (0,0) Z1 (0,2) X2 (0,4) / Z2 (2,0) X3 (2,2) Z3 (2,4) / X4 (4,0) Z4 (4,2) X5 (4,4)
    let buses = alloc::vec![
        BusResonator::new("B1", "D1", &["X1", "Z1"]),
        BusResonator::new("B2", "D1", &["Z2", "X3"]),
        BusResonator::new("B3", "D2", &["Z1", "X2", "X3", "Z3"]),
        BusResonator::new("B4", "D3", &["Z2", "X3", "X4", "Z4"]),
        BusResonator::new("B5", "D4", &["X3", "Z3"]),
        BusResonator::new("B6", "D4", &["Z4", "X5"]),
    ];
    let mut ordered: Vec<&QubitNode> = qubits.iter().collect();
    ordered.sort_by_key(|q| q.position);
    let readout_assignments =
        ordered.iter().enumerate().map(|(i, q)| (q.id.clone(), format!("C{:02}", i + 1))).collect();
    ChipLayout {
        qubits,
        buses,
        readout_assignments,
        chip_size: (presets::CHIP_SIZE, presets::CHIP_SIZE),
        preset: Some(presets::NAME.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LayoutRule {
    CountMismatch,
    UnknownPreset,
    DuplicateQubit,
    DuplicatePosition,
    UnknownQubit,
    DuplicateBus,
    TooFewEndpoints,
    SameRoleCoupling,
    NonAdjacentCoupling,
    MissingCoupling,
    MissingReadout,
    DuplicateContact,
    NonPositiveChipSize,
}

impl LayoutRule {
    pub fn as_str(self) -> &'static str {
        match self {
            LayoutRule::CountMismatch => "count mismatch",
            LayoutRule::UnknownPreset => "unknown preset",
            LayoutRule::DuplicateQubit => "duplicate qubit",
            LayoutRule::DuplicatePosition => "duplicate position",
            LayoutRule::UnknownQubit => "unknown qubit",
            LayoutRule::DuplicateBus => "duplicate bus",
            LayoutRule::TooFewEndpoints => "too few endpoints",
            LayoutRule::SameRoleCoupling => "same-role coupling",
            LayoutRule::NonAdjacentCoupling => "non-adjacent coupling",
            LayoutRule::MissingCoupling => "missing coupling",
            LayoutRule::MissingReadout => "qubit without readout",
            LayoutRule::DuplicateContact => "duplicate contact",
            LayoutRule::NonPositiveChipSize => "non-positive chip size",
        }
    }
}

impl core::fmt::Display for LayoutRule {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn validate_layout(layout: &ChipLayout) -> ValidationReport<LayoutRule> {
    let mut report = ValidationReport::default();
    let mut ids = BTreeMap::new();
    let mut positions = BTreeSet::new();
    for q in &layout.qubits {
        if ids.insert(q.id.as_str(), q).is_some() {
            report.push(LayoutRule::DuplicateQubit, format!("qubit id {} appears twice", q.id));
        }
        if !positions.insert(q.position) {
            report.push(LayoutRule::DuplicatePosition, format!("{} shares position {:?}", q.id, q.position));
        }
    }
    if !(layout.chip_size.0 > 0.0 && layout.chip_size.1 > 0.0) {
        report.push(LayoutRule::NonPositiveChipSize, format!("chip size {:?}", layout.chip_size));
    }

    let mut bus_ids = BTreeSet::new();
    for bus in &layout.buses {
        if !bus_ids.insert(bus.id.as_str()) {
            report.push(LayoutRule::DuplicateBus, format!("bus id {} appears twice", bus.id));
        }
        if bus.endpoints().len() < 2 {
            report.push(LayoutRule::TooFewEndpoints, format!("bus {} couples fewer than two qubits", bus.id));
        }
        for id in bus.endpoints() {
            if !ids.contains_key(id) {
                report.push(LayoutRule::UnknownQubit, format!("bus {} references unknown qubit {id}", bus.id));
            }
        }
        for (a, b) in bus.couplings() {
            let (Some(qa), Some(qb)) = (ids.get(a), ids.get(b)) else { continue };
            if qa.role == qb.role {
                report.push(
                    LayoutRule::SameRoleCoupling,
                    format!("bus {} couples {a} and {b}, both {}", bus.id, qa.role.as_str()),
                );
            }
            if !qa.is_adjacent(qb) {
                report.push(
                    LayoutRule::NonAdjacentCoupling,
                    format!("bus {} couples {a} and {b}, which are not neighbours", bus.id),
                );
            }
        }
    }

    let pairs = layout.coupled_pairs();
    for d in layout.qubits.iter().filter(|q| q.role == QubitRole::Data) {
        for m in layout.qubits.iter().filter(|q| q.role.is_measure() && q.is_adjacent(d)) {
            let key = if d.id <= m.id { (d.id.clone(), m.id.clone()) } else { (m.id.clone(), d.id.clone()) };
            if !pairs.contains(&key) {
                report.push(LayoutRule::MissingCoupling, format!("data qubit {} is not bus-coupled to {}", d.id, m.id));
            }
        }
    }

    for q in &layout.qubits {
        if !layout.readout_assignments.contains_key(&q.id) {
            report.push(LayoutRule::MissingReadout, format!("{} has no readout contact", q.id));
        }
    }
    let mut contacts = BTreeMap::new();
    for (q, c) in &layout.readout_assignments {
        if !ids.contains_key(q.as_str()) {
            report.push(LayoutRule::UnknownQubit, format!("contact {c} assigned to unknown qubit {q}"));
        }
        if let Some(prev) = contacts.insert(c.as_str(), q.as_str()) {
            report.push(LayoutRule::DuplicateContact, format!("contact {c} serves both {prev} and {q}"));
        }
    }

    if let Some(name) = &layout.preset {
        match preset_counts(name) {
            None => report.push(LayoutRule::UnknownPreset, format!("no preset named '{name}'")),
            Some(expected) => {
                let measure = layout.count(QubitRole::MeasureX) + layout.count(QubitRole::MeasureZ);
                for (what, got, want) in [
                    ("data qubits", layout.count(QubitRole::Data), expected.data),
                    ("measure qubits", measure, expected.measure),
                    ("buses", layout.buses.len(), expected.buses),
                    ("contacts", contacts.len(), expected.contacts),
                ] {
                    if got != want {
                        report.push(LayoutRule::CountMismatch, format!("{name} expects {want} {what}, found {got}"));
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_counts_and_validity() {
        let l = nju13_layout();
        assert_eq!(l.qubits.len(), 13);
        assert_eq!(l.count(QubitRole::Data), 4);
        assert_eq!(l.count(QubitRole::MeasureX) + l.count(QubitRole::MeasureZ), 9);
        assert_eq!(l.buses.len(), 6);
        assert_eq!(l.readout_assignments.len(), 13);
        let r = validate_layout(&l);
        assert!(r.is_valid(), "{r}");
    }

    #[test]
    fn every_data_qubit_has_four_partners() {
        let l = nju13_layout();
        let pairs = l.coupled_pairs();
        assert_eq!(pairs.len(), 16);
    }

    #[test]
    fn missing_readout_reported() {
        let mut l = nju13_layout();
        l.readout_assignments.remove("X3");
        let r = validate_layout(&l);
        assert!(r.has(LayoutRule::MissingReadout));
        assert!(r.to_string().contains("qubit without readout"));
    }

    #[test]
    fn data_data_bus_reported() {
        let mut l = nju13_layout();
        l.buses.push(BusResonator::new("B7", "D1", &["D2"]));
        let r = validate_layout(&l);
        assert!(r.has(LayoutRule::SameRoleCoupling));
        assert!(r.has(LayoutRule::CountMismatch));
    }

    #[test]
    fn dropped_branch_reported() {
        let mut l = nju13_layout();
        l.buses[2].branches.remove("X2");
        assert!(validate_layout(&l).has(LayoutRule::MissingCoupling));
    }

    #[test]
    fn unknown_preset_reported() {
        let mut l = nju13_layout();
        l.preset = Some("other".into());
        assert!(validate_layout(&l).has(LayoutRule::UnknownPreset));
        l.preset = None;
        assert!(validate_layout(&l).is_valid());
    }
}
