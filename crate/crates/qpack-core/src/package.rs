//! Physical model of the multi-layer PCB package and its DC characterization.
//!
//! All quantities are SI: meters, ohms, ohm-meters.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{domain, Result};
use crate::report::ValidationReport;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Material {
    Metal { resistivity: f64 },
    Dielectric { relative_permittivity: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerKind {
    Metal,
    Dielectric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub name: String,
    pub thickness: f64,
    pub material: Material,
}

impl Layer {
    pub fn metal(name: impl Into<String>, thickness: f64, resistivity: f64) -> Self {
        Self { name: name.into(), thickness, material: Material::Metal { resistivity } }
    }

    pub fn dielectric(name: impl Into<String>, thickness: f64, relative_permittivity: f64) -> Self {
        Self { name: name.into(), thickness, material: Material::Dielectric { relative_permittivity } }
    }

    pub fn kind(&self) -> LayerKind {
        match self.material {
            Material::Metal { .. } => LayerKind::Metal,
            Material::Dielectric { .. } => LayerKind::Dielectric,
        }
    }
}

/// Opening milled into the top layers that receives the chip face down.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipWindow {
    pub width: f64,
    pub height: f64,
    pub depth_layers: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    pub layers: Vec<Layer>,
    pub chip_window: Option<ChipWindow>,
}

impl LayerStack {
    pub fn layer(&self, name: &str) -> Option<&Layer> {
        self.layers.iter().find(|l| l.name == name)
    }

    pub fn count(&self, kind: LayerKind) -> usize {
        self.layers.iter().filter(|l| l.kind() == kind).count()
    }

    pub fn total_thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness).sum()
    }
}

/// Center strip of a buried coplanar waveguide.
#[derive(Debug, Clone, PartialEq)]
pub struct CpwTrace {
    pub strip_width: f64,
    pub gap: f64,
    pub length: f64,
    pub metal_thickness: f64,
    pub layer: String,
    pub resistivity: f64,
}

impl CpwTrace {
    pub fn cross_section(&self) -> f64 {
        self.strip_width * self.metal_thickness
    }

    fn check(&self) -> Result<()> {
        let positive =
            [("strip_width", self.strip_width), ("gap", self.gap), ("metal_thickness", self.metal_thickness)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain!("{name} must be positive, got {v}"));
            }
        }
        if !(self.length >= 0.0 && self.length.is_finite()) {
            return Err(domain!("length must be non-negative, got {}", self.length));
        }
        if !(self.resistivity >= 0.0 && self.resistivity.is_finite()) {
            return Err(domain!("resistivity must be non-negative, got {}", self.resistivity));
        }
        Ok(())
    }
}

/// Protruding strip end that touches an on-chip receptacle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contact {
    pub area: f64,
    pub protrusion: f64,
    pub contact_resistance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum StackRule {
    EmptyStack,
    NonAlternating,
    OuterLayerNotMetal,
    NonPositiveDimension,
    InvalidMaterial,
    DuplicateName,
    MissingWindow,
    UnknownLayer,
}

impl StackRule {
    pub fn as_str(self) -> &'static str {
        match self {
            StackRule::EmptyStack => "empty stack",
            StackRule::NonAlternating => "non-alternating",
            StackRule::OuterLayerNotMetal => "outer layer not metal",
            StackRule::NonPositiveDimension => "non-positive dimension",
            StackRule::InvalidMaterial => "invalid material",
            StackRule::DuplicateName => "duplicate layer name",
            StackRule::MissingWindow => "missing window",
            StackRule::UnknownLayer => "unknown layer",
        }
    }
}

impl fmt::Display for StackRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Checks the structural rules of a stackup. Every problem becomes a report entry.
///
/// Rules: the stack is non-empty, metal and dielectric layers alternate with
/// metal (ground) on both faces, thicknesses are positive, metals carry a
/// positive resistivity and dielectrics a permittivity of at least 1, layer
/// names are unique, and a chip window with positive size is cut through
/// layers that exist in the stack.
pub fn validate_stackup(stack: &LayerStack) -> ValidationReport<StackRule> {
    let mut report = ValidationReport::default();

    if stack.layers.is_empty() {
        report.push(StackRule::EmptyStack, "stack has no layers");
    }

    for pair in stack.layers.windows(2) {
        if pair[0].kind() == pair[1].kind() {
            report.push(
                StackRule::NonAlternating,
                format!("{} and {} are both {:?}", pair[0].name, pair[1].name, pair[0].kind()),
            );
        }
    }

    if let (Some(first), Some(last)) = (stack.layers.first(), stack.layers.last()) {
        for l in [first, last] {
            if l.kind() != LayerKind::Metal {
                report.push(StackRule::OuterLayerNotMetal, format!("{} is an outer dielectric", l.name));
            }
        }
    }

    let mut seen = BTreeSet::new();
    for l in &stack.layers {
        if !(l.thickness > 0.0 && l.thickness.is_finite()) {
            report.push(StackRule::NonPositiveDimension, format!("{} thickness {}", l.name, l.thickness));
        }
        match l.material {
            Material::Metal { resistivity } if !(resistivity > 0.0 && resistivity.is_finite()) => {
                report.push(StackRule::InvalidMaterial, format!("{} resistivity {}", l.name, resistivity));
            }
            Material::Dielectric { relative_permittivity }
                if !(relative_permittivity >= 1.0 && relative_permittivity.is_finite()) =>
            {
                report.push(
                    StackRule::InvalidMaterial,
                    format!("{} relative permittivity {}", l.name, relative_permittivity),
                );
            }
            _ => {}
        }
        if !seen.insert(l.name.as_str()) {
            report.push(StackRule::DuplicateName, format!("{} appears twice", l.name));
        }
    }

    match &stack.chip_window {
        None => report.push(StackRule::MissingWindow, "no chip window"),
        Some(w) => {
            for (name, v) in [("width", w.width), ("height", w.height)] {
                if !(v > 0.0 && v.is_finite()) {
                    report.push(StackRule::NonPositiveDimension, format!("window {name} {v}"));
                }
            }
            if w.depth_layers.is_empty() {
                report.push(StackRule::MissingWindow, "window cuts through no layer");
            }
            for name in &w.depth_layers {
                if stack.layer(name).is_none() {
                    report.push(StackRule::UnknownLayer, format!("window references {name}"));
                }
            }
        }
    }

    report
}

/// DC resistance of the strip, `rho * l / (w * t)`.
pub fn dc_resistance(trace: &CpwTrace) -> Result<f64> {
    trace.check()?;
    Ok(trace.resistivity * trace.length / trace.cross_section())
}

/// Resistivity implied by a four-point resistance measurement of `trace`'s strip.
/// The trace's own resistivity field is ignored.
pub fn resistivity_from_measurement(resistance: f64, trace: &CpwTrace) -> Result<f64> {
    if !(resistance >= 0.0 && resistance.is_finite()) {
        return Err(domain!("resistance must be non-negative, got {resistance}"));
    }
    trace.check()?;
    if trace.length == 0.0 {
        return Err(domain!("zero-length trace"));
    }
    Ok(resistance * trace.cross_section() / trace.length)
}

/// Strip resistance plus every contact on the path, all in series.
pub fn series_path_resistance(trace: &CpwTrace, contacts: &[Contact]) -> Result<f64> {
    let mut total = dc_resistance(trace)?;
    for c in contacts {
        if !(c.contact_resistance >= 0.0 && c.contact_resistance.is_finite()) {
            return Err(domain!("contact resistance must be non-negative, got {}", c.contact_resistance));
        }
        total += c.contact_resistance;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn longest_trace() -> CpwTrace {
        presets::nju13_longest_trace()
    }

    #[test]
    fn preset_stack_is_valid() {
        let report = validate_stackup(&presets::nju13_stack());
        assert!(report.is_valid(), "{report}");
    }

    #[test]
    fn adjacent_dielectrics_rejected() {
        let mut stack = presets::nju13_stack();
        stack.layers[2] = Layer::dielectric("L3", 35e-6, 3.66);
        assert!(validate_stackup(&stack).has(StackRule::NonAlternating));
    }

    #[test]
    fn empty_stack_rejected() {
        let stack = LayerStack { layers: Vec::new(), chip_window: presets::nju13_stack().chip_window };
        let report = validate_stackup(&stack);
        assert!(report.has(StackRule::EmptyStack));
        // the window now names layers that do not exist
        assert!(report.has(StackRule::UnknownLayer));
    }

    #[test]
    fn missing_window_rejected() {
        let mut stack = presets::nju13_stack();
        stack.chip_window = None;
        assert!(validate_stackup(&stack).has(StackRule::MissingWindow));
    }

    #[test]
    fn longest_trace_resistance() {
        let r = dc_resistance(&longest_trace()).unwrap();
        assert!((r - 0.148_628_571).abs() < 1e-6, "{r}");
        assert!((r - 0.15).abs() / 0.15 < 0.01);
    }

    #[test]
    fn zero_length_is_zero_ohm() {
        let t = CpwTrace { length: 0.0, ..longest_trace() };
        assert_eq!(dc_resistance(&t).unwrap(), 0.0);
        assert!(resistivity_from_measurement(0.1, &t).is_err());
    }

    #[test]
    fn doubling_width_halves_resistance() {
        let t = longest_trace();
        let wide = CpwTrace { strip_width: 2.0 * t.strip_width, ..t.clone() };
        let ratio = dc_resistance(&wide).unwrap() / dc_resistance(&t).unwrap();
        assert!((ratio - 0.5).abs() < 1e-15);
    }

    #[test]
    fn non_positive_geometry_is_domain_error() {
        let t = CpwTrace { metal_thickness: 0.0, ..longest_trace() };
        assert!(matches!(dc_resistance(&t), Err(crate::Error::Domain(_))));
        let t = CpwTrace { strip_width: -1e-3, ..longest_trace() };
        assert!(dc_resistance(&t).is_err());
    }

    #[test]
    fn measured_resistivity() {
        let rho = resistivity_from_measurement(0.15, &longest_trace()).unwrap();
        assert!((rho - 9.083e-8).abs() < 1e-11, "{rho}");
        assert_eq!(resistivity_from_measurement(0.0, &longest_trace()).unwrap(), 0.0);
    }

    #[test]
    fn series_path() {
        let t = longest_trace();
        let c = presets::nju13_contact();
        let r = series_path_resistance(&t, &[c]).unwrap();
        assert!((r - 0.198_628_571).abs() < 1e-6);
        let zero = CpwTrace { length: 0.0, ..t.clone() };
        assert!((series_path_resistance(&zero, &[c]).unwrap() - 0.05).abs() < 1e-15);
        let two = series_path_resistance(&zero, &[c, c]).unwrap();
        assert!((two - 0.1).abs() < 1e-15);
    }
}
