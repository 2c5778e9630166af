//! TOML run configuration. Every block is optional; each command reads the
//! block it needs. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use qpack_core::cqed::{CrSignConvention, DriveSpec, Envelope, QubitSpec, TwoQubitSystem};
use qpack_core::em::{NetworkElement, TransmissionLineSegment, ViaDiscontinuity};
use qpack_core::lattice::{self, BusKind, BusResonator, ChipLayout, QubitNode, QubitRole};
use qpack_core::package::{ChipWindow, Contact, CpwTrace, Layer, LayerKind, LayerStack, Material};
use qpack_core::presets;
use serde::Deserialize;

use crate::units::{
    Area, Attenuation, Capacitance, Frequency, Inductance, Length, Quantity, Resistance, Resistivity, Time,
};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Parse(#[from] toml::de::Error),
    #[error("config has no [{0}] block")]
    MissingBlock(&'static str),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] qpack_core::Error),
}

pub type Result<T> = std::result::Result<T, ConfigError>;

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub stackup: Option<StackupConfig>,
    pub sweep: Option<SweepConfig>,
    pub fit: Option<FitConfig>,
    pub rabi: Option<RabiConfig>,
    pub cr: Option<CrConfig>,
    pub layout: Option<LayoutConfig>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_toml(&text)
    }

    pub fn stackup(&self) -> Result<&StackupConfig> {
        self.stackup.as_ref().ok_or(ConfigError::MissingBlock("stackup"))
    }

    pub fn sweep(&self) -> Result<&SweepConfig> {
        self.sweep.as_ref().ok_or(ConfigError::MissingBlock("sweep"))
    }

    pub fn rabi(&self) -> Result<&RabiConfig> {
        self.rabi.as_ref().ok_or(ConfigError::MissingBlock("rabi"))
    }

    pub fn cr(&self) -> Result<&CrConfig> {
        self.cr.as_ref().ok_or(ConfigError::MissingBlock("cr"))
    }

    pub fn layout(&self) -> Result<&LayoutConfig> {
        self.layout.as_ref().ok_or(ConfigError::MissingBlock("layout"))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LayerConfig {
    Metal { name: String, thickness: Quantity<Length>, resistivity: Quantity<Resistivity> },
    Dielectric { name: String, thickness: Quantity<Length>, relative_permittivity: f64 },
}

impl LayerConfig {
    pub fn build(&self) -> Layer {
        match self {
            LayerConfig::Metal { name, thickness, resistivity } => Layer::metal(name, thickness.si(), resistivity.si()),
            LayerConfig::Dielectric { name, thickness, relative_permittivity } => {
                Layer::dielectric(name, thickness.si(), *relative_permittivity)
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub width: Quantity<Length>,
    pub height: Quantity<Length>,
    pub depth_layers: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContactConfig {
    pub area: Quantity<Area>,
    pub protrusion: Quantity<Length>,
    pub resistance: Quantity<Resistance>,
    #[serde(default = "one")]
    pub count: usize,
}

fn one() -> usize {
    1
}

/// Strip used for DC checks. Thickness and resistivity default to the
/// metal layer the strip lives on.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceConfig {
    pub layer: String,
    pub strip_width: Quantity<Length>,
    pub gap: Quantity<Length>,
    pub length: Quantity<Length>,
    pub metal_thickness: Option<Quantity<Length>>,
    pub resistivity: Option<Quantity<Resistivity>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StackupConfig {
    pub layers: Vec<LayerConfig>,
    pub chip_window: Option<WindowConfig>,
    #[serde(default)]
    pub contacts: Vec<ContactConfig>,
    pub trace: Option<TraceConfig>,
}

impl StackupConfig {
    pub fn stack(&self) -> LayerStack {
        LayerStack {
            layers: self.layers.iter().map(LayerConfig::build).collect(),
            chip_window: self.chip_window.as_ref().map(|w| ChipWindow {
                width: w.width.si(),
                height: w.height.si(),
                depth_layers: w.depth_layers.iter().cloned().collect(),
            }),
        }
    }

    pub fn contacts(&self) -> Vec<Contact> {
        self.contacts
            .iter()
            .flat_map(|c| {
                let one =
                    Contact { area: c.area.si(), protrusion: c.protrusion.si(), contact_resistance: c.resistance.si() };
                std::iter::repeat_n(one, c.count)
            })
            .collect()
    }

    pub fn trace(&self) -> Result<CpwTrace> {
        let t = self.trace.as_ref().ok_or(ConfigError::MissingBlock("stackup.trace"))?;
        let stack = self.stack();
        let layer =
            stack.layer(&t.layer).ok_or_else(|| invalid(format!("trace layer '{}' is not in the stack", t.layer)))?;
        let layer_rho = match layer.material {
            Material::Metal { resistivity } => resistivity,
            Material::Dielectric { .. } => return Err(invalid(format!("trace layer '{}' is a dielectric", t.layer))),
        };
        debug_assert_eq!(layer.kind(), LayerKind::Metal);
        Ok(CpwTrace {
            strip_width: t.strip_width.si(),
            gap: t.gap.si(),
            length: t.length.si(),
            metal_thickness: t.metal_thickness.map_or(layer.thickness, Quantity::si),
            layer: t.layer.clone(),
            resistivity: t.resistivity.map_or(layer_rho, Quantity::si),
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ElementConfig {
    Line {
        z0: Quantity<Resistance>,
        effective_permittivity: f64,
        length: Quantity<Length>,
        attenuation: Option<Quantity<Attenuation>>,
    },
    Via {
        series_inductance: Quantity<Inductance>,
        shunt_capacitance: Quantity<Capacitance>,
        height: Quantity<Length>,
    },
    Resistor {
        resistance: Quantity<Resistance>,
    },
}

impl ElementConfig {
    pub fn build(&self) -> NetworkElement {
        match self {
            ElementConfig::Line { z0, effective_permittivity, length, attenuation } => {
                NetworkElement::Line(TransmissionLineSegment {
                    z0: z0.si(),
                    effective_permittivity: *effective_permittivity,
                    length: length.si(),
                    attenuation: attenuation.map_or(0.0, Quantity::si),
                })
            }
            ElementConfig::Via { series_inductance, shunt_capacitance, height } => {
                NetworkElement::Via(ViaDiscontinuity {
                    series_inductance: series_inductance.si(),
                    shunt_capacitance: shunt_capacitance.si(),
                    height: height.si(),
                })
            }
            ElementConfig::Resistor { resistance } => NetworkElement::SeriesResistor(resistance.si()),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub start: Quantity<Frequency>,
    pub stop: Quantity<Frequency>,
    pub points: usize,
    pub reference_impedance: Option<Quantity<Resistance>>,
    pub elements: Vec<ElementConfig>,
}

impl SweepConfig {
    pub fn chain(&self) -> Vec<NetworkElement> {
        self.elements.iter().map(ElementConfig::build).collect()
    }

    pub fn reference(&self) -> f64 {
        self.reference_impedance.map_or(presets::TARGET_IMPEDANCE, Quantity::si)
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub max_iterations: Option<usize>,
    pub step_tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitConfig {
    pub f01: Quantity<Frequency>,
    pub t1: Quantity<Time>,
    pub t2: Quantity<Time>,
}

impl QubitConfig {
    pub fn build(&self) -> QubitSpec {
        QubitSpec { f01: self.f01.si(), t1: self.t1.si(), t2: self.t2.si() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RabiConfig {
    pub qubit: QubitConfig,
    pub rabi_rate: Quantity<Frequency>,
    pub drive_frequency: Option<Quantity<Frequency>>,
    /// Pulse length; the drive stays on for the whole trace when absent.
    pub duration: Option<Quantity<Time>>,
    /// Raised-cosine ramp length; rectangular when absent.
    pub rise: Option<Quantity<Time>>,
    pub stop: Quantity<Time>,
    pub points: usize,
    #[serde(default)]
    pub noise: f64,
}

impl RabiConfig {
    pub fn build(&self) -> (QubitSpec, DriveSpec) {
        let qubit = self.qubit.build();
        let drive = DriveSpec {
            rabi_rate: self.rabi_rate.si(),
            drive_frequency: self.drive_frequency.map_or(qubit.f01, Quantity::si),
            duration: self.duration.map_or(self.stop.si(), Quantity::si),
            envelope: self.rise.map_or(Envelope::Rectangular, |r| Envelope::Shaped { rise: r.si() }),
        };
        (qubit, drive)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConventionConfig {
    ControlZeroSlower,
    ControlZeroFaster,
}

/// Either `rate0`/`rate1` (target rotation rates per control state) or
/// `zx_rate`/`ix_rate` with a sign convention.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrConfig {
    pub control: QubitConfig,
    pub target: QubitConfig,
    pub rate0: Option<Quantity<Frequency>>,
    pub rate1: Option<Quantity<Frequency>>,
    pub zx_rate: Option<Quantity<Frequency>>,
    pub ix_rate: Option<Quantity<Frequency>>,
    pub convention: Option<ConventionConfig>,
    pub coherence0: Quantity<Time>,
    pub coherence1: Quantity<Time>,
    pub t_max: Option<Quantity<Time>>,
    pub gate_time: Option<Quantity<Time>>,
}

impl CrConfig {
    pub fn build(&self) -> Result<TwoQubitSystem> {
        let (control, target) = (self.control.build(), self.target.build());
        let coherence = [self.coherence0.si(), self.coherence1.si()];
        match (self.rate0, self.rate1, self.zx_rate, self.ix_rate) {
            (Some(r0), Some(r1), None, None) => {
                if self.convention.is_some() {
                    return Err(invalid("convention is implied by rate0/rate1; drop it"));
                }
                Ok(TwoQubitSystem::from_conditional_rates(control, target, r0.si(), r1.si(), coherence))
            }
            (None, None, Some(zx), Some(ix)) => Ok(TwoQubitSystem {
                control,
                target,
                zx_rate: zx.si(),
                ix_rate: ix.si(),
                target_t2_by_control_state: coherence,
                convention: match self.convention.unwrap_or(ConventionConfig::ControlZeroSlower) {
                    ConventionConfig::ControlZeroSlower => CrSignConvention::ControlZeroSlower,
                    ConventionConfig::ControlZeroFaster => CrSignConvention::ControlZeroFaster,
                },
            }),
            _ => Err(invalid("[cr] needs exactly one of rate0+rate1 or zx_rate+ix_rate")),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitNodeConfig {
    pub id: String,
    /// `data`, `measure_x` or `measure_z`.
    pub role: String,
    pub position: [i32; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BusConfig {
    pub id: String,
    pub hub: String,
    pub branches: Vec<String>,
    pub kind: Option<String>,
}

/// `preset = "nju13"` alone selects the built-in layout; with `qubits`
/// present the preset only names the counts the layout must match.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutConfig {
    pub preset: Option<String>,
    pub chip_size: Option<[Quantity<Length>; 2]>,
    #[serde(default)]
    pub qubits: Vec<QubitNodeConfig>,
    #[serde(default)]
    pub buses: Vec<BusConfig>,
    #[serde(default)]
    pub readout: BTreeMap<String, String>,
}

impl LayoutConfig {
    pub fn build(&self) -> Result<ChipLayout> {
        if self.qubits.is_empty() {
            return match self.preset.as_deref() {
                Some(presets::NAME) => Ok(lattice::nju13_layout()),
                Some(other) => Err(invalid(format!("unknown layout preset '{other}'"))),
                None => Err(invalid("[layout] lists no qubits and names no preset")),
            };
        }
        let size = self.chip_size.ok_or_else(|| invalid("[layout] needs chip_size"))?;
        Ok(ChipLayout {
            qubits: self
                .qubits
                .iter()
                .map(|q| {
                    let role: QubitRole = q.role.parse()?;
                    Ok(QubitNode { id: q.id.clone(), role, position: (q.position[0], q.position[1]) })
                })
                .collect::<Result<_>>()?,
            buses: self
                .buses
                .iter()
                .map(|b| {
                    Ok(BusResonator {
                        id: b.id.clone(),
                        hub: b.hub.clone(),
                        branches: b.branches.iter().cloned().collect(),
                        kind: b.kind.as_deref().map_or(Ok(BusKind::default()), str::parse)?,
                    })
                })
                .collect::<Result<_>>()?,
            readout_assignments: self.readout.clone(),
            chip_size: (size[0].si(), size[1].si()),
            preset: self.preset.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const STACK: &str = r#"
[stackup]
layers = [
  { kind = "metal", name = "L1", thickness = "35um", resistivity = "9e-8Ohm*m" },
  { kind = "dielectric", name = "L2", thickness = "0.508mm", relative_permittivity = 3.66 },
  { kind = "metal", name = "L3", thickness = "35um", resistivity = "9e-8Ohm*m" },
]
chip_window = { width = "16.2mm", height = "16.2mm", depth_layers = ["L3"] }
contacts = [{ area = "1mm2", protrusion = "0.1mm", resistance = "50mOhm", count = 13 }]
trace = { layer = "L3", strip_width = "0.5mm", gap = "0.11mm", length = "28.9mm" }
"#;

    #[test]
    fn stackup_block() {
        let cfg = RunConfig::from_toml(STACK).unwrap();
        let s = cfg.stackup().unwrap();
        assert_eq!(s.stack().layers.len(), 3);
        assert_eq!(s.contacts().len(), 13);
        let t = s.trace().unwrap();
        assert_eq!(t.metal_thickness, 35e-6);
        assert_eq!(t.resistivity, 9e-8);
    }

    #[test]
    fn unknown_keys_rejected() {
        let e =
            RunConfig::from_toml("[sweep]\nstart = 1\nstop = 2\npoints = 3\nelements = []\nbogus = 1\n").unwrap_err();
        assert!(e.to_string().contains("bogus"), "{e}");
        let e = RunConfig::from_toml(
            "[sweep]\nstart=1\nstop=2\npoints=3\nelements=[{kind=\"resistor\", resistance=1, extra=2}]\n",
        )
        .unwrap_err();
        assert!(e.to_string().contains("extra"), "{e}");
    }

    #[test]
    fn parse_errors_carry_location() {
        let e =
            RunConfig::from_toml("[sweep]\nstart = \"3GHz\"\nstop = \"8mm\"\npoints = 3\nelements = []\n").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("line 3") && msg.contains("8mm"), "{msg}");
        // tagged layer tables only report the enclosing array
        let e = RunConfig::from_toml(
            "[stackup]\nlayers = [\n  { kind = \"metal\", name = \"L1\", thickness = \"35GHz\" },\n]\n",
        )
        .unwrap_err();
        assert!(e.to_string().contains("35GHz"), "{e}");
    }

    #[test]
    fn layout_preset_and_empty() {
        let cfg = RunConfig::from_toml("[layout]\npreset = \"nju13\"\n").unwrap();
        assert_eq!(cfg.layout().unwrap().build().unwrap().qubits.len(), 13);
        assert!(RunConfig::from_toml("").unwrap().layout().is_err());
        assert!(RunConfig::from_toml("[layout]\n").unwrap().layout().unwrap().build().is_err());
    }

    #[test]
    fn cr_rates_exclusive() {
        let base = r#"
[cr]
control = { f01 = "5GHz", t1 = "10us", t2 = "10us" }
target = { f01 = "5.1GHz", t1 = "10us", t2 = "10us" }
coherence0 = "750ns"
coherence1 = "340ns"
"#;
        let ok = RunConfig::from_toml(&format!("{base}rate0 = \"2.857MHz\"\nrate1 = \"4.286MHz\"\n")).unwrap();
        let s = ok.cr().unwrap().build().unwrap();
        assert!((s.zx_rate - 1.429e6).abs() < 1.0);
        let both = RunConfig::from_toml(&format!("{base}rate0 = 1\nrate1 = 2\nzx_rate = 1\nix_rate = 1\n")).unwrap();
        assert!(both.cr().unwrap().build().is_err());
    }
}
