use alloc::vec::Vec;

use super::elements::TransmissionLineSegment;
use super::network::FrequencyGrid;
use super::to_db;
use crate::error::{domain, Result};

/// How two neighbouring signal lines are routed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum IsolationPreset {
    /// Strip lines buried between ground planes in the PCB.
    BuriedCpw,
    /// Conventional bond wires between a planar sample holder and the chip.
    WireBond,
}

impl IsolationPreset {
    /// Calibrated far-end coupling coefficient. Tuning knobs, not derived from geometry.
    pub fn coefficient(self) -> f64 {
        match self {
            IsolationPreset::BuriedCpw => 3e-3,
            IsolationPreset::WireBond => 3e-2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            IsolationPreset::BuriedCpw => "buried_cpw",
            IsolationPreset::WireBond => "wire_bond",
        }
    }
}

impl core::str::FromStr for IsolationPreset {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "buried_cpw" => Ok(IsolationPreset::BuriedCpw),
            "wire_bond" => Ok(IsolationPreset::WireBond),
            other => Err(domain!("unknown isolation preset '{other}'")),
        }
    }
}

/// Two lines running side by side over `line.length`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledPair {
    pub line: TransmissionLineSegment,
    pub coupling_coefficient: f64,
    pub isolation_preset: IsolationPreset,
}

impl CoupledPair {
    pub fn new(
        line: TransmissionLineSegment,
        coupling_coefficient: f64,
        isolation_preset: IsolationPreset,
    ) -> Result<Self> {
        line.validate()?;
        if !(0.0..1.0).contains(&coupling_coefficient) {
            return Err(domain!("coupling coefficient must lie in [0, 1), got {coupling_coefficient}"));
        }
        Ok(Self { line, coupling_coefficient, isolation_preset })
    }

    pub fn from_preset(preset: IsolationPreset, line: TransmissionLineSegment) -> Result<Self> {
        Self::new(line, preset.coefficient(), preset)
    }
}

/// Weak-coupling far-end crosstalk, `20 log10(k |sin(beta l)|)`, per grid point.
pub fn crosstalk_s21(pair: &CoupledPair, grid: &FrequencyGrid) -> Vec<f64> {
    grid.points()
        .iter()
        .map(|&f| {
            let phase = pair.line.beta(f) * pair.line.length;
            to_db(pair.coupling_coefficient * libm::sin(phase).abs())
        })
        .collect()
}
