//! Quantities with explicit unit suffixes: `"0.508mm"`, `"5.372 GHz"`,
//! `"50mOhm"`. A bare number is taken to be in SI units.

use std::fmt;
use std::marker::PhantomData;

use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("cannot read '{input}' as a {dimension}: {reason}")]
pub struct UnitError {
    pub input: String,
    pub dimension: &'static str,
    pub reason: String,
}

/// A physical dimension and the suffixes it accepts, with their SI factors.
pub trait Dimension {
    const NAME: &'static str;
    const UNITS: &'static [(&'static str, f64)];
}

macro_rules! dimension {
    ($ty:ident, $name:literal, [$(($suffix:literal, $factor:expr)),* $(,)?]) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        pub struct $ty;
        impl Dimension for $ty {
            const NAME: &'static str = $name;
            const UNITS: &'static [(&'static str, f64)] = &[$(($suffix, $factor)),*];
        }
    };
}

dimension!(Length, "length", [("m", 1.0), ("cm", 1e-2), ("mm", 1e-3), ("um", 1e-6), ("µm", 1e-6), ("nm", 1e-9)]);
dimension!(Area, "area", [("m2", 1.0), ("cm2", 1e-4), ("mm2", 1e-6), ("um2", 1e-12), ("µm2", 1e-12)]);
dimension!(Frequency, "frequency", [("Hz", 1.0), ("kHz", 1e3), ("MHz", 1e6), ("GHz", 1e9)]);
dimension!(Time, "time", [("s", 1.0), ("ms", 1e-3), ("us", 1e-6), ("µs", 1e-6), ("ns", 1e-9), ("ps", 1e-12)]);
dimension!(
    Resistance,
    "resistance",
    [("Ohm", 1.0), ("ohm", 1.0), ("Ω", 1.0), ("mOhm", 1e-3), ("mohm", 1e-3), ("mΩ", 1e-3), ("kOhm", 1e3), ("kΩ", 1e3)]
);
dimension!(
    Resistivity,
    "resistivity",
    [("Ohm*m", 1.0), ("ohm*m", 1.0), ("Ω·m", 1.0), ("Ohm·m", 1.0), ("uOhm*cm", 1e-8), ("µΩ·cm", 1e-8)]
);
dimension!(Inductance, "inductance", [("H", 1.0), ("uH", 1e-6), ("µH", 1e-6), ("nH", 1e-9), ("pH", 1e-12)]);
dimension!(Capacitance, "capacitance", [("F", 1.0), ("nF", 1e-9), ("pF", 1e-12), ("fF", 1e-15)]);
dimension!(Attenuation, "attenuation", [("Np/m", 1.0)]);
dimension!(Ratio, "dimensionless number", [("%", 1e-2)]);

/// Parses `number [suffix]` for dimension `D` into SI units.
pub fn parse<D: Dimension>(input: &str) -> Result<f64, UnitError> {
    let fail = |reason: &str| UnitError { input: input.to_string(), dimension: D::NAME, reason: reason.to_string() };
    let s = input.trim();
    let split = s
        .char_indices()
        .find(|&(i, c)| {
            !(c.is_ascii_digit()
                || c == '.'
                || c == '+'
                || c == '-'
                || ((c == 'e' || c == 'E')
                    && s[i + 1..].starts_with(|n: char| n.is_ascii_digit() || n == '-' || n == '+')))
        })
        .map_or(s.len(), |(i, _)| i);
    let (number, suffix) = (s[..split].trim(), s[split..].trim());
    let value: f64 = number.parse().map_err(|_| fail("not a number"))?;
    if !value.is_finite() {
        return Err(fail("not finite"));
    }
    if suffix.is_empty() {
        return Ok(value);
    }
    // dividing by the exact integer 10^n keeps "350ns" == 350e-9
    let scale = |f: f64| if f < 1.0 { value / (1.0 / f).round() } else { value * f };
    D::UNITS.iter().find(|(u, _)| *u == suffix).map(|&(_, f)| scale(f)).ok_or_else(|| {
        let known: Vec<&str> = D::UNITS.iter().map(|u| u.0).collect();
        fail(&format!("unknown unit '{suffix}' (expected one of {})", known.join(", ")))
    })
}

/// Config value in SI units, written as a string with a suffix or a bare number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity<D> {
    value: f64,
    _dim: PhantomData<D>,
}

impl<D> Quantity<D> {
    pub fn new(value: f64) -> Self {
        Self { value, _dim: PhantomData }
    }

    pub fn si(self) -> f64 {
        self.value
    }
}

impl<'de, D: Dimension> Deserialize<'de> for Quantity<D> {
    fn deserialize<De: Deserializer<'de>>(deserializer: De) -> Result<Self, De::Error> {
        struct V<D>(PhantomData<D>);

        impl<D: Dimension> Visitor<'_> for V<D> {
            type Value = Quantity<D>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a {} such as a number or a string with a unit suffix", D::NAME)
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Self::Value, E> {
                Ok(Quantity::new(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Self::Value, E> {
                Ok(Quantity::new(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Self::Value, E> {
                Ok(Quantity::new(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Self::Value, E> {
                parse::<D>(v).map(Quantity::new).map_err(E::custom)
            }
        }

        deserializer.deserialize_any(V(PhantomData))
    }
}

/// Clap value parser for dimension `D`.
pub fn arg<D: Dimension>(s: &str) -> Result<f64, String> {
    parse::<D>(s).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suffixes() {
        assert_eq!(parse::<Length>("0.508mm").unwrap(), 0.508e-3);
        assert_eq!(parse::<Length>("35 µm").unwrap(), 35e-6);
        assert_eq!(parse::<Frequency>("5.372GHz").unwrap(), 5.372e9);
        assert_eq!(parse::<Resistance>("50mOhm").unwrap(), 0.05);
        assert_eq!(parse::<Resistivity>("9e-8 Ohm*m").unwrap(), 9e-8);
        assert_eq!(parse::<Time>("350ns").unwrap(), 350e-9);
        assert_eq!(parse::<Area>("1mm2").unwrap(), 1e-6);
    }

    #[test]
    fn bare_numbers_are_si() {
        assert_eq!(parse::<Length>("1e-3").unwrap(), 1e-3);
        assert_eq!(parse::<Ratio>("3.66").unwrap(), 3.66);
    }

    #[test]
    fn wrong_dimension_rejected() {
        let e = parse::<Length>("5GHz").unwrap_err();
        assert!(e.to_string().contains("unknown unit 'GHz'"));
        assert!(parse::<Length>("mm").is_err());
        assert!(parse::<Length>("inf").is_err());
    }

    #[test]
    fn exponent_is_not_a_suffix() {
        assert_eq!(parse::<Frequency>("5e9").unwrap(), 5e9);
        assert_eq!(parse::<Frequency>("5E+9Hz").unwrap(), 5e9);
    }
}
