//! Quantities with mandatory unit suffixes. Ordinary frequencies ("5GHz")
//! are converted to angular ones; "rad/s" is taken as is.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A quantity as written in a config file, before unit handling.
#[derive(Deserialize)]
#[serde(untagged)]
pub enum RawQuantity {
    Number(f64),
    Text(String),
}

fn split<'a>(s: &'a str, suffixes: &[(&str, f64)]) -> Option<(f64, f64)> {
    let s = s.trim();
    for &(suffix, scale) in suffixes {
        if let Some(num) = s.strip_suffix(suffix) {
            let num = num.trim();
            if let Ok(v) = num.parse::<f64>() {
                if v.is_finite() {
                    return Some((v, scale));
                }
            }
        }
    }
    None
}

// A scale of zero marks an angular unit.
const FREQUENCY_UNITS: [(&str, f64); 5] = [("rad/s", 0.0), ("GHz", 1e9), ("MHz", 1e6), ("kHz", 1e3), ("Hz", 1.0)];
const TIME_UNITS: [(&str, f64); 6] = [("ps", 1e-12), ("ns", 1e-9), ("us", 1e-6), ("µs", 1e-6), ("ms", 1e-3), ("s", 1.0)];

/// Angular frequency in rad/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawQuantity", into = "String")]
pub struct Frequency(pub f64);

impl Frequency {
    pub fn hz(f: f64) -> Self {
        Self(TAU * f)
    }
}

impl TryFrom<RawQuantity> for Frequency {
    type Error = String;
    fn try_from(raw: RawQuantity) -> Result<Self, String> {
        match raw {
            RawQuantity::Number(v) => Err(format!("frequency {v} needs a unit suffix, e.g. \"{v}MHz\" or \"{v} rad/s\"")),
            RawQuantity::Text(s) => split(&s, &FREQUENCY_UNITS)
                .map(|(v, scale)| if scale == 0.0 { Frequency(v) } else { Frequency::hz(v * scale) })
                .ok_or_else(|| format!("cannot read frequency {s:?}; use Hz, kHz, MHz, GHz or rad/s")),
        }
    }
}

impl From<Frequency> for String {
    fn from(f: Frequency) -> String {
        format!("{} rad/s", f.0)
    }
}

/// Duration in seconds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawQuantity", into = "String")]
pub struct Time(pub f64);

impl TryFrom<RawQuantity> for Time {
    type Error = String;
    fn try_from(raw: RawQuantity) -> Result<Self, String> {
        match raw {
            RawQuantity::Number(v) => Err(format!("time {v} needs a unit suffix, e.g. \"{v}ns\" or \"{v}s\"")),
            RawQuantity::Text(s) => split(&s, &TIME_UNITS)
                .map(|(v, scale)| Time(if scale == 1.0 { v } else { v * scale }))
                .ok_or_else(|| format!("cannot read time {s:?}; use ps, ns, us, ms or s")),
        }
    }
}

impl From<Time> for String {
    fn from(t: Time) -> String {
        format!("{} s", t.0)
    }
}

/// Position along the waveguide, absolute or in DQ wavelengths.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawQuantity", into = "String")]
pub enum Length {
    Metres(f64),
    Wavelengths(f64),
}

impl Length {
    pub fn metres(self, wavelength: f64) -> f64 {
        match self {
            Length::Metres(m) => m,
            Length::Wavelengths(w) => w * wavelength,
        }
    }
}

impl TryFrom<RawQuantity> for Length {
    type Error = String;
    fn try_from(raw: RawQuantity) -> Result<Self, String> {
        let RawQuantity::Text(s) = raw else {
            return Err("positions need a unit: \"10mm\", \"0.01m\" or \"0.5lambda\"".into());
        };
        if let Some((v, _)) = split(&s, &[("lambda", 1.0), ("λ", 1.0)]) {
            return Ok(Length::Wavelengths(v));
        }
        split(&s, &[("mm", 1e-3), ("um", 1e-6), ("µm", 1e-6), ("m", 1.0)])
            .map(|(v, scale)| Length::Metres(if scale == 1.0 { v } else { v * scale }))
            .ok_or_else(|| format!("cannot read position {s:?}; use m, mm, um or lambda"))
    }
}

impl From<Length> for String {
    fn from(l: Length) -> String {
        match l {
            Length::Metres(m) => format!("{m} m"),
            Length::Wavelengths(w) => format!("{w} lambda"),
        }
    }
}

/// Speed in m/s; a bare number is read as m/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawQuantity", into = "f64")]
pub struct Velocity(pub f64);

impl TryFrom<RawQuantity> for Velocity {
    type Error = String;
    fn try_from(raw: RawQuantity) -> Result<Self, String> {
        match raw {
            RawQuantity::Number(v) => Ok(Velocity(v)),
            RawQuantity::Text(s) => split(&s, &[("m/s", 1.0)]).map(|(v, _)| Velocity(v)).ok_or_else(|| format!("cannot read velocity {s:?}")),
        }
    }
}

impl From<Velocity> for f64 {
    fn from(v: Velocity) -> f64 {
        v.0
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} rad/s", self.0)
    }
}
