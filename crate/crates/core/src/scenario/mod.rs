//! Scenario configuration files, the runner behind the `jqf` binary and its
//! table/report output.

mod run;
mod table;
pub mod units;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::JqfError;
use crate::model::SystemParameters;
pub use run::{run, RunReport};
pub use table::Table;
use units::{Frequency, Length, Time, Velocity};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{module}: {source}")]
    Physics {
        module: &'static str,
        #[source]
        source: JqfError,
    },
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl ScenarioError {
    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Config(_) | ScenarioError::Io { .. } => 1,
            ScenarioError::Physics { .. } => 2,
        }
    }
}

pub(crate) fn physics<T>(module: &'static str, r: Result<T, JqfError>) -> Result<T, ScenarioError> {
    r.map_err(|source| ScenarioError::Physics { module, source })
}

/// System parameters as written by the user.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub omega1: Frequency,
    pub omega2: Frequency,
    pub l1: Length,
    pub l2: Length,
    pub gamma1: Frequency,
    pub gamma2: Frequency,
    pub gamma_i1: Frequency,
    pub gamma_i2: Frequency,
    pub velocity: Velocity,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self::from_parameters(&SystemParameters::default())
    }
}

impl SystemConfig {
    pub fn from_parameters(p: &SystemParameters) -> Self {
        Self {
            omega1: Frequency(p.omega1),
            omega2: Frequency(p.omega2),
            l1: Length::Metres(p.l1),
            l2: Length::Metres(p.l2),
            gamma1: Frequency(p.gamma1),
            gamma2: Frequency(p.gamma2),
            gamma_i1: Frequency(p.gamma_i1),
            gamma_i2: Frequency(p.gamma_i2),
            velocity: Velocity(p.velocity),
        }
    }

    /// Angular-unit parameters; wavelength positions refer to DQ.
    pub fn resolve(&self) -> Result<SystemParameters, ScenarioError> {
        let wavelength = TAU * self.velocity.0 / self.omega1.0;
        let p = SystemParameters {
            omega1: self.omega1.0,
            omega2: self.omega2.0,
            l1: self.l1.metres(wavelength),
            l2: self.l2.metres(wavelength),
            gamma1: self.gamma1.0,
            gamma2: self.gamma2.0,
            gamma_i1: self.gamma_i1.0,
            gamma_i2: self.gamma_i2.0,
            velocity: self.velocity.0,
        };
        p.validate().map_err(|e| ScenarioError::Config(e.to_string()))?;
        Ok(p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayScenario {
    pub t_end: Time,
    /// Number of intervals on the output grid.
    pub samples: usize,
}

impl Default for DecayScenario {
    fn default() -> Self {
        Self { t_end: Time(200e-9), samples: 2000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DdeScenario {
    pub t_end: Time,
    /// Integrator step; the stability bound when omitted.
    pub step: Option<Time>,
}

impl Default for DdeScenario {
    fn default() -> Self {
        Self { t_end: Time(200e-9), step: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RabiScenario {
    /// Free-DQ Rabi frequency Ω₁.
    pub rabi_frequency: Frequency,
    pub t_end: Time,
    pub samples: usize,
}

impl Default for RabiScenario {
    fn default() -> Self {
        Self { rabi_frequency: Frequency::hz(25e6), t_end: Time(200e-9), samples: 2000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PiPulseScenario {
    pub duration: Time,
    pub t_end: Time,
    pub samples: usize,
}

impl Default for PiPulseScenario {
    fn default() -> Self {
        Self { duration: Time(20e-9), t_end: Time(1e-6), samples: 1000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseTrainScenario {
    pub duration: Time,
    pub period: Time,
    /// Pulses at k·period for every k·period < t_end when omitted.
    pub n_pulses: Option<usize>,
    pub t_end: Time,
    pub samples: usize,
}

impl Default for PulseTrainScenario {
    fn default() -> Self {
        Self { duration: Time(20e-9), period: Time(100e-9), n_pulses: None, t_end: Time(5.02e-6), samples: 1004 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetuningSweep {
    /// δω = ω₂ − ω₁ range.
    pub from: Frequency,
    pub to: Frequency,
    pub points: usize,
}

impl Default for DetuningSweep {
    fn default() -> Self {
        Self { from: Frequency::hz(-400e6), to: Frequency::hz(400e6), points: 161 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PositionSweep {
    /// JQF position range.
    pub from: Length,
    pub to: Length,
    pub points: usize,
    /// Time at which P₁ is read.
    pub t_read: Time,
}

impl Default for PositionSweep {
    fn default() -> Self {
        Self { from: Length::Wavelengths(0.0), to: Length::Wavelengths(1.0), points: 201, t_read: Time(1e-6) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scenario {
    Decay(DecayScenario),
    DdeCompare(DdeScenario),
    Rabi(RabiScenario),
    PiPulse(PiPulseScenario),
    PulseTrain(PulseTrainScenario),
    DetuningSweep(DetuningSweep),
    PositionSweep(PositionSweep),
}

impl Scenario {
    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::Decay(_) => "decay",
            Scenario::DdeCompare(_) => "dde-compare",
            Scenario::Rabi(_) => "rabi",
            Scenario::PiPulse(_) => "pi-pulse",
            Scenario::PulseTrain(_) => "pulse-train",
            Scenario::DetuningSweep(_) => "detuning-sweep",
            Scenario::PositionSweep(_) => "position-sweep",
        }
    }

    /// Default scenario of a given kind.
    pub fn default_for(kind: &str) -> Option<Self> {
        Some(match kind {
            "decay" => Scenario::Decay(Default::default()),
            "dde-compare" => Scenario::DdeCompare(Default::default()),
            "rabi" => Scenario::Rabi(Default::default()),
            "pi-pulse" => Scenario::PiPulse(Default::default()),
            "pulse-train" => Scenario::PulseTrain(Default::default()),
            "detuning-sweep" => Scenario::DetuningSweep(Default::default()),
            "position-sweep" => Scenario::PositionSweep(Default::default()),
            _ => return None,
        })
    }

    pub fn is_sweep(&self) -> bool {
        matches!(self, Scenario::DetuningSweep(_) | Scenario::PositionSweep(_))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub format: OutputFormat,
    /// Standard output when absent.
    pub path: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub system: SystemConfig,
    #[serde(default)]
    pub scenario: Option<Scenario>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario) -> Self {
        Self { system: SystemConfig::default(), scenario: Some(scenario), output: OutputConfig::default() }
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(text).map_err(|e| ScenarioError::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_reference_system() {
        let cfg = ScenarioConfig::from_json("{}").unwrap();
        assert_eq!(cfg.system.resolve().unwrap(), SystemParameters::default());
        assert!(cfg.scenario.is_none());
    }

    #[test]
    fn reads_units() {
        let cfg = ScenarioConfig::from_json(
            r#"{"system": {"l2": "0.5lambda", "gamma2": "50MHz"},
                "scenario": {"kind": "pi-pulse", "duration": "30ns"}}"#,
        )
        .unwrap();
        let p = cfg.system.resolve().unwrap();
        assert_eq!(p.l2, 0.5 * p.wavelength());
        assert_eq!(p.gamma2, TAU * 50e6);
        match cfg.scenario.unwrap() {
            Scenario::PiPulse(s) => {
                assert_eq!(s.duration.0, 30.0 * 1e-9);
                assert_eq!(s.t_end.0, 1e-6);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_fields_and_bare_numbers() {
        for bad in [
            r#"{"sytem": {}}"#,
            r#"{"system": {"gamma3": "1Hz"}}"#,
            r#"{"system": {"gamma1": 12566.37}}"#,
            r#"{"scenario": {"kind": "decay", "t_end": "1us", "tend": "2us"}}"#,
            r#"{"scenario": {"kind": "teleport"}}"#,
            r#"{"system": {"velocity": -1}}"#,
        ] {
            let parsed = ScenarioConfig::from_json(bad).and_then(|c| c.system.resolve().map(|_| c));
            assert!(matches!(parsed, Err(ScenarioError::Config(_))), "{bad}");
        }
    }

    #[test]
    fn json_round_trip() {
        let cfg = ScenarioConfig::new(Scenario::PulseTrain(PulseTrainScenario::default()));
        let back = ScenarioConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }
}
