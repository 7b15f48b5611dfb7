use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    Experiment, MaudlinConfig, MaudlinExperiment, QuantumLiarConfig, QuantumLiarExperiment, RenningerConfig,
    RenningerExperiment, SwapConfig, SwapExperiment,
};
use crate::error::{Error, Result};
use crate::stats::ChshConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Renninger,
    Maudlin,
    QuantumLiar,
    Swap,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 4] = [
        ScenarioKind::Renninger,
        ScenarioKind::Maudlin,
        ScenarioKind::QuantumLiar,
        ScenarioKind::Swap,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::Renninger => "renninger",
            ScenarioKind::Maudlin => "maudlin",
            ScenarioKind::QuantumLiar => "quantum_liar",
            ScenarioKind::Swap => "swap",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let normalized = s.replace('-', "_");
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.as_str() == normalized)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown scenario `{s}`")))
    }
}

/// A fully specified scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioConfig {
    Renninger(RenningerConfig),
    Maudlin(MaudlinConfig),
    QuantumLiar(QuantumLiarConfig),
    Swap(SwapConfig),
}

impl ScenarioConfig {
    pub fn kind(&self) -> ScenarioKind {
        match self {
            ScenarioConfig::Renninger(_) => ScenarioKind::Renninger,
            ScenarioConfig::Maudlin(_) => ScenarioKind::Maudlin,
            ScenarioConfig::QuantumLiar(_) => ScenarioKind::QuantumLiar,
            ScenarioConfig::Swap(_) => ScenarioKind::Swap,
        }
    }

    pub fn build(&self) -> Result<Box<dyn Experiment>> {
        Ok(match self {
            ScenarioConfig::Renninger(c) => Box::new(RenningerExperiment::new(c.clone())?),
            ScenarioConfig::Maudlin(c) => Box::new(MaudlinExperiment::new(c.clone())?),
            ScenarioConfig::QuantumLiar(c) => Box::new(QuantumLiarExperiment::new(c.clone())?),
            ScenarioConfig::Swap(c) => Box::new(SwapExperiment::new(c.clone())?),
        })
    }

    /// The configuration as a JSON value, for reports.
    pub fn to_json(&self) -> serde_json::Value {
        let v = match self {
            ScenarioConfig::Renninger(c) => serde_json::to_value(c),
            ScenarioConfig::Maudlin(c) => serde_json::to_value(c),
            ScenarioConfig::QuantumLiar(c) => serde_json::to_value(c),
            ScenarioConfig::Swap(c) => serde_json::to_value(c),
        };
        v.expect("config serializes")
    }
}

/// Configuration file: one optional section per scenario plus the CHSH
/// settings. Unknown keys are rejected.
///
/// ```toml
/// scenario = "swap"
///
/// [renninger]
/// fraction = 0.5
/// r1 = 1.0
/// r2 = 2.0
/// speed = 1.0
/// t0 = 0.0
///
/// [maudlin]
/// far_left_absorber = true
///
/// [quantum_liar]
/// reflection_phase = 1.5707963267948966
/// blocking = ["plus", "plus"]
///
/// [swap]
/// eve_basis = "bell"        # or "product"
/// ordering = "eve-first"    # or "edges-first"
/// axis1 = [0.0, 0.0, 1.0]
/// axis4 = [0.0, 0.0, 1.0]
///
/// [chsh]
/// a = 0.0                   # angles from ẑ in the x–z plane
/// a_prime = 1.5707963267948966
/// b = -0.7853981633974483
/// b_prime = -2.356194490192345
/// condition = "Psi+"
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scenario: Option<ScenarioKind>,
    pub renninger: Option<RenningerConfig>,
    pub maudlin: Option<MaudlinConfig>,
    pub quantum_liar: Option<QuantumLiarConfig>,
    pub swap: Option<SwapConfig>,
    pub chsh: Option<ChshConfig>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.message().to_owned()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        ConfigFile::parse(&text)
    }

    /// The section for `kind`, or that scenario's defaults when absent.
    pub fn scenario_config(&self, kind: ScenarioKind) -> ScenarioConfig {
        match kind {
            ScenarioKind::Renninger => ScenarioConfig::Renninger(self.renninger.clone().unwrap_or_default()),
            ScenarioKind::Maudlin => ScenarioConfig::Maudlin(self.maudlin.clone().unwrap_or_default()),
            ScenarioKind::QuantumLiar => ScenarioConfig::QuantumLiar(self.quantum_liar.clone().unwrap_or_default()),
            ScenarioKind::Swap => ScenarioConfig::Swap(self.swap.clone().unwrap_or_default()),
        }
    }
}
