use std::path::{Path, PathBuf};

use mdiqkd_core::adversary::{AttackConfig, MeasurerBehavior};
use mdiqkd_core::decoy::{ChannelModel, IntensitySchedule};
use mdiqkd_core::opsets::{CatalogKind, CodingScheme};
use mdiqkd_core::pnp::PnpSettings;
use mdiqkd_core::protocol::{BasisChooser, MeasurementMode, ProtocolConfig};
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

/// The `protocol` block of a scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolBlock {
    pub kind: CatalogKind,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub coding: Option<CodingScheme>,
    pub rounds: u64,
    pub seed: u64,
    #[serde(default = "default_sample_fraction")]
    pub error_sample_fraction: f64,
    #[serde(default)]
    pub basis_chooser: Option<BasisChooser>,
    #[serde(default)]
    pub measurement: MeasurementMode,
    #[serde(default)]
    pub pnp: PnpSettings,
}

fn default_sample_fraction() -> f64 {
    0.1
}

/// Where results go when the command line does not say.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default)]
    pub report: Option<PathBuf>,
    #[serde(default)]
    pub trace: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub protocol: ProtocolBlock,
    #[serde(default)]
    pub channel: ChannelModel,
    /// Bob to the measuring party.
    #[serde(default)]
    pub bob_channel: ChannelModel,
    #[serde(default)]
    pub attack: AttackConfig,
    #[serde(default)]
    pub measurer: MeasurerBehavior,
    #[serde(default)]
    pub decoy: Option<IntensitySchedule>,
    #[serde(default)]
    pub output: OutputBlock,
}

impl ScenarioFile {
    /// Parses JSON, or TOML when the path ends in `.toml`. Errors name the
    /// offending key path.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
        if is_toml {
            Self::from_toml(&text)
        } else {
            Self::from_json(&text)
        }
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(&mut de).map_err(|e| path_error(e.path().to_string(), e.inner()))
    }

    pub fn from_toml(text: &str) -> CliResult<Self> {
        let de = toml::de::Deserializer::parse(text).map_err(|e| CliError::Config(e.to_string()))?;
        serde_path_to_error::deserialize(de).map_err(|e| path_error(e.path().to_string(), e.inner()))
    }

    pub fn to_config(&self) -> ProtocolConfig {
        let p = &self.protocol;
        ProtocolConfig {
            kind: p.kind,
            theta: p.theta,
            coding: p.coding,
            rounds: p.rounds,
            seed: p.seed,
            error_sample_fraction: p.error_sample_fraction,
            basis_chooser: p.basis_chooser,
            measurement: p.measurement,
            pnp: p.pnp.clone(),
            channel: self.channel,
            bob_channel: self.bob_channel,
            attack: self.attack.clone(),
            measurer: self.measurer,
            decoy: self.decoy.clone(),
        }
    }
}

fn path_error(path: String, inner: impl std::fmt::Display) -> CliError {
    let inner = inner.to_string();
    let inner = inner.lines().next().unwrap_or_default().to_string();
    if path == "." {
        CliError::Config(inner)
    } else {
        CliError::Config(format!("at `{path}`: {inner}"))
    }
}
