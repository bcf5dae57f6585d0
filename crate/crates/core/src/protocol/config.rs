use serde::{Deserialize, Serialize};

use crate::adversary::{AttackConfig, MeasurerBehavior};
use crate::decoy::{ChannelModel, IntensitySchedule};
use crate::error::{Error, Result};
use crate::opsets::{build_catalog, CatalogKind, CodingScheme, OperatorCatalog};
use crate::pnp::PnpSettings;
use crate::qmath::MeasurementBasis;

/// Who picks the measurement basis for a round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisChooser {
    /// The measuring party picks uniformly.
    Eve,
    /// Bob picks from the images of his operator and announces it.
    Bob,
}

impl BasisChooser {
    pub fn default_for(kind: CatalogKind) -> Self {
        match kind {
            CatalogKind::General => BasisChooser::Bob,
            _ => BasisChooser::Eve,
        }
    }
}

/// Where the final measurement happens.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementMode {
    /// Bob encodes and an untrusted party measures.
    #[default]
    Delegated,
    /// Bob measures Alice's photon himself in a random basis (plain prepare-measure baseline).
    BobMeasures,
}

fn default_sample_fraction() -> f64 {
    0.1
}

/// Everything that defines a session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    pub kind: CatalogKind,
    #[serde(default)]
    pub theta: Option<f64>,
    /// Defaults to [`CodingScheme::default_for`] the kind.
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
    /// Alice to Bob.
    #[serde(default)]
    pub channel: ChannelModel,
    /// Bob to the measuring party.
    #[serde(default)]
    pub bob_channel: ChannelModel,
    #[serde(default)]
    pub attack: AttackConfig,
    #[serde(default)]
    pub measurer: MeasurerBehavior,
    /// Weak-coherent source with this intensity schedule; `None` is a single-photon source.
    #[serde(default)]
    pub decoy: Option<IntensitySchedule>,
}

impl ProtocolConfig {
    /// Honest, lossless, single-photon session without purification.
    pub fn new(kind: CatalogKind, rounds: u64, seed: u64) -> Self {
        Self {
            kind,
            theta: None,
            coding: None,
            rounds,
            seed,
            error_sample_fraction: default_sample_fraction(),
            basis_chooser: None,
            measurement: MeasurementMode::Delegated,
            pnp: PnpSettings::default(),
            channel: ChannelModel::default(),
            bob_channel: ChannelModel::default(),
            attack: AttackConfig::None,
            measurer: MeasurerBehavior::Honest,
            decoy: None,
        }
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = Some(theta);
        self
    }

    pub fn with_pnp(mut self, enabled: bool) -> Self {
        self.pnp.enabled = enabled;
        self
    }

    pub fn with_attack(mut self, attack: AttackConfig) -> Self {
        self.attack = attack;
        self
    }

    pub fn coding_scheme(&self) -> CodingScheme {
        self.coding.unwrap_or_else(|| CodingScheme::default_for(self.kind))
    }

    pub fn chooser(&self) -> BasisChooser {
        self.basis_chooser.unwrap_or_else(|| BasisChooser::default_for(self.kind))
    }

    pub fn is_practical(&self) -> bool {
        self.decoy.is_some()
    }

    /// Checks the configuration and builds the session's catalog and bases.
    pub fn prepare(&self) -> Result<Prepared> {
        if self.rounds == 0 {
            return Err(Error::Config("rounds must be positive".into()));
        }
        if !(self.error_sample_fraction > 0.0 && self.error_sample_fraction < 1.0) {
            return Err(Error::Config(format!(
                "error_sample_fraction {} outside (0, 1)",
                self.error_sample_fraction
            )));
        }
        let catalog = build_catalog(self.kind, self.theta)?;
        self.channel.validate()?;
        self.bob_channel.validate()?;
        self.attack.validate()?;
        if let Some(s) = &self.decoy {
            s.validate()?;
        }
        if !(self.pnp.gate_fidelity > 0.0 && self.pnp.gate_fidelity <= 1.0) {
            return Err(Error::Config(format!("gate_fidelity {} outside (0, 1]", self.pnp.gate_fidelity)));
        }
        let pnp_bases: Vec<MeasurementBasis> = match &self.pnp.bases {
            None => catalog.bases().to_vec(),
            Some(labels) => labels
                .iter()
                .map(|l| catalog.basis(*l).cloned())
                .collect::<Result<_>>()?,
        };
        if self.pnp.enabled && pnp_bases.is_empty() {
            return Err(Error::Config("purification enabled with an empty basis set".into()));
        }
        if self.measurement == MeasurementMode::BobMeasures && self.pnp.enabled {
            return Err(Error::Config("bob_measures cannot be combined with purification".into()));
        }
        if let AttackConfig::Pna { .. } = self.attack {
            if self.is_practical() {
                return Err(Error::Config("PNA is simulated with a single-photon source only".into()));
            }
            if self.measurement == MeasurementMode::BobMeasures {
                return Err(Error::Config("PNA targets Bob's encoding; bob_measures has none".into()));
            }
        }
        if self.measurement == MeasurementMode::BobMeasures && self.measurer != MeasurerBehavior::Honest {
            return Err(Error::Config("measurer behavior applies to delegated measurement only".into()));
        }
        if let MeasurerBehavior::ConstantOutcome(b) = self.measurer {
            if b > 1 {
                return Err(Error::Config(format!("constant outcome {b} is not a bit")));
            }
        }
        Ok(Prepared {
            catalog,
            coding: self.coding_scheme(),
            chooser: self.chooser(),
            pnp_bases,
        })
    }
}

/// Validated session ingredients.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub catalog: OperatorCatalog,
    pub coding: CodingScheme,
    pub chooser: BasisChooser,
    pub pnp_bases: Vec<MeasurementBasis>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::BasisLabel;

    #[test]
    fn defaults_follow_kind() {
        let c = ProtocolConfig::new(CatalogKind::General, 10, 1).with_theta(0.5);
        assert_eq!(c.chooser(), BasisChooser::Bob);
        assert_eq!(c.coding_scheme(), CodingScheme::FlipParityPerCell);
        let c = ProtocolConfig::new(CatalogKind::Bb84Four, 10, 1);
        assert_eq!(c.chooser(), BasisChooser::Eve);
        assert_eq!(c.coding_scheme(), CodingScheme::FixedPerOperator);
    }

    #[test]
    fn pnp_bases_default_to_protocol_bases() {
        let p = ProtocolConfig::new(CatalogKind::SixState, 10, 1).with_pnp(true).prepare().unwrap();
        let labels: Vec<_> = p.pnp_bases.iter().map(|b| b.label()).collect();
        assert_eq!(labels, vec![BasisLabel::Z, BasisLabel::X, BasisLabel::Y]);
    }

    #[test]
    fn invalid_configs() {
        let mut c = ProtocolConfig::new(CatalogKind::Bb84Four, 10, 1);
        c.error_sample_fraction = 0.0;
        assert!(c.prepare().is_err());
        let c = ProtocolConfig::new(CatalogKind::Bb84Four, 0, 1);
        assert!(c.prepare().is_err());
        let mut c = ProtocolConfig::new(CatalogKind::Bb84Four, 10, 1).with_pnp(true);
        c.pnp.bases = Some(vec![]);
        assert!(c.prepare().is_err());
        let mut c = ProtocolConfig::new(CatalogKind::Bb84Four, 10, 1);
        c.pnp.bases = Some(vec![BasisLabel::Y]);
        assert!(c.prepare().is_err());
        assert!(ProtocolConfig::new(CatalogKind::General, 10, 1).prepare().is_err());
    }

    #[test]
    fn unknown_fields_rejected() {
        let ok: ProtocolConfig = serde_json::from_str(r#"{"kind":"BB84-4","rounds":5,"seed":1}"#).unwrap();
        assert_eq!(ok.rounds, 5);
        assert!(serde_json::from_str::<ProtocolConfig>(r#"{"kind":"BB84-4","rounds":5,"seed":1,"x":2}"#).is_err());
        assert!(serde_json::from_str::<ProtocolConfig>(r#"{"kind":"BB84-4","rounds":5}"#).is_err());
    }
}
