//! Attacks on the Alice -> Bob -> measurer line.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::discrimination::{
    min_error, operator_outputs, state_rank, unambiguous_discrimination, CVector, DiscriminationProblem, Povm,
    ProbeSpec,
};
use crate::error::{Error, Result};
use crate::opsets::OperatorCatalog;
use crate::pnp::{Photon, Provenance, Pulse, EXACT_MODE_CAP};
use crate::qmath::{measure_qubit, tensor, BasisLabel, MeasurementBasis, PureState};

/// Single-qubit states that can be named in a configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedState {
    Zero,
    One,
    Plus,
    Minus,
    PlusI,
    MinusI,
}

impl NamedState {
    pub fn state(&self) -> PureState {
        match self {
            NamedState::Zero => PureState::zero(),
            NamedState::One => PureState::one(),
            NamedState::Plus => PureState::plus(),
            NamedState::Minus => PureState::minus(),
            NamedState::PlusI => PureState::plus_i(),
            NamedState::MinusI => PureState::minus_i(),
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            NamedState::Zero => "0",
            NamedState::One => "1",
            NamedState::Plus => "+",
            NamedState::Minus => "-",
            NamedState::PlusI => "+i",
            NamedState::MinusI => "-i",
        }
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "0" => NamedState::Zero,
            "1" => NamedState::One,
            "+" => NamedState::Plus,
            "-" => NamedState::Minus,
            "+i" => NamedState::PlusI,
            "-i" => NamedState::MinusI,
            other => return Err(Error::Config(format!("unknown state `{other}`, expected 0, 1, +, -, +i or -i"))),
        })
    }
}

impl Serialize for NamedState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.tag())
    }
}

impl<'de> Deserialize<'de> for NamedState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// How Eve picks her measurement basis when intercepting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisPolicy {
    /// Uniform over the protocol's bases.
    #[default]
    Random,
    Fixed(BasisLabel),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PnaMethod {
    #[default]
    MinError,
    Unambiguous,
}

/// Attack selected for a session.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AttackConfig {
    #[default]
    None,
    InterceptResend {
        #[serde(default)]
        basis_policy: BasisPolicy,
    },
    Pna {
        probes: Vec<NamedState>,
        #[serde(default)]
        method: PnaMethod,
    },
    Pns {
        #[serde(default = "one")]
        block_single: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl AttackConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            AttackConfig::Pna { probes, .. } => {
                if probes.is_empty() || probes.len() + 1 > EXACT_MODE_CAP {
                    return Err(Error::Config(format!(
                        "PNA needs 1 to {} probes, got {}",
                        EXACT_MODE_CAP - 1,
                        probes.len()
                    )));
                }
            }
            AttackConfig::Pns { block_single } => {
                if !(0.0..=1.0).contains(block_single) {
                    return Err(Error::Config(format!("block_single {block_single} outside [0, 1]")));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            AttackConfig::None => "none",
            AttackConfig::InterceptResend { .. } => "intercept_resend",
            AttackConfig::Pna { .. } => "pna",
            AttackConfig::Pns { .. } => "pns",
        }
    }
}

/// What Eve learned from measuring a photon in transit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterceptRecord {
    pub basis: BasisLabel,
    pub outcome: u8,
}

/// Measures the photon in a policy basis and resends the observed eigenstate.
pub fn intercept_resend<R: Rng + ?Sized>(
    signal: &PureState,
    policy: BasisPolicy,
    bases: &[MeasurementBasis],
    rng: &mut R,
) -> Result<(PureState, InterceptRecord)> {
    if signal.num_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: signal.dim(),
        });
    }
    let basis = match policy {
        BasisPolicy::Random => bases[rng.random_range(0..bases.len())].clone(),
        BasisPolicy::Fixed(l) => MeasurementBasis::from_label(l),
    };
    let (k, _) = measure_qubit(signal, 0, &basis, rng)?;
    Ok((
        basis.vector(k).clone(),
        InterceptRecord {
            basis: basis.label(),
            outcome: k,
        },
    ))
}

/// Probe photons Eve injects into Alice's pulse.
#[derive(Clone, Debug, PartialEq)]
pub struct PnaProbeSet {
    probes: Vec<PureState>,
}

impl PnaProbeSet {
    pub fn new(probes: Vec<PureState>) -> Result<Self> {
        if probes.is_empty() || probes.len() + 1 > EXACT_MODE_CAP {
            return Err(Error::Config(format!(
                "probe count {} outside 1..={}",
                probes.len(),
                EXACT_MODE_CAP - 1
            )));
        }
        if probes.iter().any(|p| p.num_qubits() != 1) {
            return Err(Error::Config("probes must be single qubits".into()));
        }
        Ok(Self { probes })
    }

    pub fn from_named(names: &[NamedState]) -> Result<Self> {
        Self::new(names.iter().map(|n| n.state()).collect())
    }

    pub fn probes(&self) -> &[PureState] {
        &self.probes
    }

    pub fn len(&self) -> usize {
        self.probes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probes.is_empty()
    }

    /// `|p_1> ⊗ ... ⊗ |p_k>`
    pub fn joint(&self) -> Result<PureState> {
        let mut s = self.probes[0].clone();
        for p in &self.probes[1..] {
            s = tensor(&s, p)?;
        }
        Ok(s)
    }
}

/// Appends tagged probes to a pulse.
pub fn pna_attach(pulse: Pulse, probes: &PnaProbeSet) -> Result<Pulse> {
    if pulse.len() + probes.len() > EXACT_MODE_CAP {
        return Err(Error::SizeOverflow(pulse.len() + probes.len()));
    }
    let mut pulse = pulse;
    for p in probes.probes() {
        pulse.push(Photon::new(p.clone(), Provenance::EveProbe));
    }
    Ok(pulse)
}

/// Splits a pulse leaving Bob into the photons Eve recognizes as hers and the rest.
pub fn pna_extract(pulse: Pulse) -> (Pulse, Vec<PureState>) {
    let intensity = pulse.intensity;
    let (mine, rest): (Vec<Photon>, Vec<Photon>) = pulse
        .into_photons()
        .into_iter()
        .partition(|p| p.provenance == Provenance::EveProbe);
    (
        Pulse::from_photons(rest, intensity),
        mine.into_iter().map(|p| p.state).collect(),
    )
}

/// Eve's measurement on returned probes, prepared once per session.
#[derive(Clone, Debug)]
pub struct PnaDiscriminator {
    method: PnaMethod,
    povm: Povm,
    operators: usize,
    /// Optimal (min-error) or conclusive (USD) rate for uniformly chosen operators.
    pub design_rate: f64,
}

impl PnaDiscriminator {
    /// Builds the measurement that identifies catalog operators from
    /// `(T|p_1>) ⊗ ... ⊗ (T|p_k>)`.
    pub fn new(catalog: &OperatorCatalog, probes: &PnaProbeSet, method: PnaMethod) -> Result<Self> {
        let ops: Vec<_> = catalog.entries().iter().map(|e| e.unitary.clone()).collect();
        let spec = ProbeSpec::new(1, probes.len(), probes.joint()?)?;
        let outputs = operator_outputs(&ops, &spec)?;
        let problem = DiscriminationProblem::from_pure_states(&outputs, None)?;
        let (povm, design_rate) = match method {
            PnaMethod::MinError => {
                let s = min_error(&problem)?;
                (s.povm, s.success)
            }
            PnaMethod::Unambiguous => {
                let s = unambiguous_discrimination(&problem)?;
                (s.povm, s.rate)
            }
        };
        Ok(Self {
            method,
            povm,
            operators: ops.len(),
            design_rate,
        })
    }

    pub fn method(&self) -> PnaMethod {
        self.method
    }

    /// Catalog index of the guessed operator, or `None` for an inconclusive USD outcome.
    pub fn guess<R: Rng + ?Sized>(&self, held: &[PureState], rng: &mut R) -> Result<Option<usize>> {
        if held.is_empty() {
            return Err(Error::EmptyPulse);
        }
        let mut joint = held[0].clone();
        for p in &held[1..] {
            joint = tensor(&joint, p)?;
        }
        let v = CVector::from_column_slice(joint.amplitudes());
        if v.len() != self.povm.elements()[0].nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.povm.elements()[0].nrows(),
                actual: v.len(),
            });
        }
        let k = self.povm.sample(&v, rng);
        Ok((k < self.operators).then_some(k))
    }
}

/// Rank of the probe outputs over a catalog; full rank is needed for USD.
pub fn pna_output_rank(catalog: &OperatorCatalog, probes: &PnaProbeSet) -> Result<usize> {
    let ops: Vec<_> = catalog.entries().iter().map(|e| e.unitary.clone()).collect();
    let spec = ProbeSpec::new(1, probes.len(), probes.joint()?)?;
    Ok(state_rank(&operator_outputs(&ops, &spec)?, 1e-9))
}

/// Photon-number splitting on photon counts: returns whether Eve stored a photon
/// and how many photons go on over her lossless line.
pub fn pns_split_count<R: Rng + ?Sized>(n: usize, block_single: f64, rng: &mut R) -> (bool, usize) {
    match n {
        0 => (false, 0),
        1 => {
            if block_single > 0.0 && rng.random::<f64>() < block_single {
                (false, 0)
            } else {
                (false, 1)
            }
        }
        _ => (true, n - 1),
    }
}

/// Photon-number splitting on a pulse: Eve keeps the last photon of a
/// multi-photon pulse; single photons are blocked with `block_single` probability.
pub fn pns_split<R: Rng + ?Sized>(pulse: Pulse, block_single: f64, rng: &mut R) -> (Option<Photon>, Pulse) {
    let intensity = pulse.intensity;
    let mut photons = pulse.into_photons();
    let (stored, forwarded) = pns_split_count(photons.len(), block_single, rng);
    if stored {
        let kept = photons.pop();
        (kept, Pulse::from_photons(photons, intensity))
    } else if forwarded == 0 {
        (None, Pulse::from_photons(Vec::new(), intensity))
    } else {
        (None, Pulse::from_photons(photons, intensity))
    }
}

/// What the measuring party does with a photon it received.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "outcome", rename_all = "snake_case")]
pub enum MeasurerBehavior {
    #[default]
    Honest,
    /// Measures in a basis other than the announced one.
    WrongBasis,
    /// Ignores the photon and announces a fixed outcome.
    ConstantOutcome(u8),
}
