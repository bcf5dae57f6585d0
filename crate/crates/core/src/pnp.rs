//! Photon-number purification.
//!
//! Bob never forwards the photons he receives. He copies the basis value of
//! one incoming photon onto a fresh ancilla with a basis-matched CNOT,
//! measures the incoming photon, and encodes the ancilla. Anything else in the
//! pulse stays inside his station.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{measure_qubit, tensor, BasisLabel, Complex64, MeasurementBasis, PureState, Unitary};

/// Largest photon count simulated in exact (single-photon source) mode:
/// one signal photon plus up to three probes.
pub const EXACT_MODE_CAP: usize = 4;

/// Simulation bookkeeping for who emitted a photon. Honest parties never read it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    FromAlice,
    EveProbe,
    BobAncilla,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Photon {
    pub state: PureState,
    pub provenance: Provenance,
}

impl Photon {
    pub fn new(state: PureState, provenance: Provenance) -> Self {
        Self { state, provenance }
    }
}

/// A multi-photon signal. Photons are kept in arrival order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Pulse {
    photons: Vec<Photon>,
    /// Mean photon number of the emitting source (0 for single-photon mode).
    pub intensity: f64,
}

/// What an honest station sees of a pulse: the photon states in arrival order,
/// without provenance.
#[derive(Clone, Copy, Debug)]
pub struct PulseView<'a> {
    photons: &'a [Photon],
}

impl<'a> PulseView<'a> {
    pub fn len(&self) -> usize {
        self.photons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.photons.is_empty()
    }

    pub fn state(&self, i: usize) -> &'a PureState {
        &self.photons[i].state
    }
}

impl Pulse {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `n` identical photons from Alice's source.
    pub fn from_alice(state: &PureState, n: usize, intensity: f64) -> Self {
        Self {
            photons: (0..n)
                .map(|_| Photon::new(state.clone(), Provenance::FromAlice))
                .collect(),
            intensity,
        }
    }

    pub fn single(state: PureState, provenance: Provenance) -> Self {
        Self {
            photons: vec![Photon::new(state, provenance)],
            intensity: 0.0,
        }
    }

    pub fn from_photons(photons: Vec<Photon>, intensity: f64) -> Self {
        Self { photons, intensity }
    }

    pub fn len(&self) -> usize {
        self.photons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.photons.is_empty()
    }

    pub fn push(&mut self, photon: Photon) {
        self.photons.push(photon);
    }

    /// Tagged photons. Only adversary bookkeeping and the simulator read this.
    pub fn photons(&self) -> &[Photon] {
        &self.photons
    }

    pub fn into_photons(self) -> Vec<Photon> {
        self.photons
    }

    pub fn view(&self) -> PulseView<'_> {
        PulseView {
            photons: &self.photons,
        }
    }

    /// Applies a single-qubit gate to every photon, as an encoder that cannot
    /// resolve photon number would.
    pub fn apply_all(&mut self, u: &Unitary) -> Result<()> {
        for p in &mut self.photons {
            p.state = u.apply(&p.state)?;
        }
        Ok(())
    }

    pub fn count(&self, provenance: Provenance) -> usize {
        self.photons.iter().filter(|p| p.provenance == provenance).count()
    }
}

/// A two-qubit copy gate `(W (x) W) CNOT (W^dagger (x) W^dagger)` for the basis
/// whose change-of-basis unitary is `W`. Qubit 0 is the incoming photon.
#[derive(Clone, Debug)]
pub struct CopyGate {
    basis: MeasurementBasis,
    matrix: Unitary,
}

impl CopyGate {
    pub fn for_basis(basis: &MeasurementBasis) -> Self {
        let w = basis.change_of_basis();
        let ww = w.kron(&w).expect("two qubits");
        let wd = w.adjoint();
        let wwd = wd.kron(&wd).expect("two qubits");
        let matrix = ww
            .mul(&Unitary::cnot())
            .and_then(|m| m.mul(&wwd))
            .expect("4x4 product");
        Self {
            basis: basis.clone(),
            matrix,
        }
    }

    /// `|0>|0> -> |0>|0>`, `|1>|0> -> |1>|1>`
    pub fn c0() -> Self {
        Self::for_basis(&MeasurementBasis::z())
    }

    /// `|+>|+> -> |+>|+>`, `|->|+> -> |->|->`
    pub fn c_plus() -> Self {
        Self::for_basis(&MeasurementBasis::x())
    }

    pub fn basis(&self) -> &MeasurementBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &Unitary {
        &self.matrix
    }

    /// The fresh ancilla the gate expects: the index-0 vector of its basis.
    pub fn ancilla(&self) -> &PureState {
        self.basis.vector(0)
    }
}

/// `copy_gate(label)`: `C0` for the Z basis, `C+` for X, and the same construction
/// for any other basis.
pub fn copy_gate(basis: BasisLabel) -> CopyGate {
    CopyGate::for_basis(&MeasurementBasis::from_label(basis))
}

/// Which incoming photon drives the copy gate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ControlPolicy {
    /// The earliest photon in the pulse.
    First,
    /// A uniformly chosen photon.
    #[default]
    Random,
}

#[derive(Clone, Debug)]
pub struct PnpResult {
    /// The ancilla, which is the only photon Bob encodes and sends on.
    pub output_photon: PureState,
    /// Outcome of measuring the incoming control photon in the purification basis.
    pub control_diagnostic: Option<u8>,
    /// Incoming photons that never leave Bob's station besides the measured control.
    pub removed_count: usize,
    pub pnp_basis: BasisLabel,
}

fn second_qubit_given_first(collapsed: &PureState, first: &PureState) -> PureState {
    let a = collapsed.amplitudes();
    let f = first.amplitudes();
    let amps = (0..2)
        .map(|j| f[0].conj() * a[j] + f[1].conj() * a[2 + j])
        .collect::<Vec<Complex64>>();
    PureState::new(amps).expect("product state")
}

/// Purifies a pulse onto one fresh photon.
///
/// The control photon is chosen by `policy`, copied onto the basis ancilla and
/// measured in `basis`; every other photon is dropped. With probability
/// `1 - gate_fidelity` the gate fails and the ancilla leaves in a Haar-random state.
pub fn purify<R: Rng + ?Sized>(
    pulse: &Pulse,
    basis: &MeasurementBasis,
    rng: &mut R,
    gate_fidelity: f64,
    policy: ControlPolicy,
) -> Result<PnpResult> {
    if !(gate_fidelity > 0.0 && gate_fidelity <= 1.0) {
        return Err(Error::OutOfRange(gate_fidelity));
    }
    let view = pulse.view();
    if view.is_empty() {
        return Err(Error::EmptyPulse);
    }
    let control = match policy {
        ControlPolicy::First => 0,
        ControlPolicy::Random => rng.random_range(0..view.len()),
    };
    let gate = CopyGate::for_basis(basis);
    let joint = tensor(view.state(control), gate.ancilla())?;
    let joint = gate.matrix().apply(&joint)?;
    let (k, collapsed) = measure_qubit(&joint, 0, basis, rng)?;
    let mut output = second_qubit_given_first(&collapsed, basis.vector(k));
    if gate_fidelity < 1.0 && rng.random::<f64>() >= gate_fidelity {
        output = PureState::random(1, rng)?;
    }
    Ok(PnpResult {
        output_photon: output,
        control_diagnostic: Some(k),
        removed_count: view.len() - 1,
        pnp_basis: basis.label(),
    })
}

/// Bob's emptiness check fired on a pulse with no photon (dark count): the
/// ancilla is untouched and the diagnostic is a coin flip.
pub fn purify_dark_click<R: Rng + ?Sized>(basis: &MeasurementBasis, rng: &mut R, gate_fidelity: f64) -> Result<PnpResult> {
    let diag = rng.random_range(0..2u8);
    let mut output = basis.vector(0).clone();
    if gate_fidelity < 1.0 && rng.random::<f64>() >= gate_fidelity {
        output = PureState::random(1, rng)?;
    }
    Ok(PnpResult {
        output_photon: output,
        control_diagnostic: Some(diag),
        removed_count: 0,
        pnp_basis: basis.label(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PnpVerdict {
    Keep,
    DiscardPnp,
}

/// A round survives purification only if Bob copied in Alice's basis.
pub fn pnp_sift(alice_basis: BasisLabel, pnp_basis: BasisLabel) -> PnpVerdict {
    if alice_basis == pnp_basis {
        PnpVerdict::Keep
    } else {
        PnpVerdict::DiscardPnp
    }
}

/// Purification settings for a session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PnpSettings {
    pub enabled: bool,
    /// Purification bases; `None` means all bases of the protocol.
    pub bases: Option<Vec<BasisLabel>>,
    pub gate_fidelity: f64,
    pub control_policy: ControlPolicy,
}

impl Default for PnpSettings {
    fn default() -> Self {
        Self {
            enabled: false,
            bases: None,
            gate_fidelity: 1.0,
            control_policy: ControlPolicy::Random,
        }
    }
}
