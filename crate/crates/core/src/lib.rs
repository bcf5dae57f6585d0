//! Simulator and numerical toolkit for measurement-device-independent
//! prepare-measure QKD.
//!
//! Alice prepares qubits, Bob applies a secret encoding unitary and forwards
//! the photon to an untrusted measurement party, who only announces outcomes.
//! The crate covers:
//!
//! * [`qmath`]: dense state-vector simulation on up to four qubits.
//! * [`opsets`]: Bob's operator catalogs, basis-image classification and coding maps.
//! * [`protocol`]: the round engine, sifting, decoding and session statistics.
//! * [`pnp`]: photon-number purification with copy gates.
//! * [`adversary`]: intercept-resend, photon-number-adding and photon-number-splitting attacks.
//! * [`discrimination`]: min-error and unambiguous discrimination, probe optimization.
//! * [`decoy`]: weak-coherent sources, lossy channels and decoy-state checks.

pub mod adversary;
pub mod decoy;
pub mod discrimination;
pub mod error;
pub mod opsets;
pub mod pnp;
pub mod protocol;
pub mod qmath;

pub use error::{Error, Result};
