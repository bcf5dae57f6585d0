//! Exact small-system quantum mechanics: dense pure states of up to four
//! qubits, unitaries, tensor products and Born-rule measurement.
//!
//! Randomness always comes in through an explicit [`RandomStream`] (or any
//! `rand::Rng`); nothing here owns a global generator.

mod basis;
mod measure;
mod rng;
mod state;
mod unitary;

pub use basis::{BasisLabel, MeasurementBasis};
pub use measure::{born_probabilities, measure_qubit};
pub use rng::RandomStream;
pub use state::{tensor, PureState, MAX_QUBITS, NORM_TOL};
pub use unitary::{apply, apply_on_qubit, Unitary};

pub use num_complex::Complex64;
