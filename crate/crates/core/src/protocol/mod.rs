//! The round engine: preparation, encoding, purification, attacks,
//! measurement, sifting and decoding.
//!
//! Each round draws from its own random substream `(seed, 0, index)`, so a
//! session gives the same report whether rounds run in parallel or not.

mod config;
mod engine;
mod report;
mod round;

pub use config::{BasisChooser, MeasurementMode, Prepared, ProtocolConfig};
pub use engine::{run_session, run_session_traced};
pub use report::{BobDecoyReport, DecoyReport, EveReport, PnpReport, SessionReport, VerdictCounts};
pub use round::{
    alice_prepare, asymptotic_key_rate, binary_entropy, bob_choose, decode_alice, decode_bob, estimate_qber, sift,
    AliceView, BasisChoice, Round, SiftVerdict,
};
