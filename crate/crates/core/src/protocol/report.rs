use serde::{Deserialize, Serialize};

use crate::decoy::{ConsistencyCheck, GroundTruth, ObservedGains, Y1Estimate};
use crate::opsets::{CatalogKind, CodingScheme};

use super::round::SiftVerdict;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub keep: u64,
    pub error_sample: u64,
    pub discard_basis: u64,
    pub discard_pnp: u64,
    pub decoy_round: u64,
    pub lost: u64,
}

impl VerdictCounts {
    pub fn add(&mut self, v: SiftVerdict) {
        match v {
            SiftVerdict::Keep => self.keep += 1,
            SiftVerdict::ErrorSample => self.error_sample += 1,
            SiftVerdict::DiscardBasis => self.discard_basis += 1,
            SiftVerdict::DiscardPnp => self.discard_pnp += 1,
            SiftVerdict::DecoyRound => self.decoy_round += 1,
            SiftVerdict::Lost => self.lost += 1,
        }
    }

    pub fn merge(&mut self, o: &VerdictCounts) {
        self.keep += o.keep;
        self.error_sample += o.error_sample;
        self.discard_basis += o.discard_basis;
        self.discard_pnp += o.discard_pnp;
        self.decoy_round += o.decoy_round;
        self.lost += o.lost;
    }

    pub fn total(&self) -> u64 {
        self.keep + self.error_sample + self.discard_basis + self.discard_pnp + self.decoy_round + self.lost
    }
}

/// What the adversary achieved.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EveReport {
    pub attack: String,
    /// Raw-key rounds where Eve produced a key-bit guess.
    pub key_guess_rounds: u64,
    pub key_guess_correct: u64,
    /// Fraction of raw-key bits Eve guessed right.
    pub key_guess_rate: Option<f64>,
    /// Rounds where Eve tried to identify Bob's operator.
    pub operator_attempts: u64,
    /// Attempts that produced a guess (all of them for min-error, conclusive ones for USD).
    pub operator_guesses: u64,
    pub operator_correct: u64,
    pub operator_accuracy: Option<f64>,
    pub conclusive_rate: Option<f64>,
    pub probes_sent: u64,
    pub probes_returned: u64,
    pub intercepted: u64,
    pub pns_stored: u64,
}

/// Bob-side decoy bookkeeping: wrongly purified rounds are tagged as his decoys.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BobDecoyReport {
    /// Alice signal pulses that were non-empty at Bob's purification stage.
    pub alice_signal_detected: u64,
    pub tagged: u64,
    pub tagged_detected: u64,
    pub matched: u64,
    pub matched_detected: u64,
    pub tagged_gain: Option<f64>,
    pub matched_gain: Option<f64>,
    /// Whether the measuring party's click rate is the same on tagged and
    /// matched rounds within three standard deviations.
    pub gains_consistent: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DecoyReport {
    pub observed: ObservedGains,
    /// Per-photon-number yields known to the simulator only.
    pub ground_truth: GroundTruth,
    pub y1: Option<Y1Estimate>,
    pub consistency: Option<ConsistencyCheck>,
    /// Why the estimator was not evaluated, if it was not.
    pub estimator_note: Option<String>,
    pub bob: BobDecoyReport,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PnpReport {
    pub enabled: bool,
    pub purified: u64,
    pub removed_photons: u64,
}

/// Session summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionReport {
    pub kind: CatalogKind,
    pub theta: Option<f64>,
    pub coding: CodingScheme,
    pub rounds_total: u64,
    /// Rounds surviving sifting, error-sample rounds included.
    pub kept_count: u64,
    pub sift_fraction: f64,
    /// Kept rounds not revealed for error estimation.
    pub raw_key_bits: u64,
    pub error_sample_size: u64,
    pub error_sample_errors: u64,
    /// Error rate over the error sample only.
    pub qber: Option<f64>,
    /// Disagreements on the raw key itself, which the parties never see.
    pub raw_key_errors: u64,
    pub true_key_error_rate: Option<f64>,
    /// Sifted rounds where Alice found no consistent operator.
    pub decode_failures: u64,
    pub verdicts: VerdictCounts,
    pub non_decoy_pulses: u64,
    pub qubits_per_raw_bit: Option<f64>,
    /// Reference figure for standard MDI-QKD, not simulated.
    pub standard_mdi_qubits_per_bit: f64,
    /// `sift * max(0, 1 - 2 h2(qber))`, a BB84-style estimate only.
    pub asymptotic_key_rate: Option<f64>,
    pub eve: EveReport,
    pub pnp: PnpReport,
    pub decoy: Option<DecoyReport>,
}
