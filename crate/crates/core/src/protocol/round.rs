use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::decoy::IntensityLabel;
use crate::error::{Error, Result};
use crate::opsets::{coding_bit_by_index, CatalogKind, CodingScheme, OperatorCatalog, OperatorLabel};
use crate::qmath::{BasisLabel, PureState};

/// Outcome of sifting a round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SiftVerdict {
    Keep,
    DiscardBasis,
    DiscardPnp,
    /// A decoy-intensity pulse of Alice, or a wrongly purified round Bob uses as his decoy.
    DecoyRound,
    /// Kept, but its bits were revealed to estimate the error rate.
    ErrorSample,
    /// Nothing was detected.
    Lost,
}

impl SiftVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            SiftVerdict::Keep => "Keep",
            SiftVerdict::DiscardBasis => "DiscardBasis",
            SiftVerdict::DiscardPnp => "DiscardPNP",
            SiftVerdict::DecoyRound => "DecoyRound",
            SiftVerdict::ErrorSample => "ErrorSample",
            SiftVerdict::Lost => "Lost",
        }
    }

    pub fn is_sifted_in(&self) -> bool {
        matches!(self, SiftVerdict::Keep | SiftVerdict::ErrorSample)
    }
}

/// Full record of one round, for traces and tests.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Round {
    pub index: u64,
    pub alice_basis: BasisLabel,
    pub alice_index: u8,
    pub alice_intensity: Option<IntensityLabel>,
    pub photons_sent: usize,
    pub bob_operator: Option<OperatorLabel>,
    pub pnp_basis: Option<BasisLabel>,
    pub measurement_basis: BasisLabel,
    /// Outcome announced by the measuring party; `None` if nothing was detected.
    pub eve_outcome: Option<u8>,
    pub sift_verdict: SiftVerdict,
    pub alice_bit: Option<u8>,
    pub bob_bit: Option<u8>,
    /// Eve's guess of the key bit on sifted rounds.
    pub eve_guess: Option<u8>,
    pub eve_operator_guess: Option<OperatorLabel>,
}

/// Alice's draw: uniform over the protocol bases and the two states of each.
pub fn alice_prepare<R: Rng + ?Sized>(catalog: &OperatorCatalog, rng: &mut R) -> (BasisLabel, u8, PureState) {
    let bases = catalog.bases();
    let b = &bases[rng.random_range(0..bases.len())];
    let k = rng.random_range(0..2u8);
    (b.label(), k, b.vector(k).clone())
}

/// Measurement basis decision made together with Bob's operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BasisChoice {
    Basis(BasisLabel),
    DeferToEve,
}

/// Bob's operator (uniform over the catalog, returned as an index) and, when
/// he chooses the basis, a uniform pick among the images of his operator's
/// valid sources. For General-12 this is the fixed basis for single-image
/// operators and a coin for `I, U, XZ, UXZ`.
pub fn bob_choose<R: Rng + ?Sized>(catalog: &OperatorCatalog, bob_picks: bool, rng: &mut R) -> (usize, BasisChoice) {
    let op = rng.random_range(0..catalog.len());
    if !bob_picks {
        return (op, BasisChoice::DeferToEve);
    }
    let mut images: Vec<usize> = Vec::new();
    for s in 0..catalog.bases().len() {
        if let Some(t) = catalog.image_by_index(op, s) {
            if !images.contains(&t) {
                images.push(t);
            }
        }
    }
    images.sort_unstable();
    let t = if images.is_empty() {
        rng.random_range(0..catalog.bases().len())
    } else {
        images[rng.random_range(0..images.len())]
    };
    (op, BasisChoice::Basis(catalog.bases()[t].label()))
}

/// Basis sifting. For BB84-4 the rule is "keep iff Bob's operator is in
/// `{H, HXZ}` exactly when the two bases differ"; for every kind this coincides
/// with "keep iff the operator maps Alice's basis onto the measurement basis".
pub fn sift(
    catalog: &OperatorCatalog,
    alice_basis: BasisLabel,
    op: &OperatorLabel,
    measurement_basis: BasisLabel,
) -> Result<SiftVerdict> {
    let keep = if catalog.kind() == CatalogKind::Bb84Four {
        let swaps = matches!(op.to_string().as_str(), "H" | "HXZ");
        catalog.index_of(op)?;
        swaps == (alice_basis != measurement_basis)
    } else {
        catalog.basis_image(op, alice_basis)? == Some(measurement_basis)
    };
    Ok(if keep {
        SiftVerdict::Keep
    } else {
        SiftVerdict::DiscardBasis
    })
}

/// What Alice uses to decode a kept round.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AliceView {
    pub alice_basis: BasisLabel,
    pub alice_index: u8,
    pub announced_class: usize,
    pub measurement_basis: BasisLabel,
    pub outcome: u8,
}

/// Alice's bit: the bit shared by every operator of the announced class that
/// takes her state to the announced outcome. `None` if no operator (or operators
/// with different bits) fit, which happens only under noise or attack.
pub fn decode_alice(catalog: &OperatorCatalog, coding: CodingScheme, view: &AliceView) -> Result<Option<u8>> {
    let s = catalog.basis_index(view.alice_basis)?;
    let t = catalog.basis_index(view.measurement_basis)?;
    let mut bit = None;
    for o in 0..catalog.len() {
        if catalog.class_by_index(o) != view.announced_class || catalog.image_by_index(o, s) != Some(t) {
            continue;
        }
        let flip = catalog.flip_by_index(o, s).expect("valid cell");
        if view.alice_index ^ flip != view.outcome {
            continue;
        }
        let b = coding_bit_by_index(coding, catalog, o, s).expect("valid cell");
        match bit {
            None => bit = Some(b),
            Some(prev) if prev != b => return Ok(None),
            _ => {}
        }
    }
    Ok(bit)
}

/// Bob's bit: the coding bit of his own operator in the kept cell.
pub fn decode_bob(
    catalog: &OperatorCatalog,
    coding: CodingScheme,
    op: &OperatorLabel,
    alice_basis: BasisLabel,
    measurement_basis: BasisLabel,
) -> Result<u8> {
    crate::opsets::coding_bit(
        coding,
        catalog,
        op,
        crate::opsets::Cell::new(alice_basis, measurement_basis),
    )
}

/// Fraction of error-sample rounds where the two parties' bits differ; a
/// round where Alice could not decode counts as an error.
pub fn estimate_qber(rounds: &[Round]) -> Option<f64> {
    let sample: Vec<&Round> = rounds
        .iter()
        .filter(|r| r.sift_verdict == SiftVerdict::ErrorSample)
        .collect();
    if sample.is_empty() {
        return None;
    }
    let errors = sample
        .iter()
        .filter(|r| r.alice_bit.is_none() || r.alice_bit != r.bob_bit)
        .count();
    Some(errors as f64 / sample.len() as f64)
}

/// `h2(p) = -p log2 p - (1-p) log2 (1-p)`
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Standard BB84-style asymptotic estimate `sift * max(0, 1 - 2 h2(qber))`.
/// Not a security proof for this protocol.
pub fn asymptotic_key_rate(qber: f64, sift_fraction: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&qber) {
        return Err(Error::OutOfRange(qber));
    }
    Ok(sift_fraction * (1.0 - 2.0 * binary_entropy(qber)).max(0.0))
}
