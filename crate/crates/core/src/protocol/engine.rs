use rand::Rng;
use rayon::prelude::*;

use crate::adversary::{
    intercept_resend, pna_attach, pna_extract, pns_split, AttackConfig, InterceptRecord, MeasurerBehavior,
    PnaDiscriminator, PnaProbeSet,
};
use crate::decoy::{
    check_consistency, dark_click, estimate_y1_lower_bound, qubits_per_raw_bit, sample_photon_number, transmit,
    ChannelModel, GainYieldStats, IntensityLabel, STANDARD_MDI_QUBITS_PER_BIT,
};
use crate::error::Result;
use crate::opsets::{coding_bit_by_index, OperatorCatalog};
use crate::pnp::{pnp_sift, purify, purify_dark_click, Photon, PnpVerdict, Provenance, Pulse};
use crate::qmath::{measure_qubit, BasisLabel, MeasurementBasis, RandomStream};

use super::config::{BasisChooser, MeasurementMode, Prepared, ProtocolConfig};
use super::report::{BobDecoyReport, DecoyReport, EveReport, PnpReport, SessionReport, VerdictCounts};
use super::round::{alice_prepare, bob_choose, decode_alice, sift, AliceView, BasisChoice, Round, SiftVerdict};

const CHUNK: u64 = 2048;

struct Ctx<'a> {
    cfg: &'a ProtocolConfig,
    prep: Prepared,
    probes: Option<PnaProbeSet>,
    discriminator: Option<PnaDiscriminator>,
}

#[derive(Default)]
struct Tally {
    verdicts: VerdictCounts,
    sample_errors: u64,
    keep_errors: u64,
    decode_failures: u64,
    non_decoy: u64,
    key_guess_rounds: u64,
    key_guess_correct: u64,
    op_attempts: u64,
    op_guesses: u64,
    op_correct: u64,
    probes_sent: u64,
    probes_returned: u64,
    intercepted: u64,
    pns_stored: u64,
    purified: u64,
    removed: u64,
    gains: Option<GainYieldStats>,
    bob: BobDecoyReport,
}

impl Tally {
    fn merge(&mut self, o: Tally) {
        self.verdicts.merge(&o.verdicts);
        self.sample_errors += o.sample_errors;
        self.keep_errors += o.keep_errors;
        self.decode_failures += o.decode_failures;
        self.non_decoy += o.non_decoy;
        self.key_guess_rounds += o.key_guess_rounds;
        self.key_guess_correct += o.key_guess_correct;
        self.op_attempts += o.op_attempts;
        self.op_guesses += o.op_guesses;
        self.op_correct += o.op_correct;
        self.probes_sent += o.probes_sent;
        self.probes_returned += o.probes_returned;
        self.intercepted += o.intercepted;
        self.pns_stored += o.pns_stored;
        self.purified += o.purified;
        self.removed += o.removed;
        match (&mut self.gains, o.gains) {
            (Some(a), Some(b)) => a.merge(&b),
            (slot @ None, Some(b)) => *slot = Some(b),
            _ => {}
        }
        self.bob.alice_signal_detected += o.bob.alice_signal_detected;
        self.bob.tagged += o.bob.tagged;
        self.bob.tagged_detected += o.bob.tagged_detected;
        self.bob.matched += o.bob.matched;
        self.bob.matched_detected += o.bob.matched_detected;
    }
}

/// Threshold detection of a pulse by a measuring party that announces `basis`.
fn measure_pulse<R: Rng + ?Sized>(
    pulse: &Pulse,
    basis: BasisLabel,
    behavior: MeasurerBehavior,
    catalog: &OperatorCatalog,
    detector: &ChannelModel,
    rng: &mut R,
) -> Result<Option<u8>> {
    let dark = dark_click(detector, rng);
    if pulse.is_empty() {
        return Ok(dark.then(|| rng.random_range(0..2u8)));
    }
    let idx = catalog.basis_index(basis)?;
    let used = match behavior {
        MeasurerBehavior::ConstantOutcome(b) => return Ok(Some(b)),
        MeasurerBehavior::Honest => idx,
        MeasurerBehavior::WrongBasis => (idx + 1) % catalog.bases().len(),
    };
    let mb = &catalog.bases()[used];
    let view = pulse.view();
    let mut fired = [false; 2];
    for i in 0..view.len() {
        let (k, _) = measure_qubit(view.state(i), 0, mb, rng)?;
        fired[k as usize] = true;
    }
    if dark {
        fired[rng.random_range(0..2usize)] = true;
    }
    Ok(Some(match fired {
        [true, true] => rng.random_range(0..2u8),
        [false, true] => 1,
        _ => 0,
    }))
}

struct LineResult {
    pulse: Pulse,
    intercept: Option<InterceptRecord>,
    stored: Option<Photon>,
}

/// Alice's pulse on its way to Bob's station, including attacks on the line.
fn alice_to_bob<R: Rng + ?Sized>(ctx: &Ctx, pulse: Pulse, t: &mut Tally, rng: &mut R) -> Result<LineResult> {
    let cfg = ctx.cfg;
    let mut out = LineResult {
        pulse,
        intercept: None,
        stored: None,
    };
    match &cfg.attack {
        AttackConfig::Pns { block_single } => {
            let p = std::mem::take(&mut out.pulse);
            let (kept, fwd) = pns_split(p, *block_single, rng);
            if kept.is_some() {
                t.pns_stored += 1;
            }
            out.stored = kept;
            out.pulse = fwd;
        }
        _ => {
            let p = std::mem::take(&mut out.pulse);
            out.pulse = transmit(p, &cfg.channel, rng)?;
        }
    }
    if let AttackConfig::InterceptResend { basis_policy } = &cfg.attack {
        if !out.pulse.is_empty() {
            let (resent, rec) =
                intercept_resend(&out.pulse.photons()[0].state, *basis_policy, ctx.prep.catalog.bases(), rng)?;
            out.pulse = Pulse::from_photons(vec![Photon::new(resent, Provenance::FromAlice)], out.pulse.intensity);
            out.intercept = Some(rec);
            t.intercepted += 1;
        }
    }
    if let Some(probes) = &ctx.probes {
        let p = std::mem::take(&mut out.pulse);
        out.pulse = pna_attach(p, probes)?;
        t.probes_sent += probes.len() as u64;
    }
    Ok(out)
}

/// Index Eve learns by measuring a stored copy in Alice's announced basis.
fn read_stored<R: Rng + ?Sized>(stored: &Option<Photon>, basis: &MeasurementBasis, rng: &mut R) -> Result<Option<u8>> {
    match stored {
        Some(ph) => Ok(Some(measure_qubit(&ph.state, 0, basis, rng)?.0)),
        None => Ok(None),
    }
}

fn run_round(ctx: &Ctx, index: u64, t: &mut Tally) -> Result<Round> {
    let cfg = ctx.cfg;
    let cat = &ctx.prep.catalog;
    let mut rng = RandomStream::new(cfg.seed, 0, index);
    let rng = &mut rng;

    let (a_basis, a_idx, a_state) = alice_prepare(cat, rng);
    let (intensity, n) = match &cfg.decoy {
        Some(s) => {
            let it = *s.draw(rng);
            let n = sample_photon_number(it.mu, rng);
            (Some(it), n)
        }
        None => (None, 1),
    };
    let alice_decoy = intensity.is_some_and(|i| i.label != IntensityLabel::Signal);
    if !alice_decoy {
        t.non_decoy += 1;
    }
    let pulse = Pulse::from_alice(&a_state, n, intensity.map_or(0.0, |i| i.mu));
    let line = alice_to_bob(ctx, pulse, t, rng)?;
    let mut pulse = line.pulse;
    let a_mb = cat.basis(a_basis)?.clone();

    let mut round = Round {
        index,
        alice_basis: a_basis,
        alice_index: a_idx,
        alice_intensity: intensity.map(|i| i.label),
        photons_sent: n,
        bob_operator: None,
        pnp_basis: None,
        measurement_basis: a_basis,
        eve_outcome: None,
        sift_verdict: SiftVerdict::Lost,
        alice_bit: None,
        bob_bit: None,
        eve_guess: None,
        eve_operator_guess: None,
    };

    if cfg.measurement == MeasurementMode::BobMeasures {
        let m = cat.bases()[rng.random_range(0..cat.bases().len())].label();
        round.measurement_basis = m;
        let outcome = measure_pulse(&pulse, m, MeasurerBehavior::Honest, cat, &cfg.channel, rng)?;
        if let (Some(g), Some(it)) = (t.gains.as_mut(), intensity) {
            g.record(&it, n, outcome.is_some());
        }
        round.sift_verdict = if alice_decoy {
            SiftVerdict::DecoyRound
        } else if outcome.is_none() {
            SiftVerdict::Lost
        } else if a_basis != m {
            SiftVerdict::DiscardBasis
        } else if rng.random::<f64>() < cfg.error_sample_fraction {
            SiftVerdict::ErrorSample
        } else {
            SiftVerdict::Keep
        };
        t.verdicts.add(round.sift_verdict);
        if round.sift_verdict.is_sifted_in() {
            let bob_bit = outcome.expect("detected");
            round.alice_bit = Some(a_idx);
            round.bob_bit = Some(bob_bit);
            let guess = match (line.intercept, read_stored(&line.stored, &a_mb, rng)?) {
                (_, Some(k)) => Some(k),
                (Some(rec), None) => Some(rec.outcome),
                _ => None,
            };
            tally_bits(t, &mut round, guess);
        }
        return Ok(round);
    }

    let (op, choice) = bob_choose(cat, ctx.prep.chooser == BasisChooser::Bob, rng);
    round.bob_operator = Some(cat.entry(op).label.clone());

    // Bob's station
    let mut detected_at_bob = None;
    let mut pnp_match = true;
    if cfg.pnp.enabled {
        let b = &ctx.prep.pnp_bases[rng.random_range(0..ctx.prep.pnp_bases.len())];
        round.pnp_basis = Some(b.label());
        pnp_match = pnp_sift(a_basis, b.label()) == PnpVerdict::Keep;
        let res = if !pulse.is_empty() {
            Some(purify(&pulse, b, rng, cfg.pnp.gate_fidelity, cfg.pnp.control_policy)?)
        } else if dark_click(&cfg.channel, rng) {
            Some(purify_dark_click(b, rng, cfg.pnp.gate_fidelity)?)
        } else {
            None
        };
        detected_at_bob = Some(res.is_some());
        pulse = match res {
            Some(r) => {
                t.purified += 1;
                t.removed += r.removed_count as u64;
                Pulse::single(r.output_photon, Provenance::BobAncilla)
            }
            None => Pulse::empty(),
        };
    }
    pulse.apply_all(&cat.entry(op).unitary)?;

    let mut op_guess = None;
    if ctx.probes.is_some() {
        let (rest, held) = pna_extract(pulse);
        pulse = rest;
        t.probes_returned += held.len() as u64;
        t.op_attempts += 1;
        op_guess = if held.is_empty() {
            Some(rng.random_range(0..cat.len()))
        } else {
            match &ctx.discriminator {
                Some(d) => d.guess(&held, rng)?,
                None => Some(rng.random_range(0..cat.len())),
            }
        };
        if let Some(g) = op_guess {
            t.op_guesses += 1;
            t.op_correct += (g == op) as u64;
            round.eve_operator_guess = Some(cat.entry(g).label.clone());
        }
    }

    let pulse = transmit(pulse, &cfg.bob_channel, rng)?;
    let m = match choice {
        BasisChoice::Basis(l) => l,
        BasisChoice::DeferToEve => cat.bases()[rng.random_range(0..cat.bases().len())].label(),
    };
    round.measurement_basis = m;
    let outcome = measure_pulse(&pulse, m, cfg.measurer, cat, &cfg.bob_channel, rng)?;
    round.eve_outcome = outcome;

    if let (Some(g), Some(it)) = (t.gains.as_mut(), intensity) {
        g.record(&it, n, detected_at_bob.unwrap_or(outcome.is_some()));
    }
    if cfg.pnp.enabled && !alice_decoy && detected_at_bob == Some(true) {
        t.bob.alice_signal_detected += 1;
        if pnp_match {
            t.bob.matched += 1;
            t.bob.matched_detected += outcome.is_some() as u64;
        } else {
            t.bob.tagged += 1;
            t.bob.tagged_detected += outcome.is_some() as u64;
        }
    }

    round.sift_verdict = if alice_decoy {
        SiftVerdict::DecoyRound
    } else if detected_at_bob == Some(false) {
        SiftVerdict::Lost
    } else if !pnp_match {
        if cfg.is_practical() {
            SiftVerdict::DecoyRound
        } else {
            SiftVerdict::DiscardPnp
        }
    } else if outcome.is_none() {
        SiftVerdict::Lost
    } else {
        match sift(cat, a_basis, &cat.entry(op).label, m)? {
            SiftVerdict::Keep if rng.random::<f64>() < cfg.error_sample_fraction => SiftVerdict::ErrorSample,
            v => v,
        }
    };
    t.verdicts.add(round.sift_verdict);

    if round.sift_verdict.is_sifted_in() {
        let outcome = outcome.expect("detected");
        let s = cat.basis_index(a_basis)?;
        let bob_bit = coding_bit_by_index(ctx.prep.coding, cat, op, s).expect("kept cell");
        let class = cat.class_by_index(op);
        let view = |k: u8| AliceView {
            alice_basis: a_basis,
            alice_index: k,
            announced_class: class,
            measurement_basis: m,
            outcome,
        };
        round.alice_bit = decode_alice(cat, ctx.prep.coding, &view(a_idx))?;
        round.bob_bit = Some(bob_bit);

        let t_idx = cat.basis_index(m)?;
        let known_index = match (read_stored(&line.stored, &a_mb, rng)?, line.intercept) {
            (Some(k), _) => Some(k),
            (None, Some(rec)) if rec.basis == a_basis => Some(rec.outcome),
            _ => None,
        };
        let guess = if let Some(k) = known_index {
            decode_alice(cat, ctx.prep.coding, &view(k))?.unwrap_or(outcome)
        } else {
            match op_guess {
                Some(g) if cat.image_by_index(g, s) == Some(t_idx) => {
                    coding_bit_by_index(ctx.prep.coding, cat, g, s).expect("valid cell")
                }
                _ => outcome,
            }
        };
        tally_bits(t, &mut round, Some(guess));
    }
    Ok(round)
}

fn tally_bits(t: &mut Tally, round: &mut Round, guess: Option<u8>) {
    let agree = round.alice_bit.is_some() && round.alice_bit == round.bob_bit;
    if round.alice_bit.is_none() {
        t.decode_failures += 1;
    }
    match round.sift_verdict {
        SiftVerdict::ErrorSample => t.sample_errors += (!agree) as u64,
        SiftVerdict::Keep => {
            t.keep_errors += (!agree) as u64;
            if let Some(g) = guess {
                t.key_guess_rounds += 1;
                t.key_guess_correct += (Some(g) == round.bob_bit) as u64;
            }
        }
        _ => {}
    }
    round.eve_guess = guess;
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Runs a full session and summarizes it.
pub fn run_session(cfg: &ProtocolConfig) -> Result<SessionReport> {
    run(cfg, false).map(|(r, _)| r)
}

/// Like [`run_session`], also returning every round in index order.
pub fn run_session_traced(cfg: &ProtocolConfig) -> Result<(SessionReport, Vec<Round>)> {
    run(cfg, true)
}

fn run(cfg: &ProtocolConfig, trace: bool) -> Result<(SessionReport, Vec<Round>)> {
    let prep = cfg.prepare()?;
    let (probes, discriminator) = match &cfg.attack {
        AttackConfig::Pna { probes, method } => {
            let set = PnaProbeSet::from_named(probes)?;
            // probes only come back when Bob forwards what he received
            let d = if cfg.pnp.enabled {
                None
            } else {
                Some(PnaDiscriminator::new(&prep.catalog, &set, *method)?)
            };
            (Some(set), d)
        }
        _ => (None, None),
    };
    let ctx = Ctx {
        cfg,
        prep,
        probes,
        discriminator,
    };
    let chunks = cfg.rounds.div_ceil(CHUNK);
    let parts: Vec<(Tally, Vec<Round>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut t = Tally {
                gains: cfg.decoy.as_ref().map(GainYieldStats::for_schedule),
                ..Tally::default()
            };
            let mut rows = Vec::new();
            let end = ((c + 1) * CHUNK).min(cfg.rounds);
            for i in c * CHUNK..end {
                let r = run_round(&ctx, i, &mut t)?;
                if trace {
                    rows.push(r);
                }
            }
            Ok((t, rows))
        })
        .collect::<Result<_>>()?;

    let mut total = Tally {
        gains: cfg.decoy.as_ref().map(GainYieldStats::for_schedule),
        ..Tally::default()
    };
    let mut rounds = Vec::new();
    for (t, rows) in parts {
        total.merge(t);
        rounds.extend(rows);
    }
    Ok((summarize(&ctx, total), rounds))
}

fn summarize(ctx: &Ctx, t: Tally) -> SessionReport {
    let cfg = ctx.cfg;
    let v = t.verdicts;
    let kept = v.keep + v.error_sample;
    let sift_fraction = kept as f64 / cfg.rounds as f64;
    let qber = ratio(t.sample_errors, v.error_sample);
    let decoy = t.gains.map(|g| {
        let (y1, consistency, note) = match estimate_y1_lower_bound(&g.observed) {
            Ok(e) => (Some(e), check_consistency(&g.observed).ok(), None),
            Err(e) => (None, None, Some(e.to_string())),
        };
        let mut bob = t.bob.clone();
        bob.tagged_gain = ratio(bob.tagged_detected, bob.tagged);
        bob.matched_gain = ratio(bob.matched_detected, bob.matched);
        bob.gains_consistent = match (bob.tagged_gain, bob.matched_gain) {
            (Some(a), Some(b)) => {
                let va = a * (1.0 - a) / bob.tagged as f64;
                let vb = b * (1.0 - b) / bob.matched as f64;
                Some((a - b).abs() <= 3.0 * (va + vb).sqrt() + 1e-12)
            }
            _ => None,
        };
        DecoyReport {
            observed: g.observed,
            ground_truth: g.truth,
            y1,
            consistency,
            estimator_note: note,
            bob,
        }
    });
    SessionReport {
        kind: cfg.kind,
        theta: cfg.theta,
        coding: ctx.prep.coding,
        rounds_total: cfg.rounds,
        kept_count: kept,
        sift_fraction,
        raw_key_bits: v.keep,
        error_sample_size: v.error_sample,
        error_sample_errors: t.sample_errors,
        qber,
        raw_key_errors: t.keep_errors,
        true_key_error_rate: ratio(t.keep_errors, v.keep),
        decode_failures: t.decode_failures,
        verdicts: v,
        non_decoy_pulses: t.non_decoy,
        qubits_per_raw_bit: qubits_per_raw_bit(t.non_decoy, v.keep).ok(),
        standard_mdi_qubits_per_bit: STANDARD_MDI_QUBITS_PER_BIT,
        asymptotic_key_rate: qber.and_then(|q| super::round::asymptotic_key_rate(q, sift_fraction).ok()),
        eve: EveReport {
            attack: cfg.attack.name().to_string(),
            key_guess_rounds: t.key_guess_rounds,
            key_guess_correct: t.key_guess_correct,
            key_guess_rate: ratio(t.key_guess_correct, t.key_guess_rounds),
            operator_attempts: t.op_attempts,
            operator_guesses: t.op_guesses,
            operator_correct: t.op_correct,
            operator_accuracy: ratio(t.op_correct, t.op_guesses),
            conclusive_rate: ratio(t.op_guesses, t.op_attempts),
            probes_sent: t.probes_sent,
            probes_returned: t.probes_returned,
            intercepted: t.intercepted,
            pns_stored: t.pns_stored,
        },
        pnp: PnpReport {
            enabled: cfg.pnp.enabled,
            purified: t.purified,
            removed_photons: t.removed,
        },
        decoy,
    }
}
