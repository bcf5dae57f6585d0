//! Weak-coherent sources, lossy channels and decoy-state yield bounds.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::adversary::pns_split_count;
use crate::error::{Error, Result};
use crate::pnp::{Photon, Pulse};
use crate::qmath::{apply, Unitary};

/// Qubits per raw bit quoted for standard MDI-QKD; reported next to simulated values.
pub const STANDARD_MDI_QUBITS_PER_BIT: f64 = 8.0;

/// Minimum pulses per intensity before the yield bound is evaluated.
pub const MIN_COUNTS: u64 = 10_000;

/// Standard deviations subtracted from (or added to) the gains in the bound.
pub const CONFIDENCE_SIGMAS: f64 = 3.0;

/// Signal gain implying a single-photon yield this far above the bound raises the flag.
pub const CONSISTENCY_RATIO: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntensityLabel {
    Signal,
    Decoy,
    Vacuum,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Intensity {
    pub label: IntensityLabel,
    pub mu: f64,
    pub probability: f64,
}

/// Intensities one party draws from, one entry per label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntensitySchedule {
    pub intensities: Vec<Intensity>,
}

impl Default for IntensitySchedule {
    fn default() -> Self {
        Self {
            intensities: vec![
                Intensity {
                    label: IntensityLabel::Signal,
                    mu: 0.5,
                    probability: 0.5,
                },
                Intensity {
                    label: IntensityLabel::Decoy,
                    mu: 0.1,
                    probability: 0.4,
                },
                Intensity {
                    label: IntensityLabel::Vacuum,
                    mu: 0.0,
                    probability: 0.1,
                },
            ],
        }
    }
}

impl IntensitySchedule {
    pub fn validate(&self) -> Result<()> {
        if self.intensities.is_empty() {
            return Err(Error::Config("intensity schedule is empty".into()));
        }
        let mut seen = Vec::new();
        for i in &self.intensities {
            if seen.contains(&i.label) {
                return Err(Error::Config(format!("intensity {:?} listed twice", i.label)));
            }
            seen.push(i.label);
            if !(i.mu >= 0.0 && i.mu.is_finite()) {
                return Err(Error::Config(format!("mean photon number {} must be >= 0", i.mu)));
            }
            if !(0.0..=1.0).contains(&i.probability) {
                return Err(Error::Config(format!("probability {} outside [0, 1]", i.probability)));
            }
            if i.label == IntensityLabel::Vacuum && i.mu != 0.0 {
                return Err(Error::Config("vacuum intensity must have mu = 0".into()));
            }
        }
        let total: f64 = self.intensities.iter().map(|i| i.probability).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("intensity probabilities sum to {total}")));
        }
        let signal = self.get(IntensityLabel::Signal);
        let decoy = self.get(IntensityLabel::Decoy);
        if signal.is_none() {
            return Err(Error::Config("schedule has no signal intensity".into()));
        }
        if let (Some(s), Some(d)) = (signal, decoy) {
            if !(s.mu > d.mu) {
                return Err(Error::Config(format!("signal mu {} must exceed decoy mu {}", s.mu, d.mu)));
            }
        }
        Ok(())
    }

    pub fn get(&self, label: IntensityLabel) -> Option<&Intensity> {
        self.intensities.iter().find(|i| i.label == label)
    }

    /// Draws an intensity by its probability.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> &Intensity {
        let mut u = rng.random::<f64>();
        for i in &self.intensities {
            if u < i.probability {
                return i;
            }
            u -= i.probability;
        }
        self.intensities
            .iter()
            .rev()
            .find(|i| i.probability > 0.0)
            .unwrap_or(&self.intensities[0])
    }
}

/// Loss, dark counts and depolarization between a source and a detector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelModel {
    pub transmittance: f64,
    pub dark_count: f64,
    pub depolarizing: f64,
}

impl Default for ChannelModel {
    fn default() -> Self {
        Self {
            transmittance: 1.0,
            dark_count: 0.0,
            depolarizing: 0.0,
        }
    }
}

impl ChannelModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.transmittance > 0.0 && self.transmittance <= 1.0) {
            return Err(Error::Config(format!("transmittance {} outside (0, 1]", self.transmittance)));
        }
        if !(0.0..=1.0).contains(&self.dark_count) {
            return Err(Error::Config(format!("dark count probability {} outside [0, 1]", self.dark_count)));
        }
        if !(0.0..=1.0).contains(&self.depolarizing) {
            return Err(Error::Config(format!("depolarizing probability {} outside [0, 1]", self.depolarizing)));
        }
        Ok(())
    }

    pub fn is_ideal(&self) -> bool {
        self.transmittance == 1.0 && self.dark_count == 0.0 && self.depolarizing == 0.0
    }
}

/// Poisson photon number of a weak-coherent pulse; `mu = 0` is always empty.
pub fn sample_photon_number<R: Rng + ?Sized>(mu: f64, rng: &mut R) -> usize {
    if mu <= 0.0 {
        return 0;
    }
    let n: f64 = Poisson::new(mu).expect("positive mean").sample(rng);
    n as usize
}

/// Applies a uniformly random Pauli (identity included) with probability `p`,
/// which is the depolarizing map `rho -> (1 - p) rho + p I/2`.
pub fn depolarize<R: Rng + ?Sized>(photon: &mut Photon, p: f64, rng: &mut R) -> Result<()> {
    if p > 0.0 && rng.random::<f64>() < p {
        let pauli = match rng.random_range(0..4u8) {
            0 => return Ok(()),
            1 => Unitary::pauli_x(),
            2 => Unitary::pauli_y(),
            _ => Unitary::pauli_z(),
        };
        photon.state = apply(&pauli, &photon.state)?;
    }
    Ok(())
}

/// Each photon survives with probability `transmittance` and is then depolarized.
pub fn transmit<R: Rng + ?Sized>(pulse: Pulse, channel: &ChannelModel, rng: &mut R) -> Result<Pulse> {
    let intensity = pulse.intensity;
    let mut out = Vec::with_capacity(pulse.len());
    for mut ph in pulse.into_photons() {
        if channel.transmittance < 1.0 && rng.random::<f64>() >= channel.transmittance {
            continue;
        }
        depolarize(&mut ph, channel.depolarizing, rng)?;
        out.push(ph);
    }
    Ok(Pulse::from_photons(out, intensity))
}

/// Whether a detector with the channel's dark-count rate fires on an empty slot.
pub fn dark_click<R: Rng + ?Sized>(channel: &ChannelModel, rng: &mut R) -> bool {
    channel.dark_count > 0.0 && rng.random::<f64>() < channel.dark_count
}

/// Threshold detection: fires if a photon arrived or a dark count occurred.
pub fn detect<R: Rng + ?Sized>(pulse: &Pulse, channel: &ChannelModel, rng: &mut R) -> bool {
    let dark = dark_click(channel, rng);
    !pulse.is_empty() || dark
}

/// Observed counts for one intensity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntensityCounts {
    pub label: IntensityLabel,
    pub mu: f64,
    pub sent: u64,
    pub detected: u64,
}

impl IntensityCounts {
    pub fn gain(&self) -> Option<f64> {
        (self.sent > 0).then(|| self.detected as f64 / self.sent as f64)
    }

    fn sigma(&self) -> f64 {
        match self.gain() {
            Some(q) => (q * (1.0 - q) / self.sent as f64).sqrt(),
            None => 0.0,
        }
    }
}

/// What the legitimate parties can see: sent and detected counts per intensity.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ObservedGains {
    pub counts: Vec<IntensityCounts>,
}

impl ObservedGains {
    pub fn for_schedule(schedule: &IntensitySchedule) -> Self {
        Self {
            counts: schedule
                .intensities
                .iter()
                .map(|i| IntensityCounts {
                    label: i.label,
                    mu: i.mu,
                    sent: 0,
                    detected: 0,
                })
                .collect(),
        }
    }

    pub fn get(&self, label: IntensityLabel) -> Option<&IntensityCounts> {
        self.counts.iter().find(|c| c.label == label)
    }

    pub fn gain(&self, label: IntensityLabel) -> Option<f64> {
        self.get(label).and_then(|c| c.gain())
    }

    pub fn record(&mut self, label: IntensityLabel, mu: f64, detected: bool) {
        let idx = match self.counts.iter().position(|c| c.label == label) {
            Some(i) => i,
            None => {
                self.counts.push(IntensityCounts {
                    label,
                    mu,
                    sent: 0,
                    detected: 0,
                });
                self.counts.len() - 1
            }
        };
        let c = &mut self.counts[idx];
        c.sent += 1;
        c.detected += detected as u64;
    }

    pub fn merge(&mut self, other: &ObservedGains) {
        for o in &other.counts {
            match self.counts.iter_mut().find(|c| c.label == o.label) {
                Some(c) => {
                    c.sent += o.sent;
                    c.detected += o.detected;
                }
                None => self.counts.push(*o),
            }
        }
    }
}

/// Per-photon-number detection counts known only to the simulator.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub sent_by_n: Vec<u64>,
    pub detected_by_n: Vec<u64>,
}

impl GroundTruth {
    pub fn record(&mut self, n: usize, detected: bool) {
        if self.sent_by_n.len() <= n {
            self.sent_by_n.resize(n + 1, 0);
            self.detected_by_n.resize(n + 1, 0);
        }
        self.sent_by_n[n] += 1;
        self.detected_by_n[n] += detected as u64;
    }

    /// Empirical yield `Y_n`.
    pub fn yield_n(&self, n: usize) -> Option<f64> {
        let sent = *self.sent_by_n.get(n)?;
        (sent > 0).then(|| self.detected_by_n[n] as f64 / sent as f64)
    }

    pub fn merge(&mut self, other: &GroundTruth) {
        if self.sent_by_n.len() < other.sent_by_n.len() {
            self.sent_by_n.resize(other.sent_by_n.len(), 0);
            self.detected_by_n.resize(other.sent_by_n.len(), 0);
        }
        for (i, (s, d)) in other.sent_by_n.iter().zip(&other.detected_by_n).enumerate() {
            self.sent_by_n[i] += s;
            self.detected_by_n[i] += d;
        }
    }
}

/// Accumulated decoy statistics. Merging is associative and commutative.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GainYieldStats {
    pub observed: ObservedGains,
    pub truth: GroundTruth,
}

impl GainYieldStats {
    pub fn for_schedule(schedule: &IntensitySchedule) -> Self {
        Self {
            observed: ObservedGains::for_schedule(schedule),
            truth: GroundTruth::default(),
        }
    }

    pub fn record(&mut self, intensity: &Intensity, photons: usize, detected: bool) {
        self.observed.record(intensity.label, intensity.mu, detected);
        self.truth.record(photons, detected);
    }

    pub fn merge(&mut self, other: &GainYieldStats) {
        self.observed.merge(&other.observed);
        self.truth.merge(&other.truth);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Y1Estimate {
    pub y1_lower: f64,
    pub q_signal: f64,
    pub q_decoy: f64,
    pub y0: f64,
}

/// Vacuum + weak-decoy lower bound on the single-photon yield (the standard
/// external formula from the decoy-state literature):
///
/// `Y1 >= mu / (mu nu - nu^2) * (Q_nu e^nu - Q_mu e^mu nu^2/mu^2 - (mu^2 - nu^2)/mu^2 * Y0)`
///
/// Each gain is shifted by three binomial standard deviations in the
/// direction that loosens the bound. Reads observed counts only.
pub fn estimate_y1_lower_bound(observed: &ObservedGains) -> Result<Y1Estimate> {
    let need = |label: IntensityLabel| -> Result<&IntensityCounts> {
        let c = observed
            .get(label)
            .ok_or_else(|| Error::InsufficientCounts(format!("no {label:?} pulses")))?;
        if c.sent < MIN_COUNTS {
            return Err(Error::InsufficientCounts(format!(
                "{} {label:?} pulses, need {MIN_COUNTS}",
                c.sent
            )));
        }
        Ok(c)
    };
    let s = need(IntensityLabel::Signal)?;
    let d = need(IntensityLabel::Decoy)?;
    let v = need(IntensityLabel::Vacuum)?;
    let (mu, nu) = (s.mu, d.mu);
    if !(mu > nu && nu > 0.0) {
        return Err(Error::Config(format!("need mu > nu > 0, got mu {mu}, nu {nu}")));
    }
    let k = CONFIDENCE_SIGMAS;
    let q_mu = (s.gain().unwrap() + k * s.sigma()).min(1.0);
    let q_nu = (d.gain().unwrap() - k * d.sigma()).max(0.0);
    let y0 = (v.gain().unwrap() + k * v.sigma()).min(1.0);
    let bound = mu / (mu * nu - nu * nu)
        * (q_nu * nu.exp() - q_mu * mu.exp() * nu * nu / (mu * mu) - (mu * mu - nu * nu) / (mu * mu) * y0);
    Ok(Y1Estimate {
        y1_lower: bound.max(0.0),
        q_signal: s.gain().unwrap(),
        q_decoy: d.gain().unwrap(),
        y0: v.gain().unwrap(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyCheck {
    pub y1_lower: f64,
    /// Transmittance implied by the signal gain under an honest Poisson channel.
    pub eta_effective: f64,
    /// Raised when the decoy bound is far below what the signal gain implies.
    pub flagged: bool,
}

/// Compares the Y1 bound with the transmittance implied by the signal gain,
/// `eta_eff = -ln((1 - Q_mu) / (1 - Y0)) / mu`.
pub fn check_consistency(observed: &ObservedGains) -> Result<ConsistencyCheck> {
    let est = estimate_y1_lower_bound(observed)?;
    let mu = observed.get(IntensityLabel::Signal).map(|c| c.mu).unwrap_or(0.0);
    let ratio = ((1.0 - est.q_signal) / (1.0 - est.y0).max(f64::MIN_POSITIVE)).clamp(f64::MIN_POSITIVE, 1.0);
    let eta_effective = -ratio.ln() / mu;
    Ok(ConsistencyCheck {
        y1_lower: est.y1_lower,
        eta_effective,
        flagged: est.y1_lower < CONSISTENCY_RATIO * eta_effective,
    })
}

/// Photon-number splitting on the count level: Eve replaces the line with a
/// lossless one, stores one photon of every multi-photon pulse and blocks
/// single photons with `block_single` probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PnsLink {
    pub block_single: f64,
}

/// Count-level decoy session: draws an intensity and photon number for every
/// pulse and records whether the detector fired.
pub fn simulate_gains<R: Rng + ?Sized>(
    schedule: &IntensitySchedule,
    channel: &ChannelModel,
    pns: Option<PnsLink>,
    pulses: u64,
    rng: &mut R,
) -> Result<GainYieldStats> {
    schedule.validate()?;
    channel.validate()?;
    let poissons: Vec<Option<Poisson<f64>>> = schedule
        .intensities
        .iter()
        .map(|i| (i.mu > 0.0).then(|| Poisson::new(i.mu).expect("positive mean")))
        .collect();
    let mut stats = GainYieldStats::for_schedule(schedule);
    for _ in 0..pulses {
        let mut u = rng.random::<f64>();
        let mut idx = schedule.intensities.len() - 1;
        for (i, it) in schedule.intensities.iter().enumerate() {
            if u < it.probability {
                idx = i;
                break;
            }
            u -= it.probability;
        }
        let intensity = &schedule.intensities[idx];
        let n = match &poissons[idx] {
            Some(p) => p.sample(rng) as usize,
            None => 0,
        };
        let arriving = match pns {
            Some(link) => pns_split_count(n, link.block_single, rng).1,
            None => {
                if channel.transmittance >= 1.0 {
                    n
                } else {
                    (0..n).filter(|_| rng.random::<f64>() < channel.transmittance).count()
                }
            }
        };
        let detected = arriving > 0 || dark_click(channel, rng);
        stats.record(intensity, n, detected);
    }
    Ok(stats)
}

/// Alice's non-decoy pulses spent per raw key bit.
pub fn qubits_per_raw_bit(non_decoy_pulses: u64, raw_bits: u64) -> Result<f64> {
    if raw_bits == 0 {
        return Err(Error::NoRawBits);
    }
    Ok(non_decoy_pulses as f64 / raw_bits as f64)
}
