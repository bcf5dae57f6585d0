//! Bob's encoding-operator catalogs.
//!
//! Every catalog is classified against the protocol's measurement bases: an
//! operator is *valid* on a cell `(source, target)` when it carries both
//! vectors of the source basis onto vectors of the target basis up to phase.
//! Sifting keeps exactly the valid cells, and a key bit is read from how the
//! operator permutes the basis indices inside the cell.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{BasisLabel, Complex64, MeasurementBasis, Unitary};

/// Phase-alignment tolerance when classifying basis images.
pub const PHASE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CatalogKind {
    #[serde(rename = "BB84-4")]
    Bb84Four,
    #[serde(rename = "BB84-8")]
    Bb84Eight,
    #[serde(rename = "SixState-24")]
    SixState,
    #[serde(rename = "General-12")]
    General,
}

impl CatalogKind {
    pub const ALL: [CatalogKind; 4] = [
        CatalogKind::Bb84Four,
        CatalogKind::Bb84Eight,
        CatalogKind::SixState,
        CatalogKind::General,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CatalogKind::Bb84Four => "BB84-4",
            CatalogKind::Bb84Eight => "BB84-8",
            CatalogKind::SixState => "SixState-24",
            CatalogKind::General => "General-12",
        }
    }

    pub fn size(&self) -> usize {
        match self {
            CatalogKind::Bb84Four => 4,
            CatalogKind::Bb84Eight => 8,
            CatalogKind::SixState => 24,
            CatalogKind::General => 12,
        }
    }
}

impl fmt::Display for CatalogKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CatalogKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CatalogKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown catalog kind `{s}`")))
    }
}

/// One letter of an operator word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gate {
    H,
    H1,
    H2,
    H3,
    H4,
    U,
    X,
    Z,
}

impl Gate {
    fn matrix(&self, theta: Option<f64>) -> Result<Unitary> {
        let s = FRAC_1_SQRT_2;
        let r = |x: f64| Complex64::new(x, 0.0);
        let i = |x: f64| Complex64::new(0.0, x);
        Ok(match self {
            Gate::H => Unitary::hadamard(),
            Gate::X => Unitary::pauli_x(),
            Gate::Z => Unitary::pauli_z(),
            Gate::H1 => Unitary::qubit(r(s), i(-s), i(s), r(-s))?,
            Gate::H2 => Unitary::qubit(r(1.0), r(0.0), r(0.0), i(1.0))?,
            Gate::H3 => Unitary::qubit(r(s), r(s), i(s), i(-s))?,
            Gate::H4 => Unitary::qubit(r(s), i(-s), r(s), i(s))?,
            Gate::U => {
                let t = theta.ok_or(Error::MissingAngle("U"))?;
                let (x0, x1) = (t.cos(), t.sin());
                Unitary::qubit(r(x0), r(x1), r(x1), r(-x0))?
            }
        })
    }

    fn symbol(&self) -> &'static str {
        match self {
            Gate::H => "H",
            Gate::H1 => "H1",
            Gate::H2 => "H2",
            Gate::H3 => "H3",
            Gate::H4 => "H4",
            Gate::U => "U",
            Gate::X => "X",
            Gate::Z => "Z",
        }
    }
}

/// A word over the gate alphabet; the empty word is the identity `I`.
///
/// `HXZ` is the matrix product `H * X * Z`, so `Z` acts on the state first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct OperatorLabel {
    gates: Vec<Gate>,
}

impl OperatorLabel {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn from_gates(gates: Vec<Gate>) -> Self {
        Self { gates }
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.parse()
    }

    pub fn matrix(&self, theta: Option<f64>) -> Result<Unitary> {
        let mut acc = Unitary::identity(2);
        for g in &self.gates {
            acc = acc.mul(&g.matrix(theta)?)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for OperatorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gates.is_empty() {
            return f.write_str("I");
        }
        for g in &self.gates {
            f.write_str(g.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for OperatorLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "I" {
            return Ok(Self::identity());
        }
        if t.is_empty() {
            return Err(Error::InvalidLabel(s.to_string()));
        }
        let chars: Vec<char> = t.chars().collect();
        let mut gates = Vec::new();
        let mut k = 0;
        while k < chars.len() {
            let g = match chars[k] {
                'H' => match chars.get(k + 1) {
                    Some(d @ '1'..='4') => {
                        k += 1;
                        [Gate::H1, Gate::H2, Gate::H3, Gate::H4][(*d as u8 - b'1') as usize]
                    }
                    _ => Gate::H,
                },
                'U' => Gate::U,
                'X' => Gate::X,
                'Z' => Gate::Z,
                _ => return Err(Error::InvalidLabel(s.to_string())),
            };
            gates.push(g);
            k += 1;
        }
        Ok(Self { gates })
    }
}

impl Serialize for OperatorLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for OperatorLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Left factor of a six-state operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Prefix {
    I,
    H,
    H1,
    H2,
    H3,
    H4,
}

impl Prefix {
    pub const ALL: [Prefix; 6] = [Prefix::I, Prefix::H, Prefix::H1, Prefix::H2, Prefix::H3, Prefix::H4];

    fn gates(&self) -> Vec<Gate> {
        match self {
            Prefix::I => vec![],
            Prefix::H => vec![Gate::H],
            Prefix::H1 => vec![Gate::H1],
            Prefix::H2 => vec![Gate::H2],
            Prefix::H3 => vec![Gate::H3],
            Prefix::H4 => vec![Gate::H4],
        }
    }
}

/// A permutation of the three mutually unbiased bases `Z, X, Y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MubPermutation {
    /// Images of `Z`, `X`, `Y` in that order.
    pub images: [BasisLabel; 3],
}

impl MubPermutation {
    pub fn apply(&self, b: BasisLabel) -> Option<BasisLabel> {
        match b {
            BasisLabel::Z => Some(self.images[0]),
            BasisLabel::X => Some(self.images[1]),
            BasisLabel::Y => Some(self.images[2]),
            BasisLabel::General(_) => None,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images == [BasisLabel::Z, BasisLabel::X, BasisLabel::Y]
    }
}

/// A sifting cell: Alice's basis and the basis the measurement party uses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub source: BasisLabel,
    pub target: BasisLabel,
}

impl Cell {
    pub fn new(source: BasisLabel, target: BasisLabel) -> Self {
        Self { source, target }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.source, self.target)
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub label: OperatorLabel,
    pub unitary: Unitary,
}

/// Immutable operator catalog together with the protocol's measurement bases.
#[derive(Clone, Debug)]
pub struct OperatorCatalog {
    kind: CatalogKind,
    theta: Option<f64>,
    entries: Vec<CatalogEntry>,
    bases: Vec<MeasurementBasis>,
    /// `images[op][source]` = index of the target basis, if valid.
    images: Vec<Vec<Option<usize>>>,
}

fn words(list: &[&str]) -> Vec<OperatorLabel> {
    list.iter().map(|w| w.parse().expect("static label")).collect()
}

/// Builds one of the four catalogs. `theta` is required for (and only for) `General-12`.
pub fn build_catalog(kind: CatalogKind, theta: Option<f64>) -> Result<OperatorCatalog> {
    let labels = match kind {
        CatalogKind::Bb84Four => words(&["Z", "X", "H", "HXZ"]),
        CatalogKind::Bb84Eight => words(&["I", "X", "Z", "XZ", "H", "HX", "HZ", "HXZ"]),
        CatalogKind::SixState => {
            let suffixes = [vec![], vec![Gate::X], vec![Gate::Z], vec![Gate::X, Gate::Z]];
            Prefix::ALL
                .iter()
                .flat_map(|p| {
                    suffixes.iter().map(move |s| {
                        let mut g = p.gates();
                        g.extend(s.iter().copied());
                        OperatorLabel::from_gates(g)
                    })
                })
                .collect()
        }
        CatalogKind::General => words(&[
            "I", "U", "XZ", "UXZ", "X", "Z", "UX", "UZ", "XU", "ZU", "UXU", "UZU",
        ]),
    };
    let bases = match kind {
        CatalogKind::Bb84Four | CatalogKind::Bb84Eight => {
            if theta.is_some() {
                return Err(Error::Config(format!("{kind} takes no angle")));
            }
            vec![MeasurementBasis::z(), MeasurementBasis::x()]
        }
        CatalogKind::SixState => {
            if theta.is_some() {
                return Err(Error::Config(format!("{kind} takes no angle")));
            }
            vec![MeasurementBasis::z(), MeasurementBasis::x(), MeasurementBasis::y()]
        }
        CatalogKind::General => {
            let t = theta.ok_or(Error::MissingAngle("General-12"))?;
            if !(t > 0.0 && t < FRAC_PI_2) {
                return Err(Error::AngleOutOfRange(t));
            }
            vec![MeasurementBasis::z(), MeasurementBasis::general(t)]
        }
    };
    let entries = labels
        .into_iter()
        .map(|label| {
            let unitary = label.matrix(theta)?;
            Ok(CatalogEntry { label, unitary })
        })
        .collect::<Result<Vec<_>>>()?;
    let images = entries
        .iter()
        .map(|e| {
            bases
                .iter()
                .map(|src| image_index(&e.unitary, src, &bases))
                .collect()
        })
        .collect();
    Ok(OperatorCatalog {
        kind,
        theta,
        entries,
        bases,
        images,
    })
}

fn image_index(u: &Unitary, source: &MeasurementBasis, candidates: &[MeasurementBasis]) -> Option<usize> {
    let mapped: Vec<_> = source
        .vectors()
        .iter()
        .map(|v| u.apply(v).expect("single-qubit"))
        .collect();
    candidates.iter().position(|t| {
        mapped
            .iter()
            .all(|m| t.vectors().iter().any(|tv| tv.same_ray(m, PHASE_TOL)))
    })
}

/// Target basis among `candidates` onto which `u` maps both vectors of `source`, if any.
pub fn basis_image(u: &Unitary, source: &MeasurementBasis, candidates: &[MeasurementBasis]) -> Option<BasisLabel> {
    image_index(u, source, candidates).map(|i| candidates[i].label())
}

/// Permutation of `{Z, X, Y}` induced by a six-state prefix.
pub fn prefix_permutation(prefix: Prefix) -> MubPermutation {
    let u = OperatorLabel::from_gates(prefix.gates())
        .matrix(None)
        .expect("prefix matrices need no angle");
    let mubs = [MeasurementBasis::z(), MeasurementBasis::x(), MeasurementBasis::y()];
    let images = [0, 1, 2].map(|k| {
        basis_image(&u, &mubs[k], &mubs).expect("prefixes permute the mutually unbiased bases")
    });
    MubPermutation { images }
}

impl OperatorCatalog {
    pub fn kind(&self) -> CatalogKind {
        self.kind
    }

    pub fn theta(&self) -> Option<f64> {
        self.theta
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn entry(&self, index: usize) -> &CatalogEntry {
        &self.entries[index]
    }

    pub fn labels(&self) -> impl Iterator<Item = &OperatorLabel> {
        self.entries.iter().map(|e| &e.label)
    }

    pub fn index_of(&self, label: &OperatorLabel) -> Result<usize> {
        self.entries
            .iter()
            .position(|e| &e.label == label)
            .ok_or_else(|| Error::UnknownOperator(label.to_string()))
    }

    /// The protocol's measurement bases (`Z, X` for BB84, `Z, X, Y` for six-state,
    /// `Z, G(theta)` for the general scheme).
    pub fn bases(&self) -> &[MeasurementBasis] {
        &self.bases
    }

    pub fn basis_index(&self, label: BasisLabel) -> Result<usize> {
        self.bases
            .iter()
            .position(|b| b.label() == label)
            .ok_or_else(|| Error::UnknownBasis(label.to_string()))
    }

    pub fn basis(&self, label: BasisLabel) -> Result<&MeasurementBasis> {
        self.basis_index(label).map(|i| &self.bases[i])
    }

    /// All ordered `(source, target)` pairs of protocol bases.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for s in &self.bases {
            for t in &self.bases {
                out.push(Cell::new(s.label(), t.label()));
            }
        }
        out
    }

    pub(crate) fn image_by_index(&self, op: usize, source: usize) -> Option<usize> {
        self.images[op][source]
    }

    pub fn basis_image(&self, op: &OperatorLabel, source: BasisLabel) -> Result<Option<BasisLabel>> {
        let o = self.index_of(op)?;
        let s = self.basis_index(source)?;
        Ok(self.images[o][s].map(|t| self.bases[t].label()))
    }

    pub fn is_kept(&self, op: &OperatorLabel, cell: Cell) -> Result<bool> {
        Ok(self.basis_image(op, cell.source)? == Some(cell.target))
    }

    /// Sources on which the operator is valid.
    pub fn valid_sources(&self, op: &OperatorLabel) -> Result<Vec<BasisLabel>> {
        let o = self.index_of(op)?;
        Ok(self.images[o]
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_some())
            .map(|(s, _)| self.bases[s].label())
            .collect())
    }

    /// Operators valid on the cell, in catalog order.
    pub fn kept_in(&self, cell: Cell) -> Result<Vec<&OperatorLabel>> {
        let s = self.basis_index(cell.source)?;
        let t = self.basis_index(cell.target)?;
        Ok(self
            .entries
            .iter()
            .enumerate()
            .filter(|(o, _)| self.images[*o][s] == Some(t))
            .map(|(_, e)| &e.label)
            .collect())
    }

    /// Bob's public announcement: operators sharing one basis-image map form one class.
    /// Classes are numbered in order of first appearance in the catalog.
    pub fn announcement_class(&self, op: &OperatorLabel) -> Result<usize> {
        let o = self.index_of(op)?;
        Ok(self.class_by_index(o))
    }

    pub(crate) fn class_by_index(&self, o: usize) -> usize {
        let mut seen: Vec<&Vec<Option<usize>>> = Vec::new();
        for sig in &self.images {
            if !seen.contains(&sig) {
                seen.push(sig);
            }
        }
        seen.iter().position(|s| *s == &self.images[o]).expect("own signature")
    }

    pub(crate) fn flip_by_index(&self, o: usize, source: usize) -> Option<u8> {
        let target = self.images[o][source]?;
        let u = &self.entries[o].unitary;
        let mapped = u.apply(self.bases[source].vector(0)).expect("single-qubit");
        Some(if self.bases[target].vector(0).same_ray(&mapped, PHASE_TOL) {
            0
        } else {
            1
        })
    }

    /// 0 if the operator takes the index-0 source vector to the index-0 target
    /// vector (up to phase), 1 otherwise.
    pub fn flip_parity(&self, op: &OperatorLabel, cell: Cell) -> Result<u8> {
        let o = self.index_of(op)?;
        let s = self.basis_index(cell.source)?;
        let t = self.basis_index(cell.target)?;
        if self.images[o][s] != Some(t) {
            return Err(invalid_cell(op, cell));
        }
        Ok(self.flip_by_index(o, s).expect("valid cell"))
    }
}

fn invalid_cell(op: &OperatorLabel, cell: Cell) -> Error {
    Error::InvalidCell {
        op: op.to_string(),
        source_basis: cell.source.to_string(),
        target: cell.target.to_string(),
    }
}

/// Free-function form of [`OperatorCatalog::flip_parity`].
pub fn flip_parity(catalog: &OperatorCatalog, op: &OperatorLabel, cell: Cell) -> Result<u8> {
    catalog.flip_parity(op, cell)
}

/// How operators are turned into key bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CodingScheme {
    /// Every operator carries one bit regardless of cell: its flip parity on the
    /// first protocol basis it is valid on. For BB84-4 this is `Z, H -> 0` and
    /// `X, HXZ -> 1`.
    FixedPerOperator,
    /// The bit is the operator's flip parity inside the kept cell; agreed after
    /// the measurement outcomes are known.
    FlipParityPerCell,
}

impl CodingScheme {
    pub fn default_for(kind: CatalogKind) -> Self {
        match kind {
            CatalogKind::Bb84Four => CodingScheme::FixedPerOperator,
            _ => CodingScheme::FlipParityPerCell,
        }
    }
}

pub(crate) fn coding_bit_by_index(
    scheme: CodingScheme,
    catalog: &OperatorCatalog,
    o: usize,
    source: usize,
) -> Option<u8> {
    match scheme {
        CodingScheme::FlipParityPerCell => catalog.flip_by_index(o, source),
        CodingScheme::FixedPerOperator => {
            catalog.image_by_index(o, source)?;
            (0..catalog.bases.len()).find_map(|s| catalog.flip_by_index(o, s))
        }
    }
}

/// Key bit carried by `op` in `cell`; errors when the cell is not kept for `op`.
pub fn coding_bit(scheme: CodingScheme, catalog: &OperatorCatalog, op: &OperatorLabel, cell: Cell) -> Result<u8> {
    if !catalog.is_kept(op, cell)? {
        return Err(invalid_cell(op, cell));
    }
    let o = catalog.index_of(op)?;
    let s = catalog.basis_index(cell.source)?;
    Ok(coding_bit_by_index(scheme, catalog, o, s).expect("kept cell"))
}

/// One row of a reconstructed coding table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodingEntry {
    pub op: OperatorLabel,
    pub cell: Cell,
    pub flip: u8,
    pub bit: u8,
}

/// The full `(operator, kept cell) -> bit` map for a catalog.
pub fn coding_table(catalog: &OperatorCatalog, scheme: CodingScheme) -> Vec<CodingEntry> {
    let mut rows = Vec::new();
    for cell in catalog.cells() {
        for op in catalog.kept_in(cell).expect("protocol cell") {
            rows.push(CodingEntry {
                op: op.clone(),
                cell,
                flip: catalog.flip_parity(op, cell).expect("kept"),
                bit: coding_bit(scheme, catalog, op, cell).expect("kept"),
            });
        }
    }
    rows
}

/// A pair of operators that no measurement outcome can tell apart in a cell
/// but that carry different bits.
#[derive(Clone, Debug, PartialEq)]
pub struct CodingViolation {
    pub cell: Cell,
    pub first: OperatorLabel,
    pub second: OperatorLabel,
}

/// Exhaustive well-definedness check.
///
/// Inside a kept cell every legal input is a source-basis vector and the
/// outcome is deterministic, so two operators have identical statistics on all
/// legal inputs iff their flip parities agree. Such operators must carry the
/// same bit.
pub fn check_well_defined(catalog: &OperatorCatalog, scheme: CodingScheme) -> Vec<CodingViolation> {
    let mut violations = Vec::new();
    for cell in catalog.cells() {
        let mut by_flip: BTreeMap<u8, Vec<(&OperatorLabel, u8)>> = BTreeMap::new();
        for op in catalog.kept_in(cell).expect("protocol cell") {
            let flip = catalog.flip_parity(op, cell).expect("kept");
            let bit = coding_bit(scheme, catalog, op, cell).expect("kept");
            by_flip.entry(flip).or_default().push((op, bit));
        }
        for group in by_flip.values() {
            let (first, bit) = group[0];
            for (op, b) in &group[1..] {
                if *b != bit {
                    violations.push(CodingViolation {
                        cell,
                        first: first.clone(),
                        second: (*op).clone(),
                    });
                }
            }
        }
    }
    violations
}
