use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Largest number of qubits a dense state may hold.
pub const MAX_QUBITS: usize = 4;

/// Normalization tolerance for algebraic identities.
pub const NORM_TOL: f64 = 1e-12;

/// A normalized pure state of one to four qubits.
///
/// Qubit 0 is the leftmost tensor factor, so amplitude index bits are read
/// most-significant first.
#[derive(Clone, PartialEq)]
pub struct PureState {
    amps: Vec<Complex64>,
}

impl PureState {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let qubits = len.trailing_zeros() as usize;
        if qubits > MAX_QUBITS {
            return Err(Error::SizeOverflow(qubits));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub(crate) fn from_normalized(amps: Vec<Complex64>) -> Self {
        debug_assert!((amps.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-9);
        Self { amps }
    }

    /// Real single-qubit state `c0|0> + c1|1>`.
    pub fn qubit(c0: Complex64, c1: Complex64) -> Result<Self> {
        Self::new(vec![c0, c1])
    }

    /// Computational basis state `|index>` on `qubits` qubits.
    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        if qubits == 0 || qubits > MAX_QUBITS {
            return Err(Error::SizeOverflow(qubits));
        }
        let dim = 1 << qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: index,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn zero() -> Self {
        Self::from_normalized(vec![c(1.0, 0.0), c(0.0, 0.0)])
    }

    pub fn one() -> Self {
        Self::from_normalized(vec![c(0.0, 0.0), c(1.0, 0.0)])
    }

    pub fn plus() -> Self {
        Self::from_normalized(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)])
    }

    pub fn minus() -> Self {
        Self::from_normalized(vec![c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)])
    }

    /// `|a> = (|0> + i|1>)/sqrt2`
    pub fn plus_i() -> Self {
        Self::from_normalized(vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)])
    }

    /// `|b> = (|0> - i|1>)/sqrt2`
    pub fn minus_i() -> Self {
        Self::from_normalized(vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, -FRAC_1_SQRT_2)])
    }

    /// `|x> = cos(theta)|0> + sin(theta)|1>`
    pub fn angle(theta: f64) -> Self {
        Self::from_normalized(vec![c(theta.cos(), 0.0), c(theta.sin(), 0.0)])
    }

    /// `|y> = sin(theta)|0> - cos(theta)|1>`, orthogonal to [`PureState::angle`].
    pub fn angle_orthogonal(theta: f64) -> Self {
        Self::from_normalized(vec![c(theta.sin(), 0.0), c(-theta.cos(), 0.0)])
    }

    /// Haar-random state on `qubits` qubits.
    pub fn random<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> Result<Self> {
        if qubits == 0 || qubits > MAX_QUBITS {
            return Err(Error::SizeOverflow(qubits));
        }
        let amps = (0..1usize << qubits)
            .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::new(amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2`
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        self.inner(other).map(|z| z.norm_sqr())
    }

    /// True when both states describe the same ray, i.e. agree up to a global phase.
    pub fn same_ray(&self, other: &PureState, tol: f64) -> bool {
        self.inner(other).map(|z| z.norm() >= 1.0 - tol).unwrap_or(false)
    }

    pub fn with_global_phase(&self, phi: f64) -> Self {
        let ph = Complex64::from_polar(1.0, phi);
        Self {
            amps: self.amps.iter().map(|a| a * ph).collect(),
        }
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        tensor(self, other)
    }
}

/// Kronecker product `a (x) b`; `a` becomes the leading qubits.
pub fn tensor(a: &PureState, b: &PureState) -> Result<PureState> {
    let qubits = a.num_qubits() + b.num_qubits();
    if qubits > MAX_QUBITS {
        return Err(Error::SizeOverflow(qubits));
    }
    let mut amps = Vec::with_capacity(a.dim() * b.dim());
    for x in &a.amps {
        for y in &b.amps {
            amps.push(x * y);
        }
    }
    PureState::new(amps)
}

impl fmt::Debug for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PureState[")?;
        for (i, a) in self.amps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:.6}{:+.6}i", a.re, a.im)?;
        }
        write!(f, "]")
    }
}

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
