//! Quantum state and operator discrimination.
//!
//! * [`min_error`]: optimal guessing probability via the fixed-point POVM
//!   iteration, certified by a feasible dual point.
//! * [`unambiguous_discrimination`]: reciprocal-state USD for linearly
//!   independent pure states.
//! * [`operator_outputs`] / [`optimize_probe`]: reduce discriminating unitaries
//!   to discriminating the states they produce from a probe.
//! * [`isometry_extend`]: the embedding that turns a state-discrimination task
//!   into an operator-discrimination task.

mod min_error;
mod probe;
mod usd;

pub use min_error::{min_error, min_error_with, MinErrorOptions, MinErrorSolution};
pub use probe::{
    isometry_extend, operator_outputs, optimize_probe, Isometry, ProbeOptimum, ProbeSearch, ProbeSpec,
};
pub use usd::{unambiguous_discrimination, UsdSolution};

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::qmath::{Complex64, PureState};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest Hilbert-space dimension accepted by the solvers.
pub const MAX_DIM: usize = 16;

/// Pure states with prior probabilities.
#[derive(Clone, Debug)]
pub struct DiscriminationProblem {
    states: Vec<CVector>,
    priors: Vec<f64>,
}

impl DiscriminationProblem {
    /// Normalizes each state; `priors = None` means uniform.
    pub fn new(states: Vec<Vec<Complex64>>, priors: Option<Vec<f64>>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidProblem("no states".into()));
        }
        let dim = states[0].len();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidProblem(format!("dimension {dim} outside 1..={MAX_DIM}")));
        }
        let mut vs = Vec::with_capacity(states.len());
        for s in states {
            if s.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: s.len(),
                });
            }
            let v = CVector::from_vec(s);
            let n = v.norm();
            if !(n > 1e-300) || !n.is_finite() {
                return Err(Error::ZeroNorm);
            }
            vs.push(v.unscale(n));
        }
        let priors = match priors {
            None => vec![1.0 / vs.len() as f64; vs.len()],
            Some(p) => {
                if p.len() != vs.len() {
                    return Err(Error::InvalidProblem(format!(
                        "{} priors for {} states",
                        p.len(),
                        vs.len()
                    )));
                }
                if p.iter().any(|x| !(*x >= 0.0)) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidProblem("priors must be a probability vector".into()));
                }
                p
            }
        };
        Ok(Self { states: vs, priors })
    }

    pub fn from_pure_states(states: &[PureState], priors: Option<Vec<f64>>) -> Result<Self> {
        Self::new(states.iter().map(|s| s.amplitudes().to_vec()).collect(), priors)
    }

    pub fn states(&self) -> &[CVector] {
        &self.states
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn dim(&self) -> usize {
        self.states[0].len()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `G[i][j] = <psi_i|psi_j>`
    pub fn gram(&self) -> CMatrix {
        let n = self.states.len();
        CMatrix::from_fn(n, n, |i, j| self.states[i].dotc(&self.states[j]))
    }
}

/// A measurement given by positive operators summing to the identity.
#[derive(Clone, Debug)]
pub struct Povm {
    elements: Vec<CMatrix>,
}

impl Povm {
    /// Validates positivity (min eigenvalue >= -1e-9) and completeness (1e-9).
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let p = Self { elements };
        let (neg, comp) = p.deviation();
        if neg > 1e-9 || comp > 1e-9 {
            return Err(Error::InvalidProblem(format!(
                "not a POVM: negativity {neg:.3e}, completeness {comp:.3e}"
            )));
        }
        Ok(p)
    }

    pub(crate) fn new_unchecked(elements: Vec<CMatrix>) -> Self {
        Self { elements }
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// (largest negative eigenvalue magnitude, max-entry deviation of the sum from I)
    pub fn deviation(&self) -> (f64, f64) {
        let d = self.elements[0].nrows();
        let mut neg = 0.0f64;
        let mut sum = CMatrix::zeros(d, d);
        for e in &self.elements {
            let h = hermitian_part(e);
            let min = h.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
            neg = neg.max(-min);
            sum += e;
        }
        let comp = (sum - CMatrix::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        (neg, comp)
    }

    /// Outcome probabilities `<psi|E_k|psi>`.
    pub fn probabilities(&self, psi: &CVector) -> Vec<f64> {
        self.elements
            .iter()
            .map(|e| psi.dotc(&(e * psi)).re.max(0.0))
            .collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, psi: &CVector, rng: &mut R) -> usize {
        let probs = self.probabilities(psi);
        let total: f64 = probs.iter().sum();
        let mut u = rng.random::<f64>() * total;
        for (k, p) in probs.iter().enumerate() {
            if u < *p {
                return k;
            }
            u -= p;
        }
        probs.iter().rposition(|p| *p > 0.0).unwrap_or(0)
    }
}

pub(crate) fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub(crate) fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// Numerical rank of a list of vectors (Gram-matrix eigenvalues above `tol`).
pub fn linear_rank(states: &[CVector], tol: f64) -> usize {
    let n = states.len();
    if n == 0 {
        return 0;
    }
    let g = CMatrix::from_fn(n, n, |i, j| states[i].dotc(&states[j]));
    g.symmetric_eigenvalues().iter().filter(|l| **l > tol).count()
}

/// Rank of pure states given as [`PureState`]s.
pub fn state_rank(states: &[PureState], tol: f64) -> usize {
    let vs: Vec<CVector> = states
        .iter()
        .map(|s| CVector::from_column_slice(s.amplitudes()))
        .collect();
    linear_rank(&vs, tol)
}
