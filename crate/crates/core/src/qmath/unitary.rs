use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

use super::state::{c, PureState, MAX_QUBITS};
use crate::error::{Error, Result};

/// Dense square unitary acting on `2^n` amplitudes, stored row-major.
#[derive(Clone, PartialEq)]
pub struct Unitary {
    dim: usize,
    m: Vec<Complex64>,
}

impl Unitary {
    /// Validating constructor: entries are row-major and must form a unitary
    /// to within `1e-10`.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        if dim.trailing_zeros() as usize > MAX_QUBITS {
            return Err(Error::SizeOverflow(dim.trailing_zeros() as usize));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        let u = Self { dim, m: entries };
        let dev = u.unitarity_deviation();
        if dev > 1e-10 {
            return Err(Error::NotUnitary(dev));
        }
        Ok(u)
    }

    /// Single-qubit gate from its four entries `[[a, b], [c, d]]`.
    pub fn qubit(a: Complex64, b: Complex64, c_: Complex64, d: Complex64) -> Result<Self> {
        Self::new(2, vec![a, b, c_, d])
    }

    fn from_entries(dim: usize, m: Vec<Complex64>) -> Self {
        Self { dim, m }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = vec![c(0.0, 0.0); dim * dim];
        for i in 0..dim {
            m[i * dim + i] = c(1.0, 0.0);
        }
        Self { dim, m }
    }

    pub fn pauli_x() -> Self {
        Self::from_entries(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    pub fn pauli_y() -> Self {
        Self::from_entries(2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
    }

    pub fn pauli_z() -> Self {
        Self::from_entries(2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
    }

    pub fn hadamard() -> Self {
        let s = FRAC_1_SQRT_2;
        Self::from_entries(2, vec![c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)])
    }

    /// Controlled-NOT with qubit 0 as control.
    pub fn cnot() -> Self {
        let o = c(0.0, 0.0);
        let l = c(1.0, 0.0);
        #[rustfmt::skip]
        let m = vec![
            l, o, o, o,
            o, l, o, o,
            o, o, o, l,
            o, o, l, o,
        ];
        Self::from_entries(4, m)
    }

    /// The unitary whose columns are the two given single-qubit states.
    pub fn from_columns(v0: &PureState, v1: &PureState) -> Result<Self> {
        if v0.dim() != 2 || v1.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: v0.dim().max(v1.dim()),
            });
        }
        let (a, b) = (v0.amplitudes(), v1.amplitudes());
        Self::new(2, vec![a[0], b[0], a[1], b[1]])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.m
    }

    /// Matrix product `self * rhs` (rhs acts first on states).
    pub fn mul(&self, rhs: &Unitary) -> Result<Unitary> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: rhs.dim,
            });
        }
        let n = self.dim;
        let mut m = vec![c(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.m[i * n + k];
                if a == c(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    m[i * n + j] += a * rhs.m[k * n + j];
                }
            }
        }
        Ok(Self::from_entries(n, m))
    }

    pub fn adjoint(&self) -> Unitary {
        let n = self.dim;
        let mut m = vec![c(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                m[j * n + i] = self.m[i * n + j].conj();
            }
        }
        Self::from_entries(n, m)
    }

    pub fn kron(&self, rhs: &Unitary) -> Result<Unitary> {
        let qubits = self.num_qubits() + rhs.num_qubits();
        if qubits > MAX_QUBITS {
            return Err(Error::SizeOverflow(qubits));
        }
        let (a, b) = (self.dim, rhs.dim);
        let n = a * b;
        let mut m = vec![c(0.0, 0.0); n * n];
        for i in 0..a {
            for j in 0..a {
                let x = self.m[i * a + j];
                for k in 0..b {
                    for l in 0..b {
                        m[(i * b + k) * n + (j * b + l)] = x * rhs.m[k * b + l];
                    }
                }
            }
        }
        Ok(Self::from_entries(n, m))
    }

    /// Max-entry deviation of `U U^dagger` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = c(0.0, 0.0);
                for k in 0..n {
                    acc += self.m[i * n + k] * self.m[j * n + k].conj();
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }

    pub fn approx_eq(&self, other: &Unitary, tol: f64) -> bool {
        self.dim == other.dim
            && self
                .m
                .iter()
                .zip(&other.m)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// Equality up to a global phase.
    pub fn approx_eq_up_to_phase(&self, other: &Unitary, tol: f64) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let Some((idx, pivot)) = self
            .m
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        else {
            return false;
        };
        if other.m[idx].norm() < 1e-12 {
            return false;
        }
        let phase = pivot / other.m[idx];
        self.m
            .iter()
            .zip(&other.m)
            .all(|(a, b)| (a - phase * b).norm() <= tol)
    }

    /// `U |s>`
    pub fn apply(&self, s: &PureState) -> Result<PureState> {
        apply(self, s)
    }
}

/// `U |s>`; norm is preserved up to rounding.
pub fn apply(u: &Unitary, s: &PureState) -> Result<PureState> {
    if u.dim != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim,
            actual: s.dim(),
        });
    }
    let n = u.dim;
    let a = s.amplitudes();
    let out = (0..n)
        .map(|i| (0..n).map(|j| u.m[i * n + j] * a[j]).sum())
        .collect();
    Ok(PureState::from_normalized(out))
}

/// Applies a single-qubit gate to qubit `which` of a multi-qubit state.
pub fn apply_on_qubit(u: &Unitary, s: &PureState, which: usize) -> Result<PureState> {
    if u.dim != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: u.dim,
        });
    }
    let n = s.num_qubits();
    if which >= n {
        return Err(Error::QubitIndex {
            index: which,
            qubits: n,
        });
    }
    let shift = n - 1 - which;
    let mask = 1usize << shift;
    let a = s.amplitudes();
    let mut out = a.to_vec();
    for i in 0..a.len() {
        if i & mask == 0 {
            let j = i | mask;
            out[i] = u.m[0] * a[i] + u.m[1] * a[j];
            out[j] = u.m[2] * a[i] + u.m[3] * a[j];
        }
    }
    Ok(PureState::from_normalized(out))
}

impl fmt::Debug for Unitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Unitary({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  [")?;
            for j in 0..self.dim {
                let z = self.entry(i, j);
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}
