use rayon::prelude::*;

use super::{min_error, min_error_with, DiscriminationProblem, MinErrorOptions};
use crate::error::{Error, Result};
use crate::qmath::{apply_on_qubit, Complex64, PureState, RandomStream, Unitary, MAX_QUBITS};

/// Probe state on `C^d ⊗ (C^2)^k`: an optional ancilla qubit followed by `k`
/// photons that each pass through the unknown operator.
#[derive(Clone, Debug)]
pub struct ProbeSpec {
    ancilla_dim: usize,
    signal_qubits: usize,
    state: PureState,
}

impl ProbeSpec {
    pub fn new(ancilla_dim: usize, signal_qubits: usize, state: PureState) -> Result<Self> {
        if !(ancilla_dim == 1 || ancilla_dim == 2) {
            return Err(Error::InvalidProblem(format!("ancilla dimension {ancilla_dim} not in {{1, 2}}")));
        }
        if signal_qubits == 0 {
            return Err(Error::InvalidProblem("probe needs at least one signal qubit".into()));
        }
        let expected = ancilla_qubits(ancilla_dim) + signal_qubits;
        if expected > MAX_QUBITS {
            return Err(Error::SizeOverflow(expected));
        }
        if state.num_qubits() != expected {
            return Err(Error::DimensionMismatch {
                expected: 1 << expected,
                actual: state.dim(),
            });
        }
        Ok(Self {
            ancilla_dim,
            signal_qubits,
            state,
        })
    }

    /// Single-photon probe without ancilla.
    pub fn single(state: PureState) -> Result<Self> {
        Self::new(1, 1, state)
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    pub fn signal_qubits(&self) -> usize {
        self.signal_qubits
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }
}

fn ancilla_qubits(d: usize) -> usize {
    if d == 2 {
        1
    } else {
        0
    }
}

/// `(I ⊗ T ⊗ ... ⊗ T)|s>` for every operator `T`.
pub fn operator_outputs(ops: &[Unitary], probe: &ProbeSpec) -> Result<Vec<PureState>> {
    let first = ancilla_qubits(probe.ancilla_dim);
    ops.iter()
        .map(|t| {
            if t.dim() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    actual: t.dim(),
                });
            }
            let mut s = probe.state.clone();
            for q in first..first + probe.signal_qubits {
                s = apply_on_qubit(t, &s, q)?;
            }
            Ok(s)
        })
        .collect()
}

/// Multi-start settings for [`optimize_probe`].
#[derive(Clone, Copy, Debug)]
pub struct ProbeSearch {
    pub starts: usize,
    /// Pattern-search step at which a start stops.
    pub tolerance: f64,
    pub initial_step: f64,
    pub seed: u64,
}

impl Default for ProbeSearch {
    fn default() -> Self {
        Self {
            starts: 32,
            tolerance: 1e-6,
            initial_step: 0.5,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProbeOptimum {
    pub probe: ProbeSpec,
    pub success: f64,
    /// Certified duality gap of the final solve.
    pub gap: f64,
    pub start: usize,
}

/// Hyperspherical magnitudes plus relative phases; `2(D-1)` parameters.
fn chart(params: &[f64], dim: usize) -> PureState {
    let (angles, phases) = params.split_at(dim - 1);
    let mut amps = Vec::with_capacity(dim);
    let mut remaining = 1.0;
    for k in 0..dim {
        let mag = if k + 1 < dim {
            let m = remaining * angles[k].cos();
            remaining *= angles[k].sin();
            m
        } else {
            remaining
        };
        let phase = if k == 0 { 0.0 } else { phases[k - 1] };
        amps.push(Complex64::from_polar(mag, phase));
    }
    PureState::new(amps).expect("chart point is normalized")
}

fn objective(ops: &[Unitary], priors: &Option<Vec<f64>>, d: usize, k: usize, params: &[f64]) -> f64 {
    let dim = d << k;
    let probe = match ProbeSpec::new(d, k, chart(params, dim)) {
        Ok(p) => p,
        Err(_) => return f64::NEG_INFINITY,
    };
    let fast = MinErrorOptions {
        gap_tolerance: 1e-9,
        accept_gap: f64::INFINITY,
        ..MinErrorOptions::default()
    };
    operator_outputs(ops, &probe)
        .and_then(|outs| DiscriminationProblem::from_pure_states(&outs, priors.clone()))
        .and_then(|p| min_error_with(&p, &fast))
        .map(|s| s.success)
        .unwrap_or(f64::NEG_INFINITY)
}

/// Maximizes the min-error success of identifying the operator over probes
/// with ancilla dimension `ancilla_dim` and `signal_qubits` copies.
///
/// Each start draws a uniform chart point from its own seeded stream and runs
/// a compass search, halving the step until it falls below the tolerance.
/// Starts run in parallel; the best value wins with ties going to the lowest start.
pub fn optimize_probe(
    ops: &[Unitary],
    priors: Option<Vec<f64>>,
    ancilla_dim: usize,
    signal_qubits: usize,
    search: &ProbeSearch,
) -> Result<ProbeOptimum> {
    if ops.is_empty() {
        return Err(Error::InvalidProblem("no operators".into()));
    }
    // validates d and k
    ProbeSpec::new(
        ancilla_dim,
        signal_qubits,
        PureState::basis(ancilla_qubits(ancilla_dim) + signal_qubits, 0)?,
    )?;
    let dim = ancilla_dim << signal_qubits;
    let n_params = 2 * (dim - 1);
    let starts = search.starts.max(1);

    let results: Vec<(f64, Vec<f64>)> = (0..starts)
        .into_par_iter()
        .map(|start| {
            use rand::Rng;
            let mut rng = RandomStream::new(search.seed, 1, start as u64);
            let mut x: Vec<f64> = (0..n_params)
                .map(|i| {
                    if i < dim - 1 {
                        rng.random::<f64>() * std::f64::consts::FRAC_PI_2
                    } else {
                        rng.random::<f64>() * std::f64::consts::TAU
                    }
                })
                .collect();
            let mut fx = objective(ops, &priors, ancilla_dim, signal_qubits, &x);
            let mut step = search.initial_step;
            while step >= search.tolerance {
                let mut improved = false;
                for i in 0..n_params {
                    for dir in [1.0, -1.0] {
                        let mut y = x.clone();
                        y[i] += dir * step;
                        let fy = objective(ops, &priors, ancilla_dim, signal_qubits, &y);
                        if fy > fx + 1e-12 {
                            x = y;
                            fx = fy;
                            improved = true;
                            break;
                        }
                    }
                }
                if !improved {
                    step *= 0.5;
                }
            }
            (fx, x)
        })
        .collect();

    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if r.0 > results[best].0 {
            best = i;
        }
    }
    let probe = ProbeSpec::new(ancilla_dim, signal_qubits, chart(&results[best].1, dim))?;
    let outs = operator_outputs(ops, &probe)?;
    let sol = min_error(&DiscriminationProblem::from_pure_states(&outs, priors)?)?;
    Ok(ProbeOptimum {
        probe,
        success: sol.success,
        gap: sol.gap,
        start: best,
    })
}

/// Linear isometry `C^2 -> C^D` with `V|0> = s_Z` and `V|1> = s_X`.
#[derive(Clone, Debug)]
pub struct Isometry {
    columns: [Vec<Complex64>; 2],
}

impl Isometry {
    pub fn columns(&self) -> &[Vec<Complex64>; 2] {
        &self.columns
    }

    pub fn output_dim(&self) -> usize {
        self.columns[0].len()
    }

    /// `V†V` as a 2x2 row-major array.
    pub fn gram(&self) -> [Complex64; 4] {
        let ip = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>();
        [
            ip(&self.columns[0], &self.columns[0]),
            ip(&self.columns[0], &self.columns[1]),
            ip(&self.columns[1], &self.columns[0]),
            ip(&self.columns[1], &self.columns[1]),
        ]
    }

    pub fn apply(&self, s: &PureState) -> Result<PureState> {
        if s.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: s.dim(),
            });
        }
        let a = s.amplitudes();
        let out = self.columns[0]
            .iter()
            .zip(&self.columns[1])
            .map(|(c0, c1)| c0 * a[0] + c1 * a[1])
            .collect();
        PureState::new(out)
    }
}

/// Builds the isometry whose columns are `s_z` and `s_x`.
///
/// Inputs must be orthogonal within 1e-9; the residual overlap is projected out
/// of `s_x` so that `V†V = I` holds to rounding.
pub fn isometry_extend(s_z: &PureState, s_x: &PureState) -> Result<Isometry> {
    if s_z.dim() != s_x.dim() {
        return Err(Error::DimensionMismatch {
            expected: s_z.dim(),
            actual: s_x.dim(),
        });
    }
    let overlap = s_z.inner(s_x)?;
    if overlap.norm() > 1e-9 {
        return Err(Error::NotOrthogonal(overlap.norm()));
    }
    let z = s_z.amplitudes().to_vec();
    let x: Vec<Complex64> = s_x
        .amplitudes()
        .iter()
        .zip(&z)
        .map(|(xi, zi)| xi - zi * overlap)
        .collect();
    let norm = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let x = x.into_iter().map(|c| c / norm).collect();
    Ok(Isometry { columns: [z, x] })
}
