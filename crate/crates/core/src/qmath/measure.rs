use num_complex::Complex64;
use rand::Rng;

use super::basis::MeasurementBasis;
use super::state::{c, PureState};
use crate::error::{Error, Result};

/// Components of `s` along `v0` and `v1` on qubit `which`, as unnormalized vectors.
fn project(s: &PureState, which: usize, basis: &MeasurementBasis) -> Result<[Vec<Complex64>; 2]> {
    let n = s.num_qubits();
    if which >= n {
        return Err(Error::QubitIndex {
            index: which,
            qubits: n,
        });
    }
    let mask = 1usize << (n - 1 - which);
    let a = s.amplitudes();
    let mut out = [vec![c(0.0, 0.0); a.len()], vec![c(0.0, 0.0); a.len()]];
    for (k, slot) in out.iter_mut().enumerate() {
        let v = basis.vector(k as u8).amplitudes();
        for i in 0..a.len() {
            if i & mask != 0 {
                continue;
            }
            let j = i | mask;
            // <v_k| on the measured qubit
            let coef = v[0].conj() * a[i] + v[1].conj() * a[j];
            slot[i] = v[0] * coef;
            slot[j] = v[1] * coef;
        }
    }
    Ok(out)
}

/// Born probabilities of outcomes 0 and 1 when qubit `which` is measured in `basis`.
pub fn born_probabilities(s: &PureState, which: usize, basis: &MeasurementBasis) -> Result<(f64, f64)> {
    let [p0, p1] = project(s, which, basis)?;
    let n0: f64 = p0.iter().map(|z| z.norm_sqr()).sum();
    let n1: f64 = p1.iter().map(|z| z.norm_sqr()).sum();
    Ok((n0, n1))
}

/// Samples a projective measurement of qubit `which` and returns the outcome with
/// the renormalized post-measurement state.
pub fn measure_qubit<R: Rng + ?Sized>(
    s: &PureState,
    which: usize,
    basis: &MeasurementBasis,
    rng: &mut R,
) -> Result<(u8, PureState)> {
    let [v0, v1] = project(s, which, basis)?;
    let n0: f64 = v0.iter().map(|z| z.norm_sqr()).sum();
    let n1: f64 = v1.iter().map(|z| z.norm_sqr()).sum();
    let p0 = n0 / (n0 + n1);
    let (outcome, branch) = if rng.random::<f64>() < p0 { (0, v0) } else { (1, v1) };
    Ok((outcome, PureState::new(branch)?))
}
