use super::{projector, CMatrix, CVector, DiscriminationProblem, Povm};
use crate::error::{Error, Result};

/// Rank threshold on Gram-matrix eigenvalues.
pub const RANK_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct UsdSolution {
    /// Probability of a conclusive (and correct) outcome for each input state.
    pub conclusive: Vec<f64>,
    /// Prior-weighted conclusive probability.
    pub rate: f64,
    /// Elements `0..N` identify the states; element `N` is the inconclusive outcome.
    pub povm: Povm,
}

/// Unambiguous discrimination by reciprocal states.
///
/// With `G` the Gram matrix, the reciprocal vectors `r_i = sum_j (G^-1)_{ji} psi_j`
/// satisfy `<r_i|psi_k> = delta_ik`, so `E_i = c |r_i><r_i|` never fires on a wrong
/// state. The common weight `c = 1 / lambda_max(sum_i |r_i><r_i|) = lambda_min(G)`
/// is the largest that keeps the inconclusive element positive.
pub fn unambiguous_discrimination(problem: &DiscriminationProblem) -> Result<UsdSolution> {
    let n = problem.len();
    let d = problem.dim();
    let gram = problem.gram();
    let eig = gram.clone().symmetric_eigen();
    let rank = eig.eigenvalues.iter().filter(|l| **l > RANK_TOL).count();
    if rank < n {
        return Err(Error::UsdInfeasible { rank, count: n });
    }
    let inv = gram
        .try_inverse()
        .ok_or(Error::UsdInfeasible { rank, count: n })?;
    let states = problem.states();
    let reciprocal: Vec<CVector> = (0..n)
        .map(|i| {
            let mut r = CVector::zeros(d);
            for (j, psi) in states.iter().enumerate() {
                r += psi * inv[(j, i)];
            }
            r
        })
        .collect();
    let mut total = CMatrix::zeros(d, d);
    for r in &reciprocal {
        total += projector(r);
    }
    let lmax = total
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(0.0f64, f64::max);
    let c = 1.0 / lmax;
    let mut elements: Vec<CMatrix> = reciprocal.iter().map(|r| projector(r).scale(c)).collect();
    let inconclusive = CMatrix::identity(d, d) - total.scale(c);
    elements.push(inconclusive);
    let povm = Povm::new_unchecked(elements);
    let conclusive = vec![c; n];
    let rate = problem.priors().iter().map(|p| p * c).sum();
    Ok(UsdSolution {
        conclusive,
        rate,
        povm,
    })
}
