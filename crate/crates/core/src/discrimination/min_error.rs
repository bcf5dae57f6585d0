use super::{hermitian_part, projector, CMatrix, DiscriminationProblem, Povm};
use crate::error::{Error, Result};
use crate::qmath::Complex64;

#[derive(Clone, Copy, Debug)]
pub struct MinErrorOptions {
    pub max_iterations: usize,
    /// Stop once the certified duality gap drops below this.
    pub gap_tolerance: f64,
    /// Gap accepted when the iteration cap is hit.
    pub accept_gap: f64,
    /// Iterations between certificate evaluations.
    pub check_every: usize,
}

impl Default for MinErrorOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200_000,
            gap_tolerance: 1e-10,
            accept_gap: 1e-6,
            check_every: 10,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MinErrorSolution {
    /// `sum_i p_i <psi_i|E_i|psi_i>` of the returned POVM.
    pub success: f64,
    pub povm: Povm,
    /// Upper bound from a feasible dual point, `>= success`.
    pub dual_bound: f64,
    /// `dual_bound - success`; the optimum lies in `[success, success + gap]`.
    pub gap: f64,
    /// Largest `||(Y - p_i rho_i) E_i||`, the complementary-slackness residual.
    pub residual: f64,
    pub iterations: usize,
}

struct Certificate {
    success: f64,
    dual_bound: f64,
    residual: f64,
}

fn certify(problem: &DiscriminationProblem, rhos: &[CMatrix], povm: &[CMatrix]) -> Certificate {
    let d = problem.dim();
    let mut lagrange = CMatrix::zeros(d, d);
    for ((rho, e), p) in rhos.iter().zip(povm).zip(problem.priors()) {
        lagrange += rho.scale(*p) * e;
    }
    let y = hermitian_part(&lagrange);
    let success = lagrange.trace().re;
    let mut shift = 0.0f64;
    let mut residual = 0.0f64;
    for ((rho, e), p) in rhos.iter().zip(povm).zip(problem.priors()) {
        let diff = &y - rho.scale(*p);
        let min = diff.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        shift = shift.max(-min);
        residual = residual.max((diff * e).norm());
    }
    Certificate {
        success,
        dual_bound: y.trace().re + shift * d as f64,
        residual,
    }
}

/// Inverse square root of a PSD matrix on its support; also returns the
/// projector onto the kernel.
fn inv_sqrt(m: &CMatrix) -> (CMatrix, CMatrix) {
    let d = m.nrows();
    let eig = hermitian_part(m).symmetric_eigen();
    let scale = eig.eigenvalues.iter().cloned().fold(0.0, f64::max).max(1e-300);
    let mut inv = CMatrix::zeros(d, d);
    let mut kernel = CMatrix::zeros(d, d);
    for (k, l) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(k).into_owned();
        let pv = projector(&v);
        if *l > 1e-13 * scale {
            inv += pv.scale(1.0 / l.sqrt());
        } else {
            kernel += pv;
        }
    }
    (inv, kernel)
}

/// Minimum-error discrimination with default options.
pub fn min_error(problem: &DiscriminationProblem) -> Result<MinErrorSolution> {
    min_error_with(problem, &MinErrorOptions::default())
}

/// Fixed-point iteration `E_i <- G^-1 p_i rho_i E_i rho_i p_i G^-1` with
/// `G^2 = sum_j p_j^2 rho_j E_j rho_j`, started from `E_i = I/N`.
///
/// Every few steps a feasible dual point `Y + lambda I >= p_i rho_i` is built
/// from the Lagrange operator, which bounds the optimum from above.
pub fn min_error_with(problem: &DiscriminationProblem, opts: &MinErrorOptions) -> Result<MinErrorSolution> {
    let d = problem.dim();
    let n = problem.len();
    let rhos: Vec<CMatrix> = problem.states().iter().map(projector).collect();
    let priors = problem.priors();
    let mut povm: Vec<CMatrix> = vec![CMatrix::identity(d, d).scale(1.0 / n as f64); n];

    let mut best: Option<(Certificate, Vec<CMatrix>, usize)> = None;
    let mut iteration = 0;
    loop {
        if iteration % opts.check_every.max(1) == 0 || iteration >= opts.max_iterations {
            let cert = certify(problem, &rhos, &povm);
            let gap = cert.dual_bound - cert.success;
            let better = best
                .as_ref()
                .map(|(b, _, _)| gap < b.dual_bound - b.success)
                .unwrap_or(true);
            if better {
                best = Some((cert, povm.clone(), iteration));
            }
            if gap <= opts.gap_tolerance || iteration >= opts.max_iterations {
                break;
            }
        }
        let mut g2 = CMatrix::zeros(d, d);
        let weighted: Vec<CMatrix> = rhos
            .iter()
            .zip(&povm)
            .zip(priors)
            .map(|((rho, e), p)| rho * e * rho * Complex64::new(p * p, 0.0))
            .collect();
        for w in &weighted {
            g2 += w;
        }
        let (g_inv, kernel) = inv_sqrt(&g2);
        povm = weighted.iter().map(|w| &g_inv * w * &g_inv).collect();
        // complete the measurement on directions no state reaches
        povm[0] += kernel;
        iteration += 1;
    }

    let (cert, povm, iterations) = best.expect("at least one certificate");
    let gap = (cert.dual_bound - cert.success).max(0.0);
    if gap > opts.accept_gap {
        return Err(Error::NonConvergence { iterations, gap });
    }
    Ok(MinErrorSolution {
        success: cert.success,
        povm: Povm::new_unchecked(povm.iter().map(hermitian_part).collect()),
        dual_bound: cert.dual_bound,
        gap,
        residual: cert.residual,
        iterations,
    })
}
