use std::path::Path;

use mdiqkd_core::discrimination::{min_error, unambiguous_discrimination, DiscriminationProblem};
use mdiqkd_core::qmath::Complex64;
use mdiqkd_core::Error;
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

/// An amplitude: a bare real number or `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Amplitude {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Amplitude> for Complex64 {
    fn from(a: Amplitude) -> Self {
        match a {
            Amplitude::Real(x) => Complex64::new(x, 0.0),
            Amplitude::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub states: Vec<Vec<Amplitude>>,
    #[serde(default)]
    pub priors: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinErrorResult {
    pub success: f64,
    pub dual_bound: f64,
    pub gap: f64,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct UsdResult {
    pub feasible: bool,
    pub rate: Option<f64>,
    pub conclusive: Option<Vec<f64>>,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscriminationResult {
    pub dim: usize,
    pub count: usize,
    pub priors: Vec<f64>,
    pub min_error: MinErrorResult,
    pub usd: UsdResult,
}

impl ProblemFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut de = serde_json::Deserializer::from_str(&text);
        serde_path_to_error::deserialize(&mut de).map_err(|e| CliError::Config(format!("at `{}`: {}", e.path(), e.inner())))
    }
}

pub fn solve(file: &ProblemFile) -> CliResult<DiscriminationResult> {
    let states = file
        .states
        .iter()
        .map(|s| s.iter().map(|a| Complex64::from(*a)).collect())
        .collect();
    let problem = DiscriminationProblem::new(states, file.priors.clone()).map_err(|e| CliError::Config(e.to_string()))?;
    let me = min_error(&problem).map_err(|e| CliError::Runtime(e.to_string()))?;
    let usd = match unambiguous_discrimination(&problem) {
        Ok(u) => UsdResult {
            feasible: true,
            rate: Some(u.rate),
            conclusive: Some(u.conclusive),
            reason: None,
        },
        Err(e @ Error::UsdInfeasible { .. }) => UsdResult {
            feasible: false,
            rate: None,
            conclusive: None,
            reason: Some(e.to_string()),
        },
        Err(e) => return Err(CliError::Runtime(e.to_string())),
    };
    Ok(DiscriminationResult {
        dim: problem.dim(),
        count: problem.len(),
        priors: problem.priors().to_vec(),
        min_error: MinErrorResult {
            success: me.success,
            dual_bound: me.dual_bound,
            gap: me.gap,
            residual: me.residual,
            iterations: me.iterations,
        },
        usd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(json: &str) -> DiscriminationResult {
        solve(&serde_json::from_str(json).unwrap()).unwrap()
    }

    #[test]
    fn bb84_states() {
        let s = 0.5f64.sqrt();
        let r = run(&format!("{{\"states\": [[1, 0], [0, 1], [{s}, {s}], [{s}, -{s}]]}}"));
        assert!((r.min_error.success - 0.5).abs() < 1e-4);
        assert!(!r.usd.feasible);
    }

    #[test]
    fn zero_and_plus() {
        let s = 0.5f64.sqrt();
        let r = run(&format!("{{\"states\": [[1, 0], [{s}, {s}]]}}"));
        assert!((r.min_error.success - 0.853553).abs() < 1e-6);
        assert!((r.usd.rate.unwrap() - (1.0 - s)).abs() < 1e-9);
    }

    #[test]
    fn orthogonal_pair_with_complex_amplitudes() {
        let s = 0.5f64.sqrt();
        let r = run(&format!(
            "{{\"states\": [[[{s}, 0], [0, {s}]], [[{s}, 0], [0, -{s}]]], \"priors\": [0.3, 0.7]}}"
        ));
        assert!((r.min_error.success - 1.0).abs() < 1e-9);
        assert!((r.usd.rate.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bad_state_is_a_config_error() {
        let f: ProblemFile = serde_json::from_str(r#"{"states": [[0, 0], [1, 0]]}"#).unwrap();
        assert_eq!(solve(&f).unwrap_err().exit_code(), 2);
    }
}
