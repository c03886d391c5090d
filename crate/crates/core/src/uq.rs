//! Forward uncertainty propagation: sandwich rule and Monte Carlo.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local_sa::OatResult;
use crate::models::{evaluate_matrix, Model};
use crate::morris::MorrisStats;
use crate::problem::{sample_matrix, ParameterSpec};

const Z95: f64 = 1.96;
const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    names: Vec<String>,
    entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn new(names: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let n = names.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Argument(format!("covariance must be {n}x{n}")));
        }
        let entries = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        let cov = Self { names, entries };
        cov.check()?;
        Ok(cov)
    }

    pub fn diagonal(names: Vec<String>, sds: &[f64]) -> Result<Self> {
        let rows: Vec<Vec<f64>> = (0..sds.len())
            .map(|i| (0..sds.len()).map(|j| if i == j { sds[i] * sds[i] } else { 0.0 }).collect())
            .collect();
        Self::new(names, &rows)
    }

    /// Independent inputs with the standard deviations of their distributions.
    pub fn from_specs(specs: &[ParameterSpec]) -> Result<Self> {
        let sds: Vec<f64> = specs.iter().map(ParameterSpec::sd).collect();
        Self::diagonal(specs.iter().map(|s| s.name.clone()).collect(), &sds)
    }

    fn check(&self) -> Result<()> {
        let m = &self.entries;
        let n = m.nrows();
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Spec("covariance has non-finite entries".into()));
        }
        let trace = m.trace();
        let tol = PSD_TOL * trace.abs().max(f64::MIN_POSITIVE);
        for i in 0..n {
            if m[(i, i)] < 0.0 {
                return Err(Error::Spec(format!("negative variance for `{}`", self.names[i])));
            }
            for j in 0..i {
                if (m[(i, j)] - m[(j, i)]).abs() > tol {
                    return Err(Error::Spec(format!(
                        "covariance not symmetric at ({}, {})",
                        self.names[i], self.names[j]
                    )));
                }
            }
        }
        if n > 0 {
            let min = SymmetricEigen::new(m.clone()).eigenvalues.min();
            if min < -tol {
                return Err(Error::Spec(format!("covariance not positive semidefinite (eigenvalue {min:e})")));
            }
        }
        Ok(())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }
}

/// `S · Cx · Sᵀ` for an `n_y × n_x` table of raw sensitivities.
pub fn deterministic_uq(sens: &[Vec<f64>], cx: &CovarianceMatrix) -> Result<Vec<Vec<f64>>> {
    let nx = cx.dim();
    if let Some(r) = sens.iter().find(|r| r.len() != nx) {
        return Err(Error::Argument(format!(
            "sensitivity row has {} entries, covariance is {nx}x{nx}",
            r.len()
        )));
    }
    let s = DMatrix::from_fn(sens.len(), nx, |i, j| sens[i][j]);
    let cy = &s * &cx.entries * s.transpose();
    Ok((0..sens.len()).map(|i| (0..sens.len()).map(|j| cy[(i, j)]).collect()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UqMethod {
    MonteCarlo,
    DeterministicOat,
    DeterministicMorris,
}

impl UqMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            UqMethod::MonteCarlo => "monte_carlo",
            UqMethod::DeterministicOat => "deterministic_oat",
            UqMethod::DeterministicMorris => "deterministic_morris",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyResult {
    pub method: UqMethod,
    pub mean: f64,
    pub variance: f64,
    pub sd: f64,
    /// Confidence interval of the mean; Monte Carlo only.
    pub ci95: Option<(f64, f64)>,
    pub n_samples: Option<usize>,
}

impl UncertaintyResult {
    /// Deterministic record centred on the nominal output.
    pub fn deterministic(method: UqMethod, nominal: f64, variance: f64) -> Self {
        Self {
            method,
            mean: nominal,
            variance,
            sd: variance.sqrt(),
            ci95: None,
            n_samples: None,
        }
    }

    pub fn relative_sd(&self) -> f64 {
        self.sd / self.mean.abs()
    }
}

/// Sample moments of a scalar sample.
pub fn sample_moments(y: &[f64]) -> Result<UncertaintyResult> {
    let n = y.len();
    if n < 2 {
        return Err(Error::Argument(format!("need at least 2 samples, got {n}")));
    }
    let nf = n as f64;
    let mean = y.iter().sum::<f64>() / nf;
    let variance = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let sd = variance.sqrt();
    let half = Z95 * sd / nf.sqrt();
    Ok(UncertaintyResult {
        method: UqMethod::MonteCarlo,
        mean,
        variance,
        sd,
        ci95: Some((mean - half, mean + half)),
        n_samples: Some(n),
    })
}

/// Monte Carlo moments for every model output, from one shared sample.
pub fn monte_carlo_uq<M: Model + ?Sized>(
    model: &M,
    specs: &[ParameterSpec],
    n_s: usize,
    seed: u64,
) -> Result<Vec<UncertaintyResult>> {
    if specs.len() != model.n_inputs() {
        return Err(Error::Argument(format!(
            "model `{}` takes {} inputs, {} parameters given",
            model.name(),
            model.n_inputs(),
            specs.len()
        )));
    }
    let x = sample_matrix(specs, n_s, seed)?;
    let ys = evaluate_matrix(model, &x)?;
    (0..model.n_outputs())
        .map(|k| sample_moments(&ys.iter().map(|y| y[k]).collect::<Vec<_>>()))
        .collect()
}

/// Monte Carlo, OAT-sandwich and Morris-sandwich estimates for one output.
/// The Morris variant uses raw μ* with the same diagonal covariance.
pub fn uq_compare(
    mc: UncertaintyResult,
    oat: &OatResult,
    morris: &MorrisStats,
    cx: &CovarianceMatrix,
) -> Result<[UncertaintyResult; 3]> {
    let v_oat = deterministic_uq(std::slice::from_ref(&oat.raw), cx)?[0][0];
    let v_morris = deterministic_uq(std::slice::from_ref(&morris.mu_star), cx)?[0][0];
    Ok([
        mc,
        UncertaintyResult::deterministic(UqMethod::DeterministicOat, oat.y0, v_oat),
        UncertaintyResult::deterministic(UqMethod::DeterministicMorris, oat.y0, v_morris),
    ])
}
