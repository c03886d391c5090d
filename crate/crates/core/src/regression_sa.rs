//! Standardized regression and partial correlation coefficients, plus their rank variants.
//!
//! Standardization uses the `n - 1` sample standard deviation throughout.
//! SRC solves the standardized least-squares problem through a thin QR
//! factorization; PCC reads all partial correlations off the inverse of the
//! joint correlation matrix of `(x_1, ..., x_n, y)`:
//!
//! ```text
//! rho(x_i, y | rest) = -Q[i, y] / sqrt(Q[i, i] * Q[y, y]),   Q = corr⁻¹
//! ```

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{rank_transform, SampleMatrix};

/// Relative threshold on the R diagonal below which the design counts as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegressionMethod {
    Src,
    Srrc,
    Pcc,
    Prcc,
}

impl RegressionMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegressionMethod::Src => "SRC",
            RegressionMethod::Srrc => "SRRC",
            RegressionMethod::Pcc => "PCC",
            RegressionMethod::Prcc => "PRCC",
        }
    }

    fn on_ranks(&self) -> bool {
        matches!(self, RegressionMethod::Srrc | RegressionMethod::Prcc)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSaResult {
    pub coefficients: Vec<f64>,
    pub method: RegressionMethod,
    /// Coefficient of determination of the standardized fit (SRC/SRRC only).
    pub r_squared: Option<f64>,
    pub n_samples: usize,
}

/// Rescales to mean 0 and sample standard deviation 1.
pub fn standardize(name: &str, v: &[f64]) -> Result<Vec<f64>> {
    let n = v.len();
    if n < 2 {
        return Err(Error::Data(format!("`{name}` needs at least 2 values to standardize")));
    }
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::Data(format!("`{name}` has non-finite value at index {i}")));
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let sd = var.sqrt();
    if !(sd > f64::EPSILON * mean.abs().max(f64::MIN_POSITIVE)) {
        return Err(Error::Degenerate(format!("column `{name}` has zero variance")));
    }
    Ok(v.iter().map(|x| (x - mean) / sd).collect())
}

/// Standardized (optionally rank-transformed) columns of X and y.
fn prepared(x: &SampleMatrix, y: &[f64], ranks: bool) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let (n, p) = (x.n_rows(), x.n_cols());
    if y.len() != n {
        return Err(Error::Argument(format!("{n} sample rows but {} responses", y.len())));
    }
    if n <= p + 1 {
        return Err(Error::Argument(format!(
            "regression on {p} inputs needs more than {} samples, got {n}",
            p + 1
        )));
    }
    let prep = |name: &str, v: Vec<f64>| -> Result<Vec<f64>> {
        let v = if ranks { rank_transform(&v)? } else { v };
        standardize(name, &v)
    };
    let cols = (0..p)
        .map(|j| prep(&x.columns()[j], x.column(j)))
        .collect::<Result<Vec<_>>>()?;
    let ys = prep("response", y.to_vec())?;
    Ok((cols, ys))
}

fn fit_standardized(cols: &[Vec<f64>], ys: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = ys.len();
    let p = cols.len();
    let design = DMatrix::from_fn(n, p, |i, j| cols[j][i]);
    let target = DVector::from_column_slice(ys);
    let qr = design.clone().qr();
    let r = qr.r();
    let scale = (0..p).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if let Some(i) = (0..p).find(|&i| r[(i, i)].abs() <= RANK_TOLERANCE * scale) {
        return Err(Error::LinearAlgebra(format!(
            "design is rank deficient (column {i} is a linear combination of the others)"
        )));
    }
    let qty = qr.q().transpose() * &target;
    let coef = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::LinearAlgebra("triangular solve failed".into()))?;
    let resid = &target - &design * &coef;
    let ss_tot = target.norm_squared();
    let r2 = (1.0 - resid.norm_squared() / ss_tot).clamp(0.0, 1.0);
    Ok((coef.iter().copied().collect(), r2))
}

fn partial_correlations(cols: &[Vec<f64>], ys: &[f64]) -> Result<Vec<f64>> {
    let n = ys.len();
    let p = cols.len();
    let all: Vec<&[f64]> = cols.iter().map(Vec::as_slice).chain(std::iter::once(ys)).collect();
    let dof = (n - 1) as f64;
    if p == 1 {
        // nothing to control for: plain correlation
        let r = cols[0].iter().zip(ys).map(|(u, v)| u * v).sum::<f64>() / dof;
        return Ok(vec![r.clamp(-1.0, 1.0)]);
    }
    let corr = DMatrix::from_fn(p + 1, p + 1, |a, b| {
        all[a].iter().zip(all[b]).map(|(u, v)| u * v).sum::<f64>() / dof
    });
    let precision = corr
        .cholesky()
        .ok_or_else(|| Error::Degenerate("correlation matrix of (X, y) is singular".into()))?
        .inverse();
    if precision.iter().any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("correlation matrix of (X, y) is singular".into()));
    }
    let qyy = precision[(p, p)];
    Ok((0..p)
        .map(|i| (-precision[(i, p)] / (precision[(i, i)] * qyy).sqrt()).clamp(-1.0, 1.0))
        .collect())
}

pub fn regression_sa(method: RegressionMethod, x: &SampleMatrix, y: &[f64]) -> Result<RegressionSaResult> {
    let (cols, ys) = prepared(x, y, method.on_ranks())?;
    let (coefficients, r_squared) = match method {
        RegressionMethod::Src | RegressionMethod::Srrc => {
            let (c, r2) = fit_standardized(&cols, &ys)?;
            (c, Some(r2))
        }
        RegressionMethod::Pcc | RegressionMethod::Prcc => (partial_correlations(&cols, &ys)?, None),
    };
    Ok(RegressionSaResult {
        coefficients,
        method,
        r_squared,
        n_samples: ys.len(),
    })
}

pub fn src(x: &SampleMatrix, y: &[f64]) -> Result<RegressionSaResult> {
    regression_sa(RegressionMethod::Src, x, y)
}

pub fn srrc(x: &SampleMatrix, y: &[f64]) -> Result<RegressionSaResult> {
    regression_sa(RegressionMethod::Srrc, x, y)
}

pub fn pcc(x: &SampleMatrix, y: &[f64]) -> Result<RegressionSaResult> {
    regression_sa(RegressionMethod::Pcc, x, y)
}

pub fn prcc(x: &SampleMatrix, y: &[f64]) -> Result<RegressionSaResult> {
    regression_sa(RegressionMethod::Prcc, x, y)
}
