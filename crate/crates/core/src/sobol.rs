//! First-order and total Sobol indices, Glen–Isaac D3 estimator.
//!
//! Two independent sample matrices `X`, `X'` are drawn. For every parameter
//! `j` the model is also evaluated on `X` with column `j` taken from `X'`
//! (`g_j`) and on `X'` with column `j` taken from `X` (`g'_j`). All output
//! vectors are standardized and the correlations between them are corrected
//! for the spurious correlation between the two base samples.

use crate::error::{Error, Result};
use crate::models::{evaluate_rows, Model};
use crate::problem::{draw_matrix, stream_rng, streams, SampleMatrix, ParameterSpec};
use crate::regression_sa::standardize;

pub const MIN_SAMPLES: usize = 100;
const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SobolIndices {
    pub first: Vec<f64>,
    pub total: Vec<f64>,
    pub n: usize,
    pub seed: u64,
}

/// Model outputs on the radial design, one output at a time.
#[derive(Debug, Clone)]
pub struct RadialOutputs {
    pub g0: Vec<f64>,
    pub g0_prime: Vec<f64>,
    /// `g[j][i]`: row `i` of `X` with column `j` from `X'`.
    pub g: Vec<Vec<f64>>,
    /// `g_prime[j][i]`: row `i` of `X'` with column `j` from `X`.
    pub g_prime: Vec<Vec<f64>>,
}

/// Evaluation count of one estimator run.
pub fn evaluation_count(n: usize, n_params: usize) -> usize {
    n * (2 + 2 * n_params)
}

/// Radial design rows in evaluation order: `X`, `X'`, then for each `j` the
/// block of `g_j` rows followed by the block of `g'_j` rows.
pub fn radial_rows(x: &SampleMatrix, xp: &SampleMatrix) -> Vec<Vec<f64>> {
    let n = x.n_rows();
    let p = x.n_cols();
    let mut rows = Vec::with_capacity(evaluation_count(n, p));
    rows.extend(x.rows().map(<[f64]>::to_vec));
    rows.extend(xp.rows().map(<[f64]>::to_vec));
    for j in 0..p {
        for i in 0..n {
            let mut r = x.row(i).to_vec();
            r[j] = xp.row(i)[j];
            rows.push(r);
        }
        for i in 0..n {
            let mut r = xp.row(i).to_vec();
            r[j] = x.row(i)[j];
            rows.push(r);
        }
    }
    rows
}

fn split_outputs(ys: &[Vec<f64>], n: usize, p: usize, k: usize) -> RadialOutputs {
    let col = |start: usize| ys[start..start + n].iter().map(|y| y[k]).collect::<Vec<f64>>();
    RadialOutputs {
        g0: col(0),
        g0_prime: col(n),
        g: (0..p).map(|j| col(2 * n + 2 * j * n)).collect(),
        g_prime: (0..p).map(|j| col(2 * n + (2 * j + 1) * n)).collect(),
    }
}

/// D3 indices from radial outputs.
pub fn d3_indices(out: &RadialOutputs) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = out.g0.len();
    if out.g0_prime.len() != n
        || out.g.len() != out.g_prime.len()
        || out.g.iter().chain(&out.g_prime).any(|v| v.len() != n)
    {
        return Err(Error::Argument("radial output blocks have mismatched lengths".into()));
    }
    let degenerate = |e: Error| match e {
        Error::Degenerate(m) => Error::Degenerate(format!("model output has zero variance ({m})")),
        other => other,
    };
    let a = standardize("g0", &out.g0).map_err(degenerate)?;
    let b = standardize("g0'", &out.g0_prime).map_err(degenerate)?;
    let two_n = 2.0 * n as f64;

    let mut first = Vec::with_capacity(out.g.len());
    let mut total = Vec::with_capacity(out.g.len());
    for (j, (gj, gpj)) in out.g.iter().zip(&out.g_prime).enumerate() {
        let g = standardize(&format!("g_{j}"), gj).map_err(degenerate)?;
        let gp = standardize(&format!("g'_{j}"), gpj).map_err(degenerate)?;
        let (mut c, mut cp, mut cf) = (0.0, 0.0, 0.0);
        for i in 0..n {
            c += a[i] * gp[i] + b[i] * g[i];
            cp += a[i] * g[i] + b[i] * gp[i];
            cf += a[i] * b[i] + g[i] * gp[i];
        }
        c /= two_n;
        cp /= two_n;
        cf /= two_n;

        let den = 1.0 - cf * cf;
        if den.abs() < DEGENERACY_TOL {
            return Err(Error::Degenerate(format!(
                "parameter {j}: base samples are perfectly correlated"
            )));
        }
        let e = (c - cf * cp) / den;
        let ep = (cp - cf * c) / den;
        let q = 1.0 - e * ep;
        if q < DEGENERACY_TOL {
            return Err(Error::Degenerate(format!(
                "parameter {j}: correction denominator 1 - E·E' = {q:e}"
            )));
        }
        first.push(c - cf * ep / q);
        total.push(1.0 - cp + cf * e / q);
    }
    Ok((first, total))
}

/// Indices for every model output, all sharing one `X`, `X'` draw.
pub fn estimate_sobol<M: Model + ?Sized>(
    model: &M,
    specs: &[ParameterSpec],
    n: usize,
    seed: u64,
) -> Result<Vec<SobolIndices>> {
    if n < MIN_SAMPLES {
        return Err(Error::Argument(format!("need N >= {MIN_SAMPLES}, got {n}")));
    }
    if specs.len() != model.n_inputs() {
        return Err(Error::Argument(format!(
            "model `{}` takes {} inputs, {} parameters given",
            model.name(),
            model.n_inputs(),
            specs.len()
        )));
    }
    let mut rng = stream_rng(seed, streams::SOBOL);
    let x = draw_matrix(specs, n, &mut rng)?;
    let xp = draw_matrix(specs, n, &mut rng)?;
    let ys = evaluate_rows(model, &radial_rows(&x, &xp))?;
    (0..model.n_outputs())
        .map(|k| {
            let (first, total) = d3_indices(&split_outputs(&ys, n, specs.len(), k))?;
            Ok(SobolIndices { first, total, n, seed })
        })
        .collect()
}
