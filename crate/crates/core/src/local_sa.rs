//! One-at-a-time finite-difference sensitivities.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::Model;

/// Steps below this magnitude are raised to it.
pub const MIN_ABS_STEP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FdScheme {
    #[default]
    Forward,
    Central,
}

impl FdScheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            FdScheme::Forward => "forward",
            FdScheme::Central => "central",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OatOptions {
    /// Relative step δ; the absolute step is `δ · |x_i0|`.
    pub rel_perturbation: f64,
    pub scheme: FdScheme,
}

impl Default for OatOptions {
    fn default() -> Self {
        Self {
            rel_perturbation: 0.01,
            scheme: FdScheme::Forward,
        }
    }
}

/// Sensitivities of one model output.
#[derive(Debug, Clone, PartialEq)]
pub struct OatResult {
    /// ∂y/∂x_i in units of y per unit x_i.
    pub raw: Vec<f64>,
    /// `raw_i · x_i0 / y0`; `None` when `y0 == 0`.
    pub normalized: Option<Vec<f64>>,
    pub scheme: FdScheme,
    pub perturbation: f64,
    pub y0: f64,
    /// Parameters whose nominal was zero and got the absolute step `δ` instead.
    pub absolute_step: Vec<bool>,
    pub evaluations: usize,
}

/// Finite-difference sensitivities of every model output at `x0`.
pub fn oat_sensitivity<M: Model + ?Sized>(model: &M, x0: &[f64], opts: &OatOptions) -> Result<Vec<OatResult>> {
    let delta = opts.rel_perturbation;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Argument(format!("relative perturbation must be > 0, got {delta}")));
    }
    if x0.len() != model.n_inputs() {
        return Err(Error::Argument(format!(
            "model `{}` takes {} inputs, x0 has {}",
            model.name(),
            model.n_inputs(),
            x0.len()
        )));
    }
    let y0 = model.evaluate(x0)?;
    let steps: Vec<(f64, bool)> = x0
        .iter()
        .map(|&x| {
            if x == 0.0 {
                (delta.max(MIN_ABS_STEP), true)
            } else {
                ((delta * x.abs()).max(MIN_ABS_STEP), false)
            }
        })
        .collect();

    let shifted = |i: usize, h: f64| -> Result<Vec<f64>> {
        let mut x = x0.to_vec();
        x[i] += h;
        model.evaluate(&x)
    };

    // per parameter: one difference vector over all outputs
    let diffs: Vec<Vec<f64>> = (0..x0.len())
        .into_par_iter()
        .map(|i| -> Result<Vec<f64>> {
            let h = steps[i].0;
            let up = shifted(i, h)?;
            Ok(match opts.scheme {
                FdScheme::Forward => up.iter().zip(&y0).map(|(u, y)| (u - y) / h).collect(),
                FdScheme::Central => {
                    let down = shifted(i, -h)?;
                    up.iter().zip(&down).map(|(u, d)| (u - d) / (2.0 * h)).collect()
                }
            })
        })
        .collect::<Result<_>>()?;

    let evaluations = 1 + x0.len() * if opts.scheme == FdScheme::Central { 2 } else { 1 };
    Ok((0..y0.len())
        .map(|k| {
            let raw: Vec<f64> = diffs.iter().map(|d| d[k]).collect();
            let normalized = (y0[k] != 0.0).then(|| raw.iter().zip(x0).map(|(s, x)| s * x / y0[k]).collect());
            OatResult {
                raw,
                normalized,
                scheme: opts.scheme,
                perturbation: delta,
                y0: y0[k],
                absolute_step: steps.iter().map(|s| s.1).collect(),
                evaluations,
            }
        })
        .collect())
}
