//! Morris elementary-effects screening.
//!
//! A design is `R` trajectories of `n_x + 1` points. Each trajectory starts
//! at a random point of a `p`-level grid on the unit hypercube and moves one
//! coordinate at a time, in random order, by `±Δ`. Points are stored in native
//! units after mapping each coordinate onto its screening bounds.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::models::{evaluate_rows, Model};
use crate::problem::{stream_rng, streams, validate_specs, ParameterSpec};

const GRID_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorrisOptions {
    pub trajectories: usize,
    pub levels: usize,
    /// Step as a fraction of each range. `None` uses `p / (2(p - 1))`.
    pub step: Option<f64>,
}

impl Default for MorrisOptions {
    fn default() -> Self {
        Self {
            trajectories: 100,
            levels: 20,
            step: None,
        }
    }
}

impl MorrisOptions {
    pub fn step_fraction(&self) -> f64 {
        self.step
            .unwrap_or_else(|| self.levels as f64 / (2.0 * (self.levels as f64 - 1.0)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `n_x + 1` points in native units.
    pub points: Vec<Vec<f64>>,
    /// `moved[k]` is the parameter changed between point `k` and `k + 1`.
    pub moved: Vec<usize>,
    /// Signed native-unit step taken at each move.
    pub steps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorrisDesign {
    pub trajectories: Vec<Trajectory>,
    pub levels: usize,
    pub step_fraction: f64,
    /// Native step magnitude per parameter.
    pub delta: Vec<f64>,
    pub bounds: Vec<(f64, f64)>,
    pub seed: u64,
}

impl MorrisDesign {
    pub fn n_params(&self) -> usize {
        self.bounds.len()
    }

    pub fn n_rows(&self) -> usize {
        self.trajectories.len() * (self.n_params() + 1)
    }

    /// All design points, trajectory by trajectory.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.trajectories.iter().flat_map(|t| t.points.iter().cloned()).collect()
    }
}

pub fn generate_design(specs: &[ParameterSpec], opts: &MorrisOptions, seed: u64) -> Result<MorrisDesign> {
    validate_specs(specs)?;
    if opts.levels < 2 {
        return Err(Error::Argument(format!("need at least 2 grid levels, got {}", opts.levels)));
    }
    if opts.trajectories < 2 {
        return Err(Error::Argument(format!("need at least 2 trajectories, got {}", opts.trajectories)));
    }
    let frac = opts.step_fraction();
    if !(frac > 0.0 && frac <= 1.0) {
        return Err(Error::Argument(format!("step fraction must be in (0, 1], got {frac}")));
    }
    let bounds = specs
        .iter()
        .map(ParameterSpec::screening_bounds)
        .collect::<Result<Vec<_>>>()?;
    let n = specs.len();
    let top = (opts.levels - 1) as f64;

    // a level is usable if a step of `frac` fits in one direction or the other
    let usable: Vec<usize> = (0..opts.levels)
        .filter(|&k| {
            let u = k as f64 / top;
            u + frac <= 1.0 + GRID_EPS || u - frac >= -GRID_EPS
        })
        .collect();
    if usable.is_empty() {
        return Err(Error::Argument(format!(
            "no level of a {}-level grid can take a step of {frac}",
            opts.levels
        )));
    }

    let to_native = |i: usize, u: f64| bounds[i].0 + u * (bounds[i].1 - bounds[i].0);
    let delta: Vec<f64> = bounds.iter().map(|(lo, hi)| frac * (hi - lo)).collect();

    let mut rng = stream_rng(seed, streams::MORRIS_DESIGN);
    let mut trajectories = Vec::with_capacity(opts.trajectories);
    for _ in 0..opts.trajectories {
        let mut unit: Vec<f64> = (0..n)
            .map(|_| usable[rng.random_range(0..usable.len())] as f64 / top)
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);

        let mut points = Vec::with_capacity(n + 1);
        let mut steps = Vec::with_capacity(n);
        points.push(unit.iter().enumerate().map(|(i, &u)| to_native(i, u)).collect::<Vec<_>>());
        for &i in &order {
            let sign = if unit[i] + frac <= 1.0 + GRID_EPS { 1.0 } else { -1.0 };
            unit[i] = (unit[i] + sign * frac).clamp(0.0, 1.0);
            let mut next = points.last().unwrap().clone();
            next[i] = to_native(i, unit[i]);
            steps.push(sign * delta[i]);
            points.push(next);
        }
        trajectories.push(Trajectory {
            points,
            moved: order,
            steps,
        });
    }
    Ok(MorrisDesign {
        trajectories,
        levels: opts.levels,
        step_fraction: frac,
        delta,
        bounds,
        seed,
    })
}

/// Per-parameter lists of `R` elementary effects for one output.
pub fn elementary_effects(design: &MorrisDesign, outputs: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = design.n_params();
    if outputs.len() != design.n_rows() {
        return Err(Error::Argument(format!(
            "design has {} rows but {} outputs were given",
            design.n_rows(),
            outputs.len()
        )));
    }
    let mut effects = vec![Vec::with_capacity(design.trajectories.len()); n];
    for (t, traj) in design.trajectories.iter().enumerate() {
        let y = &outputs[t * (n + 1)..(t + 1) * (n + 1)];
        for (k, (&i, &step)) in traj.moved.iter().zip(&traj.steps).enumerate() {
            effects[i].push((y[k + 1] - y[k]) / step);
        }
    }
    Ok(effects)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorrisStats {
    pub mu: Vec<f64>,
    pub mu_star: Vec<f64>,
    /// Standard deviation of the effects, `1/(R-1)` normalization.
    pub sigma: Vec<f64>,
    /// `mu · x0 / y0`; `None` when `y0 == 0`.
    pub mu_norm: Option<Vec<f64>>,
    pub mu_star_norm: Option<Vec<f64>>,
    pub trajectories: usize,
    pub levels: usize,
}

pub fn morris_stats(effects: &[Vec<f64>], x0: &[f64], y0: f64, levels: usize) -> Result<MorrisStats> {
    if effects.len() != x0.len() {
        return Err(Error::Argument(format!(
            "{} effect lists for {} nominal values",
            effects.len(),
            x0.len()
        )));
    }
    let r = effects.first().map_or(0, Vec::len);
    if r < 2 || effects.iter().any(|e| e.len() != r) {
        return Err(Error::Argument(format!("need at least 2 effects per parameter, got {r}")));
    }
    let rf = r as f64;
    let mu: Vec<f64> = effects.iter().map(|e| e.iter().sum::<f64>() / rf).collect();
    let mu_star: Vec<f64> = effects.iter().map(|e| e.iter().map(|d| d.abs()).sum::<f64>() / rf).collect();
    let sigma: Vec<f64> = effects
        .iter()
        .zip(&mu)
        .map(|(e, m)| (e.iter().map(|d| (d - m).powi(2)).sum::<f64>() / (rf - 1.0)).sqrt())
        .collect();
    let norm = |v: &[f64]| v.iter().zip(x0).map(|(s, x)| s * x / y0).collect::<Vec<f64>>();
    let (mu_norm, mu_star_norm) = if y0 != 0.0 {
        (Some(norm(&mu)), Some(norm(&mu_star)))
    } else {
        (None, None)
    };
    Ok(MorrisStats {
        mu,
        mu_star,
        sigma,
        mu_norm,
        mu_star_norm,
        trajectories: r,
        levels,
    })
}

/// Designs, evaluates and summarizes a screening run; one record per model output.
/// Normalization uses the parameter nominals and the model value there.
pub fn morris_screening<M: Model + ?Sized>(
    model: &M,
    specs: &[ParameterSpec],
    opts: &MorrisOptions,
    seed: u64,
) -> Result<(MorrisDesign, Vec<MorrisStats>)> {
    if specs.len() != model.n_inputs() {
        return Err(Error::Argument(format!(
            "model `{}` takes {} inputs, {} parameters given",
            model.name(),
            model.n_inputs(),
            specs.len()
        )));
    }
    let design = generate_design(specs, opts, seed)?;
    let ys = evaluate_rows(model, &design.rows())?;
    let x0: Vec<f64> = specs.iter().map(|s| s.nominal).collect();
    let y0 = model.evaluate(&x0)?;
    let stats = (0..model.n_outputs())
        .map(|k| {
            let out: Vec<f64> = ys.iter().map(|y| y[k]).collect();
            morris_stats(&elementary_effects(&design, &out)?, &x0, y0[k], opts.levels)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((design, stats))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorrisClass {
    /// Small μ*.
    Negligible,
    /// Large μ*, small σ.
    Linear,
    /// Large μ* and large σ.
    NonlinearOrInteracting,
}

/// Tags each parameter: negligible when `μ* < mu_star_floor`, otherwise
/// nonlinear/interacting when `σ > sigma_ratio · μ*`.
pub fn classify(stats: &MorrisStats, mu_star_floor: f64, sigma_ratio: f64) -> Vec<MorrisClass> {
    stats
        .mu_star
        .iter()
        .zip(&stats.sigma)
        .map(|(&m, &s)| {
            if m < mu_star_floor {
                MorrisClass::Negligible
            } else if s > sigma_ratio * m {
                MorrisClass::NonlinearOrInteracting
            } else {
                MorrisClass::Linear
            }
        })
        .collect()
}
