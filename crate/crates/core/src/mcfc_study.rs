//! Fuel-cell workflow: current-density sweep with uncertainty bands, location
//! of the maximum-power point, and the full sensitivity/uncertainty battery
//! at that point.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local_sa::{oat_sensitivity, OatOptions, OatResult};
use crate::models::{evaluate_matrix, mcfc_outputs, mcfc_parameters, Mcfc, McfcConstants, McfcParams, Model};
use crate::morris::{morris_screening, MorrisOptions, MorrisStats};
use crate::problem::{sample_matrix, ParameterSpec};
use crate::regression_sa::{prcc, srrc, RegressionSaResult};
use crate::sobol::{estimate_sobol, SobolIndices};
use crate::uq::{monte_carlo_uq, sample_moments, uq_compare, CovarianceMatrix, UncertaintyResult};

/// Golden-section tolerance on `j*`, A/m².
pub const J_STAR_TOL: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepOptions {
    pub j_lo: f64,
    pub j_hi: f64,
    pub steps: usize,
    pub n_s: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            j_lo: 0.0,
            j_hi: 6000.0,
            steps: 61,
            n_s: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub j_grid: Vec<f64>,
    pub nominal_p: Vec<f64>,
    pub nominal_eta: Vec<f64>,
    pub mean_p: Vec<f64>,
    pub mean_eta: Vec<f64>,
    pub sd_p: Vec<f64>,
    pub sd_eta: Vec<f64>,
    /// Refined maximum-power current density.
    pub j_star: f64,
    pub p_star: f64,
    pub eta_star: f64,
    /// Monte Carlo of `[P, eta]` at `j_star`.
    pub star_uq: Vec<UncertaintyResult>,
    pub n_s: usize,
    pub seed: u64,
}

fn nominal_at(j: f64, c: &McfcConstants) -> Result<(f64, f64)> {
    let p = McfcParams { j, ..McfcParams::default() };
    let out = mcfc_outputs(&p, c)?;
    Ok((out.power, out.eta))
}

/// Maximizer of a unimodal `f` on `[a, b]` to within `tol`.
pub fn golden_section_max<F: Fn(f64) -> Result<f64>>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok((a + b) / 2.0)
}

/// Locates the maximum of nominal power on the grid, then refines it inside
/// the bracketing grid cells.
pub fn locate_optimum(j_grid: &[f64], nominal_p: &[f64], c: &McfcConstants) -> Result<f64> {
    let k = nominal_p
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v > nominal_p[best] { i } else { best });
    let lo = j_grid[k.saturating_sub(1)];
    let hi = j_grid[(k + 1).min(j_grid.len() - 1)];
    golden_section_max(|j| Ok(nominal_at(j, c)?.0), lo, hi, J_STAR_TOL)
}

/// Monte Carlo bands over a current-density grid, with `j` held exact at each point.
/// Point `i` uses seed `seed + i`; the run at `j*` uses `seed + steps`.
pub fn sweep(opts: &SweepOptions, seed: u64, c: &McfcConstants) -> Result<SweepResult> {
    if !(opts.j_lo >= 0.0 && opts.j_hi > opts.j_lo) {
        return Err(Error::Argument(format!(
            "sweep needs 0 <= j_lo < j_hi, got [{}, {}]",
            opts.j_lo, opts.j_hi
        )));
    }
    if opts.steps < 2 {
        return Err(Error::Argument(format!("sweep needs at least 2 steps, got {}", opts.steps)));
    }
    let h = (opts.j_hi - opts.j_lo) / (opts.steps - 1) as f64;
    let j_grid: Vec<f64> = (0..opts.steps).map(|i| opts.j_lo + i as f64 * h).collect();
    let mc_at = |j: f64, s: u64| -> Result<Vec<UncertaintyResult>> {
        let specs = mcfc_parameters(j)[1..].to_vec();
        monte_carlo_uq(&Mcfc::at_current(*c, j), &specs, opts.n_s, s)
    };

    let points: Vec<((f64, f64), Vec<UncertaintyResult>)> = j_grid
        .par_iter()
        .enumerate()
        .map(|(i, &j)| Ok((nominal_at(j, c)?, mc_at(j, seed.wrapping_add(i as u64))?)))
        .collect::<Result<_>>()?;

    let nominal_p: Vec<f64> = points.iter().map(|p| p.0 .0).collect();
    let nominal_eta: Vec<f64> = points.iter().map(|p| p.0 .1).collect();
    let j_star = locate_optimum(&j_grid, &nominal_p, c)?;
    let (p_star, eta_star) = nominal_at(j_star, c)?;
    let star_uq = mc_at(j_star, seed.wrapping_add(opts.steps as u64))?;

    Ok(SweepResult {
        mean_p: points.iter().map(|p| p.1[0].mean).collect(),
        mean_eta: points.iter().map(|p| p.1[1].mean).collect(),
        sd_p: points.iter().map(|p| p.1[0].sd).collect(),
        sd_eta: points.iter().map(|p| p.1[1].sd).collect(),
        j_grid,
        nominal_p,
        nominal_eta,
        j_star,
        p_star,
        eta_star,
        star_uq,
        n_s: opts.n_s,
        seed,
    })
}

// ── Ranking ────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMethod {
    Oat,
    Morris,
    Srrc,
    Prcc,
    Sobol,
}

impl RankMethod {
    pub const ALL: [RankMethod; 5] = [
        RankMethod::Oat,
        RankMethod::Morris,
        RankMethod::Srrc,
        RankMethod::Prcc,
        RankMethod::Sobol,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RankMethod::Oat => "oat",
            RankMethod::Morris => "morris",
            RankMethod::Srrc => "srrc",
            RankMethod::Prcc => "prcc",
            RankMethod::Sobol => "sobol",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingRow {
    pub parameter: String,
    /// |normalized OAT|
    pub oat: f64,
    /// |μ*_norm|, or |μ_norm| when `morris_uses_mu` is set.
    pub morris: f64,
    pub morris_uses_mu: bool,
    pub srrc: f64,
    pub prcc: f64,
    /// Total Sobol index.
    pub sobol: f64,
}

impl RankingRow {
    pub fn value(&self, m: RankMethod) -> f64 {
        match m {
            RankMethod::Oat => self.oat,
            RankMethod::Morris => self.morris,
            RankMethod::Srrc => self.srrc,
            RankMethod::Prcc => self.prcc,
            RankMethod::Sobol => self.sobol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingTable {
    pub output: String,
    pub rows: Vec<RankingRow>,
}

impl RankingTable {
    /// Builds the table. Parameters listed in `mu_override` use |μ_norm| in
    /// the Morris column instead of |μ*_norm|.
    pub fn build(
        output: &str,
        names: &[String],
        oat: &OatResult,
        morris: &MorrisStats,
        srrc: &RegressionSaResult,
        prcc: &RegressionSaResult,
        sobol: &SobolIndices,
        mu_override: &[String],
    ) -> Result<Self> {
        let missing = |what: &str| Error::Degenerate(format!("no normalized {what} for `{output}`: nominal output is zero"));
        let oat_n = oat.normalized.as_ref().ok_or_else(|| missing("OAT"))?;
        let mu_n = morris.mu_norm.as_ref().ok_or_else(|| missing("Morris"))?;
        let mu_star_n = morris.mu_star_norm.as_ref().ok_or_else(|| missing("Morris"))?;
        let n = names.len();
        let lens = [oat_n.len(), mu_n.len(), srrc.coefficients.len(), prcc.coefficients.len(), sobol.total.len()];
        if lens.iter().any(|&l| l != n) {
            return Err(Error::Argument(format!("ranking inputs disagree on parameter count {lens:?} vs {n}")));
        }
        let rows = (0..n)
            .map(|i| {
                let uses_mu = mu_override.contains(&names[i]);
                RankingRow {
                    parameter: names[i].clone(),
                    oat: oat_n[i].abs(),
                    morris: if uses_mu { mu_n[i].abs() } else { mu_star_n[i].abs() },
                    morris_uses_mu: uses_mu,
                    srrc: srrc.coefficients[i].abs(),
                    prcc: prcc.coefficients[i].abs(),
                    sobol: sobol.total[i],
                }
            })
            .collect();
        Ok(Self {
            output: output.to_string(),
            rows,
        })
    }

    /// Parameter indices from most to least important.
    pub fn order(&self, m: RankMethod) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.rows.len()).collect();
        idx.sort_by(|&a, &b| self.rows[b].value(m).total_cmp(&self.rows[a].value(m)));
        idx
    }

    /// Rank position (1 = most important) of each parameter.
    pub fn ranks(&self, m: RankMethod) -> Vec<usize> {
        let mut r = vec![0; self.rows.len()];
        for (pos, i) in self.order(m).into_iter().enumerate() {
            r[i] = pos + 1;
        }
        r
    }
}

// ── Battery at the optimum ─────────────────────────────────────────────

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BatteryOptions {
    pub n_s: usize,
    pub trajectories: usize,
    pub levels: usize,
    pub sobol_n: usize,
    pub rel_perturbation: f64,
    /// Parameters ranked by |μ_norm| instead of |μ*_norm|.
    pub mu_override: Vec<String>,
}

impl Default for BatteryOptions {
    fn default() -> Self {
        Self {
            n_s: 10_000,
            trajectories: 100,
            levels: 20,
            sobol_n: 10_000,
            rel_perturbation: 0.01,
            mu_override: vec!["j".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatteryResult {
    pub j_star: f64,
    pub parameters: Vec<String>,
    pub outputs: Vec<String>,
    /// One entry per output, `[P, eta]`.
    pub oat: Vec<OatResult>,
    pub morris: Vec<MorrisStats>,
    pub srrc: Vec<RegressionSaResult>,
    pub prcc: Vec<RegressionSaResult>,
    pub sobol: Vec<SobolIndices>,
    /// Monte Carlo, OAT and Morris estimates per output.
    pub uq: Vec<[UncertaintyResult; 3]>,
    pub ranking: Vec<RankingTable>,
}

/// All methods at `j_star`, with 1% uncertainty on `j` itself. The regression
/// coefficients and the Monte Carlo moments share one sample.
pub fn optimum_battery(j_star: f64, opts: &BatteryOptions, seed: u64, c: &McfcConstants) -> Result<BatteryResult> {
    let specs: Vec<ParameterSpec> = mcfc_parameters(j_star);
    let model = Mcfc::new(*c);
    let names = model.input_names();
    let outputs = model.output_names();
    let x0: Vec<f64> = specs.iter().map(|s| s.nominal).collect();

    let oat = oat_sensitivity(
        &model,
        &x0,
        &OatOptions {
            rel_perturbation: opts.rel_perturbation,
            ..Default::default()
        },
    )?;
    let morris_opts = MorrisOptions {
        trajectories: opts.trajectories,
        levels: opts.levels,
        step: None,
    };
    let (_, morris) = morris_screening(&model, &specs, &morris_opts, seed)?;

    let x = sample_matrix(&specs, opts.n_s, seed)?;
    let ys = evaluate_matrix(&model, &x)?;
    let mut srrcs = Vec::new();
    let mut prccs = Vec::new();
    let mut mcs = Vec::new();
    for k in 0..outputs.len() {
        let y: Vec<f64> = ys.iter().map(|r| r[k]).collect();
        srrcs.push(srrc(&x, &y)?);
        prccs.push(prcc(&x, &y)?);
        mcs.push(sample_moments(&y)?);
    }
    let sobol = estimate_sobol(&model, &specs, opts.sobol_n, seed)?;

    let cx = CovarianceMatrix::from_specs(&specs)?;
    let mut uq = Vec::new();
    let mut ranking = Vec::new();
    for (k, mc) in mcs.into_iter().enumerate() {
        uq.push(uq_compare(mc, &oat[k], &morris[k], &cx)?);
        ranking.push(RankingTable::build(
            &outputs[k],
            &names,
            &oat[k],
            &morris[k],
            &srrcs[k],
            &prccs[k],
            &sobol[k],
            &opts.mu_override,
        )?);
    }
    Ok(BatteryResult {
        j_star,
        parameters: names,
        outputs,
        oat,
        morris,
        srrc: srrcs,
        prcc: prccs,
        sobol,
        uq,
        ranking,
    })
}
