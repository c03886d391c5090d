//! Deterministic test models.
//!
//! Every model is a pure map from an input vector to an output vector, so a
//! single instance can be shared across threads. The registry at the bottom
//! resolves the names used in study configs.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{stream_rng, streams, ParameterSpec, SampleMatrix};

pub trait Model: Send + Sync {
    fn name(&self) -> &str;
    fn input_names(&self) -> Vec<String>;
    fn output_names(&self) -> Vec<String>;
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>>;

    fn n_inputs(&self) -> usize {
        self.input_names().len()
    }

    fn n_outputs(&self) -> usize {
        self.output_names().len()
    }
}

pub type ModelHandle = Arc<dyn Model>;

impl<M: Model + ?Sized> Model for Arc<M> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn input_names(&self) -> Vec<String> {
        (**self).input_names()
    }
    fn output_names(&self) -> Vec<String> {
        (**self).output_names()
    }
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).evaluate(x)
    }
}

/// Wraps a scalar closure as a single-output model.
pub struct FnModel<F> {
    name: String,
    inputs: Vec<String>,
    f: F,
}

impl<F> FnModel<F>
where
    F: Fn(&[f64]) -> Result<f64> + Send + Sync,
{
    pub fn new(name: impl Into<String>, inputs: &[&str], f: F) -> Self {
        Self {
            name: name.into(),
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            f,
        }
    }
}

impl<F> Model for FnModel<F>
where
    F: Fn(&[f64]) -> Result<f64> + Send + Sync,
{
    fn name(&self) -> &str {
        &self.name
    }
    fn input_names(&self) -> Vec<String> {
        self.inputs.clone()
    }
    fn output_names(&self) -> Vec<String> {
        vec!["y".into()]
    }
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(&self.name, x, self.inputs.len())?;
        Ok(vec![(self.f)(x)?])
    }
}

/// Exposes one output of a multi-output model.
pub struct SelectOutput<M> {
    name: String,
    inner: M,
    output: usize,
}

impl<M: Model> SelectOutput<M> {
    pub fn new(name: impl Into<String>, inner: M, output: usize) -> Result<Self> {
        if output >= inner.n_outputs() {
            return Err(Error::Argument(format!(
                "model `{}` has {} outputs, asked for #{output}",
                inner.name(),
                inner.n_outputs()
            )));
        }
        Ok(Self {
            name: name.into(),
            inner,
            output,
        })
    }
}

impl<M: Model> Model for SelectOutput<M> {
    fn name(&self) -> &str {
        &self.name
    }
    fn input_names(&self) -> Vec<String> {
        self.inner.input_names()
    }
    fn output_names(&self) -> Vec<String> {
        vec![self.inner.output_names()[self.output].clone()]
    }
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![self.inner.evaluate(x)?[self.output]])
    }
}

fn check_len(model: &str, x: &[f64], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::Argument(format!(
            "model `{model}` takes {n} inputs, got {}",
            x.len()
        )));
    }
    Ok(())
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Evaluates every row, in parallel, keeping row order. Failures carry the row index.
pub fn evaluate_rows<M: Model + ?Sized>(model: &M, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    rows.par_iter()
        .enumerate()
        .map(|(index, x)| {
            model.evaluate(x).map_err(|e| Error::Sample {
                index,
                source: Box::new(e),
            })
        })
        .collect()
}

pub fn evaluate_matrix<M: Model + ?Sized>(model: &M, samples: &SampleMatrix) -> Result<Vec<Vec<f64>>> {
    let rows: Vec<Vec<f64>> = samples.rows().map(<[f64]>::to_vec).collect();
    evaluate_rows(model, &rows)
}

// ── Sobol g-function ───────────────────────────────────────────────────

pub const SOBOL_G_DEFAULT_A: [f64; 8] = [0.0, 1.0, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0];

pub fn eval_sobol_g(x: &[f64], a: &[f64]) -> Result<f64> {
    check_len("sobol_g", x, a.len())?;
    let mut y = 1.0;
    for (i, (&xi, &ai)) in x.iter().zip(a).enumerate() {
        if !(0.0..=1.0).contains(&xi) {
            return Err(Error::domain("sobol_g", format!("x{} = {xi} outside [0, 1]", i + 1)));
        }
        if ai < 0.0 {
            return Err(Error::domain("sobol_g", format!("a{} = {ai} is negative", i + 1)));
        }
        y *= ((4.0 * xi - 2.0).abs() + ai) / (1.0 + ai);
    }
    Ok(y)
}

#[derive(Debug, Clone)]
pub struct SobolG {
    pub a: Vec<f64>,
}

impl Default for SobolG {
    fn default() -> Self {
        Self {
            a: SOBOL_G_DEFAULT_A.to_vec(),
        }
    }
}

impl Model for SobolG {
    fn name(&self) -> &str {
        "sobol_g"
    }
    fn input_names(&self) -> Vec<String> {
        numbered("x", self.a.len())
    }
    fn output_names(&self) -> Vec<String> {
        vec!["y".into()]
    }
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![eval_sobol_g(x, &self.a)?])
    }
}

// ── Ishigami ───────────────────────────────────────────────────────────

pub fn eval_ishigami(x: &[f64], a: f64, b: f64) -> Result<f64> {
    check_len("ishigami", x, 3)?;
    if let Some(i) = x.iter().position(|v| !(-PI..=PI).contains(v)) {
        return Err(Error::domain("ishigami", format!("x{} = {} outside [-pi, pi]", i + 1, x[i])));
    }
    let s1 = x[0].sin();
    Ok(s1 + a * x[1].sin().powi(2) + b * x[2].powi(4) * s1)
}

#[derive(Debug, Clone, Copy)]
pub struct Ishigami {
    pub a: f64,
    pub b: f64,
}

impl Default for Ishigami {
    fn default() -> Self {
        Self { a: 7.0, b: 0.1 }
    }
}

impl Model for Ishigami {
    fn name(&self) -> &str {
        "ishigami"
    }
    fn input_names(&self) -> Vec<String> {
        numbered("x", 3)
    }
    fn output_names(&self) -> Vec<String> {
        vec!["y".into()]
    }
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![eval_ishigami(x, self.a, self.b)?])
    }
}

// ── Morris function ────────────────────────────────────────────────────

pub const MORRIS_FN_INPUTS: usize = 20;

/// Coefficients of the 20-input Morris function, frozen at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MorrisFnCoefficients {
    pub beta0: f64,
    pub beta1: [f64; MORRIS_FN_INPUTS],
    /// Only `beta2[i][j]` with `i < j` is read.
    pub beta2: [[f64; MORRIS_FN_INPUTS]; MORRIS_FN_INPUTS],
    /// Non-zero third-order terms as `(i, j, l, beta)`, `i < j < l`.
    pub beta3: Vec<(usize, usize, usize, f64)>,
    /// Non-zero fourth-order terms as `(i, j, l, m, beta)`.
    pub beta4: Vec<(usize, usize, usize, usize, f64)>,
    pub seed: u64,
}

impl MorrisFnCoefficients {
    /// Fixed coefficients plus N(0,1) draws for the rest, in the order
    /// beta0, beta1[10..20], then beta2 row-major over `i < j`.
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = stream_rng(seed, streams::MORRIS_FN_COEFFS);
        let mut normal = || -> f64 { rng.sample(StandardNormal) };

        let beta0 = normal();
        let mut beta1 = [0.0; MORRIS_FN_INPUTS];
        for (i, b) in beta1.iter_mut().enumerate() {
            *b = if i < 10 { 20.0 } else { normal() };
        }
        let mut beta2 = [[0.0; MORRIS_FN_INPUTS]; MORRIS_FN_INPUTS];
        for i in 0..MORRIS_FN_INPUTS {
            for j in i + 1..MORRIS_FN_INPUTS {
                beta2[i][j] = if j < 6 { -15.0 } else { normal() };
            }
        }
        let mut beta3 = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                for l in j + 1..5 {
                    beta3.push((i, j, l, -10.0));
                }
            }
        }
        let beta4 = vec![(0, 1, 2, 3, 5.0)];
        Self {
            beta0,
            beta1,
            beta2,
            beta3,
            beta4,
            seed,
        }
    }
}

fn morris_w(i: usize, x: f64) -> f64 {
    // inputs 3, 5 and 7 (1-based) use the fractional transform
    if matches!(i, 2 | 4 | 6) {
        2.0 * (1.1 * x / (x + 0.1) - 0.5)
    } else {
        2.0 * (x - 0.5)
    }
}

pub fn eval_morris_fn(x: &[f64], c: &MorrisFnCoefficients) -> Result<f64> {
    check_len("morris_fn", x, MORRIS_FN_INPUTS)?;
    if let Some(i) = x.iter().position(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::domain("morris_fn", format!("x{} = {} outside [0, 1]", i + 1, x[i])));
    }
    let w: Vec<f64> = x.iter().enumerate().map(|(i, &xi)| morris_w(i, xi)).collect();
    let mut y = c.beta0;
    for i in 0..MORRIS_FN_INPUTS {
        y += c.beta1[i] * w[i];
        for j in i + 1..MORRIS_FN_INPUTS {
            y += c.beta2[i][j] * w[i] * w[j];
        }
    }
    for &(i, j, l, b) in &c.beta3 {
        y += b * w[i] * w[j] * w[l];
    }
    for &(i, j, l, m, b) in &c.beta4 {
        y += b * w[i] * w[j] * w[l] * w[m];
    }
    Ok(y)
}

#[derive(Debug, Clone)]
pub struct MorrisFunction {
    pub coefficients: MorrisFnCoefficients,
}

impl MorrisFunction {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            coefficients: MorrisFnCoefficients::from_seed(seed),
        }
    }
}

impl Model for MorrisFunction {
    fn name(&self) -> &str {
        "morris_fn"
    }
    fn input_names(&self) -> Vec<String> {
        numbered("x", MORRIS_FN_INPUTS)
    }
    fn output_names(&self) -> Vec<String> {
        vec!["y".into()]
    }
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![eval_morris_fn(x, &self.coefficients)?])
    }
}

// ── Special function set ───────────────────────────────────────────────

pub fn eval_sfs(k: u8, x: &[f64]) -> Result<f64> {
    check_len("sfs", x, 3)?;
    let (x1, x2, x3) = (x[0], x[1], x[2]);
    match k {
        1 => Ok(x1 + x2 + x3),
        2 => Ok(x1 + x1 * x2 + x3),
        3 => Ok(x1 + x2 * x2 + x3.powi(3)),
        4 => Ok(x1 + x1 * x2 * x2 + x3.powi(3)),
        _ => Err(Error::Argument(format!("special function index must be 1..=4, got {k}"))),
    }
}

#[derive(Debug, Clone)]
pub struct Sfs {
    k: u8,
    name: String,
}

impl Sfs {
    pub fn new(k: u8) -> Result<Self> {
        if !(1..=4).contains(&k) {
            return Err(Error::Argument(format!("special function index must be 1..=4, got {k}")));
        }
        Ok(Self {
            k,
            name: format!("sfs{k}"),
        })
    }
}

impl Model for Sfs {
    fn name(&self) -> &str {
        &self.name
    }
    fn input_names(&self) -> Vec<String> {
        numbered("x", 3)
    }
    fn output_names(&self) -> Vec<String> {
        vec!["y".into()]
    }
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![eval_sfs(self.k, x)?])
    }
}

// ── Molten carbonate fuel cell ─────────────────────────────────────────

/// Input order of the MCFC model.
pub const MCFC_INPUTS: [&str; 9] = [
    "j", "T", "E_act_an", "E_act_cat", "p_H2_an", "p_CO2_an", "p_H2O_an", "p_O2_cat", "p_CO2_cat",
];

/// Operating-point nominals and relative uncertainties, in [`MCFC_INPUTS`] order.
/// The current-density nominal is a placeholder; studies set it.
pub const MCFC_TABLE1: [(f64, f64); 9] = [
    (3000.0, 0.01),
    (893.0, 0.01),
    (53500.0, 0.01),
    (77300.0, 0.01),
    (0.6, 0.05),
    (0.15, 0.05),
    (0.25, 0.05),
    (0.08, 0.05),
    (0.08, 0.05),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McfcConstants {
    /// C/mol
    pub faraday: f64,
    pub n_electrons: f64,
    /// J/(mol K)
    pub r_gas: f64,
    /// Molar enthalpy change of the cell reaction, J/mol (negative).
    pub delta_h: f64,
    /// Effective area, m². 1 m² makes P a power density.
    pub area: f64,
}

impl Default for McfcConstants {
    fn default() -> Self {
        Self {
            faraday: 96485.0,
            n_electrons: 2.0,
            r_gas: 8.314,
            // H2 + 1/2 O2 -> H2O(g) near the 893 K operating temperature
            delta_h: -247_000.0,
            area: 1.0,
        }
    }
}

/// Operating state of the cell. Units: A/m², K, J/mol, atm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McfcParams {
    pub j: f64,
    pub t: f64,
    pub e_act_an: f64,
    pub e_act_cat: f64,
    pub p_h2_an: f64,
    pub p_co2_an: f64,
    pub p_h2o_an: f64,
    pub p_o2_cat: f64,
    pub p_co2_cat: f64,
}

impl Default for McfcParams {
    fn default() -> Self {
        Self::from_slice(&MCFC_TABLE1.map(|(v, _)| v))
    }
}

impl McfcParams {
    pub fn from_slice(x: &[f64]) -> Self {
        Self {
            j: x[0],
            t: x[1],
            e_act_an: x[2],
            e_act_cat: x[3],
            p_h2_an: x[4],
            p_co2_an: x[5],
            p_h2o_an: x[6],
            p_o2_cat: x[7],
            p_co2_cat: x[8],
        }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        vec![
            self.j,
            self.t,
            self.e_act_an,
            self.e_act_cat,
            self.p_h2_an,
            self.p_co2_an,
            self.p_h2o_an,
            self.p_o2_cat,
            self.p_co2_cat,
        ]
    }
}

/// Potentials in V, power in W (W/m² at unit area).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McfcOutputs {
    pub power: f64,
    pub eta: f64,
    pub voltage: f64,
    pub e0: f64,
    pub e: f64,
    pub u_an: f64,
    pub u_cat: f64,
    pub u_ohm: f64,
}

pub fn mcfc_outputs(p: &McfcParams, c: &McfcConstants) -> Result<McfcOutputs> {
    let fail = |msg: String| Err(Error::domain("mcfc", msg));
    let pressures = [
        ("p_H2_an", p.p_h2_an),
        ("p_CO2_an", p.p_co2_an),
        ("p_H2O_an", p.p_h2o_an),
        ("p_O2_cat", p.p_o2_cat),
        ("p_CO2_cat", p.p_co2_cat),
    ];
    if let Some((name, v)) = pressures.iter().find(|(_, v)| !(*v > 0.0)) {
        return fail(format!("partial pressure {name} = {v} must be positive"));
    }
    if !(p.t > 0.0) {
        return fail(format!("temperature {} must be positive", p.t));
    }
    if !(p.j >= 0.0) {
        return fail(format!("current density {} must be non-negative", p.j));
    }
    if !(c.delta_h < 0.0) {
        return fail(format!("delta_h {} must be negative", c.delta_h));
    }

    let nf = c.n_electrons * c.faraday;
    let rt = c.r_gas * p.t;
    let e0 = (242_000.0 - 45.8 * p.t) / nf;
    let ratio = p.p_h2_an * p.p_o2_cat.sqrt() * p.p_co2_cat / (p.p_h2o_an * p.p_co2_an);
    let e = e0 + rt / nf * ratio.ln();
    let u_an = 2.27e-9
        * p.j
        * (p.e_act_an / rt).exp()
        * p.p_h2_an.powf(-0.42)
        * p.p_co2_an.powf(-0.17)
        * p.p_h2o_an.powf(-1.0);
    let u_cat = 7.505e-10 * p.j * (p.e_act_cat / rt).exp() * p.p_o2_cat.powf(-0.43) * p.p_co2_cat.powf(-0.09);
    let u_ohm = 0.5e-4 * p.j * (3016.0 * (1.0 / p.t - 1.0 / 923.0)).exp();
    let voltage = e - u_an - u_cat - u_ohm;
    Ok(McfcOutputs {
        power: p.j * c.area * voltage,
        eta: nf / (-c.delta_h) * voltage,
        voltage,
        e0,
        e,
        u_an,
        u_cat,
        u_ohm,
    })
}

/// MCFC with outputs `[P, eta]`. With `fixed_current` set, `j` is not an input.
#[derive(Debug, Clone, Default)]
pub struct Mcfc {
    pub constants: McfcConstants,
    pub fixed_current: Option<f64>,
}

impl Mcfc {
    pub fn new(constants: McfcConstants) -> Self {
        Self {
            constants,
            fixed_current: None,
        }
    }

    pub fn at_current(constants: McfcConstants, j: f64) -> Self {
        Self {
            constants,
            fixed_current: Some(j),
        }
    }
}

impl Model for Mcfc {
    fn name(&self) -> &str {
        "mcfc"
    }
    fn input_names(&self) -> Vec<String> {
        let skip = usize::from(self.fixed_current.is_some());
        MCFC_INPUTS[skip..].iter().map(|s| s.to_string()).collect()
    }
    fn output_names(&self) -> Vec<String> {
        vec!["P".into(), "eta".into()]
    }
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        let params = match self.fixed_current {
            Some(j) => {
                check_len("mcfc", x, 8)?;
                let mut full = Vec::with_capacity(9);
                full.push(j);
                full.extend_from_slice(x);
                McfcParams::from_slice(&full)
            }
            None => {
                check_len("mcfc", x, 9)?;
                McfcParams::from_slice(x)
            }
        };
        let out = mcfc_outputs(&params, &self.constants)?;
        Ok(vec![out.power, out.eta])
    }
}

/// Table-1 specs in [`MCFC_INPUTS`] order, current density centred on `j_nominal`.
/// Draws are positivity-guarded.
pub fn mcfc_parameters(j_nominal: f64) -> Vec<ParameterSpec> {
    MCFC_INPUTS
        .iter()
        .zip(MCFC_TABLE1)
        .enumerate()
        .map(|(i, (name, (nominal, rel)))| {
            let nominal = if i == 0 { j_nominal } else { nominal };
            ParameterSpec::normal_relative(*name, nominal, rel).positive()
        })
        .collect()
}

// ── Registry ───────────────────────────────────────────────────────────

pub const MODEL_NAMES: [&str; 10] = [
    "sobol_g",
    "morris_fn",
    "ishigami",
    "sfs1",
    "sfs2",
    "sfs3",
    "sfs4",
    "mcfc_power",
    "mcfc_eta",
    "mcfc",
];

/// Per-model knobs, all optional. Unused fields are ignored by models that do not read them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelOptions {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ishigami_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ishigami_b: Option<f64>,
    /// Seed for the Morris-function coefficients.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficient_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mcfc: Option<McfcConstants>,
}

pub const DEFAULT_MORRIS_FN_SEED: u64 = 1991;

pub fn build_model(name: &str, opts: &ModelOptions) -> Result<ModelHandle> {
    let mcfc = || Mcfc::new(opts.mcfc.unwrap_or_default());
    Ok(match name {
        "sobol_g" => {
            let a = opts.a.clone().unwrap_or_else(|| SOBOL_G_DEFAULT_A.to_vec());
            if a.is_empty() || a.iter().any(|&v| !(v >= 0.0)) {
                return Err(Error::Spec("sobol_g coefficients must be non-empty and >= 0".into()));
            }
            Arc::new(SobolG { a })
        }
        "morris_fn" => Arc::new(MorrisFunction::from_seed(
            opts.coefficient_seed.unwrap_or(DEFAULT_MORRIS_FN_SEED),
        )),
        "ishigami" => {
            let d = Ishigami::default();
            Arc::new(Ishigami {
                a: opts.ishigami_a.unwrap_or(d.a),
                b: opts.ishigami_b.unwrap_or(d.b),
            })
        }
        "sfs1" => Arc::new(Sfs::new(1)?),
        "sfs2" => Arc::new(Sfs::new(2)?),
        "sfs3" => Arc::new(Sfs::new(3)?),
        "sfs4" => Arc::new(Sfs::new(4)?),
        "mcfc_power" => Arc::new(SelectOutput::new("mcfc_power", mcfc(), 0)?),
        "mcfc_eta" => Arc::new(SelectOutput::new("mcfc_eta", mcfc(), 1)?),
        "mcfc" => Arc::new(mcfc()),
        other => {
            return Err(Error::Config(format!(
                "unknown model `{other}`; known models: {}",
                MODEL_NAMES.join(", ")
            )))
        }
    })
}

/// Input distributions the benchmarks are usually run with.
pub fn default_parameters(name: &str, opts: &ModelOptions) -> Result<Vec<ParameterSpec>> {
    let model = build_model(name, opts)?;
    let names = model.input_names();
    Ok(match name {
        "ishigami" => names.into_iter().map(|n| ParameterSpec::uniform(n, -PI, PI)).collect(),
        "mcfc_power" | "mcfc_eta" | "mcfc" => mcfc_parameters(MCFC_TABLE1[0].0),
        _ => names.into_iter().map(|n| ParameterSpec::uniform(n, 0.0, 1.0)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn sobol_g_examples() {
        let a = SOBOL_G_DEFAULT_A;
        assert_eq!(eval_sobol_g(&[0.5; 8], &a).unwrap(), 0.0);
        // 2 * 1.5 * 4/3 * 1.25 * 7/6 * 12/11 * 22/21 * 52/51
        let at_zero = 2.0 * 1.5 * (4.0 / 3.0) * 1.25 * (7.0 / 6.0) * (12.0 / 11.0) * (22.0 / 21.0) * (52.0 / 51.0);
        assert_relative_eq!(eval_sobol_g(&[0.0; 8], &a).unwrap(), at_zero, max_relative = 1e-14);
        assert_relative_eq!(at_zero, 6.7974, epsilon = 5e-4);
        assert_eq!(eval_sobol_g(&[1.0; 8], &a).unwrap(), eval_sobol_g(&[0.0; 8], &a).unwrap());
        assert!(matches!(eval_sobol_g(&[1.1; 8], &a), Err(Error::Domain { .. })));
    }

    #[test]
    fn ishigami_examples() {
        let h = PI / 2.0;
        assert_eq!(eval_ishigami(&[0.0, 0.0, 0.0], 7.0, 0.1).unwrap(), 0.0);
        assert_relative_eq!(eval_ishigami(&[h, 0.0, 0.0], 7.0, 0.1).unwrap(), 1.0);
        assert_relative_eq!(eval_ishigami(&[h, h, 1.0], 7.0, 0.1).unwrap(), 8.1, max_relative = 1e-14);
        assert!(eval_ishigami(&[4.0, 0.0, 0.0], 7.0, 0.1).is_err());
    }

    #[test]
    fn morris_fn_transforms_and_base_value() {
        assert_eq!(morris_w(0, 0.5), 0.0);
        assert_relative_eq!(morris_w(2, 0.5), 2.0 * (0.55 / 0.6 - 0.5), max_relative = 1e-15);
        assert_relative_eq!(morris_w(2, 0.5), 0.833_333_333_333_333_4, max_relative = 1e-14);
        // 1.1x/(x + 0.1) = 0.5 at x = 1/12
        assert!(morris_w(4, 1.0 / 12.0).abs() < 1e-15);

        let c = MorrisFnCoefficients::from_seed(5);
        let mut x = [0.5; MORRIS_FN_INPUTS];
        for i in [2, 4, 6] {
            x[i] = 1.0 / 12.0;
        }
        assert_relative_eq!(eval_morris_fn(&x, &c).unwrap(), c.beta0, epsilon = 1e-12);
    }

    #[test]
    fn morris_fn_coefficients() {
        let c = MorrisFnCoefficients::from_seed(42);
        assert_eq!(c, MorrisFnCoefficients::from_seed(42));
        assert_ne!(c.beta0, MorrisFnCoefficients::from_seed(43).beta0);
        assert!(c.beta1[..10].iter().all(|&b| b == 20.0));
        for i in 0..6 {
            for j in i + 1..6 {
                assert_eq!(c.beta2[i][j], -15.0);
            }
        }
        assert_eq!(c.beta3.len(), 10);
        assert!(c.beta3.iter().all(|&(i, j, l, b)| i < j && j < l && l < 5 && b == -10.0));
        assert_eq!(c.beta4, vec![(0, 1, 2, 3, 5.0)]);
    }

    #[test]
    fn sfs_examples() {
        assert_eq!(eval_sfs(1, &[1.0, 2.0, 3.0]).unwrap(), 6.0);
        assert_eq!(eval_sfs(2, &[1.0, 2.0, 3.0]).unwrap(), 6.0);
        assert_eq!(eval_sfs(3, &[1.0, 2.0, 3.0]).unwrap(), 32.0);
        assert_eq!(eval_sfs(4, &[1.0, 2.0, 3.0]).unwrap(), 32.0);
        assert!(matches!(eval_sfs(5, &[1.0, 2.0, 3.0]), Err(Error::Argument(_))));
        assert!(Sfs::new(0).is_err());
    }

    #[test]
    fn mcfc_nominal_chain() {
        let c = McfcConstants {
            delta_h: -242_000.0,
            ..Default::default()
        };
        let out = mcfc_outputs(&McfcParams::default(), &c).unwrap();
        assert_relative_eq!(out.e0, 1.0421, epsilon = 1e-4);
        assert_relative_eq!(out.e, 1.0030, epsilon = 1e-4);
        assert_relative_eq!(out.u_an, 0.0628, epsilon = 1e-4);
        assert_relative_eq!(out.u_cat, 0.2783, epsilon = 1e-4);
        assert_relative_eq!(out.u_ohm, 0.1674, epsilon = 1e-4);
        assert_relative_eq!(out.power, 1482.0, max_relative = 2e-3);
        assert_relative_eq!(out.eta, 0.394, epsilon = 1e-3);

        let default = mcfc_outputs(&McfcParams::default(), &McfcConstants::default()).unwrap();
        assert_eq!(default.power, out.power);
        assert_relative_eq!(default.eta, out.eta * 242.0 / 247.0, max_relative = 1e-12);
    }

    #[test]
    fn mcfc_ohmic_term_at_reference_temperature() {
        let p = McfcParams {
            t: 923.0,
            ..Default::default()
        };
        let out = mcfc_outputs(&p, &McfcConstants::default()).unwrap();
        assert_eq!(out.u_ohm, 0.5e-4 * p.j);
    }

    #[test]
    fn mcfc_open_circuit() {
        let c = McfcConstants::default();
        let p = McfcParams {
            j: 0.0,
            ..Default::default()
        };
        let out = mcfc_outputs(&p, &c).unwrap();
        assert_eq!(out.power, 0.0);
        assert_eq!(out.eta, c.n_electrons * c.faraday * out.e / (-c.delta_h));
    }

    #[test]
    fn mcfc_domain_errors() {
        let c = McfcConstants::default();
        let p = McfcParams {
            p_o2_cat: 0.0,
            ..Default::default()
        };
        assert!(matches!(mcfc_outputs(&p, &c), Err(Error::Domain { .. })));
        let bad_h = McfcConstants {
            delta_h: 1.0,
            ..Default::default()
        };
        assert!(mcfc_outputs(&McfcParams::default(), &bad_h).is_err());
        // deep overload is allowed to go negative
        let hot = McfcParams {
            j: 20_000.0,
            ..Default::default()
        };
        assert!(mcfc_outputs(&hot, &c).unwrap().power < 0.0);
    }

    #[test]
    fn registry_resolves_every_name() {
        for name in MODEL_NAMES {
            let m = build_model(name, &ModelOptions::default()).unwrap();
            let specs = default_parameters(name, &ModelOptions::default()).unwrap();
            assert_eq!(m.n_inputs(), specs.len(), "{name}");
            let x: Vec<f64> = specs.iter().map(|s| s.nominal).collect();
            assert_eq!(m.evaluate(&x).unwrap().len(), m.n_outputs());
        }
        assert!(matches!(build_model("nope", &ModelOptions::default()), Err(Error::Config(_))));
    }

    #[test]
    fn fixed_current_view_matches_full_model() {
        let full = Mcfc::default();
        let fixed = Mcfc::at_current(McfcConstants::default(), 2500.0);
        let mut x = McfcParams::default().to_vec();
        x[0] = 2500.0;
        assert_eq!(fixed.evaluate(&x[1..]).unwrap(), full.evaluate(&x).unwrap());
        assert_eq!(fixed.n_inputs(), 8);
    }

    proptest! {
        #[test]
        fn sobol_g_nonnegative_and_reflection_invariant(
            x in proptest::collection::vec(0.0f64..=1.0, 8),
            flip in 0usize..8,
        ) {
            let a = SOBOL_G_DEFAULT_A;
            let y = eval_sobol_g(&x, &a).unwrap();
            prop_assert!(y >= 0.0);
            let mut r = x.clone();
            r[flip] = 1.0 - r[flip];
            prop_assert!((eval_sobol_g(&r, &a).unwrap() - y).abs() <= 1e-12 * y.max(1.0));
        }

        #[test]
        fn ishigami_odd_in_x1_when_x2_zero(x1 in -PI..PI, x3 in -PI..PI) {
            let f = |a: f64| eval_ishigami(&[a, 0.0, x3], 7.0, 0.1).unwrap();
            prop_assert!((f(-x1) + f(x1)).abs() < 1e-12);
        }

        #[test]
        fn mcfc_eta_power_ratio_and_monotone_losses(j in 1.0f64..6000.0, t in 850.0f64..950.0) {
            let c = McfcConstants::default();
            let p = McfcParams { j, t, ..Default::default() };
            let out = mcfc_outputs(&p, &c).unwrap();
            let expected = out.power / (j * (-c.delta_h) / (c.n_electrons * c.faraday));
            prop_assert!((out.eta - expected).abs() <= 1e-12 * out.eta.abs().max(1e-3));
            let up = mcfc_outputs(&McfcParams { j: j * 1.01, ..p }, &c).unwrap();
            prop_assert!(up.u_an > out.u_an && up.u_cat > out.u_cat && up.u_ohm > out.u_ohm);
        }
    }
}
