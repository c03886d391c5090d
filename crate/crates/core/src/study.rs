//! Declarative studies: a TOML document naming a model, its parameters and a
//! list of methods, run in order with one artifact per method.
//!
//! ```toml
//! seed = 42
//! output_dir = "results/ishigami"
//!
//! [model]
//! name = "ishigami"
//!
//! [[methods]]
//! kind = "sobol"
//! n = 10000
//! ```
//!
//! Parameters default to the model's usual input distributions. Unknown keys
//! are rejected. Every run writes `resolved_config.toml` (all defaults
//! filled in) and `summary.json` next to the method outputs.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::local_sa::{oat_sensitivity, FdScheme, OatOptions, OatResult};
use crate::mcfc_study::{locate_optimum, optimum_battery, sweep, BatteryOptions, SweepOptions};
use crate::models::{build_model, default_parameters, mcfc_outputs, McfcParams, ModelHandle, ModelOptions};
use crate::morris::{morris_screening, MorrisOptions, MorrisStats};
use crate::problem::{sample_matrix, Distribution, ParameterSpec, RNG_ALGORITHM};
use crate::regression_sa::{regression_sa, RegressionMethod, RegressionSaResult};
use crate::report::{self, emit_plot_data, write_file, Format, PlotInputs};
use crate::sobol::{estimate_sobol, SobolIndices};
use crate::uq::{deterministic_uq, monte_carlo_uq, CovarianceMatrix, UncertaintyResult, UqMethod};

pub const RESOLVED_CONFIG: &str = "resolved_config.toml";
pub const SUMMARY: &str = "summary.json";
pub const PLOT_DIR: &str = "plots";

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub model: ModelConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parameters: Vec<ParameterEntry>,
    pub methods: Vec<MethodConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub name: String,
    #[serde(default)]
    pub options: ModelOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistKind {
    Uniform,
    Normal,
}

/// One `[[parameters]]` entry. Uniform needs `lo`, `hi`; normal needs a
/// centre (`mean` or `nominal`) and exactly one of `sd`, `relative`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterEntry {
    pub name: String,
    pub distribution: DistKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sd: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nominal: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub morris_bounds: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub positive: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl ParameterEntry {
    pub fn to_spec(&self) -> Result<ParameterSpec> {
        let bad = |m: &str| Error::Config(format!("parameter `{}`: {m}", self.name));
        let mut spec = match self.distribution {
            DistKind::Uniform => {
                if self.mean.is_some() || self.sd.is_some() || self.relative.is_some() {
                    return Err(bad("uniform takes lo/hi, not mean/sd/relative"));
                }
                let (Some(lo), Some(hi)) = (self.lo, self.hi) else {
                    return Err(bad("uniform needs lo and hi"));
                };
                let mut s = ParameterSpec::uniform(&self.name, lo, hi);
                if let Some(n) = self.nominal {
                    s = s.with_nominal(n);
                }
                s
            }
            DistKind::Normal => {
                if self.lo.is_some() || self.hi.is_some() {
                    return Err(bad("normal takes mean/sd, not lo/hi"));
                }
                let Some(mean) = self.mean.or(self.nominal) else {
                    return Err(bad("normal needs mean or nominal"));
                };
                let mut s = match (self.sd, self.relative) {
                    (Some(sd), None) => ParameterSpec::normal(&self.name, mean, sd),
                    (None, Some(rel)) => ParameterSpec::normal_relative(&self.name, mean, rel),
                    _ => return Err(bad("normal needs exactly one of sd, relative")),
                };
                if let Some(n) = self.nominal {
                    s = s.with_nominal(n);
                }
                if self.positive {
                    s = s.positive();
                }
                s
            }
        };
        if self.positive && self.distribution == DistKind::Uniform {
            return Err(bad("positivity guard applies to normal parameters only"));
        }
        if let Some([lo, hi]) = self.morris_bounds {
            spec = spec.with_morris_bounds(lo, hi);
        }
        spec.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(spec)
    }

    pub fn from_spec(s: &ParameterSpec) -> Self {
        let mut e = Self {
            name: s.name.clone(),
            distribution: DistKind::Uniform,
            lo: None,
            hi: None,
            mean: None,
            sd: None,
            relative: None,
            nominal: Some(s.nominal),
            morris_bounds: s.morris_bounds.map(|(lo, hi)| [lo, hi]),
            positive: s.positive,
        };
        match s.distribution {
            Distribution::Uniform { lo, hi } => {
                e.lo = Some(lo);
                e.hi = Some(hi);
            }
            Distribution::Normal { mean, sd } => {
                e.distribution = DistKind::Normal;
                e.mean = Some(mean);
                e.sd = Some(sd);
            }
        }
        e
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SensitivitySource {
    #[default]
    Oat,
    Morris,
}

fn d_rel() -> f64 {
    0.01
}
fn d_n_s() -> usize {
    10_000
}
fn d_r() -> usize {
    100
}
fn d_p() -> usize {
    20
}
fn d_j_hi() -> f64 {
    6000.0
}
fn d_steps() -> usize {
    61
}
fn d_override() -> Vec<String> {
    vec!["j".into()]
}

/// One `[[methods]]` entry, selected by `kind`. `label` names the output
/// files and defaults to the kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MethodConfig {
    Oat {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default = "d_rel")]
        rel_perturbation: f64,
        #[serde(default)]
        scheme: FdScheme,
    },
    Src {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default = "d_n_s")]
        n_s: usize,
    },
    Srrc {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default = "d_n_s")]
        n_s: usize,
    },
    Pcc {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default = "d_n_s")]
        n_s: usize,
    },
    Prcc {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default = "d_n_s")]
        n_s: usize,
    },
    Morris {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default = "d_r")]
        trajectories: usize,
        #[serde(default = "d_p")]
        levels: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        step: Option<f64>,
    },
    Sobol {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default = "d_n_s")]
        n: usize,
    },
    McUq {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default = "d_n_s")]
        n_s: usize,
    },
    DetUq {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default)]
        sensitivity: SensitivitySource,
        #[serde(default = "d_rel")]
        rel_perturbation: f64,
        #[serde(default)]
        scheme: FdScheme,
        #[serde(default = "d_r")]
        trajectories: usize,
        #[serde(default = "d_p")]
        levels: usize,
    },
    McfcSweep {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default)]
        j_lo: f64,
        #[serde(default = "d_j_hi")]
        j_hi: f64,
        #[serde(default = "d_steps")]
        steps: usize,
        #[serde(default = "d_n_s")]
        n_s: usize,
    },
    McfcBattery {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        /// Operating point; located from the nominal power curve when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        j_star: Option<f64>,
        #[serde(default = "d_n_s")]
        n_s: usize,
        #[serde(default = "d_r")]
        trajectories: usize,
        #[serde(default = "d_p")]
        levels: usize,
        #[serde(default = "d_n_s")]
        sobol_n: usize,
        #[serde(default = "d_rel")]
        rel_perturbation: f64,
        #[serde(default = "d_override")]
        mu_override: Vec<String>,
    },
}

impl MethodConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            MethodConfig::Oat { .. } => "oat",
            MethodConfig::Src { .. } => "src",
            MethodConfig::Srrc { .. } => "srrc",
            MethodConfig::Pcc { .. } => "pcc",
            MethodConfig::Prcc { .. } => "prcc",
            MethodConfig::Morris { .. } => "morris",
            MethodConfig::Sobol { .. } => "sobol",
            MethodConfig::McUq { .. } => "mc_uq",
            MethodConfig::DetUq { .. } => "det_uq",
            MethodConfig::McfcSweep { .. } => "mcfc_sweep",
            MethodConfig::McfcBattery { .. } => "mcfc_battery",
        }
    }

    fn label_slot(&mut self) -> &mut Option<String> {
        match self {
            MethodConfig::Oat { label, .. }
            | MethodConfig::Src { label, .. }
            | MethodConfig::Srrc { label, .. }
            | MethodConfig::Pcc { label, .. }
            | MethodConfig::Prcc { label, .. }
            | MethodConfig::Morris { label, .. }
            | MethodConfig::Sobol { label, .. }
            | MethodConfig::McUq { label, .. }
            | MethodConfig::DetUq { label, .. }
            | MethodConfig::McfcSweep { label, .. }
            | MethodConfig::McfcBattery { label, .. } => label,
        }
    }

    pub fn label(&self) -> String {
        self.clone().label_slot().clone().unwrap_or_else(|| self.kind().to_string())
    }

    fn check(&self) -> std::result::Result<(), String> {
        let at_least = |what: &str, v: usize, min: usize| {
            if v < min {
                Err(format!("{what} must be >= {min}, got {v}"))
            } else {
                Ok(())
            }
        };
        let positive = |what: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(format!("{what} must be > 0, got {v}"))
            }
        };
        match self {
            MethodConfig::Oat { rel_perturbation, .. } => positive("rel_perturbation", *rel_perturbation),
            MethodConfig::Src { n_s, .. }
            | MethodConfig::Srrc { n_s, .. }
            | MethodConfig::Pcc { n_s, .. }
            | MethodConfig::Prcc { n_s, .. }
            | MethodConfig::McUq { n_s, .. } => at_least("n_s", *n_s, 2),
            MethodConfig::Morris { trajectories, levels, step, .. } => {
                at_least("trajectories", *trajectories, 2)?;
                at_least("levels", *levels, 2)?;
                match step {
                    Some(s) if !(*s > 0.0 && *s <= 1.0) => Err(format!("step must be in (0, 1], got {s}")),
                    _ => Ok(()),
                }
            }
            MethodConfig::Sobol { n, .. } => at_least("n", *n, crate::sobol::MIN_SAMPLES),
            MethodConfig::DetUq {
                rel_perturbation,
                trajectories,
                levels,
                ..
            } => {
                positive("rel_perturbation", *rel_perturbation)?;
                at_least("trajectories", *trajectories, 2)?;
                at_least("levels", *levels, 2)
            }
            MethodConfig::McfcSweep { j_lo, j_hi, steps, n_s, .. } => {
                if !(*j_lo >= 0.0 && j_hi > j_lo) {
                    return Err(format!("need 0 <= j_lo < j_hi, got [{j_lo}, {j_hi}]"));
                }
                at_least("steps", *steps, 2)?;
                at_least("n_s", *n_s, 2)
            }
            MethodConfig::McfcBattery {
                j_star,
                n_s,
                trajectories,
                levels,
                sobol_n,
                rel_perturbation,
                ..
            } => {
                if let Some(j) = j_star {
                    positive("j_star", *j)?;
                }
                at_least("n_s", *n_s, 2)?;
                at_least("trajectories", *trajectories, 2)?;
                at_least("levels", *levels, 2)?;
                at_least("sobol_n", *sobol_n, crate::sobol::MIN_SAMPLES)?;
                positive("rel_perturbation", *rel_perturbation)
            }
        }
    }

    fn needs_mcfc(&self) -> bool {
        matches!(self, MethodConfig::McfcSweep { .. } | MethodConfig::McfcBattery { .. })
    }
}

impl StudyConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("cannot serialize config: {e}")))
    }
}

/// A validated study: model built, parameters resolved, defaults filled in.
pub struct ResolvedStudy {
    pub config: StudyConfig,
    pub model: ModelHandle,
    pub specs: Vec<ParameterSpec>,
}

impl std::fmt::Debug for ResolvedStudy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ResolvedStudy")
            .field("config", &self.config)
            .field("model", &self.model.name())
            .finish()
    }
}

// 1-based line of the `k`-th occurrence of `header` in the source
fn anchor(source: Option<&str>, header: &str, k: usize) -> String {
    source
        .and_then(|s| {
            s.lines()
                .enumerate()
                .filter(|(_, l)| l.trim_start().starts_with(header))
                .nth(k)
                .map(|(i, _)| format!("line {}: ", i + 1))
        })
        .unwrap_or_default()
}

/// Checks a config against the model registry and fills every default.
/// `source` is the original text, used only to point errors at lines.
pub fn resolve(config: &StudyConfig, source: Option<&str>) -> Result<ResolvedStudy> {
    let cfg_err = |e: Error| match e {
        Error::Config(m) => Error::Config(m),
        other => Error::Config(other.to_string()),
    };
    let model = build_model(&config.model.name, &config.model.options)
        .map_err(|e| Error::Config(format!("{}[model] {}", anchor(source, "[model]", 0), cfg_err(e))))?;
    let expected = model.input_names();

    let specs = if config.parameters.is_empty() {
        default_parameters(&config.model.name, &config.model.options).map_err(cfg_err)?
    } else {
        let specs = config
            .parameters
            .iter()
            .enumerate()
            .map(|(k, p)| {
                p.to_spec()
                    .map_err(|e| Error::Config(format!("{}{}", anchor(source, "[[parameters]]", k), cfg_err(e))))
            })
            .collect::<Result<Vec<_>>>()?;
        let names: Vec<String> = specs.iter().map(|s| s.name.clone()).collect();
        if names != expected {
            return Err(Error::Config(format!(
                "{}parameters {:?} do not match the inputs of `{}`: {:?}",
                anchor(source, "[[parameters]]", 0),
                names,
                config.model.name,
                expected
            )));
        }
        specs
    };

    if config.methods.is_empty() {
        return Err(Error::Config("no [[methods]] given".into()));
    }
    let mut labels = HashSet::new();
    let mut methods = Vec::with_capacity(config.methods.len());
    for (k, m) in config.methods.iter().enumerate() {
        let at = anchor(source, "[[methods]]", k);
        m.check().map_err(|e| Error::Config(format!("{at}methods[{k}] ({}): {e}", m.kind())))?;
        if m.needs_mcfc() && !config.model.name.starts_with("mcfc") {
            return Err(Error::Config(format!(
                "{at}methods[{k}] ({}) needs an mcfc model, got `{}`",
                m.kind(),
                config.model.name
            )));
        }
        let label = m.label();
        if label.is_empty() || label.contains(['/', '\\']) || !labels.insert(label.clone()) {
            return Err(Error::Config(format!("{at}methods[{k}]: label `{label}` is empty, a path or a duplicate")));
        }
        let mut filled = m.clone();
        *filled.label_slot() = Some(label);
        methods.push(filled);
    }

    let config = StudyConfig {
        seed: config.seed,
        output_dir: config.output_dir.clone(),
        model: config.model.clone(),
        parameters: specs.iter().map(ParameterEntry::from_spec).collect(),
        methods,
    };
    Ok(ResolvedStudy { config, model, specs })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodReport {
    pub label: String,
    pub kind: String,
    pub ok: bool,
    /// Paths relative to the output directory.
    pub files: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub results: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudySummary {
    pub output_dir: PathBuf,
    pub methods: Vec<MethodReport>,
    pub plots: Vec<String>,
}

impl StudySummary {
    pub fn ok(&self) -> bool {
        self.methods.iter().all(|m| m.ok)
    }

    pub fn failures(&self) -> Vec<&MethodReport> {
        self.methods.iter().filter(|m| !m.ok).collect()
    }
}

#[derive(Default)]
struct PlotStore {
    regression: Vec<Vec<RegressionSaResult>>,
    morris: Option<Vec<MorrisStats>>,
    sobol: Option<Vec<SobolIndices>>,
    sweep: Option<crate::mcfc_study::SweepResult>,
}

struct Ctx<'a> {
    study: &'a ResolvedStudy,
    dir: &'a Path,
    format: Format,
    outputs: Vec<String>,
    params: Vec<String>,
}

impl Ctx<'_> {
    fn rel(&self, p: &Path) -> String {
        p.strip_prefix(self.dir).unwrap_or(p).to_string_lossy().replace('\\', "/")
    }

    fn table(&self, t: &report::Table, stem: &str, files: &mut Vec<String>) -> Result<()> {
        let p = t.write(self.dir, stem, self.format)?;
        files.push(self.rel(&p));
        Ok(())
    }

    fn raw_file(&self, name: &str, contents: &str, files: &mut Vec<String>) -> Result<()> {
        let p = self.dir.join(name);
        write_file(&p, contents)?;
        files.push(self.rel(&p));
        Ok(())
    }

    fn x0(&self) -> Vec<f64> {
        self.study.specs.iter().map(|s| s.nominal).collect()
    }

    fn oat(&self, rel: f64, scheme: FdScheme) -> Result<Vec<OatResult>> {
        oat_sensitivity(
            &self.study.model,
            &self.x0(),
            &OatOptions {
                rel_perturbation: rel,
                scheme,
            },
        )
    }
}

fn sweep_summary(s: &crate::mcfc_study::SweepResult) -> Value {
    json!({
        "j_star": s.j_star,
        "P_star": s.p_star,
        "eta_star": s.eta_star,
        "uq_at_j_star": { "P": report::uq_record(&s.star_uq[0]), "eta": report::uq_record(&s.star_uq[1]) },
    })
}

fn run_method(ctx: &Ctx, m: &MethodConfig, plots: &mut PlotStore, files: &mut Vec<String>) -> Result<Value> {
    let study = ctx.study;
    let seed = study.config.seed;
    let model = &study.model;
    let specs = &study.specs;
    let label = m.label();
    let regression = |method: RegressionMethod, n_s: usize| -> Result<Vec<RegressionSaResult>> {
        let x = sample_matrix(specs, n_s, seed)?;
        let ys = crate::models::evaluate_matrix(model, &x)?;
        (0..ctx.outputs.len())
            .map(|k| regression_sa(method, &x, &ys.iter().map(|r| r[k]).collect::<Vec<_>>()))
            .collect()
    };
    let mut results = Value::Null;
    match m {
        MethodConfig::Oat {
            rel_perturbation,
            scheme,
            ..
        } => {
            let r = ctx.oat(*rel_perturbation, *scheme)?;
            ctx.table(&report::oat_table(&ctx.params, &ctx.outputs, &r), &label, files)?;
        }
        MethodConfig::Src { n_s, .. }
        | MethodConfig::Srrc { n_s, .. }
        | MethodConfig::Pcc { n_s, .. }
        | MethodConfig::Prcc { n_s, .. } => {
            let method = match m {
                MethodConfig::Src { .. } => RegressionMethod::Src,
                MethodConfig::Srrc { .. } => RegressionMethod::Srrc,
                MethodConfig::Pcc { .. } => RegressionMethod::Pcc,
                _ => RegressionMethod::Prcc,
            };
            let r = regression(method, *n_s)?;
            ctx.table(&report::regression_table(&ctx.params, &ctx.outputs, &r), &label, files)?;
            plots.regression.push(r);
        }
        MethodConfig::Morris {
            trajectories,
            levels,
            step,
            ..
        } => {
            let opts = MorrisOptions {
                trajectories: *trajectories,
                levels: *levels,
                step: *step,
            };
            let (_, stats) = morris_screening(model, specs, &opts, seed)?;
            ctx.table(&report::morris_table(&ctx.params, &ctx.outputs, &stats), &label, files)?;
            plots.morris = Some(stats);
        }
        MethodConfig::Sobol { n, .. } => {
            let s = estimate_sobol(model, specs, *n, seed)?;
            ctx.table(&report::sobol_table(&ctx.params, &ctx.outputs, &s), &label, files)?;
            plots.sobol = Some(s);
        }
        MethodConfig::McUq { n_s, .. } => {
            let r = monte_carlo_uq(model, specs, *n_s, seed)?;
            ctx.table(&report::uq_table(&ctx.outputs, &r), &label, files)?;
        }
        MethodConfig::DetUq {
            sensitivity,
            rel_perturbation,
            scheme,
            trajectories,
            levels,
            ..
        } => {
            let oat = ctx.oat(*rel_perturbation, *scheme)?;
            let (rows, method) = match sensitivity {
                SensitivitySource::Oat => (oat.iter().map(|r| r.raw.clone()).collect::<Vec<_>>(), UqMethod::DeterministicOat),
                SensitivitySource::Morris => {
                    let opts = MorrisOptions {
                        trajectories: *trajectories,
                        levels: *levels,
                        step: None,
                    };
                    let (_, stats) = morris_screening(model, specs, &opts, seed)?;
                    (stats.into_iter().map(|s| s.mu_star).collect(), UqMethod::DeterministicMorris)
                }
            };
            let cx = CovarianceMatrix::from_specs(specs)?;
            let cy = deterministic_uq(&rows, &cx)?;
            let r: Vec<UncertaintyResult> = (0..ctx.outputs.len())
                .map(|k| UncertaintyResult::deterministic(method, oat[k].y0, cy[k][k]))
                .collect();
            ctx.table(&report::uq_table(&ctx.outputs, &r), &label, files)?;
        }
        MethodConfig::McfcSweep {
            j_lo,
            j_hi,
            steps,
            n_s,
            ..
        } => {
            let opts = SweepOptions {
                j_lo: *j_lo,
                j_hi: *j_hi,
                steps: *steps,
                n_s: *n_s,
            };
            let s = sweep(&opts, seed, &mcfc_constants(study))?;
            let stem = if label == "mcfc_sweep" { "sweep".to_string() } else { label.clone() };
            ctx.table(&report::sweep_table(&s), &stem, files)?;
            results = sweep_summary(&s);
            plots.sweep = Some(s);
        }
        MethodConfig::McfcBattery {
            j_star,
            n_s,
            trajectories,
            levels,
            sobol_n,
            rel_perturbation,
            mu_override,
            ..
        } => {
            let c = mcfc_constants(study);
            let j = match j_star {
                Some(j) => *j,
                None => nominal_optimum(&c)?,
            };
            let opts = BatteryOptions {
                n_s: *n_s,
                trajectories: *trajectories,
                levels: *levels,
                sobol_n: *sobol_n,
                rel_perturbation: *rel_perturbation,
                mu_override: mu_override.clone(),
            };
            let b = optimum_battery(j, &opts, seed, &c)?;
            let prefix = if label == "mcfc_battery" { String::new() } else { format!("{label}_") };
            for (k, r) in b.ranking.iter().enumerate() {
                let stem = if k == 0 {
                    format!("{prefix}ranking")
                } else {
                    format!("{prefix}ranking_{}", b.outputs[k])
                };
                ctx.table(&report::ranking_table(r), &stem, files)?;
            }
            ctx.raw_file(&format!("{prefix}uq_summary.json"), &report::uq_summary_json(&b.outputs, &b.uq), files)?;
            let p = &b.parameters;
            ctx.table(&report::oat_table(p, &b.outputs, &b.oat), &format!("{prefix}battery_oat"), files)?;
            ctx.table(&report::morris_table(p, &b.outputs, &b.morris), &format!("{prefix}battery_morris"), files)?;
            ctx.table(&report::regression_table(p, &b.outputs, &b.srrc), &format!("{prefix}battery_srrc"), files)?;
            ctx.table(&report::regression_table(p, &b.outputs, &b.prcc), &format!("{prefix}battery_prcc"), files)?;
            ctx.table(&report::sobol_table(p, &b.outputs, &b.sobol), &format!("{prefix}battery_sobol"), files)?;
            results = json!({ "j_star": b.j_star });
        }
    }
    Ok(results)
}

fn mcfc_constants(study: &ResolvedStudy) -> crate::models::McfcConstants {
    study.config.model.options.mcfc.unwrap_or_default()
}

/// Maximum-power current density of the nominal cell over 0–6000 A/m².
pub fn nominal_optimum(c: &crate::models::McfcConstants) -> Result<f64> {
    let grid: Vec<f64> = (0..61).map(|i| i as f64 * 100.0).collect();
    let p = grid
        .iter()
        .map(|&j| Ok(mcfc_outputs(&McfcParams { j, ..Default::default() }, c)?.power))
        .collect::<Result<Vec<_>>>()?;
    locate_optimum(&grid, &p, c)
}

/// Runs every method in order. A failing method leaves a `<label>.FAILED`
/// marker and the remaining methods still run; check [`StudySummary::ok`].
/// Errors are returned only for failures outside any method (I/O on the
/// output directory, summary writing).
pub fn run_study(study: &ResolvedStudy, format: Format) -> Result<StudySummary> {
    let dir = study.config.output_dir.clone();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    write_file(&dir.join(RESOLVED_CONFIG), &study.config.to_toml()?)?;

    let ctx = Ctx {
        study,
        dir: &dir,
        format,
        outputs: study.model.output_names(),
        params: study.specs.iter().map(|s| s.name.clone()).collect(),
    };
    let mut plots = PlotStore::default();
    let mut reports = Vec::new();
    for m in &study.config.methods {
        let label = m.label();
        let stale = dir.join(format!("{label}.FAILED"));
        if stale.exists() {
            fs::remove_file(&stale).map_err(|e| Error::io(&stale, e))?;
        }
        let mut files = Vec::new();
        let (ok, error, results) = match run_method(&ctx, m, &mut plots, &mut files) {
            Ok(v) => (true, None, v),
            Err(e) => {
                let msg = e.to_string();
                write_file(&stale, &format!("{msg}\n"))?;
                files.push(ctx.rel(&stale));
                (false, Some(msg), Value::Null)
            }
        };
        reports.push(MethodReport {
            label,
            kind: m.kind().into(),
            ok,
            files,
            error,
            results,
        });
    }

    let plot_dir = dir.join(PLOT_DIR);
    let written = emit_plot_data(
        &plot_dir,
        &PlotInputs {
            parameters: &ctx.params,
            outputs: &ctx.outputs,
            regression: plots.regression.iter().map(Vec::as_slice).collect(),
            morris: plots.morris.as_deref(),
            sobol: plots.sobol.as_deref(),
            sweep: plots.sweep.as_ref(),
        },
    )?;
    let summary = StudySummary {
        output_dir: dir.clone(),
        methods: reports,
        plots: written.iter().map(|p| ctx.rel(p)).collect(),
    };

    let mut doc = Map::new();
    doc.insert("model".into(), Value::from(study.config.model.name.as_str()));
    doc.insert("seed".into(), Value::from(study.config.seed));
    doc.insert("rng".into(), Value::from(RNG_ALGORITHM));
    doc.insert("format".into(), Value::from(format.extension()));
    doc.insert("status".into(), Value::from(if summary.ok() { "ok" } else { "failed" }));
    doc.insert("methods".into(), serde_json::to_value(&summary.methods).expect("json"));
    doc.insert("plots".into(), serde_json::to_value(&summary.plots).expect("json"));
    let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("json");
    text.push('\n');
    write_file(&dir.join(SUMMARY), &text)?;
    Ok(summary)
}
