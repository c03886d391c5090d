//! Tabular reports and plot-ready data files.
//!
//! Numbers are written with Rust's shortest round-trip `f64` formatting
//! (`{:?}`, which switches to exponent form for extreme magnitudes) so
//! that re-running a study reproduces every file byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::local_sa::OatResult;
use crate::mcfc_study::{RankMethod, RankingTable, SweepResult};
use crate::morris::MorrisStats;
use crate::regression_sa::RegressionSaResult;
use crate::sobol::SobolIndices;
use crate::uq::UncertaintyResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        // writes into a Vec cannot fail
        w.write_record(&self.header).expect("csv header");
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render)).expect("csv row");
        }
        String::from_utf8(w.into_inner().expect("csv flush")).expect("utf-8")
    }

    pub fn to_json(&self) -> String {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let m: Map<String, Value> = self.header.iter().cloned().zip(r.iter().map(Cell::json)).collect();
                Value::Object(m)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&records).expect("json");
        s.push('\n');
        s
    }

    /// Whitespace-separated columns with a `#` header, for plotting tools.
    pub fn to_dat(&self) -> String {
        let mut s = format!("# {}\n", self.header.join(" "));
        for r in &self.rows {
            let cells: Vec<String> = r
                .iter()
                .map(|c| match c {
                    Cell::Empty => "nan".to_string(),
                    other => other.render(),
                })
                .collect();
            s.push_str(&cells.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// Writes `<dir>/<stem>.<ext>` and returns the path.
    pub fn write(&self, dir: &Path, stem: &str, format: Format) -> Result<PathBuf> {
        let path = dir.join(format!("{stem}.{}", format.extension()));
        write_file(&path, &self.render(format))?;
        Ok(path)
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

// ── Method tables ──────────────────────────────────────────────────────

pub fn oat_table(params: &[String], outputs: &[String], res: &[OatResult]) -> Table {
    let mut t = Table::new(&["output", "parameter", "raw", "normalized", "absolute_step"]);
    for (out, r) in outputs.iter().zip(res) {
        for (i, p) in params.iter().enumerate() {
            let norm = r.normalized.as_ref().map(|n| n[i]);
            t.push(vec![
                out.as_str().into(),
                p.as_str().into(),
                r.raw[i].into(),
                norm.into(),
                r.absolute_step[i].into(),
            ]);
        }
    }
    t
}

pub fn regression_table(params: &[String], outputs: &[String], res: &[RegressionSaResult]) -> Table {
    let mut t = Table::new(&["output", "parameter", "method", "coefficient", "r_squared", "n_samples"]);
    for (out, r) in outputs.iter().zip(res) {
        for (i, p) in params.iter().enumerate() {
            t.push(vec![
                out.as_str().into(),
                p.as_str().into(),
                r.method.as_str().into(),
                r.coefficients[i].into(),
                r.r_squared.into(),
                r.n_samples.into(),
            ]);
        }
    }
    t
}

pub fn morris_table(params: &[String], outputs: &[String], res: &[MorrisStats]) -> Table {
    let mut t = Table::new(&["output", "parameter", "mu", "mu_star", "sigma", "mu_norm", "mu_star_norm"]);
    for (out, s) in outputs.iter().zip(res) {
        for (i, p) in params.iter().enumerate() {
            t.push(vec![
                out.as_str().into(),
                p.as_str().into(),
                s.mu[i].into(),
                s.mu_star[i].into(),
                s.sigma[i].into(),
                s.mu_norm.as_ref().map(|v| v[i]).into(),
                s.mu_star_norm.as_ref().map(|v| v[i]).into(),
            ]);
        }
    }
    t
}

pub fn sobol_table(params: &[String], outputs: &[String], res: &[SobolIndices]) -> Table {
    let mut t = Table::new(&["output", "parameter", "S", "T", "N", "seed"]);
    for (out, s) in outputs.iter().zip(res) {
        for (i, p) in params.iter().enumerate() {
            t.push(vec![
                out.as_str().into(),
                p.as_str().into(),
                s.first[i].into(),
                s.total[i].into(),
                s.n.into(),
                s.seed.into(),
            ]);
        }
    }
    t
}

pub fn uq_table(outputs: &[String], res: &[UncertaintyResult]) -> Table {
    let mut t = Table::new(&["output", "method", "mean", "variance", "sd", "ci95_lo", "ci95_hi", "n_samples"]);
    for (out, r) in outputs.iter().zip(res) {
        t.push(vec![
            out.as_str().into(),
            r.method.as_str().into(),
            r.mean.into(),
            r.variance.into(),
            r.sd.into(),
            r.ci95.map(|c| c.0).into(),
            r.ci95.map(|c| c.1).into(),
            r.n_samples.map_or(Cell::Empty, Cell::from),
        ]);
    }
    t
}

pub fn sweep_table(s: &SweepResult) -> Table {
    let mut t = Table::new(&["j", "nominal_P", "mean_P", "sd_P", "nominal_eta", "mean_eta", "sd_eta"]);
    for i in 0..s.j_grid.len() {
        t.push(vec![
            s.j_grid[i].into(),
            s.nominal_p[i].into(),
            s.mean_p[i].into(),
            s.sd_p[i].into(),
            s.nominal_eta[i].into(),
            s.mean_eta[i].into(),
            s.sd_eta[i].into(),
        ]);
    }
    t
}

pub fn ranking_table(r: &RankingTable) -> Table {
    let mut t = Table::new(&[
        "parameter",
        "oat",
        "morris",
        "morris_statistic",
        "srrc",
        "prcc",
        "sobol_T",
        "rank_oat",
        "rank_morris",
        "rank_srrc",
        "rank_prcc",
        "rank_sobol",
    ]);
    let ranks: Vec<Vec<usize>> = RankMethod::ALL.iter().map(|m| r.ranks(*m)).collect();
    for (i, row) in r.rows.iter().enumerate() {
        let stat = if row.morris_uses_mu { "mu_norm" } else { "mu_star_norm" };
        let mut cells: Vec<Cell> = vec![
            row.parameter.as_str().into(),
            row.oat.into(),
            row.morris.into(),
            stat.into(),
            row.srrc.into(),
            row.prcc.into(),
            row.sobol.into(),
        ];
        cells.extend(ranks.iter().map(|rk| Cell::from(rk[i])));
        t.push(cells);
    }
    t
}

/// Method-major summary: one object per method with a record per output.
pub fn uq_summary_json(outputs: &[String], triples: &[[UncertaintyResult; 3]]) -> String {
    let methods: Vec<Value> = (0..3)
        .map(|m| {
            let mut obj = Map::new();
            obj.insert("method".into(), Value::from(triples[0][m].method.as_str()));
            for (out, t) in outputs.iter().zip(triples) {
                obj.insert(out.clone(), uq_record(&t[m]));
            }
            Value::Object(obj)
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&methods).expect("json");
    s.push('\n');
    s
}

pub fn uq_record(r: &UncertaintyResult) -> Value {
    let num = |v: f64| serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number);
    let mut m = Map::new();
    m.insert("method".into(), Value::from(r.method.as_str()));
    m.insert("mean".into(), num(r.mean));
    m.insert("variance".into(), num(r.variance));
    m.insert("sd".into(), num(r.sd));
    m.insert(
        "ci95".into(),
        r.ci95.map_or(Value::Null, |(lo, hi)| Value::Array(vec![num(lo), num(hi)])),
    );
    m.insert("n_samples".into(), r.n_samples.map_or(Value::Null, Value::from));
    Value::Object(m)
}

// ── Plot data ──────────────────────────────────────────────────────────

/// Results a study hands to [`emit_plot_data`].
#[derive(Debug, Default)]
pub struct PlotInputs<'a> {
    pub parameters: &'a [String],
    pub outputs: &'a [String],
    pub regression: Vec<&'a [RegressionSaResult]>,
    pub morris: Option<&'a [MorrisStats]>,
    pub sobol: Option<&'a [SobolIndices]>,
    pub sweep: Option<&'a SweepResult>,
}

/// Writes one `.dat` file per figure under `dir` and returns the paths.
pub fn emit_plot_data(dir: &Path, inp: &PlotInputs) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut put = |name: &str, t: Table| -> Result<()> {
        let path = dir.join(name);
        write_file(&path, &t.to_dat())?;
        written.push(path);
        Ok(())
    };

    if !inp.regression.is_empty() {
        let mut t = Table::new(&["output", "parameter", "method", "coefficient"]);
        for res in &inp.regression {
            for (out, r) in inp.outputs.iter().zip(res.iter()) {
                for (i, p) in inp.parameters.iter().enumerate() {
                    t.push(vec![
                        out.as_str().into(),
                        p.as_str().into(),
                        r.method.as_str().into(),
                        r.coefficients[i].into(),
                    ]);
                }
            }
        }
        put("regression_bars.dat", t)?;
    }
    if let Some(ms) = inp.morris {
        let mut t = Table::new(&["output", "parameter", "mu_star", "sigma", "lower", "upper"]);
        for (out, s) in inp.outputs.iter().zip(ms) {
            for (i, p) in inp.parameters.iter().enumerate() {
                t.push(vec![
                    out.as_str().into(),
                    p.as_str().into(),
                    s.mu_star[i].into(),
                    s.sigma[i].into(),
                    (s.mu_star[i] - s.sigma[i]).into(),
                    (s.mu_star[i] + s.sigma[i]).into(),
                ]);
            }
        }
        put("morris_bars.dat", t)?;
    }
    if let Some(ss) = inp.sobol {
        let mut t = Table::new(&["output", "parameter", "index", "value"]);
        for (out, s) in inp.outputs.iter().zip(ss) {
            for (i, p) in inp.parameters.iter().enumerate() {
                t.push(vec![out.as_str().into(), p.as_str().into(), "S".into(), s.first[i].into()]);
                t.push(vec![out.as_str().into(), p.as_str().into(), "T".into(), s.total[i].into()]);
            }
        }
        put("sobol_bars.dat", t)?;
    }
    if let Some(s) = inp.sweep {
        let mut t = Table::new(&["j", "nominal_P", "P_lower", "P_upper", "nominal_eta", "eta_lower", "eta_upper"]);
        for i in 0..s.j_grid.len() {
            t.push(vec![
                s.j_grid[i].into(),
                s.nominal_p[i].into(),
                (s.mean_p[i] - s.sd_p[i]).into(),
                (s.mean_p[i] + s.sd_p[i]).into(),
                s.nominal_eta[i].into(),
                (s.mean_eta[i] - s.sd_eta[i]).into(),
                (s.mean_eta[i] + s.sd_eta[i]).into(),
            ]);
        }
        put("sweep_bands.dat", t)?;
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_shortest_round_trip() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![0.1.into(), Cell::Empty, "x,y".into()]);
        t.push(vec![1e-300.into(), 3usize.into(), 1.0.into()]);
        assert_eq!(t.to_csv(), "a,b,c\n0.1,,\"x,y\"\n1e-300,3,1.0\n");
        let back: f64 = "0.30000000000000004".parse().unwrap();
        assert_eq!(Cell::Num(0.1 + 0.2).render().parse::<f64>().unwrap(), back);
    }

    #[test]
    fn json_records_keep_column_order() {
        let mut t = Table::new(&["z", "a"]);
        t.push(vec![1.5.into(), f64::NAN.into()]);
        let v: Value = serde_json::from_str(&t.to_json()).unwrap();
        let obj = v[0].as_object().unwrap();
        assert_eq!(obj.keys().collect::<Vec<_>>(), vec!["z", "a"]);
        assert!(obj["a"].is_null());
    }

    #[test]
    fn plot_data_row_counts() {
        use crate::models::{Ishigami, Sfs};
        use crate::problem::{sample_matrix, ParameterSpec};
        use crate::regression_sa::{pcc, src};
        use crate::sobol::estimate_sobol;
        use std::f64::consts::PI;

        let dir = tempfile::tempdir().unwrap();
        let params: Vec<String> = ["x1", "x2", "x3"].iter().map(|s| s.to_string()).collect();
        let outs = vec!["y".to_string()];

        let specs: Vec<ParameterSpec> = params.iter().map(|n| ParameterSpec::uniform(n.clone(), 0.0, 1.0)).collect();
        let x = sample_matrix(&specs, 500, 1).unwrap();
        let f2 = Sfs::new(2).unwrap();
        let y: Vec<f64> = crate::models::evaluate_matrix(&f2, &x).unwrap().iter().map(|r| r[0]).collect();
        let s = [src(&x, &y).unwrap()];
        let p = [pcc(&x, &y).unwrap()];

        let ish: Vec<ParameterSpec> = params.iter().map(|n| ParameterSpec::uniform(n.clone(), -PI, PI)).collect();
        let sob = estimate_sobol(&Ishigami::default(), &ish, 200, 1).unwrap();

        let files = emit_plot_data(
            dir.path(),
            &PlotInputs {
                parameters: &params,
                outputs: &outs,
                regression: vec![&s, &p],
                sobol: Some(&sob),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(files.len(), 2);
        let lines = |name: &str| fs::read_to_string(dir.path().join(name)).unwrap().lines().count() - 1;
        assert_eq!(lines("regression_bars.dat"), 6);
        assert_eq!(lines("sobol_bars.dat"), 6);
    }
}
