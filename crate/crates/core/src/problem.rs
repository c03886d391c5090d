//! Input-parameter space, seeded sampling and rank transforms.
//!
//! Every random draw in the crate goes through [`stream_rng`]: a ChaCha20
//! generator keyed by the study seed, with one stream id per consumer so
//! that methods sharing a seed do not share a sample stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Name of the generator behind every sample stream.
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha 0.9, seed_from_u64, per-method stream ids)";

/// Stream ids handed to [`stream_rng`]. Fixed forever: changing one changes every golden output.
pub mod streams {
    pub const SAMPLES: u64 = 0;
    pub const MORRIS_DESIGN: u64 = 1;
    pub const SOBOL: u64 = 2;
    pub const MORRIS_FN_COEFFS: u64 = 3;
}

const MAX_REJECTIONS: usize = 1000;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, sd: f64 },
}

impl Distribution {
    pub fn mean(&self) -> f64 {
        match *self {
            Distribution::Uniform { lo, hi } => 0.5 * (lo + hi),
            Distribution::Normal { mean, .. } => mean,
        }
    }

    pub fn sd(&self) -> f64 {
        match *self {
            Distribution::Uniform { lo, hi } => (hi - lo) / 12f64.sqrt(),
            Distribution::Normal { sd, .. } => sd,
        }
    }
}

/// One uncertain model input.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSpec {
    pub name: String,
    pub distribution: Distribution,
    /// Nominal value in the parameter's physical units.
    pub nominal: f64,
    /// Dimensionless fraction, e.g. 0.01 for 1%.
    pub relative_uncertainty: f64,
    pub morris_bounds: Option<(f64, f64)>,
    /// Physical positivity guard: Normal draws `<= 0` are redrawn.
    pub positive: bool,
}

impl ParameterSpec {
    /// Uniform on `[lo, hi]`, nominal at the midpoint.
    pub fn uniform(name: impl Into<String>, lo: f64, hi: f64) -> Self {
        let distribution = Distribution::Uniform { lo, hi };
        let nominal = distribution.mean();
        let relative_uncertainty = if nominal != 0.0 {
            distribution.sd() / nominal.abs()
        } else {
            0.0
        };
        Self {
            name: name.into(),
            distribution,
            nominal,
            relative_uncertainty,
            morris_bounds: None,
            positive: false,
        }
    }

    /// Normal with absolute standard deviation.
    pub fn normal(name: impl Into<String>, mean: f64, sd: f64) -> Self {
        let relative_uncertainty = if mean != 0.0 { sd / mean.abs() } else { 0.0 };
        Self {
            name: name.into(),
            distribution: Distribution::Normal { mean, sd },
            nominal: mean,
            relative_uncertainty,
            morris_bounds: None,
            positive: false,
        }
    }

    /// Normal centred on `nominal` with `sd = relative * |nominal|`.
    pub fn normal_relative(name: impl Into<String>, nominal: f64, relative: f64) -> Self {
        Self {
            name: name.into(),
            distribution: Distribution::Normal {
                mean: nominal,
                sd: relative * nominal.abs(),
            },
            nominal,
            relative_uncertainty: relative,
            morris_bounds: None,
            positive: false,
        }
    }

    pub fn with_morris_bounds(mut self, lo: f64, hi: f64) -> Self {
        self.morris_bounds = Some((lo, hi));
        self
    }

    pub fn with_nominal(mut self, nominal: f64) -> Self {
        self.nominal = nominal;
        self
    }

    pub fn positive(mut self) -> Self {
        self.positive = true;
        self
    }

    pub fn sd(&self) -> f64 {
        self.distribution.sd()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Spec(format!("parameter `{}`: {msg}", self.name)));
        match self.distribution {
            Distribution::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
                    return bad(format!("uniform requires finite lo < hi, got [{lo}, {hi}]"));
                }
            }
            Distribution::Normal { mean, sd } => {
                if !mean.is_finite() || !sd.is_finite() || sd < 0.0 {
                    return bad(format!("normal requires finite mean and sd >= 0, got N({mean}, {sd})"));
                }
                if self.positive && mean <= 0.0 {
                    return bad(format!("positivity guard needs a positive mean, got {mean}"));
                }
            }
        }
        if !self.nominal.is_finite() {
            return bad(format!("nominal value {} is not finite", self.nominal));
        }
        if self.relative_uncertainty < 0.0 {
            return bad(format!("negative relative uncertainty {}", self.relative_uncertainty));
        }
        if let Some((lo, hi)) = self.morris_bounds {
            if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
                return bad(format!("morris bounds require lo < hi, got [{lo}, {hi}]"));
            }
        }
        Ok(())
    }

    /// Screening range: explicit bounds, else the uniform support, else nominal ± 3σ.
    pub fn screening_bounds(&self) -> Result<(f64, f64)> {
        if let Some(b) = self.morris_bounds {
            return Ok(b);
        }
        match self.distribution {
            Distribution::Uniform { lo, hi } => Ok((lo, hi)),
            Distribution::Normal { sd, .. } if sd > 0.0 => {
                Ok((self.nominal - 3.0 * sd, self.nominal + 3.0 * sd))
            }
            Distribution::Normal { .. } => Err(Error::Spec(format!(
                "parameter `{}` has zero sd and no explicit screening bounds",
                self.name
            ))),
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> Result<f64> {
        match self.distribution {
            Distribution::Uniform { lo, hi } => Ok(lo + (hi - lo) * rng.random::<f64>()),
            Distribution::Normal { mean, sd } => {
                let z: f64 = rng.sample(StandardNormal);
                let x = mean + sd * z;
                if self.positive {
                    truncated_resample(self, x, rng)
                } else {
                    Ok(x)
                }
            }
        }
    }
}

/// Keeps a Normal draw if it is strictly positive, otherwise redraws until it is.
pub fn truncated_resample<R: Rng>(spec: &ParameterSpec, draw: f64, rng: &mut R) -> Result<f64> {
    let Distribution::Normal { mean, sd } = spec.distribution else {
        return Err(Error::Argument(format!(
            "truncated resampling applies to normal parameters, `{}` is uniform",
            spec.name
        )));
    };
    if draw > 0.0 {
        return Ok(draw);
    }
    for _ in 0..MAX_REJECTIONS {
        let z: f64 = rng.sample(StandardNormal);
        let x = mean + sd * z;
        if x > 0.0 {
            return Ok(x);
        }
    }
    Err(Error::Sampling(format!(
        "parameter `{}`: {MAX_REJECTIONS} consecutive non-positive draws from N({mean}, {sd})",
        spec.name
    )))
}

pub fn validate_specs(specs: &[ParameterSpec]) -> Result<()> {
    if specs.is_empty() {
        return Err(Error::Spec("no parameters given".into()));
    }
    specs.iter().try_for_each(ParameterSpec::validate)
}

/// Row-major N×n_x table of input samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    values: Vec<f64>,
    columns: Vec<String>,
    seed: u64,
    n_rows: usize,
}

impl SampleMatrix {
    pub fn from_rows(columns: Vec<String>, rows: &[Vec<f64>], seed: u64) -> Result<Self> {
        let n_cols = columns.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n_cols) {
            return Err(Error::Argument(format!(
                "row {i} has {} values, expected {n_cols}",
                r.len()
            )));
        }
        Ok(Self {
            values: rows.iter().flatten().copied().collect(),
            columns,
            seed,
            n_rows: rows.len(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.n_cols();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_cols())
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }
}

/// Draws `n` independent rows from `specs`, row-major, columns in declared order.
pub fn sample_matrix(specs: &[ParameterSpec], n: usize, seed: u64) -> Result<SampleMatrix> {
    let mut rng = stream_rng(seed, streams::SAMPLES);
    let mut m = draw_matrix(specs, n, &mut rng)?;
    m.seed = seed;
    Ok(m)
}

pub(crate) fn draw_matrix<R: Rng>(specs: &[ParameterSpec], n: usize, rng: &mut R) -> Result<SampleMatrix> {
    validate_specs(specs)?;
    if n < 2 {
        return Err(Error::Argument(format!("need at least 2 samples, got {n}")));
    }
    let mut values = Vec::with_capacity(n * specs.len());
    for _ in 0..n {
        for spec in specs {
            values.push(spec.draw(rng)?);
        }
    }
    Ok(SampleMatrix {
        values,
        columns: specs.iter().map(|s| s.name.clone()).collect(),
        seed: 0,
        n_rows: n,
    })
}

/// Ranks 1..n with ties sharing the average of the ranks they span.
pub fn rank_transform(v: &[f64]) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(Error::Data("cannot rank an empty vector".into()));
    }
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::Data(format!("non-finite value {} at index {i}", v[i])));
    }
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && v[order[end]] == v[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = avg;
        }
        start = end;
    }
    Ok(ranks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mean_var(x: &[f64]) -> (f64, f64) {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        (m, x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0))
    }

    #[test]
    fn uniform_samples_stay_in_support() {
        let specs: Vec<_> = (0..3).map(|i| ParameterSpec::uniform(format!("x{i}"), 0.0, 1.0)).collect();
        let m = sample_matrix(&specs, 1000, 7).unwrap();
        assert_eq!(m.n_rows() * m.n_cols(), 3000);
        assert!(m.rows().flatten().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn normal_sample_mean_within_three_standard_errors() {
        let specs = [ParameterSpec::normal("T", 893.0, 8.93)];
        let m = sample_matrix(&specs, 10_000, 11).unwrap();
        let (mean, _) = mean_var(&m.column(0));
        assert!((mean - 893.0).abs() < 0.3, "mean {mean}");
    }

    #[test]
    fn same_seed_same_matrix() {
        let specs = [ParameterSpec::normal("a", 1.0, 0.2), ParameterSpec::uniform("b", -1.0, 2.0)];
        assert_eq!(sample_matrix(&specs, 50, 3).unwrap(), sample_matrix(&specs, 50, 3).unwrap());
        assert_ne!(sample_matrix(&specs, 50, 3).unwrap(), sample_matrix(&specs, 50, 4).unwrap());
    }

    #[test]
    fn large_matrix_moments_and_independence() {
        let specs = [
            ParameterSpec::normal("a", 5.0, 2.0),
            ParameterSpec::uniform("b", -1.0, 3.0),
            ParameterSpec::normal_relative("c", 0.08, 0.05),
        ];
        let n = 100_000;
        let m = sample_matrix(&specs, n, 2024).unwrap();
        let cols: Vec<Vec<f64>> = (0..3).map(|j| m.column(j)).collect();
        for (spec, col) in specs.iter().zip(&cols) {
            let (mean, var) = mean_var(col);
            let sd = spec.sd();
            let se_mean = sd / (n as f64).sqrt();
            assert!((mean - spec.distribution.mean()).abs() < 3.0 * se_mean, "{}: {mean}", spec.name);
            // Var(s^2) ~ sd^4 (kurtosis - 1) / n
            let kurtosis_minus_one = match spec.distribution {
                Distribution::Normal { .. } => 2.0,
                Distribution::Uniform { .. } => 0.8,
            };
            let se_var = (kurtosis_minus_one / n as f64).sqrt() * sd * sd;
            assert!((var - sd * sd).abs() < 3.0 * se_var, "{}: {var}", spec.name);
        }
        for a in 0..3 {
            for b in a + 1..3 {
                let (ma, va) = mean_var(&cols[a]);
                let (mb, vb) = mean_var(&cols[b]);
                let cov = cols[a].iter().zip(&cols[b]).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>()
                    / (n as f64 - 1.0);
                assert!((cov / (va * vb).sqrt()).abs() < 0.02);
            }
        }
    }

    #[test]
    fn invalid_specs_and_sizes_are_rejected() {
        assert!(matches!(
            sample_matrix(&[ParameterSpec::uniform("x", 1.0, 1.0)], 10, 0),
            Err(Error::Spec(_))
        ));
        assert!(matches!(
            sample_matrix(&[ParameterSpec::normal("x", 0.0, -1.0)], 10, 0),
            Err(Error::Spec(_))
        ));
        assert!(matches!(
            sample_matrix(&[ParameterSpec::normal("x", 0.0, 1.0)], 1, 0),
            Err(Error::Argument(_))
        ));
        assert!(matches!(sample_matrix(&[], 10, 0), Err(Error::Spec(_))));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_transform(&[3.2, 1.1, 2.5]).unwrap(), vec![3.0, 1.0, 2.0]);
        assert_eq!(rank_transform(&[1.0, 1.0, 2.0]).unwrap(), vec![1.5, 1.5, 3.0]);
        assert_eq!(
            rank_transform(&[5.0, 4.0, 3.0, 2.0, 1.0]).unwrap(),
            vec![5.0, 4.0, 3.0, 2.0, 1.0]
        );
        assert!(matches!(rank_transform(&[1.0, f64::NAN]), Err(Error::Data(_))));
        assert!(matches!(rank_transform(&[]), Err(Error::Data(_))));
    }

    #[test]
    fn truncated_resample_examples() {
        let mut rng = stream_rng(1, 99);
        let p = ParameterSpec::normal("p", 0.6, 0.03);
        assert_eq!(truncated_resample(&p, 0.58, &mut rng).unwrap(), 0.58);
        assert!(truncated_resample(&p, -0.01, &mut rng).unwrap() > 0.0);
        let t = ParameterSpec::normal("T", 893.0, 8.93);
        assert_eq!(truncated_resample(&t, 893.0 + 5.0 * 8.93, &mut rng).unwrap(), 893.0 + 5.0 * 8.93);
        let absurd = ParameterSpec::normal("bad", -100.0, 1.0);
        assert!(matches!(truncated_resample(&absurd, -100.0, &mut rng), Err(Error::Sampling(_))));
        let u = ParameterSpec::uniform("u", 0.0, 1.0);
        assert!(matches!(truncated_resample(&u, 0.5, &mut rng), Err(Error::Argument(_))));
    }

    #[test]
    fn screening_bounds_default_to_three_sigma() {
        let p = ParameterSpec::normal_relative("T", 893.0, 0.01);
        let (lo, hi) = p.screening_bounds().unwrap();
        assert!((lo - (893.0 - 3.0 * 8.93)).abs() < 1e-9 && (hi - (893.0 + 3.0 * 8.93)).abs() < 1e-9);
        assert_eq!(ParameterSpec::uniform("u", 2.0, 4.0).screening_bounds().unwrap(), (2.0, 4.0));
        assert!(ParameterSpec::normal("z", 1.0, 0.0).screening_bounds().is_err());
    }

    proptest! {
        #[test]
        fn ranks_are_monotone_invariant(v in proptest::collection::vec(-1e3f64..1e3, 1..60)) {
            let r = rank_transform(&v).unwrap();
            let g: Vec<f64> = v.iter().map(|x| (x / 100.0).exp() + 3.0 * x).collect();
            prop_assert_eq!(&r, &rank_transform(&g).unwrap());
            let total: f64 = r.iter().sum();
            let n = v.len() as f64;
            prop_assert!((total - n * (n + 1.0) / 2.0).abs() < 1e-9);
        }

        #[test]
        fn ranks_idempotent_on_permutations(perm in Just((1..=30).map(f64::from).collect::<Vec<_>>()).prop_shuffle()) {
            prop_assert_eq!(rank_transform(&perm).unwrap(), perm);
        }
    }
}
