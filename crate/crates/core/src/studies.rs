//! Corpus-level evaluation: random-data ensembles, method comparison tables
//! and correlations between the per-dataset results.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{fit_baseline, BaselineConfig, BaselineMethod};
use crate::error::{invalid, Error, Result};
use crate::fitting::{fit, preprocess, EmpiricalDistribution, FitConfig};
use crate::significance::{p_value, sample_empirical, trial_rng};

/// Sample Pearson correlation coefficient.
pub fn pearson_correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(invalid("correlation needs at least two points"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::ZeroVariance("x"));
    }
    if syy == 0.0 {
        return Err(Error::ZeroVariance("y"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Linear-interpolation quantile of sorted data, `q ∈ [0, 1]`.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    quantile(&s, 0.5)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorStats {
    pub m: usize,
    pub samples: usize,
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub p05: f64,
    pub p25: f64,
    pub p75: f64,
    pub p95: f64,
    pub max: f64,
}

impl ErrorStats {
    fn from_errors(m: usize, errors: &[f64]) -> Self {
        let mut s = errors.to_vec();
        s.sort_by(f64::total_cmp);
        Self {
            m,
            samples: s.len(),
            mean: mean(errors),
            median: quantile(&s, 0.5),
            min: s[0],
            p05: quantile(&s, 0.05),
            p25: quantile(&s, 0.25),
            p75: quantile(&s, 0.75),
            p95: quantile(&s, 0.95),
            max: s[s.len() - 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomStudyConfig {
    pub class_counts: Vec<usize>,
    pub ensembles: usize,
    /// `None`: class weights are the uniform draws themselves. `Some(n)`:
    /// `n` elements are distributed over the classes with those weights.
    pub elements_per_sample: Option<u64>,
    pub seed: u64,
    pub fit: FitConfig,
}

impl Default for RandomStudyConfig {
    fn default() -> Self {
        Self {
            class_counts: (3..=50).collect(),
            ensembles: 500,
            elements_per_sample: None,
            seed: 0,
            fit: FitConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomStudy {
    pub config: RandomStudyConfig,
    pub rows: Vec<ErrorStats>,
}

fn random_sample(m: usize, elements: Option<u64>, seed: u64, stream: u64) -> Result<EmpiricalDistribution> {
    let mut rng = trial_rng(seed, stream);
    let weights: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
    match elements {
        None => preprocess(&weights, None),
        Some(n) => {
            let total: f64 = weights.iter().sum();
            let p: Vec<f64> = weights.iter().map(|w| w / total).collect();
            sample_empirical(&p, n, &mut rng)
        }
    }
}

/// Fits `ensembles` random samples per class count and summarises the errors.
///
/// Sample `e` for class count `m` uses RNG stream `(m << 32) | e`, so every
/// sample is reproducible on its own.
pub fn random_data_study(config: &RandomStudyConfig) -> Result<RandomStudy> {
    config.fit.validate()?;
    if config.ensembles < 1 {
        return Err(invalid("ensembles must be >= 1"));
    }
    if let Some(&m) = config.class_counts.iter().find(|&&m| m < 2) {
        return Err(invalid(format!("class counts must be >= 2, got {m}")));
    }
    if config.elements_per_sample == Some(0) {
        return Err(invalid("elements per sample must be >= 1"));
    }
    let jobs: Vec<(usize, usize)> = config
        .class_counts
        .iter()
        .flat_map(|&m| (0..config.ensembles).map(move |e| (m, e)))
        .collect();
    let errors = jobs
        .par_iter()
        .map(|&(m, e)| {
            let stream = ((m as u64) << 32) | e as u64;
            let d = random_sample(m, config.elements_per_sample, config.seed, stream)?;
            Ok(fit(&d, &config.fit)?.error)
        })
        .collect::<Result<Vec<f64>>>()?;
    let rows = errors
        .chunks(config.ensembles)
        .zip(&config.class_counts)
        .map(|(errs, &m)| ErrorStats::from_errors(m, errs))
        .collect();
    Ok(RandomStudy {
        config: config.clone(),
        rows,
    })
}

/// A dataset entering a comparison.
#[derive(Debug, Clone)]
pub struct StudyDataset {
    pub id: String,
    pub data: EmpiricalDistribution,
    /// Whether the row counts towards summaries and correlations.
    pub in_summary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub id: String,
    pub m: usize,
    pub elements: Option<u64>,
    pub n0: usize,
    pub gamma: f64,
    pub error_main: f64,
    pub error_zipf: f64,
    pub error_exp: f64,
    pub error_zipf_s1: f64,
    pub error_legacy: f64,
    pub p_value: Option<f64>,
    pub in_summary: bool,
}

impl StudyRow {
    /// Errors in [`COLUMNS`] order, main method first.
    pub fn errors(&self) -> [f64; 5] {
        [
            self.error_main,
            self.error_zipf,
            self.error_exp,
            self.error_zipf_s1,
            self.error_legacy,
        ]
    }
}

/// Error columns of a comparison, in [`StudyRow::errors`] order.
pub const COLUMNS: [&str; 5] = ["main", "zipf", "exponential", "zipf_s1", "legacy"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnSummary {
    pub method: &'static str,
    pub average: f64,
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Correlation {
    pub x: &'static str,
    pub y: &'static str,
    /// `None` when one of the columns is constant.
    pub r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub id: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub rows: Vec<StudyRow>,
    pub failures: Vec<Failure>,
    /// Number of rows counted in the summaries.
    pub counted: usize,
    pub summary: Vec<ColumnSummary>,
    pub correlations: Vec<Correlation>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ComparisonOptions {
    pub fit: FitConfig,
    pub baselines: BaselineConfig,
    /// Monte Carlo trials for rows with a known element count; `None` skips
    /// p-values.
    pub trials: Option<usize>,
    pub seed: u64,
}

/// Fits the main model and every baseline to one dataset.
pub fn compare_one(ds: &StudyDataset, opts: &ComparisonOptions) -> Result<StudyRow> {
    let d = &ds.data;
    let main = fit(d, &opts.fit)?;
    let base = |method| fit_baseline(d, method, &opts.baselines).map(|f| f.error);
    let p = match (opts.trials, d.total_elements()) {
        (Some(trials), Some(_)) => Some(p_value(d, &main.fitted, trials, opts.seed)?.p_value),
        _ => None,
    };
    Ok(StudyRow {
        id: ds.id.clone(),
        m: d.m(),
        elements: d.total_elements(),
        n0: main.params.n0(),
        gamma: main.params.gamma(),
        error_main: main.error,
        error_zipf: base(BaselineMethod::Zipf)?,
        error_exp: base(BaselineMethod::Exponential)?,
        error_zipf_s1: base(BaselineMethod::ZipfS1)?,
        error_legacy: base(BaselineMethod::Legacy)?,
        p_value: p,
        in_summary: ds.in_summary,
    })
}

/// Average and median per error column over `rows`.
pub fn summarize(rows: &[StudyRow]) -> Vec<ColumnSummary> {
    if rows.is_empty() {
        return Vec::new();
    }
    COLUMNS
        .iter()
        .enumerate()
        .map(|(i, &method)| {
            let col: Vec<f64> = rows.iter().map(|r| r.errors()[i]).collect();
            ColumnSummary {
                method,
                average: mean(&col),
                median: median(&col),
            }
        })
        .collect()
}

/// Pairwise correlations between `m`, `n0` and the error columns.
pub fn correlations(rows: &[StudyRow]) -> Vec<Correlation> {
    let mut names: Vec<&'static str> = vec!["m", "n0"];
    names.extend(COLUMNS);
    let columns: Vec<Vec<f64>> = (0..names.len())
        .map(|i| {
            rows.iter()
                .map(|r| match i {
                    0 => r.m as f64,
                    1 => r.n0 as f64,
                    _ => r.errors()[i - 2],
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            out.push(Correlation {
                x: names[i],
                y: names[j],
                r: pearson_correlation(&columns[i], &columns[j]).ok(),
            });
        }
    }
    out
}

/// Runs [`compare_one`] on every dataset. Failing datasets are reported in
/// `failures` instead of aborting the table.
pub fn comparison_table(datasets: &[StudyDataset], opts: &ComparisonOptions) -> Result<ComparisonTable> {
    if datasets.is_empty() {
        return Err(Error::EmptyInput);
    }
    let results: Vec<Result<StudyRow>> = datasets.par_iter().map(|ds| compare_one(ds, opts)).collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (ds, res) in datasets.iter().zip(results) {
        match res {
            Ok(row) => rows.push(row),
            Err(e) => failures.push(Failure {
                id: ds.id.clone(),
                error: e.to_string(),
            }),
        }
    }
    let counted: Vec<StudyRow> = rows.iter().filter(|r| r.in_summary).cloned().collect();
    Ok(ComparisonTable {
        counted: counted.len(),
        summary: summarize(&counted),
        correlations: correlations(&counted),
        rows,
        failures,
    })
}
