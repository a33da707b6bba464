//! Fitting `(n₀, γ)` to ranked frequency data.
//!
//! For every `z = e^{-γ}` on a grid, one [`TailTable`] yields the model
//! distribution for all `n₀ ≤ n0_max`; the `n₀` is picked by the convergence
//! rule in [`select_n0`] and the `z` with the smallest resulting error wins.
//! The winning `z` can then be refined on successively finer local grids,
//! which stay inside `[z_min, z_max]`.

mod empirical;
pub(crate) mod grid;
mod metric;

use serde::Serialize;

pub use empirical::{preprocess, preprocess_labeled, EmpiricalDistribution};
pub use metric::{error_metric, ErrorMetric, Euclidean};

use crate::error::{invalid, Error, Result};
use crate::model::{ModelParams, TailTable};
use grid::{linear_grid, minimize_on_grid, Refinement};

/// Search configuration for [`fit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitConfig {
    pub z_min: f64,
    pub z_max: f64,
    pub z_step: f64,
    pub n0_max: usize,
    pub accuracy_n0: f64,
    pub refine_rounds: usize,
    pub refine_shrink: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            z_min: 0.0005,
            z_max: 0.9995,
            z_step: 0.0005,
            n0_max: 200,
            accuracy_n0: 0.0001,
            refine_rounds: 2,
            refine_shrink: 0.02,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.z_min && self.z_min < self.z_max && self.z_max < 1.0) {
            return Err(invalid(format!(
                "z grid must satisfy 0 < z_min < z_max < 1 (got {} .. {})",
                self.z_min, self.z_max
            )));
        }
        if !(self.z_step > 0.0) || !self.z_step.is_finite() {
            return Err(invalid(format!("z_step must be > 0, got {}", self.z_step)));
        }
        if self.n0_max < 1 {
            return Err(invalid("n0_max must be >= 1"));
        }
        if !(self.accuracy_n0 > 0.0) {
            return Err(invalid(format!("accuracy_n0 must be > 0, got {}", self.accuracy_n0)));
        }
        if !(self.refine_shrink > 0.0 && self.refine_shrink < 1.0) {
            return Err(invalid(format!(
                "refine_shrink must lie in (0, 1), got {}",
                self.refine_shrink
            )));
        }
        Ok(())
    }

    /// Base grid `z_min, z_min + z_step, …, z_max`.
    pub fn z_grid(&self) -> Vec<f64> {
        linear_grid(self.z_min, self.z_max, self.z_step)
    }

    pub(crate) fn refinement(&self) -> Refinement {
        Refinement {
            rounds: self.refine_rounds,
            shrink: self.refine_shrink,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZErrorPoint {
    pub z: f64,
    pub n0: usize,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct N0ErrorPoint {
    pub n0: usize,
    pub error: f64,
}

/// Outcome of [`fit`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub params: ModelParams,
    pub error: f64,
    pub fitted: Vec<f64>,
    /// Error at every evaluated `z` (base grid plus refinement points),
    /// sorted by `z`, with the `n₀` chosen there.
    pub error_vs_z: Vec<ZErrorPoint>,
    /// Error against `n₀` at the optimal `z`.
    pub error_vs_n0: Vec<N0ErrorPoint>,
    pub config: FitConfig,
}

/// Picks `n₀` from `errors[i] = Error(n₀ = i+1)`: the largest `n₀` at or below
/// the (first) global minimum whose step `|Error(n₀-1) - Error(n₀)|` exceeds
/// `accuracy`, or 1 if there is none.
pub fn select_n0(errors: &[f64], accuracy: f64) -> usize {
    let Some(argmin) = errors
        .iter()
        .enumerate()
        .fold(None, |acc: Option<(usize, f64)>, (i, &e)| match acc {
            Some((_, best)) if !(e < best) => acc,
            _ => Some((i, e)),
        })
        .map(|(i, _)| i + 1)
    else {
        return 1;
    };
    (2..=argmin)
        .rev()
        .find(|&n0| (errors[n0 - 2] - errors[n0 - 1]).abs() > accuracy)
        .unwrap_or(1)
}

struct Scanner<'a, M: ErrorMetric> {
    d: &'a [f64],
    cfg: &'a FitConfig,
    metric: &'a M,
    kmax: usize,
    errors: Vec<f64>,
    probs: Vec<f64>,
}

impl<'a, M: ErrorMetric> Scanner<'a, M> {
    fn new(d: &'a [f64], cfg: &'a FitConfig, metric: &'a M) -> Self {
        Self {
            d,
            cfg,
            metric,
            kmax: TailTable::default_kmax(d.len(), cfg.n0_max),
            errors: vec![0.0; cfg.n0_max],
            probs: vec![0.0; d.len()],
        }
    }

    /// Selected `n₀` and its exact error at `z`.
    fn at(&mut self, z: f64) -> Result<(f64, usize)> {
        let table = TailTable::from_z(z, self.kmax)?;
        self.at_table(&table)
    }

    fn at_table(&mut self, table: &TailTable) -> Result<(f64, usize)> {
        self.metric.scan_n0(self.d, table, &mut self.errors)?;
        let n0 = select_n0(&self.errors, self.cfg.accuracy_n0);
        table.probabilities_into(n0, &mut self.probs)?;
        Ok((self.metric.error(self.d, &self.probs), n0))
    }
}

/// Optimal `n₀` for one `z`, using a tail table covering `cfg.n0_max`.
pub fn optimal_n0_for_z(
    d: &EmpiricalDistribution,
    z: f64,
    cfg: &FitConfig,
    table: &TailTable,
) -> Result<(usize, f64)> {
    if !(z > 0.0 && z < 1.0) {
        return Err(invalid(format!("z must lie in (0, 1), got {z}")));
    }
    if (table.z() - z).abs() > 1e-15 {
        return Err(invalid("tail table was built for a different z"));
    }
    if table.max_n0(d.m()) < cfg.n0_max {
        return Err(invalid("tail table does not cover n0_max"));
    }
    let mut scanner = Scanner::new(d.values(), cfg, &Euclidean);
    let (error, n0) = scanner.at_table(table)?;
    Ok((n0, error))
}

/// Fits the model to `d` with the Euclidean error.
pub fn fit(d: &EmpiricalDistribution, cfg: &FitConfig) -> Result<FitResult> {
    fit_with_metric(d, cfg, &Euclidean)
}

/// Fits the model to `d` minimising an arbitrary error functional.
pub fn fit_with_metric<M: ErrorMetric>(
    d: &EmpiricalDistribution,
    cfg: &FitConfig,
    metric: &M,
) -> Result<FitResult> {
    cfg.validate()?;
    let m = d.m();
    if m < 2 {
        return Err(Error::DegenerateInput(format!(
            "need at least 2 classes to fit, got {m}"
        )));
    }

    let mut scanner = Scanner::new(d.values(), cfg, metric);
    let mut error_vs_z = Vec::new();
    let best = minimize_on_grid(
        &cfg.z_grid(),
        cfg.z_step,
        cfg.refinement(),
        (cfg.z_min, cfg.z_max),
        |z| scanner.at(z),
        |z, error, &n0| error_vs_z.push(ZErrorPoint { z, n0, error }),
    )?;
    error_vs_z.sort_by(|a, b| a.z.total_cmp(&b.z));

    let z = best.x;
    let n0 = best.extra;
    let table = TailTable::from_z(z, scanner.kmax)?;
    let fitted = table.probabilities(n0, m)?;
    let mut error_vs_n0 = Vec::with_capacity(cfg.n0_max);
    let mut probs = vec![0.0; m];
    for k in 1..=cfg.n0_max {
        table.probabilities_into(k, &mut probs)?;
        error_vs_n0.push(N0ErrorPoint {
            n0: k,
            error: metric.error(d.values(), &probs),
        });
    }

    let at_edge = error_vs_n0
        .iter()
        .min_by(|a, b| a.error.total_cmp(&b.error))
        .is_some_and(|p| p.n0 == cfg.n0_max && cfg.n0_max > 1);
    if at_edge {
        log::warn!(
            "error keeps falling up to n0_max = {}; the n0 range is probably too small",
            cfg.n0_max
        );
    }

    Ok(FitResult {
        params: ModelParams::from_z(n0, z)?,
        error: metric.error(d.values(), &fitted),
        fitted,
        error_vs_z,
        error_vs_n0,
        config: *cfg,
    })
}
