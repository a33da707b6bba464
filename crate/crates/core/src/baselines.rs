//! One-parameter comparison distributions: Zipf, Zipf with `s = 1`,
//! exponential, and the legacy model with `N₀ = 2`, `n₀ = 1`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::fitting::grid::{linear_grid, minimize_on_grid, Refinement};
use crate::fitting::{error_metric, EmpiricalDistribution, FitConfig};
use crate::model::scaled_tails;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineMethod {
    Zipf,
    ZipfS1,
    Exponential,
    Legacy,
}

impl BaselineMethod {
    pub const ALL: [BaselineMethod; 4] = [
        BaselineMethod::Zipf,
        BaselineMethod::Exponential,
        BaselineMethod::ZipfS1,
        BaselineMethod::Legacy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaselineMethod::Zipf => "zipf",
            BaselineMethod::ZipfS1 => "zipf_s1",
            BaselineMethod::Exponential => "exponential",
            BaselineMethod::Legacy => "legacy",
        }
    }
}

impl fmt::Display for BaselineMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineMethod {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| invalid(format!("unknown baseline method '{s}'")))
    }
}

/// Result of [`fit_baseline`]. `parameter` is `s`, `a` or `γ` depending on
/// the method, and absent for Zipf with `s = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineFit {
    pub method: BaselineMethod,
    pub parameter: Option<f64>,
    pub error: f64,
    pub fitted: Vec<f64>,
}

/// Parameter grids for the baseline searches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BaselineConfig {
    pub zipf_s_min: f64,
    pub zipf_s_max: f64,
    pub zipf_s_step: f64,
    pub exp_a_min: f64,
    pub exp_a_max: f64,
    /// Number of log-spaced points between `exp_a_min` and `exp_a_max`.
    pub exp_points: usize,
    /// `z` grid for the legacy model (shared with the main fit).
    pub z_min: f64,
    pub z_max: f64,
    pub z_step: f64,
    pub refine_rounds: usize,
    pub refine_shrink: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self::from_fit(&FitConfig::default())
    }
}

impl BaselineConfig {
    /// Default baseline grids with the `z` grid and refinement of `cfg`.
    pub fn from_fit(cfg: &FitConfig) -> Self {
        Self {
            zipf_s_min: 0.05,
            zipf_s_max: 5.0,
            zipf_s_step: 0.005,
            exp_a_min: 0.001,
            exp_a_max: 10.0,
            exp_points: 2000,
            z_min: cfg.z_min,
            z_max: cfg.z_max,
            z_step: cfg.z_step,
            refine_rounds: cfg.refine_rounds,
            refine_shrink: cfg.refine_shrink,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.zipf_s_min && self.zipf_s_min < self.zipf_s_max && self.zipf_s_step > 0.0) {
            return Err(invalid("Zipf grid needs 0 < s_min < s_max and step > 0"));
        }
        if !(0.0 < self.exp_a_min && self.exp_a_min < self.exp_a_max && self.exp_points >= 2) {
            return Err(invalid("exponential grid needs 0 < a_min < a_max and >= 2 points"));
        }
        FitConfig {
            z_min: self.z_min,
            z_max: self.z_max,
            z_step: self.z_step,
            refine_rounds: self.refine_rounds,
            refine_shrink: self.refine_shrink,
            ..FitConfig::default()
        }
        .validate()
    }

    fn refinement(&self) -> Refinement {
        Refinement {
            rounds: self.refine_rounds,
            shrink: self.refine_shrink,
        }
    }
}

fn check_m(m: usize) -> Result<()> {
    if m < 1 {
        return Err(invalid("class count m must be >= 1"));
    }
    Ok(())
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v
}

/// Zipf frequencies `n^{-s} / Σ_{k≤m} k^{-s}`.
pub fn zipf_distribution(s: f64, m: usize) -> Result<Vec<f64>> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(invalid(format!("Zipf exponent must be > 0, got {s}")));
    }
    check_m(m)?;
    Ok(normalized((1..=m).map(|n| (n as f64).powf(-s)).collect()))
}

/// Geometric frequencies `∝ e^{-a n}` over `m` classes.
pub fn exponential_distribution(a: f64, m: usize) -> Result<Vec<f64>> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(invalid(format!("exponential rate must be > 0, got {a}")));
    }
    check_m(m)?;
    Ok(normalized((0..m).map(|i| (-a * i as f64).exp()).collect()))
}

/// Legacy model: `P_n ∝ Σ_{k ≥ max(n, 2)} e^{-γk}/k²`, normalised over `m`.
pub fn legacy_probabilities(gamma: f64, m: usize) -> Result<Vec<f64>> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(invalid(format!("gamma must be a finite value > 0, got {gamma}")));
    }
    legacy_from_z((-gamma).exp(), m)
}

fn legacy_from_z(z: f64, m: usize) -> Result<Vec<f64>> {
    check_m(m)?;
    // scaled by z^{-2}: entry n ≥ 2 is z^{n-2} Φ(z, 2, n)
    let tails = scaled_tails(z, 2, m.max(2))?;
    let mut v = Vec::with_capacity(m);
    v.push(tails[0]);
    let mut zn = 1.0;
    for &t in tails.iter().take(m - 1) {
        v.push(zn * t);
        zn *= z;
    }
    Ok(normalized(v))
}

/// Best single-parameter fit of `method` to `d` by grid search.
pub fn fit_baseline(
    d: &EmpiricalDistribution,
    method: BaselineMethod,
    cfg: &BaselineConfig,
) -> Result<BaselineFit> {
    cfg.validate()?;
    let m = d.m();
    let values = d.values();
    let score = |p: Vec<f64>| -> Result<(f64, Vec<f64>)> { Ok((error_metric(values, &p)?, p)) };

    let (parameter, fitted) = match method {
        BaselineMethod::ZipfS1 => (None, zipf_distribution(1.0, m)?),
        BaselineMethod::Zipf => {
            let grid = linear_grid(cfg.zipf_s_min, cfg.zipf_s_max, cfg.zipf_s_step);
            let best = minimize_on_grid(
                &grid,
                cfg.zipf_s_step,
                cfg.refinement(),
                (cfg.zipf_s_min, cfg.zipf_s_max),
                |s| score(zipf_distribution(s, m)?),
                |_, _, _| {},
            )?;
            (Some(best.x), best.extra)
        }
        BaselineMethod::Exponential => {
            // searched in ln a
            let (lo, hi) = (cfg.exp_a_min.ln(), cfg.exp_a_max.ln());
            let step = (hi - lo) / (cfg.exp_points - 1) as f64;
            let grid: Vec<f64> = (0..cfg.exp_points).map(|i| lo + i as f64 * step).collect();
            let best = minimize_on_grid(
                &grid,
                step,
                cfg.refinement(),
                (lo, hi),
                |x| score(exponential_distribution(x.exp(), m)?),
                |_, _, _| {},
            )?;
            (Some(best.x.exp()), best.extra)
        }
        BaselineMethod::Legacy => {
            let grid = linear_grid(cfg.z_min, cfg.z_max, cfg.z_step);
            let best = minimize_on_grid(
                &grid,
                cfg.z_step,
                cfg.refinement(),
                (cfg.z_min, cfg.z_max),
                |z| score(legacy_from_z(z, m)?),
                |_, _, _| {},
            )?;
            (Some(-best.x.ln()), best.extra)
        }
    };

    Ok(BaselineFit {
        method,
        parameter,
        error: error_metric(values, &fitted)?,
        fitted,
    })
}
