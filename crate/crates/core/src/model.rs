//! The classification-feature distribution.
//!
//! For parameters `(n₀, γ)` with `z = e^{-γ}` the class-count weights are
//! `W_N = z^N / (N Z)` for `N ≥ n₀`, and the probability of the `n`-th most
//! frequent class is
//!
//! ```text
//! 𝒫_n ∝ Σ_{k ≥ n+n₀-1} z^k / k²  =  z^{n+n₀-1} Φ(z, 2, n+n₀-1)
//! ```
//!
//! Everything here is evaluated in the scaled form `z^{n-1} Φ(z, 2, n+n₀-1)`
//! (the tail sums divided by `z^{n₀}`), which keeps small `z` and large `n₀`
//! out of the subnormal range. The `Φ(z, 2, j)` values come from one Lerch
//! evaluation at the largest index followed by the exact backward recursion
//! `Φ(z,2,j) = 1/j² + z Φ(z,2,j+1)`.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::roots::{brent, BrentOptions};
use crate::special::{alpha_from_tau, lerch_phi_precise, tau};

/// Lower end of the γ bracket used when inverting `N̄(γ)`.
pub const GAMMA_MIN: f64 = 1e-9;
/// Upper end of the γ bracket used when inverting `N̄(γ)`.
pub const GAMMA_MAX: f64 = 50.0;

/// Model parameters: minimal class `n₀` and Lagrange parameter `γ`, with the
/// derived `z = e^{-γ}` and average number of classes `N̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    n0: usize,
    gamma: f64,
    z: f64,
    nbar: f64,
    #[serde(skip)]
    tau: f64,
}

impl ModelParams {
    pub fn new(n0: usize, gamma: f64) -> Result<Self> {
        let tau = tau(n0, gamma)?;
        let z = (-gamma).exp();
        Ok(Self {
            n0,
            gamma,
            z,
            nbar: 1.0 / (-(-gamma).exp_m1() * tau),
            tau,
        })
    }

    /// Parameters from the optimisation variable `z ∈ (0, 1)`.
    pub fn from_z(n0: usize, z: f64) -> Result<Self> {
        if !(z > 0.0 && z < 1.0) {
            return Err(invalid(format!("z must lie in (0, 1), got {z}")));
        }
        let mut p = Self::new(n0, -z.ln())?;
        p.z = z;
        Ok(p)
    }

    pub fn from_nbar(n0: usize, nbar: f64) -> Result<Self> {
        Self::new(n0, gamma_from_nbar(n0, nbar)?)
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    /// `τ(n₀, γ) = e^{γn₀} Z`.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Partition value `Z = e^{-γn₀} τ`. Underflows to zero for `γn₀ ≳ 745`.
    pub fn partition(&self) -> f64 {
        (-self.gamma * self.n0 as f64).exp() * self.tau
    }

    pub fn alpha(&self) -> Result<f64> {
        alpha_from_tau(self.n0, self.gamma, self.tau)
    }
}

/// Probability `W_N` that a classification has `N` classes.
pub fn class_weight(n: usize, params: &ModelParams) -> f64 {
    if n < params.n0 {
        return 0.0;
    }
    // e^{-γN}/(N Z) = z^{N-n₀} / (N τ)
    (-params.gamma * (n - params.n0) as f64).exp() / (n as f64 * params.tau)
}

/// Average number of classes `N̄ = 1 / ((1 - e^{-γ}) τ(n₀, γ))`.
pub fn nbar_from_gamma(n0: usize, gamma: f64) -> Result<f64> {
    let t = tau(n0, gamma)?;
    Ok(1.0 / (-(-gamma).exp_m1() * t))
}

/// Inverts [`nbar_from_gamma`] by bracketed root search over `γ ∈ [1e-9, 50]`.
///
/// `N̄(γ)` decreases strictly from `+∞` to `n₀`, so a root exists for every
/// `N̄ > n₀` inside the bracket. `N̄ = n₀` would need `γ = ∞`.
pub fn gamma_from_nbar(n0: usize, nbar: f64) -> Result<f64> {
    if n0 < 1 {
        return Err(invalid("n0 must be >= 1"));
    }
    if !nbar.is_finite() {
        return Err(invalid(format!("nbar must be finite, got {nbar}")));
    }
    let n0f = n0 as f64;
    if nbar < n0f {
        return Err(invalid(format!("nbar = {nbar} is below n0 = {n0}")));
    }
    if nbar == n0f {
        return Err(Error::DegenerateCase(format!(
            "nbar = n0 = {n0} requires gamma -> infinity"
        )));
    }

    let objective = |log_gamma: f64| {
        nbar_from_gamma(n0, log_gamma.exp()).map_or(f64::NAN, |v| v - nbar)
    };
    let (lo, hi) = (GAMMA_MIN.ln(), GAMMA_MAX.ln());
    if objective(hi) >= 0.0 {
        return Err(Error::DegenerateCase(format!(
            "nbar = {nbar} is numerically indistinguishable from n0 = {n0}"
        )));
    }
    if objective(lo) <= 0.0 {
        return Err(invalid(format!(
            "nbar = {nbar} exceeds the range reachable with gamma >= {GAMMA_MIN}"
        )));
    }
    let log_gamma = brent(objective, lo, hi, BrentOptions { xtol: 1e-15, max_iter: 300 })?;
    Ok(log_gamma.exp())
}

/// Scaled tails `Φ(z, 2, j)` for `j = first..=last` (index `j - first`).
pub(crate) fn scaled_tails(z: f64, first: usize, last: usize) -> Result<Vec<f64>> {
    let mut out = vec![0.0; last - first + 1];
    let mut phi = lerch_phi_precise(z, 2.0, last as f64)?;
    *out.last_mut().unwrap() = phi;
    for j in (first..last).rev() {
        let jf = j as f64;
        phi = 1.0 / (jf * jf) + z * phi;
        out[j - first] = phi;
    }
    Ok(out)
}

fn normalize(v: &mut [f64]) {
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
}

/// Class probabilities `𝒫_1..𝒫_m` renormalised over the `m` requested classes.
///
/// Costs exactly one Lerch evaluation regardless of `m`.
pub fn class_probabilities(params: &ModelParams, m: usize) -> Result<Vec<f64>> {
    if m < 1 {
        return Err(invalid("class count m must be >= 1"));
    }
    let n0 = params.n0;
    let z = params.z;
    let tails = scaled_tails(z, n0, m + n0 - 1)?;
    let mut zn = 1.0;
    let mut probs: Vec<f64> = tails
        .iter()
        .map(|phi| {
            let v = zn * phi;
            zn *= z;
            v
        })
        .collect();
    normalize(&mut probs);
    Ok(probs)
}

/// Absolute class probability `𝒫_n = z^{n+n₀-1} Φ(z, 2, n+n₀-1) / (α Z)`.
///
/// Summed over all `n ≥ 1` these give exactly one.
pub fn class_probabilities_absolute(params: &ModelParams, n: usize) -> Result<f64> {
    if n < 1 {
        return Err(invalid("class index n must be >= 1"));
    }
    let alpha = params.alpha()?;
    let phi = lerch_phi_precise(params.z, 2.0, (n + params.n0 - 1) as f64)?;
    // z^{n+n₀-1}/Z = z^{n-1}/τ
    Ok((-params.gamma * (n - 1) as f64).exp() * phi / (params.tau * alpha))
}

/// Cached scaled tail sums for one `γ`, shared across every `n₀`.
///
/// `scaled[j] = Φ(z, 2, j) = z^{-j} Σ_{k≥j} z^k/k²` for `j = 1..=kmax+1`;
/// entry 0 is unused. Unnormalised probabilities for any `n₀` are
/// `z^{n-1} · scaled[n + n₀ - 1]`.
#[derive(Debug, Clone)]
pub struct TailTable {
    gamma: f64,
    z: f64,
    scaled: Vec<f64>,
    powers: Vec<f64>,
}

/// Builds the tail table for `γ` covering indices up to `kmax`.
pub fn build_tail_table(gamma: f64, kmax: usize) -> Result<TailTable> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(invalid(format!("gamma must be a finite value > 0, got {gamma}")));
    }
    TailTable::with_z((-gamma).exp(), gamma, kmax)
}

impl TailTable {
    /// Table for `z ∈ (0, 1)`; `γ = -ln z`.
    pub fn from_z(z: f64, kmax: usize) -> Result<Self> {
        if !(z > 0.0 && z < 1.0) {
            return Err(invalid(format!("z must lie in (0, 1), got {z}")));
        }
        Self::with_z(z, -z.ln(), kmax)
    }

    fn with_z(z: f64, gamma: f64, kmax: usize) -> Result<Self> {
        if kmax < 2 {
            return Err(invalid("tail table needs kmax >= 2"));
        }
        let mut scaled = scaled_tails(z, 1, kmax + 1)?;
        scaled.insert(0, f64::NAN);
        let mut powers = Vec::with_capacity(kmax);
        let mut zn = 1.0;
        for _ in 0..kmax {
            powers.push(zn);
            zn *= z;
        }
        Ok(Self {
            gamma,
            z,
            scaled,
            powers,
        })
    }

    /// Table size sufficient for `m` classes and every `n₀ ≤ n0_max`, plus a guard entry.
    pub fn default_kmax(m: usize, n0_max: usize) -> usize {
        m + n0_max
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn kmax(&self) -> usize {
        self.scaled.len() - 2
    }

    /// `Φ(z, 2, kmax + 1)`, the single Lerch evaluation behind the table.
    pub fn phi_tail(&self) -> f64 {
        self.scaled[self.scaled.len() - 1]
    }

    /// `Φ(z, 2, j)` for `j = 1..=kmax+1`.
    pub fn scaled_tail(&self, j: usize) -> f64 {
        assert!(j >= 1, "tail index starts at 1");
        self.scaled[j]
    }

    /// Scaled tails as a slice indexed by `j` (entry 0 unused).
    pub fn scaled_tails(&self) -> &[f64] {
        &self.scaled
    }

    /// `z^i` for `i = 0..kmax`.
    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    /// Largest `n₀` the table can serve for `m` classes.
    pub fn max_n0(&self, m: usize) -> usize {
        (self.kmax() + 1).saturating_sub(m)
    }

    /// Normalised `𝒫_1..𝒫_m` for `n₀`, written into `out` (length `m`).
    pub fn probabilities_into(&self, n0: usize, out: &mut [f64]) -> Result<()> {
        let m = out.len();
        if n0 < 1 || m < 1 || n0 > self.max_n0(m) {
            return Err(invalid(format!(
                "n0 = {n0}, m = {m} outside tail table range (kmax = {})",
                self.kmax()
            )));
        }
        let tails = &self.scaled[n0..n0 + m];
        for ((o, &p), &t) in out.iter_mut().zip(&self.powers).zip(tails) {
            *o = p * t;
        }
        normalize(out);
        Ok(())
    }

    pub fn probabilities(&self, n0: usize, m: usize) -> Result<Vec<f64>> {
        let mut out = vec![0.0; m];
        self.probabilities_into(n0, &mut out)?;
        Ok(out)
    }
}
