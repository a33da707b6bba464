//! Lerch transcendent and the closed forms derived from it.
//!
//! All model formulas reduce to two series in `z = e^{-γ}`:
//!
//! ```text
//! Φ(z, s, a) = Σ_{n≥0} zⁿ / (n + a)^s
//! τ(n₀, γ)   = Φ(e^{-γ}, 1, n₀)
//! Z(n₀, γ)   = e^{-γ n₀} τ(n₀, γ) = Σ_{N≥n₀} e^{-γN} / N
//! ```
//!
//! `τ` and `Z` have finite closed forms. Those forms subtract two nearly equal
//! numbers once `e^{-γ n₀}` gets small, so they fall back to the direct series
//! in that regime.
//!
//! Accuracy degrades as `z → 1` (beyond `z ≈ 0.9995` the series needs
//! hundreds of thousands of terms and the closed forms lose digits to
//! `ln(1 - z)`); values are still returned there.

use crate::error::{invalid, Error, Result};

/// Stopping rule for direct series summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig {
    /// Absolute bound on the truncated tail.
    pub accuracy: f64,
    /// Hard cap on the number of summed terms.
    pub max_terms: usize,
}

impl SeriesConfig {
    pub const DEFAULT_ACCURACY: f64 = 1e-8;
    pub const DEFAULT_MAX_TERMS: usize = 10_000_000;

    pub fn new(accuracy: f64, max_terms: usize) -> Result<Self> {
        if !(accuracy > 0.0) || !accuracy.is_finite() {
            return Err(invalid(format!("series accuracy must be > 0, got {accuracy}")));
        }
        if max_terms == 0 {
            return Err(invalid("max_terms must be >= 1"));
        }
        Ok(Self { accuracy, max_terms })
    }

    /// Tolerance relative to the leading term `1/a^s`, which bounds `Φ` from below.
    pub(crate) fn relative(s: f64, a: f64) -> Self {
        Self {
            accuracy: 1e-17 * a.powf(-s),
            max_terms: 100_000_000,
        }
    }
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            accuracy: Self::DEFAULT_ACCURACY,
            max_terms: Self::DEFAULT_MAX_TERMS,
        }
    }
}

#[inline]
fn inv_pow(x: f64, s: f64) -> f64 {
    if s == 1.0 {
        1.0 / x
    } else if s == 2.0 {
        1.0 / (x * x)
    } else {
        x.powf(-s)
    }
}

/// Lerch transcendent `Φ(z, s, a) = Σ_{n≥0} zⁿ/(n+a)^s` for `0 ≤ z < 1`, `s > 0`, `a > 0`.
///
/// Terms are summed until the geometric bound on the remaining tail,
/// `term · z/(1-z)`, drops below `cfg.accuracy`. Successive terms shrink by at
/// least a factor `z`, so the bound is rigorous.
pub fn lerch_phi(z: f64, s: f64, a: f64, cfg: &SeriesConfig) -> Result<f64> {
    if !(0.0..1.0).contains(&z) {
        return Err(Error::DivergentSeries { z });
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(invalid(format!("Lerch order s must be > 0, got {s}")));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(invalid(format!("Lerch shift a must be > 0, got {a}")));
    }

    let ratio = z / (1.0 - z);
    let mut sum = 0.0;
    let mut zn = 1.0;
    for n in 0..cfg.max_terms {
        let term = zn * inv_pow(n as f64 + a, s);
        sum += term;
        if term * ratio <= cfg.accuracy {
            return Ok(sum);
        }
        zn *= z;
    }
    Err(Error::NoConvergence {
        max_terms: cfg.max_terms,
    })
}

/// `Φ(z, s, a)` summed to ~1e-17 relative accuracy.
pub(crate) fn lerch_phi_precise(z: f64, s: f64, a: f64) -> Result<f64> {
    lerch_phi(z, s, a, &SeriesConfig::relative(s, a))
}

fn check_args(n0: usize, gamma: f64) -> Result<()> {
    if n0 < 1 {
        return Err(invalid("n0 must be >= 1"));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(invalid(format!("gamma must be a finite value > 0, got {gamma}")));
    }
    Ok(())
}

/// Closed form `-ln(1-z) - Σ_{k=1}^{n₀-1} z^k/k`, or `None` when cancellation
/// has eaten too many digits to trust it.
fn partition_closed_form(n0: usize, gamma: f64) -> Option<f64> {
    let z = (-gamma).exp();
    // -ln(1-z), accurate at both ends of (0, 1)
    let log_tail = if z < 0.5 {
        -(-z).ln_1p()
    } else {
        -(-(-gamma).exp_m1()).ln()
    };
    let mut sum = 0.0;
    let mut zk = 1.0;
    for k in 1..n0 {
        zk *= z;
        sum += zk / k as f64;
    }
    let value = log_tail - sum;
    // Relative error is about eps * ln(1/(1-z)) / value.
    if value > 1e-3 * log_tail {
        Some(value)
    } else {
        None
    }
}

/// `τ(n₀, γ) = Φ(e^{-γ}, 1, n₀)`, the rearranged series behind `N̄` and `Z`.
pub fn tau(n0: usize, gamma: f64) -> Result<f64> {
    check_args(n0, gamma)?;
    match partition_closed_form(n0, gamma) {
        Some(z_part) => Ok(z_part * (gamma * n0 as f64).exp()),
        None => lerch_phi_precise((-gamma).exp(), 1.0, n0 as f64),
    }
}

/// Partition value `Z(n₀, γ) = Σ_{N≥n₀} e^{-γN}/N`.
pub fn partition_z(n0: usize, gamma: f64) -> Result<f64> {
    check_args(n0, gamma)?;
    let value = match partition_closed_form(n0, gamma) {
        Some(v) => v,
        None => (-gamma * n0 as f64).exp() * lerch_phi_precise((-gamma).exp(), 1.0, n0 as f64)?,
    };
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::NumericalUnderflow(format!(
            "Z(n0={n0}, gamma={gamma}) underflows"
        )))
    }
}

/// Renormalisation factor `α = 1 - (n₀-1)/Z · e^{-γn₀} · Φ(e^{-γ}, 2, n₀)`
/// restoring unit mass after the first `n₀-1` classes are excluded.
pub fn alpha(n0: usize, gamma: f64, z_part: f64) -> Result<f64> {
    check_args(n0, gamma)?;
    if !(z_part > 0.0) || !z_part.is_finite() {
        return Err(invalid(format!("partition value must be > 0, got {z_part}")));
    }
    if n0 == 1 {
        return Ok(1.0);
    }
    let phi2 = lerch_phi_precise((-gamma).exp(), 2.0, n0 as f64)?;
    let scale = (-gamma * n0 as f64 - z_part.ln()).exp();
    finish_alpha(1.0 - (n0 - 1) as f64 * scale * phi2)
}

/// `α` from `τ` instead of `Z`; avoids the `e^{-γn₀}` factor entirely.
pub(crate) fn alpha_from_tau(n0: usize, gamma: f64, tau: f64) -> Result<f64> {
    if n0 == 1 {
        return Ok(1.0);
    }
    let phi2 = lerch_phi_precise((-gamma).exp(), 2.0, n0 as f64)?;
    finish_alpha(1.0 - (n0 - 1) as f64 * phi2 / tau)
}

fn finish_alpha(value: f64) -> Result<f64> {
    if value > 0.0 {
        Ok(value.min(1.0))
    } else {
        Err(Error::NumericalUnderflow(format!(
            "alpha = {value} is not positive; inconsistent partition value"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    // Plain partial sums, long enough that the tail is far below the tolerances used.
    fn brute_phi(z: f64, s: f64, a: f64, terms: usize) -> f64 {
        (0..terms).map(|n| z.powi(n as i32) / (n as f64 + a).powf(s)).sum()
    }

    fn brute_z(n0: usize, gamma: f64) -> f64 {
        let z = (-gamma).exp();
        // tail bound e^{-γK}/((1-e^{-γ})K) < 1e-10
        let mut k = n0;
        while z.powi(k as i32) / ((1.0 - z) * k as f64) >= 1e-14 {
            k += 1;
        }
        (n0..=k).map(|n| z.powi(n as i32) / n as f64).sum()
    }

    #[test]
    fn phi_at_zero_is_leading_term() {
        let v = lerch_phi(0.0, 2.0, 5.0, &SeriesConfig::default()).unwrap();
        assert_eq!(v, 0.04);
    }

    #[test]
    fn phi_closed_form_and_shift() {
        let cfg = SeriesConfig::default();
        let v = lerch_phi(0.5, 1.0, 1.0, &cfg).unwrap();
        assert_abs_diff_eq!(v, 2.0 * LN_2, epsilon = 1e-8);
        assert_abs_diff_eq!(v, brute_phi(0.5, 1.0, 1.0, 200), epsilon = 1e-8);
        let v2 = lerch_phi(0.5, 1.0, 2.0, &cfg).unwrap();
        // Φ(z,1,1) = z Φ(z,1,2) + 1  =>  Φ(0.5,1,2) = 4 ln 2 - 2
        assert_abs_diff_eq!(v2, 4.0 * LN_2 - 2.0, epsilon = 1e-8);
    }

    #[test]
    fn phi_domain_errors() {
        let cfg = SeriesConfig::default();
        assert!(matches!(lerch_phi(1.0, 1.0, 1.0, &cfg), Err(Error::DivergentSeries { .. })));
        assert!(matches!(lerch_phi(-0.1, 1.0, 1.0, &cfg), Err(Error::DivergentSeries { .. })));
        assert!(matches!(lerch_phi(f64::NAN, 1.0, 1.0, &cfg), Err(Error::DivergentSeries { .. })));
        assert!(matches!(lerch_phi(0.5, 0.0, 1.0, &cfg), Err(Error::InvalidParameter(_))));
        assert!(matches!(lerch_phi(0.5, 1.0, -1.0, &cfg), Err(Error::InvalidParameter(_))));
        let tight = SeriesConfig::new(1e-12, 5).unwrap();
        assert_eq!(
            lerch_phi(0.99, 1.0, 1.0, &tight),
            Err(Error::NoConvergence { max_terms: 5 })
        );
        assert!(SeriesConfig::new(0.0, 10).is_err());
        assert!(SeriesConfig::new(1e-3, 0).is_err());
    }

    #[test]
    fn phi_monotone_in_a_and_z() {
        let cfg = SeriesConfig::default();
        let mut last = f64::INFINITY;
        for a in [0.5, 1.0, 2.0, 5.0, 20.0] {
            let v = lerch_phi(0.7, 1.5, a, &cfg).unwrap();
            assert!(v < last && v > 0.0);
            last = v;
        }
        let mut last = 0.0;
        for z in [0.0, 0.1, 0.4, 0.8, 0.95] {
            let v = lerch_phi(z, 2.0, 3.0, &cfg).unwrap();
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn tau_examples() {
        let t = tau(1, LN_2).unwrap();
        assert_abs_diff_eq!(t, 2.0 * LN_2, epsilon = 1e-12);
        for gamma in [0.05f64, 0.5, 2.0] {
            let literal = -gamma.exp() * (gamma.exp() * (1.0 - (-gamma).exp()).ln() + 1.0);
            assert_abs_diff_eq!(tau(2, gamma).unwrap(), literal, epsilon = 1e-10);
        }
    }

    #[test]
    fn tau_matches_series_including_cancellation_regime() {
        let cfg = SeriesConfig::new(1e-14, 100_000_000).unwrap();
        for n0 in [1usize, 2, 3, 7, 20, 50, 120] {
            for gamma in [0.01f64, 0.3, 1.0, 5.0, 15.0] {
                let direct = lerch_phi((-gamma).exp(), 1.0, n0 as f64, &cfg).unwrap();
                let t = tau(n0, gamma).unwrap();
                assert!(
                    ((t - direct) / direct).abs() < 1e-8,
                    "n0={n0} gamma={gamma}: {t} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn partition_examples() {
        assert_abs_diff_eq!(partition_z(1, LN_2).unwrap(), LN_2, epsilon = 1e-12);
        assert_abs_diff_eq!(partition_z(2, LN_2).unwrap(), LN_2 - 0.5, epsilon = 1e-12);
        for (n0, gamma) in [(1, 0.2), (3, 0.7), (10, 0.05), (4, 3.0)] {
            assert_abs_diff_eq!(partition_z(n0, gamma).unwrap(), brute_z(n0, gamma), epsilon = 1e-8);
            let via_tau = (-gamma * n0 as f64).exp() * tau(n0, gamma).unwrap();
            assert_abs_diff_eq!(partition_z(n0, gamma).unwrap(), via_tau, epsilon = 1e-10);
        }
        assert!(partition_z(0, 1.0).is_err());
        assert!(partition_z(1, 0.0).is_err());
        assert!(matches!(partition_z(400, 5.0), Err(Error::NumericalUnderflow(_))));
    }

    #[test]
    fn alpha_matches_column_sum_definition() {
        // α = 1 - (n0-1) Σ_{k≥n0} W_k / k with W_k = e^{-γk}/(kZ)
        let (n0, gamma) = (3, 0.5);
        let z_part = brute_z(n0, gamma);
        let z = (-gamma).exp();
        let tail: f64 = (n0..20_000).map(|k| z.powi(k as i32) / (k as f64 * k as f64)).sum();
        let oracle = 1.0 - (n0 as f64 - 1.0) * tail / z_part;
        assert_abs_diff_eq!(alpha(n0, gamma, z_part).unwrap(), oracle, epsilon = 1e-8);
        assert_eq!(alpha(1, 0.7, partition_z(1, 0.7).unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn alpha_limits_and_monotonicity() {
        let n0 = 4;
        let mut last = 1.0;
        for gamma in [1e-5f64, 1e-4, 0.01, 0.1, 0.5, 1.0, 3.0, 8.0, 20.0] {
            let a = alpha(n0, gamma, partition_z(n0, gamma).unwrap()).unwrap();
            assert!(a > 0.0 && a <= 1.0);
            assert!(a < last, "alpha not decreasing at gamma={gamma}");
            last = a;
        }
        // 1 - α = (n₀-1) E[1/N] <= (n₀-1) ζ(2) / Z, which vanishes (slowly) as γ -> 0
        for gamma in [1e-3, 1e-5] {
            let z_part = partition_z(n0, gamma).unwrap();
            let a = alpha(n0, gamma, z_part).unwrap();
            let bound = (n0 - 1) as f64 * std::f64::consts::PI.powi(2) / 6.0 / z_part;
            assert!(1.0 - a <= bound, "gamma={gamma}: 1-alpha={} bound={bound}", 1.0 - a);
        }
        assert_abs_diff_eq!(last, 1.0 / n0 as f64, epsilon = 1e-6);
        let t = tau(n0, 2.0).unwrap();
        assert_abs_diff_eq!(
            alpha_from_tau(n0, 2.0, t).unwrap(),
            alpha(n0, 2.0, partition_z(n0, 2.0).unwrap()).unwrap(),
            epsilon = 1e-12
        );
        assert!(matches!(alpha(3, 0.5, 1e-6), Err(Error::NumericalUnderflow(_))));
    }
}
