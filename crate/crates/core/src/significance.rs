//! Monte Carlo p-values for a fit error.
//!
//! Samples of `|M|` elements are drawn from the fitted distribution, ranked
//! and compared with it; the p-value is the fraction of samples whose error
//! is at least the observed one. Each trial has its own ChaCha stream derived
//! from `(seed, trial)`, so results do not depend on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fitting::{error_metric, preprocess, EmpiricalDistribution};

pub const DEFAULT_TRIALS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignificanceReport {
    pub observed_error: f64,
    pub trials: usize,
    pub exceed_count: usize,
    pub p_value: f64,
    pub seed: u64,
    pub m_elements: u64,
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::EmptyInput);
    }
    if p.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(invalid("probabilities must be finite and non-negative"));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("probabilities must sum to 1, got {total}")));
    }
    Ok(())
}

/// Multinomial class counts for `n` draws, via successive conditional
/// binomials.
fn multinomial_counts<R: Rng + ?Sized>(p: &[f64], n: u64, rng: &mut R) -> Vec<f64> {
    let mut counts = vec![0.0; p.len()];
    let mut left = n;
    let mut mass = 1.0;
    for (i, &pi) in p.iter().enumerate() {
        if left == 0 {
            break;
        }
        if i + 1 == p.len() {
            counts[i] = left as f64;
            break;
        }
        let q = if mass > 0.0 { (pi / mass).clamp(0.0, 1.0) } else { 1.0 };
        let k = Binomial::new(left, q)
            .expect("probability clamped to [0, 1]")
            .sample(rng);
        counts[i] = k as f64;
        left -= k;
        mass -= pi;
    }
    counts
}

/// Ranked relative frequencies of `m_elements` independent draws from `p`.
pub fn sample_empirical<R: Rng + ?Sized>(
    p: &[f64],
    m_elements: u64,
    rng: &mut R,
) -> Result<EmpiricalDistribution> {
    check_distribution(p)?;
    if m_elements < 1 {
        return Err(invalid("number of elements must be >= 1"));
    }
    let counts = multinomial_counts(p, m_elements, rng);
    Ok(preprocess(&counts, None)?.with_total_elements(Some(m_elements)))
}

/// Generator for one trial: stream `trial` of the ChaCha8 keyed by `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Errors of `trials` samples of `m_elements` draws against `p`.
pub fn simulate_errors(p: &[f64], m_elements: u64, trials: usize, seed: u64) -> Result<Vec<f64>> {
    check_distribution(p)?;
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let sample = sample_empirical(p, m_elements, &mut rng)?;
            error_metric(sample.values(), p)
        })
        .collect()
}

/// Probability of a sampled error at least as large as `Error(d, p)`.
pub fn p_value(
    d: &EmpiricalDistribution,
    p: &[f64],
    trials: usize,
    seed: u64,
) -> Result<SignificanceReport> {
    let m_elements = d.total_elements().ok_or(Error::MissingElementCount)?;
    if p.len() != d.m() {
        return Err(Error::LengthMismatch {
            expected: d.m(),
            found: p.len(),
        });
    }
    if trials < 1 {
        return Err(invalid("trials must be >= 1"));
    }
    let observed_error = error_metric(d.values(), p)?;
    let exceed_count = simulate_errors(p, m_elements, trials, seed)?
        .into_iter()
        .filter(|&e| e >= observed_error)
        .count();
    Ok(SignificanceReport {
        observed_error,
        trials,
        exceed_count,
        p_value: exceed_count as f64 / trials as f64,
        seed,
        m_elements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_class_sample() {
        let mut rng = trial_rng(1, 0);
        let s = sample_empirical(&[1.0], 17, &mut rng).unwrap();
        assert_eq!(s.values(), &[1.0]);
        assert_eq!(s.total_elements(), Some(17));
    }

    #[test]
    fn counts_add_up() {
        let p = [0.5, 0.2, 0.2, 0.1];
        let mut rng = trial_rng(9, 3);
        for n in [1u64, 2, 10, 1000] {
            let c = multinomial_counts(&p, n, &mut rng);
            assert_eq!(c.iter().sum::<f64>(), n as f64);
        }
    }

    #[test]
    fn errors_and_preconditions() {
        let d = preprocess(&[3.0, 1.0], None).unwrap();
        assert_eq!(p_value(&d, &[0.75, 0.25], 10, 0), Err(Error::MissingElementCount));
        let d = d.with_total_elements(Some(4));
        assert!(matches!(p_value(&d, &[1.0], 10, 0), Err(Error::LengthMismatch { .. })));
        assert!(p_value(&d, &[0.75, 0.25], 0, 0).is_err());
        let mut rng = trial_rng(0, 0);
        assert!(sample_empirical(&[0.5, 0.6], 3, &mut rng).is_err());
    }

    #[test]
    fn zero_error_gives_one() {
        let d = preprocess(&[3.0, 1.0], Some(4)).unwrap();
        let r = p_value(&d, &[0.75, 0.25], 50, 5).unwrap();
        assert_eq!(r.observed_error, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.exceed_count, 50);
    }
}
