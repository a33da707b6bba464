use std::path::Path;

use classdist::significance::{p_value, sample_empirical, trial_rng};
use classdist::{fit, preprocess, Dataset, FitConfig};

fn data(name: &str) -> Dataset {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    Dataset::load(&path).unwrap()
}

fn ln_choose(n: u64, k: u64) -> f64 {
    let lg = |x: u64| (1..=x).map(|i| (i as f64).ln()).sum::<f64>();
    lg(n) - lg(k) - lg(n - k)
}

#[test]
fn large_samples_converge_to_p() {
    let p = [0.4, 0.25, 0.2, 0.1, 0.05];
    let d = sample_empirical(&p, 1_000_000, &mut trial_rng(11, 0)).unwrap();
    for (a, b) in d.values().iter().zip(&p) {
        assert!((a - b).abs() < 5e-3, "{a} vs {b}");
    }
    assert_eq!(d.total_elements(), Some(1_000_000));
}

#[test]
fn ranked_samples_carry_order_statistics_bias() {
    // Two equiprobable classes: E[max(K, n-K)] / n from the exact binomial law.
    let n = 20u64;
    let exact: f64 = (0..=n)
        .map(|k| {
            let w = (ln_choose(n, k) - n as f64 * 2f64.ln()).exp();
            w * k.max(n - k) as f64 / n as f64
        })
        .sum();
    let trials = 20_000;
    let mean = (0..trials)
        .map(|t| sample_empirical(&[0.5, 0.5], n, &mut trial_rng(3, t)).unwrap().values()[0])
        .sum::<f64>()
        / trials as f64;
    assert!(exact > 0.55);
    assert!((mean - exact).abs() < 3e-3, "{mean} vs {exact}");
}

#[test]
fn p_values_are_roughly_uniform_under_the_null() {
    let p = [0.35, 0.25, 0.2, 0.12, 0.08];
    let reps = 100;
    let mut ps: Vec<f64> = (0..reps)
        .map(|r| {
            let sample = sample_empirical(&p, 1000, &mut trial_rng(1_000 + r, 0)).unwrap();
            p_value(&sample, &p, 400, r).unwrap().p_value
        })
        .collect();
    ps.sort_by(f64::total_cmp);
    let ks = ps
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let lo = i as f64 / reps as f64;
            let hi = (i + 1) as f64 / reps as f64;
            (x - lo).abs().max((hi - x).abs())
        })
        .fold(0.0, f64::max);
    assert!(ks < 0.2, "KS statistic {ks}");
}

#[test]
fn english_letters_fit() {
    let d = data("letter_frequency_en.csv").distribution().unwrap();
    let f = fit(&d, &FitConfig::default()).unwrap();
    assert_eq!(f.fitted.len(), 26);
    assert!((f.error - 0.033).abs() < 0.005, "error {}", f.error);
}

#[test]
fn scaling_counts_does_not_change_the_fit() {
    let ds = data("letter_frequency_de.csv");
    let cfg = FitConfig { refine_rounds: 0, ..FitConfig::default() };
    let a = fit(&ds.distribution().unwrap(), &cfg).unwrap();
    let scaled: Vec<f64> = ds.counts.iter().map(|c| c * 37.0).collect();
    let b = fit(&preprocess(&scaled, None).unwrap(), &cfg).unwrap();
    assert_eq!(a.params.n0(), b.params.n0());
    assert_eq!(a.params.z(), b.params.z());
    assert!((a.error - b.error).abs() < 1e-12);
}
