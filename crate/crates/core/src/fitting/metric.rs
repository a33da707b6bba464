use crate::error::{Error, Result};
use crate::model::TailTable;

/// Root of summed squared differences between two ranked distributions.
pub fn error_metric(d: &[f64], p: &[f64]) -> Result<f64> {
    if d.len() != p.len() {
        return Err(Error::LengthMismatch {
            expected: d.len(),
            found: p.len(),
        });
    }
    Ok(euclidean(d, p))
}

#[inline]
fn euclidean(d: &[f64], p: &[f64]) -> f64 {
    d.iter()
        .zip(p)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Error functional used by the fitters.
///
/// `scan_n0` evaluates the error for every `n₀` served by one tail table;
/// implementations may override it with something faster than rebuilding
/// each probability vector.
pub trait ErrorMetric: Sync {
    fn error(&self, d: &[f64], p: &[f64]) -> f64;

    /// Fills `errors[i]` with the error for `n₀ = i + 1`.
    fn scan_n0(&self, d: &[f64], table: &TailTable, errors: &mut [f64]) -> Result<()> {
        let mut probs = vec![0.0; d.len()];
        for (i, e) in errors.iter_mut().enumerate() {
            table.probabilities_into(i + 1, &mut probs)?;
            *e = self.error(d, &probs);
        }
        Ok(())
    }
}

/// The unweighted Euclidean error.
#[derive(Debug, Clone, Copy, Default)]
pub struct Euclidean;

impl ErrorMetric for Euclidean {
    fn error(&self, d: &[f64], p: &[f64]) -> f64 {
        euclidean(d, p)
    }

    /// Expands `Σ(D - c·u)² = ΣD² - 2cΣDu + c²Σu²` with `c = 1/Σu`, so each
    /// `n₀` costs one pass and no allocation. Absolute accuracy is ~1e-8,
    /// plenty for choosing `n₀`; callers recompute the chosen error exactly.
    fn scan_n0(&self, d: &[f64], table: &TailTable, errors: &mut [f64]) -> Result<()> {
        let m = d.len();
        if errors.len() > table.max_n0(m) {
            return Err(crate::error::invalid("tail table too small for n0 range"));
        }
        let d_sq: f64 = d.iter().map(|x| x * x).sum();
        let powers = &table.powers()[..m];
        let tails = table.scaled_tails();
        for (i, e) in errors.iter_mut().enumerate() {
            let (su, su2, sdu) = window_sums(powers, &tails[i + 1..i + 1 + m], d);
            let c = 1.0 / su;
            *e = (d_sq - 2.0 * c * sdu + c * c * su2).max(0.0).sqrt();
        }
        Ok(())
    }
}

/// `(Σu, Σu², ΣDu)` with `u_j = p_j t_j`, in four independent lanes so the
/// loop vectorises.
#[inline]
fn window_sums(p: &[f64], t: &[f64], d: &[f64]) -> (f64, f64, f64) {
    const L: usize = 4;
    let n = p.len();
    let (p, t, d) = (&p[..n], &t[..n], &d[..n]);
    let mut su = [0.0; L];
    let mut su2 = [0.0; L];
    let mut sdu = [0.0; L];
    let chunks = p.chunks_exact(L).zip(t.chunks_exact(L)).zip(d.chunks_exact(L));
    for ((pc, tc), dc) in chunks {
        for l in 0..L {
            let u = pc[l] * tc[l];
            su[l] += u;
            su2[l] += u * u;
            sdu[l] += dc[l] * u;
        }
    }
    let lanes = |a: [f64; L]| (a[0] + a[2]) + (a[1] + a[3]);
    let (mut a, mut b, mut c) = (lanes(su), lanes(su2), lanes(sdu));
    let split = n - n % L;
    for j in split..n {
        let u = p[j] * t[j];
        a += u;
        b += u * u;
        c += d[j] * u;
    }
    (a, b, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_values() {
        assert_eq!(error_metric(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        let e = error_metric(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((e - 0.5f64.sqrt()).abs() < 1e-15);
        let (a, b) = ([0.5, 0.3, 0.2], [0.6, 0.25, 0.15]);
        assert_eq!(error_metric(&a, &b).unwrap(), error_metric(&b, &a).unwrap());
        assert!(matches!(
            error_metric(&[0.5, 0.5], &[1.0]),
            Err(Error::LengthMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn fast_scan_matches_direct() {
        let d = [0.4, 0.25, 0.15, 0.1, 0.06, 0.04];
        for z in [0.01, 0.3, 0.8, 0.999] {
            let table = TailTable::from_z(z, TailTable::default_kmax(d.len(), 30)).unwrap();
            let mut fast = vec![0.0; 30];
            let mut slow = vec![0.0; 30];
            Euclidean.scan_n0(&d, &table, &mut fast).unwrap();
            struct Plain;
            impl ErrorMetric for Plain {
                fn error(&self, d: &[f64], p: &[f64]) -> f64 {
                    euclidean(d, p)
                }
            }
            Plain.scan_n0(&d, &table, &mut slow).unwrap();
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-7, "z={z}: {a} vs {b}");
            }
        }
    }
}
