//! Bracketing root finder (Brent: bisection safeguarded inverse quadratic /
//! secant steps).

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct BrentOptions {
    pub xtol: f64,
    pub max_iter: usize,
}

impl Default for BrentOptions {
    fn default() -> Self {
        Self {
            xtol: 1e-15,
            max_iter: 200,
        }
    }
}

/// Finds `x` in `[lo, hi]` with `f(x) = 0`. `f(lo)` and `f(hi)` must differ in sign.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, opts: BrentOptions) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(invalid(format!(
            "root not bracketed: f({lo}) = {fa}, f({hi}) = {fb}"
        )));
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..opts.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * opts.xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // secant
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                // inverse quadratic interpolation
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::NumericalUnderflow(format!("objective is NaN at {b}")));
        }
    }
    Err(Error::NoConvergence {
        max_terms: opts.max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_simple_roots() {
        let r = brent(|x| x * x - 2.0, 0.0, 2.0, BrentOptions::default()).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        let r = brent(|x| x.sin() - x / 2.0, 1.0, 3.0, BrentOptions::default()).unwrap();
        assert!((r.sin() - r / 2.0).abs() < 1e-14);
        let r = brent(|x| (x - 1.0).powi(3), -5.0, 10.0, BrentOptions::default()).unwrap();
        assert!((r - 1.0).abs() < 1e-5);
    }

    #[test]
    fn rejects_unbracketed() {
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, BrentOptions::default()).is_err());
    }
}
