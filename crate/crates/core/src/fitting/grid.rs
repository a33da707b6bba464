//! One-dimensional exhaustive grid search with optional zoom-in rounds.

use crate::error::Result;

/// Half-width of a refinement window, in steps of the previous grid.
pub const REFINE_HALF_WIDTH: f64 = 20.0;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Refinement {
    pub rounds: usize,
    pub shrink: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Best<T> {
    pub x: f64,
    pub error: f64,
    pub extra: T,
}

/// `lo, lo+step, …` up to `hi`. When `step` is the reciprocal of an integer
/// `N` and `lo` a multiple of it, points are computed as `k / N` so values such
/// as `0.8` on a 0.0005 grid are hit exactly.
pub(crate) fn linear_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    let inv = 1.0 / step;
    let denom = inv.round();
    let first = lo * denom;
    if (inv - denom).abs() < 1e-9 * denom && (first - first.round()).abs() < 1e-6 {
        let first = first.round();
        (0..count).map(|i| (first + i as f64) / denom).collect()
    } else {
        (0..count).map(|i| lo + i as f64 * step).collect()
    }
}

fn improves(error: f64, x: f64, best_error: f64, best_x: f64) -> bool {
    error < best_error || (error == best_error && x < best_x)
}

/// Evaluates `eval` on `base`, then zooms in `refine.rounds` times around the
/// incumbent: each round spans `±REFINE_HALF_WIDTH` previous steps with a step
/// `shrink` times smaller, restricted to the closed interval `bounds`. The
/// incumbent itself is always a point of the next round, so refinement never
/// makes the result worse. Ties go to the smaller `x`.
///
/// `on_eval` sees every evaluation; refinement points that coincide with a
/// coarser grid are skipped rather than evaluated twice.
pub(crate) fn minimize_on_grid<T, F, C>(
    base: &[f64],
    step: f64,
    refine: Refinement,
    bounds: (f64, f64),
    mut eval: F,
    mut on_eval: C,
) -> Result<Best<T>>
where
    T: Clone,
    F: FnMut(f64) -> Result<(f64, T)>,
    C: FnMut(f64, f64, &T),
{
    let mut best: Option<Best<T>> = None;
    let consider = |x: f64, error: f64, extra: T, best: &mut Option<Best<T>>| {
        let error = if error.is_nan() { f64::INFINITY } else { error };
        let better = match best {
            Some(b) => improves(error, x, b.error, b.x),
            None => true,
        };
        if better {
            *best = Some(Best { x, error, extra });
        }
    };

    for &x in base {
        let (error, extra) = eval(x)?;
        on_eval(x, error, &extra);
        consider(x, error, extra, &mut best);
    }

    let mut step = step;
    for _ in 0..refine.rounds {
        let Some(center) = best.as_ref().map(|b| b.x) else {
            break;
        };
        let fine = step * refine.shrink;
        // fine points per previous step; only meaningful when 1/shrink is whole
        let ratio = 1.0 / refine.shrink;
        let per_step = if (ratio - ratio.round()).abs() < 1e-9 {
            ratio.round() as i64
        } else {
            i64::MAX
        };
        let half = (REFINE_HALF_WIDTH / refine.shrink).round() as i64;
        for i in -half..=half {
            if i % per_step == 0 {
                continue;
            }
            let x = center + i as f64 * fine;
            if x < bounds.0 || x > bounds.1 {
                continue;
            }
            let (error, extra) = eval(x)?;
            on_eval(x, error, &extra);
            consider(x, error, extra, &mut best);
        }
        step = fine;
    }

    best.ok_or_else(|| crate::error::invalid("empty search grid"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_grid_points() {
        let g = linear_grid(0.0005, 0.9995, 0.0005);
        assert_eq!(g.len(), 1999);
        assert_eq!(g[0], 0.0005);
        assert_eq!(g[1599], 0.8);
        assert_eq!(*g.last().unwrap(), 0.9995);
        let g = linear_grid(0.05, 5.0, 0.005);
        assert_eq!(g.len(), 991);
        assert_eq!(g[230], 1.2);
        let odd = linear_grid(0.1, 1.0, 0.3);
        assert_eq!(odd.len(), 4);
    }

    #[test]
    fn refinement_converges_and_never_worsens() {
        let f = |x: f64| Ok(((x - 0.123456789).abs(), ()));
        let base = linear_grid(0.0005, 0.9995, 0.0005);
        let coarse = minimize_on_grid(&base, 0.0005, Refinement { rounds: 0, shrink: 0.02 }, (0.0, 1.0), f, |_, _, _| {}).unwrap();
        let fine = minimize_on_grid(&base, 0.0005, Refinement { rounds: 2, shrink: 0.02 }, (0.0, 1.0), f, |_, _, _| {}).unwrap();
        assert!(fine.error <= coarse.error);
        assert!(fine.error < 2e-7);
    }

    #[test]
    fn ties_prefer_smaller_x() {
        let base = [0.1, 0.2, 0.3];
        let best = minimize_on_grid(&base, 0.1, Refinement { rounds: 0, shrink: 0.5 }, (0.0, 1.0), |_| Ok((1.0, ())), |_, _, _| {}).unwrap();
        assert_eq!(best.x, 0.1);
    }
}
