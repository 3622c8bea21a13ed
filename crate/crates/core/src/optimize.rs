//! One-dimensional search helpers.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`.
/// Returns `(x, f(x))` for the best point visited.
pub fn golden_section_min(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Bisection on a predicate that holds at `lo` and fails at `hi`. Returns the
/// final bracket `(last_true, first_false)` with width at most `tol`.
pub fn bisect_boundary(
    mut holds: impl FnMut(f64) -> bool,
    lo: f64,
    hi: f64,
    tol: f64,
) -> (f64, f64) {
    let (mut t, mut f) = (lo, hi);
    while (f - t).abs() > tol {
        let mid = 0.5 * (t + f);
        if holds(mid) {
            t = mid;
        } else {
            f = mid;
        }
    }
    (t, f)
}

/// `n` evenly spaced points on `[a, b]`, endpoints included.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    b
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, fx) = golden_section_min(|x| (x - 0.3).powi(2) + 1.0, 0.0, 1.0, 1e-8);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bisect_finds_square_root() {
        let (t, f) = bisect_boundary(|x| x * x < 2.0, 0.0, 2.0, 1e-10);
        assert!(t * t < 2.0 && f * f >= 2.0);
        assert!((t - std::f64::consts::SQRT_2).abs() < 1e-9);
        // reversed bracket
        let (t, _) = bisect_boundary(|x| x > 0.25, 1.0, 0.0, 1e-10);
        assert!((t - 0.25).abs() < 1e-9);
    }

    #[test]
    fn linspace_hits_endpoints() {
        let g = linspace(0.0, 1.0, 11);
        assert_eq!(g.len(), 11);
        assert_eq!(g[10], 1.0);
        assert!((g[3] - 0.3).abs() < 1e-15);
    }
}
