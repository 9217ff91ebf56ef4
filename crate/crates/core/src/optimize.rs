//! Bounded scalar maximization: a uniform grid to bracket the peak, then
//! golden-section refinement of the bracket.

/// Grid spacing used for bracketing.
pub const GRID_STEP: f64 = 1e-3;
/// Final bracket width of the golden-section stage.
pub const GOLDEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarMax {
    pub argmax: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Maximize `f` over `[lo, hi]`. `-inf` values are allowed and simply lose;
/// NaN is treated as `-inf`.
pub fn maximize_scalar<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> ScalarMax {
    maximize_scalar_with(f, lo, hi, GRID_STEP, GOLDEN_TOL)
}

pub fn maximize_scalar_with<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    step: f64,
    tol: f64,
) -> ScalarMax {
    assert!(hi >= lo, "empty interval [{lo}, {hi}]");
    let eval = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let cells = (((hi - lo) / step).ceil() as usize).max(1);
    let mut best = (lo, eval(lo));
    let mut best_i = 0;
    let mut evaluations = 1;
    for i in 1..=cells {
        let x = if i == cells { hi } else { lo + i as f64 * step };
        let v = eval(x);
        evaluations += 1;
        if v > best.1 {
            best = (x, v);
            best_i = i;
        }
    }
    let a0 = if best_i == 0 { lo } else { lo + (best_i - 1) as f64 * step };
    let b0 = (lo + (best_i + 1) as f64 * step).min(hi);
    let (mut a, mut b) = (a0.max(lo), b0);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (eval(c), eval(d));
    evaluations += 2;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
        }
        evaluations += 1;
    }
    let mid = 0.5 * (a + b);
    let fm = eval(mid);
    evaluations += 1;
    // The endpoints of the bracket can beat the interior for boundary maxima.
    for (x, v) in [(mid, fm), (c, fc), (d, fd)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    ScalarMax {
        argmax: best.0,
        value: best.1,
        evaluations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_and_boundary_maxima() {
        let r = maximize_scalar(|x| -(x - 0.3721).powi(2), 0.0, 1.0);
        assert!((r.argmax - 0.3721).abs() < 1e-6);
        assert!(r.value.abs() < 1e-12);

        let r = maximize_scalar(|x| x, 0.0, 1.0);
        assert_eq!(r.argmax, 1.0);
        let r = maximize_scalar(|x| -x, 0.0, 1.0);
        assert_eq!(r.argmax, 0.0);
    }

    #[test]
    fn tolerates_infinite_values() {
        let r = maximize_scalar(
            |x| if x < 0.5 { f64::NEG_INFINITY } else { -(x - 0.75).abs() },
            0.0,
            1.0,
        );
        assert!((r.argmax - 0.75).abs() < 1e-8);
        let r = maximize_scalar(|_| f64::NAN, 0.0, 1.0);
        assert_eq!(r.value, f64::NEG_INFINITY);
    }
}
