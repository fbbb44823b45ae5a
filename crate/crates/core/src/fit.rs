//! Log-log order fitting and Richardson extrapolation for convergence ladders.

use crate::scalar::Scalar;

/// Least-squares slope of `ln y` against `ln x`, negated: the exponent `q` in `y ~ C x^{-q}`.
///
/// Returns NaN with fewer than two usable samples (nonpositive values are skipped).
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| x > 0.0 && y > 0.0 && y.is_finite())
        .map(|(&x, &y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    -sxy / sxx
}

/// Estimates `q` in `f(s) = f_inf + C s^{-q}` from three successive samples `s0 < s1 < s2`.
///
/// Solved by bisection on `q ∈ [0.05, 12]`; `None` when the differences do not
/// decrease monotonically in magnitude with a common sign.
pub fn three_point_order<T: Scalar>(scales: [T; 3], values: [T; 3]) -> Option<T> {
    let d1 = values[0] - values[1];
    let d2 = values[1] - values[2];
    if d1 == T::zero() || d2 == T::zero() || (d1 > T::zero()) != (d2 > T::zero()) {
        return None;
    }
    let target = d1 / d2;
    if !(target > T::one()) {
        return None;
    }
    let ratio = |q: T| {
        let a = scales[0].powf(-q);
        let b = scales[1].powf(-q);
        let c = scales[2].powf(-q);
        (a - b) / (b - c)
    };
    let (mut lo, mut hi) = (T::lit(0.05), T::lit(12.0));
    if (ratio(lo) - target) * (ratio(hi) - target) > T::zero() {
        return None;
    }
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if (ratio(lo) - target) * (ratio(mid) - target) <= T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some((lo + hi) / T::lit(2.0))
}

/// Richardson extrapolation from a coarse and a fine sample with known order `q`.
pub fn richardson<T: Scalar>(coarse: (T, T), fine: (T, T), order: T) -> T {
    let factor = (fine.0 / coarse.0).powf(order);
    fine.1 + (fine.1 - coarse.1) / (factor - T::one())
}
