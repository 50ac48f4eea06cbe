//! Small numerical helpers shared across modules.

#[allow(unused_imports)]
use num_traits::Float;

/// sin(x)/x with sinc(0) = 1.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// (sin x − x cos x)/x², the odd kernel of ∫ u e^{iu} over a symmetric interval.
pub fn g1(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        x / 3.0 - x * x2 / 30.0 + x * x2 * x2 / 840.0
    } else {
        (x.sin() - x * x.cos()) / (x * x)
    }
}

/// Heaviside step with θ(0) = ½.
pub fn heaviside(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// Linear interpolation on a sorted grid, zero outside it.
pub fn interp_linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if n == 0 || x < xs[0] || x > xs[n - 1] {
        return 0.0;
    }
    let k = xs.partition_point(|&v| v <= x);
    if k == 0 {
        return ys[0];
    }
    if k >= n {
        return ys[n - 1];
    }
    let (x0, x1) = (xs[k - 1], xs[k]);
    let t = (x - x0) / (x1 - x0);
    ys[k - 1] + t * (ys[k] - ys[k - 1])
}
