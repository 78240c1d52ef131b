//! Log-domain kernels for hyperbolic functions and small dense vector helpers.
//!
//! Radii in this crate may reach 10^4, far past the point where `cosh`
//! overflows, so every quantity that grows like `e^r` is carried as a
//! logarithm until the final step.

use std::f64::consts::LN_2;

/// `ln(sinh x)` for `x >= 0`; `-inf` at zero.
pub fn ln_sinh(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x <= 0.0 {
        f64::NEG_INFINITY
    } else if x > 20.0 {
        x - LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// `ln(cosh x)`, valid for every finite `x`.
pub fn ln_cosh(x: f64) -> f64 {
    let x = x.abs();
    x - LN_2 + (-2.0 * x).exp().ln_1p()
}

/// `asinh(e^z)` without forming `e^z`.
pub fn asinh_exp(z: f64) -> f64 {
    if z == f64::NEG_INFINITY {
        0.0
    } else if z > 0.0 {
        z + (1.0 + (1.0 + (-2.0 * z).exp()).sqrt()).ln()
    } else {
        z.exp().asinh()
    }
}

/// `ln(e^a + e^b)`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `sinh(x) * e^{-shift}` computed without overflow.
pub fn sinh_scaled(x: f64, shift: f64) -> f64 {
    if x.abs() < 700.0 && shift.abs() < 700.0 {
        x.sinh() * (-shift).exp()
    } else if x == 0.0 {
        0.0
    } else {
        x.signum() * (ln_sinh(x.abs()) - shift).exp()
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// Angle between two non-zero vectors via `2 atan2(|a-b|, |a+b|)` on the
/// normalized inputs; accurate near 0 and near pi.
pub fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let na = norm(a);
    let nb = norm(b);
    let mut minus = 0.0;
    let mut plus = 0.0;
    for (x, y) in a.iter().zip(b) {
        let (ux, uy) = (x / na, y / nb);
        minus += (ux - uy) * (ux - uy);
        plus += (ux + uy) * (ux + uy);
    }
    2.0 * minus.sqrt().atan2(plus.sqrt())
}

/// Unit vector along axis `i` in `R^m`.
pub fn axis(m: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; m];
    v[i] = 1.0;
    v
}
