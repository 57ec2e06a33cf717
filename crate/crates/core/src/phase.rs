//! Additive characters `e(x) = exp(2πix)`.

use num_complex::Complex64;
use std::f64::consts::TAU;

/// `e(x)` with `x` first reduced to `[0, 1)`, which keeps the phase
/// accurate for large arguments.
#[inline]
pub fn e(x: f64) -> Complex64 {
    let frac = x - x.floor();
    Complex64::cis(TAU * frac)
}

/// `e(num/den)` with the reduction done exactly in integers.
#[inline]
pub fn e_ratio(num: i128, den: u64) -> Complex64 {
    let r = num.rem_euclid(den as i128) as f64;
    Complex64::cis(TAU * r / den as f64)
}
