//! Exponentially scaled modified Bessel function `e^{-x} I_0(x)`.

use std::f64::consts::PI;

/// Switch from the power series to the asymptotic expansion. At this point
/// the smallest asymptotic term is below `1e-14` relative.
pub const SERIES_CROSSOVER: f64 = 17.0;

/// Coefficients `a_k` of `e^{-x} I_0(x) sqrt(2 pi x) ~ sum_k a_k x^{-k}`.
pub(crate) fn asymptotic_coefficients(count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut a = 1.0;
    for k in 0..count {
        out.push(a);
        let odd = (2 * k + 1) as f64;
        a *= odd * odd / (8.0 * (k + 1) as f64);
    }
    out
}

/// `e^{-|x|} I_0(x)`.
pub fn scaled_bessel_i0(x: f64) -> f64 {
    let x = x.abs();
    if x <= SERIES_CROSSOVER {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            term *= q / (k * k);
            sum += term;
            if term <= 1e-17 * sum {
                break;
            }
            k += 1.0;
        }
        sum * (-x).exp()
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 0.0;
        loop {
            let odd = 2.0 * k + 1.0;
            let next = term * odd * odd / (8.0 * (k + 1.0) * x);
            if next >= term || next <= 1e-17 {
                break;
            }
            term = next;
            sum += term;
            k += 1.0;
        }
        sum / (2.0 * PI * x).sqrt()
    }
}
