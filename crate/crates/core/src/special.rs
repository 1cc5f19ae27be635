//! Special functions needed by the propagators.

use std::f64::consts::{FRAC_PI_4, PI};

/// Crossover between the power series and the Hankel asymptotic expansion.
const SERIES_LIMIT: f64 = 12.0;

/// Bessel function of the first kind, order zero.
///
/// Power series below |x| = 12 and the Hankel asymptotic expansion above,
/// truncated at its smallest term. Absolute error stays below ~1e-12.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x < SERIES_LIMIT {
        j0_series(x)
    } else {
        j0_asymptotic(x)
    }
}

fn j0_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) {
            break;
        }
        k += 1.0;
        if k > 200.0 {
            break;
        }
    }
    sum
}

fn j0_asymptotic(x: f64) -> f64 {
    // c_k = prod_{i=1..k} (2i-1)^2 / (i * 8x); P = c0 - c2 + c4 ..., Q = -c1 + c3 - ...
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut c: f64 = 1.0;
    let mut i = 1u32;
    loop {
        let odd = f64::from(2 * i - 1);
        let next = c * odd * odd / (f64::from(i) * eight_x);
        if next >= c || next < 1e-18 {
            break;
        }
        c = next;
        let term = if matches!(i % 4, 1 | 2) { -c } else { c };
        if i.is_multiple_of(2) {
            p += term;
        } else {
            q += term;
        }
        i += 1;
    }
    let chi = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}
