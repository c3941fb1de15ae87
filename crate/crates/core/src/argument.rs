//! Continuous argument of an analytic function along a horizontal segment,
//! the building block of the argument-principle zero counts.

use num_complex::Complex64;
use std::f64::consts::PI;

fn wrap(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d < -PI {
        d += 2.0 * PI;
    }
    d
}

/// Arg of `f(σ)` continued from `σ = from` (principal value there) to `σ = to`.
///
/// Steps are halved until each phase increment is below 0.4 rad.
pub fn continued_arg<F: FnMut(f64) -> Complex64>(mut f: F, from: f64, to: f64) -> f64 {
    let h0 = (to - from) / 48.0;
    let mut sigma = from;
    let mut val = f(sigma);
    let mut arg = val.arg();
    let mut h = h0;
    while (to - sigma) * h0.signum() > 0.0 {
        if (sigma + h - to) * h0.signum() > 0.0 {
            h = to - sigma;
        }
        let next = f(sigma + h);
        let d = wrap(next.arg() - val.arg());
        if d.abs() > 0.4 && h.abs() > 1e-9 {
            h *= 0.5;
            continue;
        }
        arg += d;
        sigma += h;
        val = next;
        if h.abs() < h0.abs() {
            h = (h * 1.5).clamp(-h0.abs(), h0.abs());
        }
    }
    arg
}
