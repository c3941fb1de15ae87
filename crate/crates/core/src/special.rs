//! Special functions: complex log-gamma, Hurwitz zeta (with its s-derivative)
//! by Euler–Maclaurin summation, the Riemann–Siegel theta function, and the
//! logarithmic integral.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{domain, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// B_2, B_4, ..., B_20.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Number of Bernoulli correction terms in the Hurwitz Euler–Maclaurin tail.
pub const EM_TERMS: usize = 8;

/// log Γ(z) on the branch continuous in the right half plane.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 15.0 || w.re < 1.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for (k, b) in BERNOULLI.iter().enumerate().take(8) {
        let n = 2 * (k + 1);
        series += pow * (b / (n * (n - 1)) as f64);
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series - shift
}

/// Riemann–Siegel theta by its asymptotic expansion (t ≥ 10 gives ~1e-11).
pub fn rs_theta(t: f64) -> f64 {
    let t2 = t * t;
    t / 2.0 * (t / (2.0 * PI)).ln() - t / 2.0 - PI / 8.0
        + 1.0 / (48.0 * t)
        + 7.0 / (5760.0 * t * t2)
        + 31.0 / (80640.0 * t * t2 * t2)
        + 127.0 / (430080.0 * t * t2 * t2 * t2)
}

/// Riemann–Siegel theta from log Γ, valid for any real t.
pub fn rs_theta_exact(t: f64) -> f64 {
    ln_gamma(Complex64::new(0.25, 0.5 * t)).im - 0.5 * t * PI.ln()
}

/// `(w^{-u} - 1)/u` and its u-derivative, with `L = ln w`.
fn reg_pole_term(u: Complex64, lw: f64) -> (Complex64, Complex64) {
    let z = u * lw;
    if z.norm() < 0.5 {
        // Σ_{k≥1} (-L)^k u^{k-1}/k!   and   Σ_{k≥2} (-L)^k (k-1) u^{k-2}/k!
        let mut g = Complex64::new(0.0, 0.0);
        let mut dg = Complex64::new(0.0, 0.0);
        let mut coef = -lw; // (-L)^k / k!
        let mut upow = Complex64::new(1.0, 0.0); // u^{k-1}
        let mut upow_prev = Complex64::new(0.0, 0.0); // u^{k-2}
        for k in 1..40usize {
            g += upow * coef;
            if k >= 2 {
                dg += upow_prev * (coef * (k - 1) as f64);
            }
            upow_prev = upow;
            upow *= u;
            coef *= -lw / (k + 1) as f64;
        }
        (g, dg)
    } else {
        let e = (-z).exp();
        let g = (e - 1.0) / u;
        let dg = (-(e * lw) * u - (e - 1.0)) / (u * u);
        (g, dg)
    }
}

/// Euler–Maclaurin summation cutoff for ζ(s, x).
fn em_cutoff(s: Complex64) -> usize {
    20usize.max(s.im.abs().ceil() as usize + 10)
}

/// Regularized Hurwitz zeta `ζ(s, x) − 1/(s−1)` and its derivative in `s`,
/// for `0 < x ≤ 1` (any `x > 0` works) and any complex `s`.
pub fn hurwitz_reg(s: Complex64, x: f64) -> (Complex64, Complex64) {
    hurwitz_reg_with(s, x, em_cutoff(s))
}

pub fn hurwitz_reg_with(s: Complex64, x: f64, n: usize) -> (Complex64, Complex64) {
    let mut f = Complex64::new(0.0, 0.0);
    let mut df = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let lk = (k as f64 + x).ln();
        let term = (-s * lk).exp();
        f += term;
        df -= term * lk;
    }
    let w = n as f64 + x;
    let lw = w.ln();
    let ws = (-s * lw).exp(); // w^{-s}
    let (g, dg) = reg_pole_term(s - 1.0, lw);
    f += g + 0.5 * ws;
    df += dg - 0.5 * ws * lw;

    // Bernoulli tail: B_{2j}/(2j)! · s(s+1)…(s+2j−2) · w^{−s−2j+1}
    let mut poch = s; // (s)_{1}
    let mut dpoch = Complex64::new(1.0, 0.0);
    let mut wpow = ws / w; // w^{-s-1}
    let mut fact = 2.0; // (2j)!
    for j in 1..=EM_TERMS {
        let c = BERNOULLI[j - 1] / fact;
        f += c * poch * wpow;
        df += c * (dpoch - poch * lw) * wpow;
        // advance (s)_{2j-1} -> (s)_{2j+1}
        for i in [2 * j - 1, 2 * j] {
            dpoch = dpoch * (s + i as f64) + poch;
            poch *= s + i as f64;
        }
        wpow /= w * w;
        fact *= ((2 * j + 1) * (2 * j + 2)) as f64;
    }
    (f, df)
}

/// Hurwitz zeta ζ(s, x); `s = 1` is a pole.
pub fn hurwitz(s: Complex64, x: f64) -> Result<Complex64> {
    let u = s - 1.0;
    if u.norm() == 0.0 {
        return domain("Hurwitz zeta has a pole at s = 1");
    }
    Ok(hurwitz_reg(s, x).0 + u.inv())
}

/// Riemann zeta by Euler–Maclaurin; `s = 1` is a pole.
pub fn zeta(s: Complex64) -> Result<Complex64> {
    hurwitz(s, 1.0)
}

/// Logarithmic integral li(x) for x ≥ 2.
///
/// Uses the Ramanujan series
/// `li(x) = γ + ln ln x + √x Σ_{n≥1} (−1)^{n−1} (ln x)^n / (n! 2^{n−1}) Σ_{k=0}^{⌊(n−1)/2⌋} 1/(2k+1)`,
/// switching to the asymptotic series above 1e15.
pub fn li(x: f64) -> Result<f64> {
    if !(x >= 2.0) {
        return domain(format!("li is defined here for x >= 2, got {x}"));
    }
    let lx = x.ln();
    if x > 1e15 {
        let mut sum = 0.0;
        let mut term = 1.0;
        let mut k = 0usize;
        loop {
            sum += term;
            let next = term * (k + 1) as f64 / lx;
            if next >= term || next < 1e-17 * sum {
                break;
            }
            term = next;
            k += 1;
        }
        return Ok(x / lx * sum);
    }
    let mut total = 0.0;
    let mut inner = 0.0;
    let mut fac = 1.0; // (ln x)^n / (n! 2^{n-1}) with sign
    let mut n = 1usize;
    loop {
        fac *= if n == 1 { lx } else { -lx / (2.0 * n as f64) };
        if n % 2 == 1 {
            inner += 1.0 / n as f64;
        }
        let term = fac * inner;
        total += term;
        if term.abs() < 1e-18 * total.abs() && n > 2 * lx as usize {
            break;
        }
        n += 1;
        if n > 500 {
            break;
        }
    }
    Ok(EULER_GAMMA + lx.ln() + x.sqrt() * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::integrate;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn log_gamma_known_values() {
        assert!((ln_gamma(c(1.0, 0.0))).norm() < 1e-14);
        assert!((ln_gamma(c(0.5, 0.0)).re - 0.5 * PI.ln()).abs() < 1e-14);
        assert!((ln_gamma(c(10.0, 0.0)).re - 362880f64.ln()).abs() < 1e-12);
        // |Γ(1/2 + it)|² = π / cosh(πt)
        let t = 3.7;
        let g = ln_gamma(c(0.5, t)).re;
        assert!((2.0 * g - (PI / (PI * t).cosh()).ln()).abs() < 1e-12);
    }

    #[test]
    fn theta_series_matches_log_gamma() {
        for t in [10.0, 14.1347, 50.0, 123.4, 1000.0, 9999.0] {
            assert!((rs_theta(t) - rs_theta_exact(t)).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn zeta_known_values() {
        let z2 = zeta(c(2.0, 0.0)).unwrap();
        assert!((z2.re - PI * PI / 6.0).abs() < 1e-14);
        let z0 = zeta(c(0.0, 0.0)).unwrap();
        assert!((z0.re + 0.5).abs() < 1e-13);
        // ζ(1/2 + iγ₁) = 0
        let z = zeta(c(0.5, 14.134725141734693)).unwrap();
        assert!(z.norm() < 1e-12);
        assert!(zeta(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn regularized_value_at_one_is_minus_digamma() {
        // ζ(s, x) − 1/(s−1) → −ψ(x); ψ(1) = −γ, ψ(1/2) = −γ − 2 ln 2
        let (f1, _) = hurwitz_reg(c(1.0, 0.0), 1.0);
        assert!((f1.re - EULER_GAMMA).abs() < 1e-13);
        let (fh, _) = hurwitz_reg(c(1.0, 0.0), 0.5);
        assert!((fh.re - (EULER_GAMMA + 2.0 * 2f64.ln())).abs() < 1e-13);
        // derivative of the regular part at 1 is −γ₁ with γ₁ = −0.0728158454836767
        let (_, d1) = hurwitz_reg(c(1.0, 0.0), 1.0);
        assert!((d1.re - 0.072_815_845_483_676_72).abs() < 1e-12, "{d1}");
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for &(s, x) in &[(c(0.5, 20.0), 0.3), (c(2.0, -5.0), 0.9), (c(1.0, 0.0), 0.25)] {
            let h = 1e-5;
            let (fp, _) = hurwitz_reg(s + h, x);
            let (fm, _) = hurwitz_reg(s - h, x);
            let (_, d) = hurwitz_reg(s, x);
            assert!(((fp - fm) / (2.0 * h) - d).norm() < 1e-8);
        }
    }

    #[test]
    fn cutoff_is_converged() {
        for &(s, x) in &[(c(0.5, 200.0), 0.02), (c(0.5, -150.0), 0.7), (c(0.8, 999.0), 0.5)] {
            let (a, _) = hurwitz_reg(s, x);
            let (b, _) = hurwitz_reg_with(s, x, 4 * em_cutoff(s));
            assert!((a - b).norm() <= 1e-10 * b.norm().max(1.0), "s={s} x={x}");
        }
    }

    #[test]
    fn li_against_quadrature_oracle() {
        // li(x) = γ + ln ln x + ∫_0^{ln x} (e^u − 1)/u du
        for x in [2.0, 10.0, 1000.0, 1e6, 1e9] {
            let lx: f64 = f64::ln(x);
            let oracle = EULER_GAMMA
                + lx.ln()
                + integrate(0.0, lx, 0.05, |u| if u == 0.0 { 1.0 } else { u.exp_m1() / u });
            let got = li(x).unwrap();
            assert!(((got - oracle) / oracle).abs() < 1e-10, "x={x} {got} {oracle}");
        }
        assert!((li(2.0).unwrap() - 1.045_163_780_117_492_8).abs() < 1e-10);
        assert!(li(1.5).is_err());
    }

    #[test]
    fn li_asymptotic_branch_is_continuous() {
        let a = li(1e15 * (1.0 - 1e-12)).unwrap();
        let b = li(1e15 * (1.0 + 1e-12)).unwrap();
        assert!(((a - b) / a).abs() < 1e-9);
    }
}
