//! Zeros of ζ on the critical line.
//!
//! Hardy's Z-function is evaluated with the Riemann–Siegel main sum and the
//! correction terms C₀…C₄. The C_k are combinations of derivatives of
//! `Ψ(p) = cos(2π(p² − p − 1/16)) / cos(2πp)`; since Ψ is entire, its Taylor
//! coefficients about p = 1/2 are obtained once from a discretized Cauchy
//! integral on the unit circle and the derivatives follow exactly from them.
//!
//! Zeros are bracketed by sign changes of Z on a grid and bisected. The list
//! is certified complete by Rosser-block bookkeeping between good Gram points
//! and an argument-principle count of N(T) at the last Gram point.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::PI;
use std::io::{BufRead, Write};
use std::sync::OnceLock;

use crate::argument::continued_arg;
use crate::error::{domain, Error, Result};
use crate::numeric::bisect;
use crate::report::{Report, Status};
use crate::special::{rs_theta, rs_theta_exact, zeta};

pub const MAX_ZERO_HEIGHT: f64 = 1.0e4;
pub const DEFAULT_STEP: f64 = 0.05;
pub const BISECTION_TOL: f64 = 1e-9;
pub const RS_MIN_T: f64 = 10.0;
/// Below this height Z is evaluated through Euler–Maclaurin instead of the
/// Riemann–Siegel expansion, whose truncation error exceeds 1e-6 there.
pub const RS_HYBRID_T: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroSource {
    Computed,
    Loaded,
}

/// Positive ordinates of nontrivial zeros, complete up to `complete_to`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroList {
    gammas: Vec<f64>,
    complete_to: f64,
    source: ZeroSource,
}

impl ZeroList {
    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn complete_to(&self) -> f64 {
        self.complete_to
    }

    pub fn source(&self) -> ZeroSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    /// N(T): number of zeros with 0 < γ ≤ T.
    pub fn count_up_to(&self, t: f64) -> usize {
        self.gammas.partition_point(|&g| g <= t)
    }

    /// The sub-list of zeros up to `t`, complete to `t`.
    pub fn truncated(&self, t: f64) -> Result<ZeroList> {
        if t > self.complete_to {
            return Err(Error::InsufficientData {
                needed: t,
                available: self.complete_to,
            });
        }
        Ok(ZeroList {
            gammas: self.gammas[..self.count_up_to(t)].to_vec(),
            complete_to: t,
            source: self.source,
        })
    }

    /// Text format: one ordinate per line with 12 decimals, then `# complete_to=T`.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for g in &self.gammas {
            writeln!(w, "{g:.12}")?;
        }
        writeln!(w, "# complete_to={}", self.complete_to)
    }
}

/// Parse one ordinate line; at least nine fractional digits are required.
pub(crate) fn parse_gamma(line: &str, lineno: usize) -> Result<f64> {
    let bad = |msg: String| Error::Parse { line: lineno, msg };
    let s = line.trim();
    let frac = s.split_once('.').map_or(0, |(_, f)| f.len());
    if frac < 9 {
        return Err(bad(format!("{s:?} has fewer than 9 fractional digits")));
    }
    let g: f64 = s.parse().map_err(|_| bad(format!("not a number: {s:?}")))?;
    if !(g > 0.0) || !g.is_finite() {
        return Err(bad(format!("ordinate must be positive, got {s}")));
    }
    Ok(g)
}

pub(crate) fn parse_complete_to(comment: &str) -> Option<f64> {
    comment
        .trim_start_matches('#')
        .trim()
        .strip_prefix("complete_to=")
        .and_then(|v| v.trim().parse().ok())
}

/// Load a zero list written by [`ZeroList::write_to`] or any file in that format.
pub fn load_zeros<R: BufRead>(r: R) -> Result<ZeroList> {
    let mut gammas: Vec<f64> = Vec::new();
    let mut complete_to = None;
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let s = line.trim();
        if s.is_empty() {
            continue;
        }
        if s.starts_with('#') {
            if let Some(t) = parse_complete_to(s) {
                complete_to = Some(t);
            }
            continue;
        }
        let g = parse_gamma(s, lineno)?;
        if let Some(&prev) = gammas.last() {
            if g <= prev {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("ordinates must be strictly ascending ({g} after {prev})"),
                });
            }
        } else if g <= 14.0 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("first zeta zero lies above 14, got {g}"),
            });
        }
        gammas.push(g);
    }
    let Some(&last) = gammas.last() else {
        return Err(Error::Parse {
            line: 0,
            msg: "no zeros in file".into(),
        });
    };
    let complete_to = complete_to.unwrap_or(last);
    if complete_to < last {
        return Err(Error::Parse {
            line: 0,
            msg: format!("complete_to={complete_to} lies below the last ordinate {last}"),
        });
    }
    Ok(ZeroList {
        gammas,
        complete_to,
        source: ZeroSource::Loaded,
    })
}

pub fn load_zeros_file(path: &std::path::Path) -> Result<ZeroList> {
    load_zeros(std::io::BufReader::new(std::fs::File::open(path)?))
}

struct RsCoefficients {
    /// C₀…C₄ as polynomials in z = p − 1/2.
    polys: [Vec<f64>; 5],
}

const PSI_DEGREE: usize = 72;

fn psi_entire(p: Complex64) -> Complex64 {
    (2.0 * PI * (p * p - p - 1.0 / 16.0)).cos() / (2.0 * PI * p).cos()
}

fn rs_coefficients() -> &'static RsCoefficients {
    static COEFFS: OnceLock<RsCoefficients> = OnceLock::new();
    COEFFS.get_or_init(|| {
        const SAMPLES: usize = 512;
        let values: Vec<Complex64> = (0..SAMPLES)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / SAMPLES as f64;
                psi_entire(Complex64::new(0.5 + th.cos(), th.sin()))
            })
            .collect();
        // Taylor coefficients of Ψ about 1/2 (radius 1)
        let c: Vec<f64> = (0..PSI_DEGREE)
            .map(|k| {
                let s: Complex64 = values
                    .iter()
                    .enumerate()
                    .map(|(j, v)| {
                        let th = -2.0 * PI * (k * j) as f64 / SAMPLES as f64;
                        v * Complex64::new(th.cos(), th.sin())
                    })
                    .sum();
                s.re / SAMPLES as f64
            })
            .collect();
        let deriv = |m: usize| -> Vec<f64> {
            (0..PSI_DEGREE)
                .map(|k| {
                    if k + m >= PSI_DEGREE {
                        return 0.0;
                    }
                    let falling: f64 = ((k + 1)..=(k + m)).map(|i| i as f64).product();
                    c[k + m] * falling
                })
                .collect()
        };
        let combo = |terms: &[(usize, f64)]| -> Vec<f64> {
            let mut out = vec![0.0; PSI_DEGREE];
            for &(m, w) in terms {
                for (o, d) in out.iter_mut().zip(deriv(m)) {
                    *o += w * d;
                }
            }
            out
        };
        let p2 = PI * PI;
        let p4 = p2 * p2;
        let p6 = p4 * p2;
        let p8 = p4 * p4;
        RsCoefficients {
            polys: [
                combo(&[(0, 1.0)]),
                combo(&[(3, -1.0 / (96.0 * p2))]),
                combo(&[(2, 1.0 / (64.0 * p2)), (6, 1.0 / (18432.0 * p4))]),
                combo(&[
                    (1, -1.0 / (64.0 * p2)),
                    (5, -1.0 / (3840.0 * p4)),
                    (9, -1.0 / (5_308_416.0 * p6)),
                ]),
                combo(&[
                    (0, 1.0 / (128.0 * p2)),
                    (4, 19.0 / (24576.0 * p4)),
                    (8, 11.0 / (5_898_240.0 * p6)),
                    (12, 1.0 / (2_038_431_744.0 * p8)),
                ]),
            ],
        }
    })
}

fn horner(poly: &[f64], z: f64) -> f64 {
    poly.iter().rev().fold(0.0, |acc, &c| acc * z + c)
}

fn rs_z(t: f64) -> f64 {
    let tau = (t / (2.0 * PI)).sqrt();
    let n = tau.floor() as usize;
    let p = tau - n as f64;
    let theta = rs_theta(t);
    let main: f64 = (1..=n)
        .map(|k| {
            let kf = k as f64;
            (theta - t * kf.ln()).cos() / kf.sqrt()
        })
        .sum();
    let z = p - 0.5;
    let mut corr = 0.0;
    let mut scale = 1.0;
    for poly in &rs_coefficients().polys {
        corr += horner(poly, z) * scale;
        scale /= tau;
    }
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    2.0 * main + sign * corr / tau.sqrt()
}

/// Hardy's Z(t) = e^{iθ(t)} ζ(1/2 + it) by the Riemann–Siegel formula with
/// corrections C₀…C₄ (Euler–Maclaurin below [`RS_HYBRID_T`]).
pub fn riemann_siegel_z(t: f64) -> Result<f64> {
    if !(t >= RS_MIN_T) {
        return domain(format!("Riemann-Siegel Z needs t >= {RS_MIN_T}, got {t}"));
    }
    Ok(z_real(t))
}

fn z_real(t: f64) -> f64 {
    if t < RS_HYBRID_T {
        hardy_z_em(t).re
    } else {
        rs_z(t)
    }
}

/// Z(t) through Euler–Maclaurin ζ and log Γ; slower, valid for all real t.
pub fn hardy_z_em(t: f64) -> Complex64 {
    let th = rs_theta_exact(t);
    Complex64::new(th.cos(), th.sin()) * zeta(Complex64::new(0.5, t)).expect("off the pole")
}

fn theta(t: f64) -> f64 {
    if t >= 20.0 {
        rs_theta(t)
    } else {
        rs_theta_exact(t)
    }
}

/// Gram point g_n: θ(g_n) = nπ, for n ≥ −1.
pub fn gram_point(n: i64) -> f64 {
    let target = n as f64 * PI;
    // θ(t) ≈ (t/2) ln(t/2πe) gives a starting point above the turning point at t≈6.29
    let mut t = (2.0 * PI * (n as f64 + 1.125).max(1.0) / (n as f64 + 1.125).max(2.0).ln())
        .max(9.0)
        + 8.0;
    for _ in 0..100 {
        let f = theta(t) - target;
        let d = 0.5 * (t / (2.0 * PI)).ln();
        let dt = f / d;
        t -= dt;
        if dt.abs() < 1e-12 * t {
            break;
        }
    }
    t
}

/// Riemann–von Mangoldt smooth count (T/2π)log(T/2π) − T/2π + 7/8.
pub fn riemann_von_mangoldt(t: f64) -> f64 {
    let x = t / (2.0 * PI);
    x * x.ln() - x + 7.0 / 8.0
}

/// N(T) by the argument principle: θ(T)/π + 1 + arg ζ(1/2+iT)/π with the
/// argument continued from σ = 2.
pub fn argument_principle_count(t: f64) -> f64 {
    let arg = continued_arg(|s| zeta(Complex64::new(s, t)).expect("off the pole"), 2.0, 0.5);
    theta(t) / PI + 1.0 + arg / PI
}

/// Ordinates of sign changes of `f` on `[a, b]`, grid step ≤ `step`, each
/// bisected to `tol`. Runs in parallel over contiguous grid blocks.
pub(crate) fn scan_sign_changes<F>(f: &F, a: f64, b: f64, step: f64, tol: f64) -> Vec<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    if b <= a {
        return Vec::new();
    }
    let n = ((b - a) / step).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    let at = |i: usize| if i == n { b } else { a + i as f64 * h };
    const BLOCK: usize = 512;
    let blocks = n.div_ceil(BLOCK);
    let found: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .map(|blk| {
            let lo = blk * BLOCK;
            let hi = ((blk + 1) * BLOCK).min(n);
            let mut out = Vec::new();
            let mut t0 = at(lo);
            let mut f0 = f(t0);
            for i in lo + 1..=hi {
                let t1 = at(i);
                let f1 = f(t1);
                if (f0 < 0.0) != (f1 < 0.0) {
                    out.push(bisect(t0, t1, f0, tol, f));
                }
                t0 = t1;
                f0 = f1;
            }
            out
        })
        .collect();
    found.into_iter().flatten().collect()
}

#[derive(Debug, Clone, Copy)]
pub struct ZeroSearch {
    pub step: f64,
    pub tol: f64,
    /// How many times a suspect block may have its grid density quadrupled.
    pub max_refine: u32,
}

impl Default for ZeroSearch {
    fn default() -> Self {
        ZeroSearch {
            step: DEFAULT_STEP,
            tol: BISECTION_TOL,
            max_refine: 5,
        }
    }
}

pub fn compute_zeros(t_max: f64) -> Result<ZeroList> {
    compute_zeros_with(t_max, &ZeroSearch::default())
}

/// All zeros 0 < γ ≤ `t_max`, certified complete.
pub fn compute_zeros_with(t_max: f64, opts: &ZeroSearch) -> Result<ZeroList> {
    if !(t_max >= 0.0) {
        return domain(format!("height must be non-negative, got {t_max}"));
    }
    if t_max > MAX_ZERO_HEIGHT {
        return Err(Error::Capacity {
            what: "T",
            value: t_max,
            limit: MAX_ZERO_HEIGHT,
        });
    }
    let z = z_real;

    // Block boundaries: t = 10 (nothing below it) standing in for g_{-1}, then
    // good Gram points up to the first one beyond t_max.
    let mut bounds: Vec<(i64, f64)> = vec![(-1, RS_MIN_T)];
    let mut n = 0i64;
    loop {
        let g = gram_point(n);
        let zg = z_real(g);
        let good = if n % 2 == 0 { zg > 0.0 } else { zg < 0.0 };
        if good {
            bounds.push((n, g));
            if g > t_max {
                break;
            }
        }
        n += 1;
    }

    let end = bounds.last().unwrap().1;
    let mut zeros = scan_sign_changes(&z, RS_MIN_T, end, opts.step, opts.tol);

    for w in bounds.windows(2) {
        let ((j, lo), (k, hi)) = (w[0], w[1]);
        let expected = (k - j) as usize;
        let in_block = |zs: &[f64]| zs.iter().filter(|&&g| g > lo && g <= hi).count();
        let mut found = in_block(&zeros);
        let mut step = opts.step;
        let mut level = 0;
        while found != expected && level < opts.max_refine {
            step /= 4.0;
            level += 1;
            let refined = scan_sign_changes(&z, lo, hi, step, opts.tol);
            found = refined.len();
            if found == expected {
                zeros.retain(|&g| g <= lo || g > hi);
                zeros.extend(refined);
                zeros.sort_by(f64::total_cmp);
            }
        }
        if found != expected {
            return Err(Error::Incomplete {
                lo,
                hi,
                found,
                expected,
            });
        }
    }

    let total = zeros.len();
    let counted = argument_principle_count(end);
    let expected = counted.round();
    if (counted - expected).abs() > 0.25 || expected as usize != total {
        return Err(Error::Incomplete {
            lo: 0.0,
            hi: end,
            found: total,
            expected: expected.max(0.0) as usize,
        });
    }

    zeros.retain(|&g| g <= t_max);
    Ok(ZeroList {
        gammas: zeros,
        complete_to: t_max,
        source: ZeroSource::Computed,
    })
}

/// Both counting bounds N(T) < (1/6)T log T and N(T+1) − N(T) < log T at `t`.
pub fn check_lemma3(zeros: &ZeroList, t: f64) -> Result<Report> {
    if !(t > 2.0) {
        return domain(format!("the counting bounds need T > 2, got {t}"));
    }
    if t + 1.0 > zeros.complete_to() {
        return Err(Error::InsufficientData {
            needed: t + 1.0,
            available: zeros.complete_to(),
        });
    }
    let n_t = zeros.count_up_to(t);
    let n_t1 = zeros.count_up_to(t + 1.0);
    let bound_total = t * t.ln() / 6.0;
    let bound_gap = t.ln();
    let ok = (n_t as f64) < bound_total && ((n_t1 - n_t) as f64) < bound_gap;
    Ok(Report::new(
        "zeta-zero-counting-bounds",
        json!({ "T": t }),
        json!({ "N(T)": n_t, "N(T+1)-N(T)": n_t1 - n_t }),
        json!({
            "T log T / 6": bound_total,
            "log T": bound_gap,
            "slack_total": bound_total - n_t as f64,
            "slack_gap": bound_gap - (n_t1 - n_t) as f64,
        }),
        Status::from_bool(ok),
    ))
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// 2 + γ − log π − 2 log 2, the sum of 1/|ρ|² over all nontrivial zeros.
pub fn reciprocal_square_sum_exact() -> f64 {
    2.0 + crate::special::EULER_GAMMA - PI.ln() - 2.0 * 2f64.ln()
}

/// Upper bound for Σ_{γ>T} 1/(1/4+γ²) by partial summation against the
/// envelope `n(t) ≥ N(t)`, where `∫_T^∞ envelope(t)·2t/(1/4+t²)² dt ≤ tail_integral`.
pub(crate) fn partial_summation_tail(count_at_t: usize, t: f64, tail_integral: f64) -> f64 {
    tail_integral - count_at_t as f64 / (0.25 + t * t)
}

/// Bracket Σ_ρ 1/|ρ|² over all zeros (both signs of γ).
///
/// `lo` is the finite sum to `T = complete_to`; the tail above T is bounded with
/// N(t) < (1/6) t log t: ∫_T^∞ (1/6) t log t · 2/t³ dt = (log T + 1)/(3T).
pub fn reciprocal_square_sum(zeros: &ZeroList) -> Result<Bracket> {
    let t = zeros.complete_to();
    if t < 100.0 {
        return Err(Error::InsufficientData {
            needed: 100.0,
            available: t,
        });
    }
    let lo: f64 = 2.0 * zeros.gammas().iter().map(|g| 1.0 / (0.25 + g * g)).sum::<f64>();
    let tail = partial_summation_tail(zeros.len(), t, (t.ln() + 1.0) / (3.0 * t));
    Ok(Bracket {
        lo,
        hi: lo + 2.0 * tail.max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_matches_euler_maclaurin() {
        let mut worst: f64 = 0.0;
        let mut t = 10.0;
        while t < 10_000.0 {
            let rs = riemann_siegel_z(t).unwrap();
            let em = hardy_z_em(t);
            assert!(em.im.abs() < 1e-9);
            worst = worst.max((rs - em.re).abs());
            t *= 1.0137;
        }
        assert!(worst < 1e-6, "worst = {worst:e}");
    }

    #[test]
    fn z_domain() {
        assert!(riemann_siegel_z(9.9).is_err());
        let a = riemann_siegel_z(14.1).unwrap();
        let b = riemann_siegel_z(14.2).unwrap();
        assert!(a * b < 0.0);
    }

    #[test]
    fn gram_points_satisfy_theta() {
        assert!((gram_point(0) - 17.845_599_540_8).abs() < 1e-6);
        assert!((gram_point(-1) - 9.666_908_056).abs() < 1e-6);
        for n in [1, 10, 100, 1000] {
            let g = gram_point(n);
            assert!((theta(g) - n as f64 * PI).abs() < 1e-9);
        }
    }

    #[test]
    fn first_zeros() {
        let z = compute_zeros(100.0).unwrap();
        assert_eq!(z.len(), 29);
        assert!((z.gammas()[0] - 14.134_725_141_734_693).abs() < 1e-8);
        assert_eq!(compute_zeros(15.0).unwrap().len(), 1);
        assert!(compute_zeros(14.0).unwrap().is_empty());
        assert!(matches!(compute_zeros(1e4 + 1.0), Err(Error::Capacity { .. })));
    }

    #[test]
    fn argument_count_at_100() {
        let n = argument_principle_count(100.0);
        assert!((n - 29.0).abs() < 0.05, "{n}");
    }

    #[test]
    fn lemma3_examples() {
        let z = compute_zeros(100.0).unwrap();
        let r = check_lemma3(&z, 50.0).unwrap();
        assert!(r.passed());
        let r = check_lemma3(&z, 2.5).unwrap();
        assert_eq!(r.measured["N(T)"], 0);
        assert!(r.passed());
        assert!(check_lemma3(&z, 99.5).is_err());
        assert!(check_lemma3(&z, 2.0).is_err());
    }

    #[test]
    fn load_examples() {
        let z = load_zeros("14.134725142\n21.022039639\n".as_bytes()).unwrap();
        assert_eq!(z.len(), 2);
        assert_eq!(z.complete_to(), 21.022039639);
        assert_eq!(z.source(), ZeroSource::Loaded);
        assert!(load_zeros("".as_bytes()).is_err());
        match load_zeros("21.022039639\n14.134725142\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(load_zeros("14.13\n".as_bytes()).is_err());
        assert!(load_zeros("-14.134725142\n".as_bytes()).is_err());
        let z = load_zeros("# hi\n14.134725142\n# complete_to=20\n".as_bytes()).unwrap();
        assert_eq!(z.complete_to(), 20.0);
    }

    #[test]
    fn round_trip() {
        let z = compute_zeros(200.0).unwrap();
        let mut buf = Vec::new();
        z.write_to(&mut buf).unwrap();
        let back = load_zeros(buf.as_slice()).unwrap();
        assert_eq!(back.complete_to(), z.complete_to());
        assert_eq!(back.len(), z.len());
        for (a, b) in back.gammas().iter().zip(z.gammas()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn reciprocal_sum_requires_height() {
        let z = compute_zeros(50.0).unwrap();
        assert!(reciprocal_square_sum(&z).is_err());
    }

    #[test]
    fn reciprocal_sum_brackets_and_shrinks() {
        let z = compute_zeros(1000.0).unwrap();
        let wide = reciprocal_square_sum(&z.truncated(500.0).unwrap()).unwrap();
        let narrow = reciprocal_square_sum(&z).unwrap();
        let c = reciprocal_square_sum_exact();
        assert!(wide.contains(c) && narrow.contains(c));
        assert!(narrow.width() < wide.width());
    }
}
