//! Dirichlet L-functions for small moduli: evaluation through the Hurwitz
//! zeta function, zeros on the critical line, and L′/L at s = 1.
//!
//! Zeros are those of the primitive character inducing χ; an imprimitive
//! L-function differs only by finitely many Euler factors whose zeros lie on
//! Re s = 0.

use num_complex::Complex64;
use serde_json::json;
use std::f64::consts::PI;
use std::io::{BufRead, Write};

use crate::argument::continued_arg;
use crate::arith::{euler_phi, factorize, gcd};
use crate::characters::{build_characters, von_mangoldt, DirichletCharacter};
use crate::error::{domain, Error, Result};
use crate::report::{Report, Status};
use crate::special::{hurwitz_reg, ln_gamma, EULER_GAMMA};
use crate::zeta_zeros::{parse_complete_to, parse_gamma, scan_sign_changes, Bracket};

pub const MAX_L_MODULUS: u64 = 50;
pub const MAX_L_HEIGHT: f64 = 200.0;
pub const MAX_IM_S: f64 = 1.0e3;
pub const L_SCAN_STEP: f64 = 0.02;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `Σ_a χ(a) [ζ(s, a/q) − 1/(s−1)]` and its s-derivative.
fn hurwitz_combination(s: Complex64, chi: &DirichletCharacter) -> (Complex64, Complex64) {
    let q = chi.modulus();
    let mut f = c(0.0, 0.0);
    let mut df = c(0.0, 0.0);
    for a in 1..=q {
        let v = chi.value(a as i64);
        if v.norm_sqr() == 0.0 {
            continue;
        }
        let (h, dh) = hurwitz_reg(s, a as f64 / q as f64);
        f += v * h;
        df += v * dh;
    }
    (f, df)
}

/// L(s, χ) = q^{-s} Σ_a χ(a) ζ(s, a/q).
pub fn l_eval(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    if s.im.abs() > MAX_IM_S {
        return Err(Error::Capacity {
            what: "|Im s|",
            value: s.im.abs(),
            limit: MAX_IM_S,
        });
    }
    let q = chi.modulus() as f64;
    let (mut f, _) = hurwitz_combination(s, chi);
    if chi.is_principal() {
        let u = s - 1.0;
        if u.norm() == 0.0 {
            return domain("L(s, χ₀) has a pole at s = 1");
        }
        f += euler_phi(chi.modulus()) as f64 / u;
    }
    Ok((-s * q.ln()).exp() * f)
}

/// L′/L(1, χ) for non-principal χ.
pub fn l_log_derivative_at_1(chi: &DirichletCharacter) -> Result<Complex64> {
    if chi.is_principal() {
        return domain("L'/L(1, χ) is undefined for the principal character");
    }
    let (f, df) = hurwitz_combination(c(1.0, 0.0), chi);
    Ok(df / f - (chi.modulus() as f64).ln())
}

/// Finite part of L′/L(s, χ₀) at s = 1: γ + Σ_{p | q} log p/(p − 1).
pub fn principal_log_derivative_finite_part(q: u64) -> f64 {
    EULER_GAMMA
        + factorize(q)
            .into_iter()
            .map(|(p, _)| (p as f64).ln() / (p as f64 - 1.0))
            .sum::<f64>()
}

/// The completed L-function of a primitive character, rotated to be real on
/// the critical line.
#[derive(Debug, Clone)]
pub struct HardyL {
    chi: DirichletCharacter,
    parity: f64,
    half_root_phase: f64,
}

impl HardyL {
    /// Builds from the primitive character inducing `chi`.
    pub fn new(chi: &DirichletCharacter) -> Result<Self> {
        if chi.is_principal() {
            return domain("the principal character has no rotated L-function here");
        }
        let chi = chi.primitive();
        let parity = chi.parity() as f64;
        let q = chi.modulus() as f64;
        let i_a = if parity == 0.0 { c(1.0, 0.0) } else { c(0.0, 1.0) };
        let eps = chi.gauss_sum() / (i_a * q.sqrt());
        Ok(HardyL {
            chi,
            parity,
            half_root_phase: 0.5 * eps.arg(),
        })
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.chi
    }

    /// θ_χ(t) = (t/2) log(q/π) + Im log Γ((1/2 + a + it)/2).
    pub fn theta(&self, t: f64) -> f64 {
        let q = self.chi.modulus() as f64;
        0.5 * t * (q / PI).ln() + ln_gamma(c(0.25 + 0.5 * self.parity, 0.5 * t)).im
    }

    /// e^{i(θ_χ(t) − α/2)} L(1/2 + it, χ); real up to rounding.
    pub fn rotated(&self, t: f64) -> Complex64 {
        let l = l_eval(c(0.5, t), &self.chi).expect("non-principal and within range");
        let ph = self.theta(t) - self.half_root_phase;
        c(ph.cos(), ph.sin()) * l
    }

    pub fn z(&self, t: f64) -> f64 {
        self.rotated(t).re
    }

    /// Number of zeros with |γ| < t by the argument principle.
    pub fn zero_count(&self, t: f64) -> f64 {
        let arg_at = |h: f64| continued_arg(|s| l_eval(c(s, h), &self.chi).unwrap(), 2.0, 0.5);
        (2.0 * self.theta(t) + arg_at(t) - arg_at(-t)) / PI
    }
}

/// Zeros of L(s, χ) on the critical line with |γ| ≤ `complete_to`.
#[derive(Debug, Clone, PartialEq)]
pub struct LZeroList {
    chi: DirichletCharacter,
    /// γ > 0, ascending.
    gammas_pos: Vec<f64>,
    /// γ < 0, descending.
    gammas_neg: Vec<f64>,
    complete_to: f64,
}

impl LZeroList {
    pub fn character(&self) -> &DirichletCharacter {
        &self.chi
    }

    pub fn gammas_pos(&self) -> &[f64] {
        &self.gammas_pos
    }

    pub fn gammas_neg(&self) -> &[f64] {
        &self.gammas_neg
    }

    pub fn complete_to(&self) -> f64 {
        self.complete_to
    }

    /// All ordinates in ascending order.
    pub fn all_gammas(&self) -> impl Iterator<Item = f64> + '_ {
        self.gammas_neg
            .iter()
            .rev()
            .chain(self.gammas_pos.iter())
            .copied()
    }

    /// (N₊(t), N₋(t)): zeros with 0 ≤ γ ≤ t and −t ≤ γ ≤ 0.
    pub fn counts(&self, t: f64) -> (usize, usize) {
        (
            self.gammas_pos.partition_point(|&g| g <= t),
            self.gammas_neg.partition_point(|&g| g >= -t),
        )
    }

    /// N(t, χ): zeros with |γ| < t.
    pub fn count_below(&self, t: f64) -> usize {
        self.gammas_pos.partition_point(|&g| g < t) + self.gammas_neg.partition_point(|&g| g > -t)
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let (q, idx) = (self.chi.modulus(), self.chi.index());
        writeln!(w, "# q={q} chi={idx} sign=+")?;
        for g in &self.gammas_pos {
            writeln!(w, "{g:.12}")?;
        }
        writeln!(w, "# q={q} chi={idx} sign=-")?;
        for g in &self.gammas_neg {
            writeln!(w, "{:.12}", -g)?;
        }
        writeln!(w, "# complete_to={}", self.complete_to)
    }
}

fn parse_block_header(s: &str) -> Option<(u64, usize, bool)> {
    let mut q = None;
    let mut idx = None;
    let mut sign = None;
    for field in s.trim_start_matches('#').split_whitespace() {
        match field.split_once('=') {
            Some(("q", v)) => q = v.parse().ok(),
            Some(("chi", v)) => idx = v.parse().ok(),
            Some(("sign", "+")) => sign = Some(true),
            Some(("sign", "-")) => sign = Some(false),
            _ => {}
        }
    }
    Some((q?, idx?, sign?))
}

/// Load an L-zero file; the `sign=-` block lists |γ| ascending.
pub fn load_l_zeros<R: BufRead>(r: R) -> Result<LZeroList> {
    let mut header: Option<(u64, usize)> = None;
    let mut block: Option<bool> = None;
    let mut pos: Vec<f64> = Vec::new();
    let mut neg: Vec<f64> = Vec::new();
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
            } else if let Some((q, idx, sign)) = parse_block_header(s) {
                if header.is_some_and(|h| h != (q, idx)) {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "blocks belong to different characters".into(),
                    });
                }
                header = Some((q, idx));
                block = Some(sign);
            }
            continue;
        }
        let Some(sign) = block else {
            return Err(Error::Parse {
                line: lineno,
                msg: "ordinate before any `# q= chi= sign=` header".into(),
            });
        };
        let g = parse_gamma(s, lineno)?;
        let list = if sign { &mut pos } else { &mut neg };
        if list.last().is_some_and(|&prev| g <= prev) {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("ordinates must be strictly ascending within a block ({g})"),
            });
        }
        list.push(g);
    }
    let Some((q, idx)) = header else {
        return Err(Error::Parse {
            line: 0,
            msg: "missing `# q= chi= sign=` header".into(),
        });
    };
    let table = build_characters(q)?;
    if idx >= table.len() {
        return Err(Error::Parse {
            line: 0,
            msg: format!("character index {idx} out of range for q={q}"),
        });
    }
    let top = pos.last().copied().unwrap_or(0.0).max(neg.last().copied().unwrap_or(0.0));
    let complete_to = complete_to.unwrap_or(top);
    if complete_to < top {
        return Err(Error::Parse {
            line: 0,
            msg: format!("complete_to={complete_to} lies below the largest |γ| = {top}"),
        });
    }
    Ok(LZeroList {
        chi: table.character(idx),
        gammas_pos: pos,
        gammas_neg: neg.into_iter().map(|g| -g).collect(),
        complete_to,
    })
}

pub fn load_l_zeros_file(path: &std::path::Path) -> Result<LZeroList> {
    load_l_zeros(std::io::BufReader::new(std::fs::File::open(path)?))
}

/// All zeros of L(s, χ) with |γ| ≤ `t_max`, certified by the argument principle.
pub fn compute_l_zeros(chi: &DirichletCharacter, t_max: f64) -> Result<LZeroList> {
    compute_l_zeros_with(chi, t_max, L_SCAN_STEP, 4)
}

pub fn compute_l_zeros_with(
    chi: &DirichletCharacter,
    t_max: f64,
    step: f64,
    max_refine: u32,
) -> Result<LZeroList> {
    if chi.modulus() > MAX_L_MODULUS {
        return Err(Error::Capacity {
            what: "q",
            value: chi.modulus() as f64,
            limit: MAX_L_MODULUS as f64,
        });
    }
    if !(t_max >= 0.0) {
        return domain(format!("height must be non-negative, got {t_max}"));
    }
    if t_max > MAX_L_HEIGHT {
        return Err(Error::Capacity {
            what: "T",
            value: t_max,
            limit: MAX_L_HEIGHT,
        });
    }
    let hl = HardyL::new(chi)?;
    let z = |t: f64| hl.z(t);
    let reach = t_max + 0.05;

    let mut step = step;
    let mut level = 0;
    loop {
        let zeros = scan_sign_changes(&z, -reach, reach, step, 1e-10);
        // certification height: close to t_max, away from any zero
        let h = (0..20)
            .map(|k| t_max + 0.002 * k as f64)
            .find(|&h| zeros.iter().all(|g| (g.abs() - h).abs() > 1e-3))
            .unwrap_or(t_max);
        let found = zeros.iter().filter(|g| g.abs() < h).count();
        let counted = hl.zero_count(h);
        if (counted - found as f64).abs() < 0.25 {
            let gammas_pos: Vec<f64> = zeros.iter().copied().filter(|&g| g > 0.0 && g <= t_max).collect();
            let gammas_neg: Vec<f64> =
                zeros.iter().rev().copied().filter(|&g| g <= 0.0 && g >= -t_max).collect();
            return Ok(LZeroList {
                chi: chi.clone(),
                gammas_pos,
                gammas_neg,
                complete_to: t_max,
            });
        }
        if level == max_refine {
            // localize: first height at which the counts disagree
            let mut lo = 0.0;
            for k in 1..=16 {
                let hk = h * k as f64 / 16.0;
                let f = zeros.iter().filter(|g| g.abs() < hk).count();
                if (hl.zero_count(hk) - f as f64).abs() >= 0.25 {
                    return Err(Error::Incomplete {
                        lo,
                        hi: hk,
                        found: f,
                        expected: hl.zero_count(hk).round().max(0.0) as usize,
                    });
                }
                lo = hk;
            }
            return Err(Error::Incomplete {
                lo: 0.0,
                hi: h,
                found,
                expected: counted.round().max(0.0) as usize,
            });
        }
        step /= 4.0;
        level += 1;
    }
}

/// Measured-versus-formula report for the zero-counting estimates of L(s, χ).
pub fn check_lemma8(zeros: &LZeroList, t: f64) -> Result<Report> {
    if t > zeros.complete_to() || !(t > 0.0) {
        return Err(Error::InsufficientData {
            needed: t,
            available: zeros.complete_to(),
        });
    }
    let q = zeros.character().modulus() as f64;
    let lqt = (q * t).ln();
    let n = zeros.count_below(t);
    let main = t / PI * (q * t / (2.0 * PI)).ln() - t / PI;
    let deviation = (n as f64 - main).abs();
    let dev_bound = lqt / 2.1 + 30.0;
    let (np, nn) = zeros.counts(t);
    let asym = (np as f64 - nn as f64).abs();
    let mut measured = json!({
        "N(T)": n,
        "N+(T)": np,
        "N-(T)": nn,
        "main_term": main,
        "deviation": deviation,
        "asymmetry": asym,
    });
    let mut bound = json!({
        "deviation": dev_bound,
        "asymmetry": 1.25 * lqt,
        "N(T)": t * lqt / 3.0,
        "log qT": lqt,
    });
    if t + 1.0 <= zeros.complete_to() {
        measured["N(T+1)-N(T)"] = json!(zeros.count_below(t + 1.0) - n);
        bound["N(T+1)-N(T)"] = json!(lqt);
    }
    measured["deviation_within"] = json!(deviation < dev_bound);
    measured["asymmetry_within"] = json!(asym < 1.25 * lqt);
    Ok(Report::new(
        "l-zero-counting",
        json!({ "q": q, "chi": zeros.character().index(), "T": t }),
        measured,
        bound,
        Status::ReportOnly,
    ))
}

/// Bracket for Σ_ρ 1/|ρ|² over all zeros of L(s, χ), using the envelope
/// N(t, χ) < (1/3) t log qt above the list height.
pub fn l_reciprocal_square_sum(zeros: &LZeroList) -> Bracket {
    let q = zeros.character().modulus() as f64;
    let t = zeros.complete_to();
    let lo: f64 = zeros.all_gammas().map(|g| 1.0 / (0.25 + g * g)).sum();
    let n = zeros.gammas_pos().len() + zeros.gammas_neg().len();
    let tail = if t > 0.0 {
        crate::zeta_zeros::partial_summation_tail(n, t, 2.0 / 3.0 * ((q * t).ln() + 1.0) / t)
    } else {
        f64::INFINITY
    };
    Bracket {
        lo,
        hi: lo + tail.max(0.0),
    }
}

/// Σ_ρ 1/|ρ|² plus tail bound against 13 log q.
pub fn check_reciprocal_sum_l(zeros: &LZeroList) -> Report {
    let q = zeros.character().modulus() as f64;
    let b = l_reciprocal_square_sum(zeros);
    let bound = 13.0 * q.ln();
    Report::new(
        "l-reciprocal-square-sum",
        json!({ "q": q, "chi": zeros.character().index(), "T": zeros.complete_to() }),
        json!({ "partial_sum": b.lo, "with_tail": b.hi }),
        json!(bound),
        Status::from_bool(b.hi <= bound),
    )
}

/// f(1) = Σ_χ conj(χ(a)) L′/L(1, χ), principal term replaced by its finite part.
pub fn character_sum_log_derivative(q: u64, a: u64) -> Result<Complex64> {
    if gcd(a, q) != 1 {
        return domain(format!("gcd({a}, {q}) != 1"));
    }
    let table = build_characters(q)?;
    let mut f = c(principal_log_derivative_finite_part(q), 0.0);
    for chi in table.characters().skip(1) {
        f += chi.value(a as i64).conj() * l_log_derivative_at_1(&chi)?;
    }
    Ok(f)
}

/// Deviation of f(1) from its prime-power main term against 2 log²q + 9√(φ(q) log q).
pub fn check_lemma10(q: u64, a: u64) -> Result<Report> {
    let f = character_sum_log_derivative(q, a)?;
    let phi = euler_phi(q) as f64;
    let lq = (q as f64).ln();
    let main = phi * von_mangoldt(a) / a as f64;
    // L′/L = −Σ Λ(n)χ(n)n^{-s}, so the main term enters f(1) with a minus sign
    let deviation = (f + main).norm();
    let bound = 2.0 * lq * lq + 9.0 * (phi * lq).sqrt();
    Ok(Report::new(
        "character-sum-log-derivative",
        json!({ "q": q, "a": a }),
        json!({
            "f(1)": [f.re, f.im],
            "main_term": main,
            "deviation": deviation,
            "deviation_unsigned": (f - main).norm(),
            "abs_deviation": (f.norm() - main).abs(),
        }),
        json!({ "2log^2 q + 9 sqrt(phi log q)": bound, "with_8": 2.0 * lq * lq + 8.0 * (phi * lq).sqrt() }),
        Status::from_bool(deviation <= bound),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi(q: u64, idx: usize) -> DirichletCharacter {
        build_characters(q).unwrap().character(idx)
    }

    #[test]
    fn leibniz() {
        let l = l_eval(c(1.0, 0.0), &chi(4, 1)).unwrap();
        assert!((l.re - PI / 4.0).abs() < 1e-13 && l.im.abs() < 1e-14);
        let p = chi(4, 0);
        assert!(l_eval(c(1.0, 0.0), &p).is_err());
    }

    #[test]
    fn principal_matches_euler_factor() {
        // L(s, χ₀ mod 6) = ζ(s)(1 − 2^{-s})(1 − 3^{-s})
        let s = c(0.5, 21.0);
        let z = crate::special::zeta(s).unwrap();
        let want = z * (1.0 - c(2.0, 0.0).powc(-s)) * (1.0 - c(3.0, 0.0).powc(-s));
        let got = l_eval(s, &chi(6, 0)).unwrap();
        assert!((got - want).norm() < 1e-11);
    }

    #[test]
    fn log_derivative_finite_difference() {
        for q in [4u64, 3, 5, 7] {
            let t = build_characters(q).unwrap();
            for ch in t.characters().skip(1) {
                let h = 1e-5;
                let lp = l_eval(c(1.0 + h, 0.0), &ch).unwrap();
                let lm = l_eval(c(1.0 - h, 0.0), &ch).unwrap();
                let l = l_eval(c(1.0, 0.0), &ch).unwrap();
                let fd = (lp - lm) / (2.0 * h) / l;
                assert!((fd - l_log_derivative_at_1(&ch).unwrap()).norm() < 1e-6);
            }
        }
        let v = l_log_derivative_at_1(&chi(4, 1)).unwrap();
        assert_eq!(v.im, 0.0);
        assert!(l_log_derivative_at_1(&chi(4, 0)).is_err());
    }

    #[test]
    fn rotated_is_real() {
        for q in [3u64, 4, 5, 7, 8, 12, 15] {
            let t = build_characters(q).unwrap();
            for ch in t.characters().skip(1) {
                let h = HardyL::new(&ch).unwrap();
                for k in 0..40 {
                    let t = -30.0 + 1.537 * k as f64;
                    let r = h.rotated(t);
                    assert!(r.im.abs() <= 1e-8 * (1.0 + r.re.abs()), "q={q} t={t} {r}");
                }
            }
        }
    }

    #[test]
    fn first_zero_mod_4() {
        let z = compute_l_zeros(&chi(4, 1), 10.0).unwrap();
        let g = z.gammas_pos()[0];
        assert!((g - 6.020_948_904_697_597).abs() < 1e-8, "{g}");
        assert!(l_eval(c(0.5, g), z.character()).unwrap().norm() < 1e-8);
        for (p, n) in z.gammas_pos().iter().zip(z.gammas_neg()) {
            assert!((p + n).abs() < 1e-9);
        }
        assert_eq!(z.gammas_pos().len(), z.gammas_neg().len());
    }

    #[test]
    fn capacity_and_domain() {
        assert!(matches!(compute_l_zeros(&chi(4, 1), 201.0), Err(Error::Capacity { .. })));
        assert!(compute_l_zeros(&chi(4, 0), 10.0).is_err());
        assert!(matches!(compute_l_zeros(&chi(53, 1), 10.0), Err(Error::Capacity { .. })));
    }

    #[test]
    fn file_round_trip() {
        let z = compute_l_zeros(&chi(5, 1), 30.0).unwrap();
        let mut buf = Vec::new();
        z.write_to(&mut buf).unwrap();
        let back = load_l_zeros(buf.as_slice()).unwrap();
        assert_eq!(back.character(), z.character());
        assert_eq!(back.complete_to(), 30.0);
        for (a, b) in back.all_gammas().zip(z.all_gammas()) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(load_l_zeros("6.020948905\n".as_bytes()).is_err());
    }

    #[test]
    fn lemma10_examples() {
        let r = check_lemma10(11, 2).unwrap();
        assert!(r.passed());
        let r = check_lemma10(12, 1).unwrap();
        assert_eq!(r.measured["main_term"], 0.0);
        let r = check_lemma10(13, 3).unwrap();
        assert!((r.measured["main_term"].as_f64().unwrap() - 12.0 * 3f64.ln() / 3.0).abs() < 1e-12);
        assert!(check_lemma10(12, 2).is_err());
    }
}
