//! Truncated oscillation sums over zeros and the explicit formulas for ψ.
//!
//! For a zero set {ρ = 1/2 + iγ} the basic object is
//! `Δ_T(t) = Σ_{|γ|<T} w_γ e^{itγ}/ρ` with weights `w_γ` (1 for a single ζ or
//! L-function, χ(a)/φ(q) for a residue-class combination).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use crate::arith::{euler_phi, factorize, gcd};
use crate::characters::{build_characters, DirichletCharacter};
use crate::error::{domain, Error, Result};
use crate::l_functions::{l_log_derivative_at_1, LZeroList};
use crate::numeric::{composite_gl, integrate, NeumaierSum};
use crate::report::{Report, Status};
use crate::sieve::census;
use crate::special::EULER_GAMMA;
use crate::zeta_zeros::{reciprocal_square_sum, ZeroList};

pub use crate::special::li;

/// Panel width cap for all quadratures of |Δ|².
pub const QUAD_WIDTH: f64 = 1e-3;
/// Two evaluations of the same L² integral must agree to this.
pub const L2_AGREEMENT_TOL: f64 = 1e-8;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rho(g: f64) -> Complex64 {
    c(0.5, g)
}

/// Zeros belonging to one character: ζ for the principal character, the
/// zeros of L(s, χ) otherwise.
#[derive(Debug, Clone, Copy)]
pub enum ZeroData<'a> {
    Zeta(&'a ZeroList),
    L(&'a LZeroList),
}

impl ZeroData<'_> {
    pub fn complete_to(&self) -> f64 {
        match self {
            ZeroData::Zeta(z) => z.complete_to(),
            ZeroData::L(z) => z.complete_to(),
        }
    }

    /// Ordinates with `lo ≤ |γ| < hi`, both signs.
    fn ordinates(&self, lo: f64, hi: f64) -> Vec<f64> {
        let keep = |g: &f64| g.abs() >= lo && g.abs() < hi;
        match self {
            ZeroData::Zeta(z) => z
                .gammas()
                .iter()
                .filter(|g| keep(g))
                .flat_map(|&g| [g, -g])
                .collect(),
            ZeroData::L(z) => z.all_gammas().filter(keep).collect(),
        }
    }

    fn require(&self, t: f64) -> Result<()> {
        if t > self.complete_to() {
            return Err(Error::InsufficientData {
                needed: t,
                available: self.complete_to(),
            });
        }
        Ok(())
    }
}

/// A truncated sum `Σ w e^{itγ}/ρ` with a per-t cache.
#[derive(Debug)]
pub struct DeltaSeries {
    height: f64,
    /// (γ, w/ρ)
    terms: Vec<(f64, Complex64)>,
    cache: Mutex<HashMap<u64, Complex64>>,
}

impl Clone for DeltaSeries {
    fn clone(&self) -> Self {
        DeltaSeries::from_terms(self.height, self.terms.clone())
    }
}

impl DeltaSeries {
    fn from_terms(height: f64, terms: Vec<(f64, Complex64)>) -> Self {
        DeltaSeries {
            height,
            terms,
            cache: Mutex::new(HashMap::new()),
        }
    }

    fn weighted(data: ZeroData, lo: f64, hi: f64, w: Complex64) -> Vec<(f64, Complex64)> {
        data.ordinates(lo, hi)
            .into_iter()
            .map(|g| (g, w / rho(g)))
            .collect()
    }

    /// Δ_T(t) over the zeros of ζ, both signs of γ.
    pub fn zeta(zeros: &ZeroList, t: f64) -> Result<Self> {
        Self::single(ZeroData::Zeta(zeros), t)
    }

    /// Δ_T(t, χ) over the zeros of L(s, χ).
    pub fn character(zeros: &LZeroList, t: f64) -> Result<Self> {
        Self::single(ZeroData::L(zeros), t)
    }

    pub fn single(data: ZeroData, t: f64) -> Result<Self> {
        data.require(t)?;
        Ok(Self::from_terms(t, Self::weighted(data, 0.0, t, c(1.0, 0.0))))
    }

    /// The band `t1 ≤ |γ| < t2`, i.e. Δ_{t2} − Δ_{t1}.
    pub fn band(data: ZeroData, t1: f64, t2: f64) -> Result<Self> {
        data.require(t2)?;
        Ok(Self::from_terms(t2, Self::weighted(data, t1, t2, c(1.0, 0.0))))
    }

    /// Δ_T(t, q, a) = (1/φ(q)) Σ_χ χ(a) Δ_T(t, χ); `data[i]` holds the zeros of
    /// the character with table index `i`.
    pub fn residue_class(q: u64, a: u64, data: &[ZeroData], t: f64) -> Result<Self> {
        if gcd(a, q) != 1 {
            return domain(format!("gcd({a}, {q}) != 1"));
        }
        let table = build_characters(q)?;
        if data.len() != table.len() {
            return domain(format!(
                "need zero data for all {} characters mod {q}, got {}",
                table.len(),
                data.len()
            ));
        }
        let phi = table.phi() as f64;
        let mut terms = Vec::new();
        for (i, d) in data.iter().enumerate() {
            check_pairing(&table.character(i), d)?;
            d.require(t)?;
            terms.extend(Self::weighted(*d, 0.0, t, table.value(i, a as i64) / phi));
        }
        Ok(Self::from_terms(t, terms))
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Σ |w/ρ|, an upper bound for |Δ_T(t)| at every t.
    pub fn abs_bound(&self) -> f64 {
        self.terms.iter().map(|(_, w)| w.norm()).sum()
    }

    pub fn eval_uncached(&self, t: f64) -> Complex64 {
        let mut re = NeumaierSum::default();
        let mut im = NeumaierSum::default();
        for &(g, w) in &self.terms {
            let (s, co) = (t * g).sin_cos();
            let v = w * c(co, s);
            re.add(v.re);
            im.add(v.im);
        }
        c(re.value(), im.value())
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let key = t.to_bits();
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return *v;
        }
        let v = self.eval_uncached(t);
        self.cache.lock().unwrap().insert(key, v);
        v
    }

    /// ∫_b^a |Δ(t)|² dt by composite Gauss–Legendre, panels ≤ min(1e-3, 1/(2T)).
    pub fn l2_quadrature(&self, b: f64, a: f64) -> f64 {
        let width = QUAD_WIDTH.min(0.5 / self.height.max(1.0));
        let mut nodes = Vec::new();
        composite_gl(b, a, width, |x, w| nodes.push((x, w)));
        let parts: Vec<f64> = nodes
            .par_chunks(256)
            .map(|ch| ch.iter().map(|&(x, w)| w * self.eval_uncached(x).norm_sqr()).sum())
            .collect();
        parts.into_iter().collect::<NeumaierSum>().value()
    }

    /// ∫_b^a |Δ(t)|² dt as the double sum Σ w₁ conj(w₂) ∫_b^a e^{it(γ₁−γ₂)} dt.
    pub fn l2_double_sum(&self, b: f64, a: f64) -> f64 {
        let kernel = |d: f64| -> Complex64 {
            if (d * a.abs().max(b.abs())).abs() < 1e-7 {
                c(a - b, 0.5 * d * (a * a - b * b))
            } else {
                let (sa, ca) = (a * d).sin_cos();
                let (sb, cb) = (b * d).sin_cos();
                (c(ca, sa) - c(cb, sb)) / c(0.0, d)
            }
        };
        let parts: Vec<f64> = self
            .terms
            .par_iter()
            .map(|&(g1, w1)| {
                let mut s = NeumaierSum::default();
                for &(g2, w2) in &self.terms {
                    s.add((w1 * w2.conj() * kernel(g1 - g2)).re);
                }
                s.value()
            })
            .collect();
        parts.into_iter().collect::<NeumaierSum>().value()
    }
}

fn check_pairing(chi: &DirichletCharacter, d: &ZeroData) -> Result<()> {
    match d {
        ZeroData::Zeta(_) if chi.is_principal() => Ok(()),
        ZeroData::L(z)
            if !chi.is_principal()
                && z.character().modulus() == chi.modulus()
                && z.character().index() == chi.index() =>
        {
            Ok(())
        }
        _ => domain(format!(
            "zero data does not belong to character {} mod {}",
            chi.index(),
            chi.modulus()
        )),
    }
}

/// Δ_T(t) for ζ by direct summation.
pub fn delta_t(t: f64, zeros: &ZeroList, height: f64) -> Result<Complex64> {
    Ok(DeltaSeries::zeta(zeros, height)?.eval_uncached(t))
}

/// Δ_T(t, q, a).
pub fn delta_qa(t: f64, q: u64, a: u64, data: &[ZeroData], height: f64) -> Result<Complex64> {
    Ok(DeltaSeries::residue_class(q, a, data, height)?.eval_uncached(t))
}

/// ψ(x) ≈ x − √x Δ_T(log x) − log 2π − ½ log(1 − x⁻²).
pub fn psi_via_zeros(x: f64, zeros: &ZeroList, height: f64) -> Result<f64> {
    psi_from_series(x, &DeltaSeries::zeta(zeros, height)?)
}

pub fn psi_from_series(x: f64, delta: &DeltaSeries) -> Result<f64> {
    if !(x > 1.0) {
        return domain(format!("explicit formula needs x > 1, got {x}"));
    }
    let t = x.ln();
    Ok(x - x.sqrt() * delta.eval(t).re - (2.0 * PI).ln() - 0.5 * (-(-2.0 * t).exp()).ln_1p())
}

/// Δ(t) on 0 < t < log 2, where ψ(e^t) = 0 forces
/// Δ(t) = e^{t/2} − (log 2π + ½ log(1 − e^{−2t})) e^{−t/2}.
pub fn small_t_closed_form(t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 2f64.ln()) {
        return domain(format!("closed form holds for 0 < t < log 2, got {t}"));
    }
    Ok((0.5 * t).exp() - ((2.0 * PI).ln() + 0.5 * (-(-2.0 * t).exp()).ln_1p()) * (-0.5 * t).exp())
}

/// ∫|Δ_T − closed form|² over [lo, hi]: returns (integral, root mean square).
pub fn small_t_deviation(zeros: &ZeroList, height: f64, lo: f64, hi: f64) -> Result<(f64, f64)> {
    small_t_closed_form(lo)?;
    small_t_closed_form(hi)?;
    let d = DeltaSeries::zeta(zeros, height)?;
    let width = QUAD_WIDTH.min(0.5 / height.max(1.0));
    let mut nodes = Vec::new();
    composite_gl(lo, hi, width, |x, w| nodes.push((x, w)));
    let sq: f64 = nodes
        .par_iter()
        .map(|&(x, w)| {
            let r = d.eval_uncached(x).re - small_t_closed_form(x).unwrap();
            w * r * r
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .collect::<NeumaierSum>()
        .value();
    Ok((sq, (sq / (hi - lo)).sqrt()))
}

/// Both evaluations of ∫_b^a |Δ_{T2} − Δ_{T1}|² dt, and the (2/9) log³/T envelope.
pub fn l2_truncation_check(a: f64, b: f64, data: ZeroData, t1: f64, t2: f64) -> Result<Report> {
    if !(0.0 < b && b < a && a - b < 1.0 / 36.0) {
        return domain(format!("need 0 < b < a with a - b < 1/36, got b={b}, a={a}"));
    }
    if !(t1 <= t2) || !(t1 > 0.0) {
        return domain(format!("need 0 < T1 <= T2, got T1={t1}, T2={t2}"));
    }
    let band = DeltaSeries::band(data, t1, t2)?;
    let quad = band.l2_quadrature(b, a);
    let sum = band.l2_double_sum(b, a);
    let (log_arg, which) = match data {
        ZeroData::Zeta(_) => (t1, "zeta"),
        ZeroData::L(z) => (z.character().modulus() as f64 * t1, "L"),
    };
    let envelope = 2.0 / 9.0 * log_arg.ln().powi(3) / t1;
    let agree = (quad - sum).abs() <= L2_AGREEMENT_TOL;
    let under = quad.max(sum) < envelope;
    Ok(Report::new(
        "l2-truncation-identity",
        json!({ "a": a, "b": b, "T1": t1, "T2": t2, "zeros": which, "terms": band.len() }),
        json!({ "quadrature": quad, "double_sum": sum, "difference": (quad - sum).abs(), "under_envelope": under }),
        json!({ "envelope": envelope }),
        Status::from_bool(agree && under),
    )
    .with_tolerance(L2_AGREEMENT_TOL))
}

/// Constants of the explicit formula for ψ(x, χ).
#[derive(Debug, Clone, Serialize)]
pub struct CharacterConstants {
    pub index: usize,
    /// E_χ: 1 for the principal character.
    pub e: u8,
    /// d_χ: 1 for even non-principal characters.
    pub d: u8,
    pub parity: u8,
    pub conductor: u64,
    /// Constant term B(χ) of the formula as implemented; for the principal
    /// character it is −log 2π (the ζ formula).
    pub b: Complex64,
    /// L′/L(1, χ̄) for non-principal χ.
    pub log_derivative_conj: Option<Complex64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExplicitFormulaConstants {
    pub q: u64,
    /// −ζ′/ζ(0) enters ψ as −log 2π; this field is ζ′/ζ(0) = log 2π.
    pub zeta_log_deriv_at_0: f64,
    pub characters: Vec<CharacterConstants>,
}

/// B(χ) for a primitive non-principal character mod q:
/// log(q/2π) − γ + L′/L(1, χ̄).
fn b_primitive(chi: &DirichletCharacter) -> Result<(Complex64, Complex64)> {
    let ld = l_log_derivative_at_1(&chi.conj())?;
    let q = chi.modulus() as f64;
    Ok(((q / (2.0 * PI)).ln() - EULER_GAMMA + ld, ld))
}

/// The constant written as −E_χ + log 2 − γ + log(q/π) + L′/L(1, χ̄).
pub fn b_as_written(chi: &DirichletCharacter) -> Result<Complex64> {
    let ld = l_log_derivative_at_1(&chi.conj())?;
    let q = chi.modulus() as f64;
    Ok(2f64.ln() - EULER_GAMMA + (q / PI).ln() + ld)
}

impl ExplicitFormulaConstants {
    pub fn new(q: u64) -> Result<Self> {
        let table = build_characters(q)?;
        let mut characters = Vec::with_capacity(table.len());
        for chi in table.characters() {
            let principal = chi.is_principal();
            let (b, ld) = if principal {
                (c(-(2.0 * PI).ln(), 0.0), None)
            } else {
                let (b, _) = b_primitive(&chi.primitive())?;
                (b, Some(l_log_derivative_at_1(&chi.conj())?))
            };
            characters.push(CharacterConstants {
                index: chi.index(),
                e: principal as u8,
                d: (!principal && chi.parity() == 0) as u8,
                parity: chi.parity(),
                conductor: chi.conductor(),
                b,
                log_derivative_conj: ld,
            });
        }
        Ok(ExplicitFormulaConstants {
            q,
            zeta_log_deriv_at_0: (2.0 * PI).ln(),
            characters,
        })
    }
}

/// R(x, χ): ½ log(1 − x⁻²), plus log(x/(x+1)) for odd χ.
pub fn r_term(x: f64, parity: u8) -> f64 {
    let even = 0.5 * (-(x * x).recip()).ln_1p();
    if parity == 0 {
        even
    } else {
        even + (x / (x + 1.0)).ln()
    }
}

/// Σ_{p | q, p ∤ q*} Σ_{p^k ≤ x} χ*(p)^k log p: the prime powers that ψ(x, χ*)
/// counts but ψ(x, χ) does not.
fn imprimitive_correction(x: f64, chi: &DirichletCharacter) -> Complex64 {
    let prim = chi.primitive();
    let qs = prim.modulus();
    let mut s = c(0.0, 0.0);
    for (p, _) in factorize(chi.modulus()) {
        if qs % p == 0 {
            continue;
        }
        let v = prim.value(p as i64);
        let lp = (p as f64).ln();
        let mut pk = p as f64;
        let mut vk = v;
        while pk <= x {
            s += vk * lp;
            pk *= p as f64;
            vk *= v;
        }
    }
    s
}

/// Truncated right-hand side of the explicit formula for ψ(x, χ).
pub fn psi_chi_via_zeros(
    x: f64,
    chi: &DirichletCharacter,
    zeros: ZeroData,
    constants: &ExplicitFormulaConstants,
    height: f64,
) -> Result<Complex64> {
    if !(x > 1.0) {
        return domain(format!("explicit formula needs x > 1, got {x}"));
    }
    check_pairing(chi, &zeros).map_err(|_| {
        Error::Domain(if chi.is_principal() {
            "the principal character needs zeta zero data".into()
        } else {
            format!("zero data does not belong to character {} mod {}", chi.index(), chi.modulus())
        })
    })?;
    let k = &constants.characters[chi.index()];
    let delta = DeltaSeries::single(zeros, height)?.eval_uncached(x.ln());
    let sx = x.sqrt();
    if chi.is_principal() {
        let pp: f64 = factorize(chi.modulus())
            .into_iter()
            .map(|(p, _)| (p as f64).ln() * (x.ln() / (p as f64).ln()).floor())
            .sum();
        let v = x - sx * delta.re + k.b.re - r_term(x, 0) - pp;
        return Ok(c(v, 0.0));
    }
    Ok(-sx * delta - k.d as f64 * x.ln() - r_term(x, k.parity) + k.b - imprimitive_correction(x, chi))
}

/// Π(x) − li x against (ψ(x) − x)/log x, and π(x) − Π(x) against −½ li √x.
pub fn lemma6_chain_check(x: f64, zeros: &ZeroList, height: f64) -> Result<Report> {
    if !(x >= 1e3) {
        return domain(format!("chain check needs x >= 1000, got {x}"));
    }
    let recip = reciprocal_square_sum(&zeros.truncated(height)?)?;
    let n = x.floor() as u64;
    let cs = census(3, n, &[n])?;
    let (pi, psi, big_pi) = (cs.pi_total[0] as f64, cs.psi_total[0], cs.big_pi_total[0]);
    let lx = x.ln();
    let lhs = big_pi - li(x)?;
    let rhs = (psi - x) / lx;
    let envelope = (0.05 / lx + x.powf(-1.0 / 6.0) * lx) * x.sqrt() / lx;
    let second = pi - big_pi + 0.5 * li(x.sqrt())?;
    let cube = x.cbrt();
    let ok = (lhs - rhs).abs() <= envelope && second.abs() <= cube && recip.hi <= 0.05;
    Ok(Report::new(
        "psi-to-pi-transfer",
        json!({ "x": x, "T": height }),
        json!({
            "Pi(x)-li(x)": lhs,
            "(psi(x)-x)/log x": rhs,
            "difference": lhs - rhs,
            "pi(x)-Pi(x)+li(sqrt x)/2": second,
            "sum_reciprocal_squares_upper": recip.hi,
        }),
        json!({ "difference": envelope, "x^(1/3)": cube, "sum_reciprocal_squares": 0.05 }),
        Status::from_bool(ok),
    ))
}

/// ∫_0^x Δ_T(t, χ) + Δ_T(−t, χ) dt against 53 x log q, truncated at the list height.
pub fn lemma12_integral_check(x: f64, zeros: &LZeroList) -> Result<Report> {
    if !(x > 0.0 && x <= 0.01) {
        return domain(format!("need 0 < x <= 0.01, got {x}"));
    }
    let height = zeros.complete_to();
    let d = DeltaSeries::character(zeros, height)?;
    let width = QUAD_WIDTH.min(0.5 / height.max(1.0));
    let mut acc_re = NeumaierSum::default();
    let mut acc_im = NeumaierSum::default();
    composite_gl(0.0, x, width, |t, w| {
        let v = (d.eval_uncached(t) + d.eval_uncached(-t)) * w;
        acc_re.add(v.re);
        acc_im.add(v.im);
    });
    let quad = c(acc_re.value(), acc_im.value());
    // ∫_0^x 2 cos(tγ) dt / ρ = 2 sin(xγ)/(γρ)
    let closed: Complex64 = zeros
        .all_gammas()
        .map(|g| {
            let i = if g == 0.0 { 2.0 * x } else { 2.0 * (x * g).sin() / g };
            i / rho(g)
        })
        .sum();
    let q = zeros.character().modulus() as f64;
    let bound = 53.0 * x * q.ln();
    Ok(Report::new(
        "integral-near-zero",
        json!({ "x": x, "q": q, "chi": zeros.character().index(), "T": height }),
        json!({ "abs_integral": quad.norm(), "integral": [quad.re, quad.im], "closed_form": [closed.re, closed.im] }),
        json!(bound),
        Status::from_bool(quad.norm() < bound),
    ))
}

/// Δ_T(t, q, a) near 0 against the main term log q − ½ log(1 − e^{−2t})
/// (a = 1) and the bound 3 (a ≢ 1). Measured only.
pub fn lemma11_neighborhood_check(q: u64, t_grid: &[f64], data: &[ZeroData], height: f64) -> Result<Report> {
    if let Some(&t) = t_grid.iter().find(|&&t| !(t > 0.0 && t < 2f64.ln())) {
        return domain(format!("grid point {t} outside (0, log 2)"));
    }
    let phi = euler_phi(q);
    let one = DeltaSeries::residue_class(q, 1, data, height)?;
    let mut worst_main: f64 = 0.0;
    let mut deviations = Vec::new();
    for &t in t_grid {
        let main = (q as f64).ln() - 0.5 * (-(-2.0 * t).exp()).ln_1p();
        let dev = (one.eval(t) * (0.5 * t).exp() - main).norm();
        worst_main = worst_main.max(dev);
        deviations.push(dev);
    }
    let mut worst_other: f64 = 0.0;
    let mut worst_residue = None;
    for a in 2..q {
        if gcd(a, q) != 1 {
            continue;
        }
        let d = DeltaSeries::residue_class(q, a, data, height)?;
        for &t in t_grid {
            let v = d.eval_uncached(t).norm();
            if v > worst_other {
                worst_other = v;
                worst_residue = Some(a);
            }
        }
    }
    Ok(Report::new(
        "residue-sum-near-zero",
        json!({ "q": q, "phi": phi, "T": height, "grid": t_grid }),
        json!({
            "a=1 max deviation": worst_main,
            "a=1 deviations": deviations,
            "a!=1 max abs": worst_other,
            "a!=1 argmax": worst_residue,
        }),
        json!({ "a=1": 2.0, "a!=1": 3.0 }),
        Status::ReportOnly,
    ))
}

/// RMS of ψ_sieve − ψ_zeros over the sample points for each truncation height.
pub fn explicit_residuals(
    zeros: &ZeroList,
    heights: &[f64],
    samples: &[(f64, f64)],
) -> Result<Vec<f64>> {
    heights
        .iter()
        .map(|&h| {
            let d = DeltaSeries::zeta(zeros, h)?;
            let sq: f64 = samples
                .iter()
                .map(|&(x, psi)| {
                    let r = psi - psi_from_series(x, &d)?;
                    Ok(r * r)
                })
                .sum::<Result<f64>>()?;
            Ok((sq / samples.len() as f64).sqrt())
        })
        .collect()
}

/// `n` sample points in [lo, hi], each the midpoint between consecutive prime
/// powers near a geometric grid, paired with the exact ψ there.
pub fn psi_samples(lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let top = hi.ceil() as u64 + 64;
    let pps: Vec<u64> = crate::sieve::PrimePowers::up_to(top).map(|p| p.n).collect();
    let mut psi_at = Vec::with_capacity(pps.len());
    let mut acc = NeumaierSum::default();
    for pp in crate::sieve::PrimePowers::up_to(top) {
        acc.add((pp.p as f64).ln());
        psi_at.push(acc.value());
    }
    (0..n)
        .map(|k| {
            let target = lo * (hi / lo).powf((k as f64 + 0.5) / n as f64);
            let i = pps.partition_point(|&p| (p as f64) <= target);
            let (a, b) = (pps[i - 1] as f64, pps[i] as f64);
            (0.5 * (a + b), psi_at[i - 1])
        })
        .collect()
}

/// The ψ(x) residual sweep at several truncation heights.
pub fn explicit_sweep(zeros: &ZeroList, heights: &[f64], lo: f64, hi: f64, n: usize) -> Result<Report> {
    let samples = psi_samples(lo, hi, n);
    let rms = explicit_residuals(zeros, heights, &samples)?;
    let decreasing = rms.windows(2).all(|w| w[1] <= w[0]);
    Ok(Report::new(
        "explicit-formula-residual",
        json!({ "heights": heights, "x_range": [lo, hi], "samples": n }),
        json!({ "rms": rms, "non_increasing": decreasing }),
        json!(null),
        Status::from_bool(decreasing),
    ))
}

/// Quadrature of a smooth function, exposed for callers building their own checks.
pub fn quad<F: FnMut(f64) -> f64>(a: f64, b: f64, f: F) -> f64 {
    integrate(a, b, QUAD_WIDTH, f)
}
