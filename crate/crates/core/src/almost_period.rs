//! Simultaneous Diophantine approximation: real s with s·(t₁,…,tₙ) close to
//! the integer lattice, pairwise separated.
//!
//! The primary search walks s upward in windows of width δ = ε/(4Σtᵢ). In a
//! window the nearest lattice point is fixed, so the squared torus distance is
//! a quadratic in s and the smallest admissible s is found in closed form.
//! A pigeonhole search over multiples of the separation is kept as a fallback.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::special::ln_gamma;

pub const MAX_DIMENSION: usize = 8;
/// `(M + 1) · max tᵢ` may not exceed this, keeping s·tᵢ exact to ~1e-6.
pub const MAX_SCALED_BOUND: f64 = 1.0e10;
/// Window scans beyond this many steps hand over to the pigeonhole search.
const SCAN_BUDGET: u64 = 4_000_000_000;

/// Euclidean distance from `v` to the nearest lattice point.
pub fn torus_norm(v: &[f64]) -> f64 {
    v.iter()
        .map(|x| {
            let f = x - x.floor();
            let d = f.min(1.0 - f);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// M = N·2ⁿ·Γ(n/2)/(π^{n/2}·εⁿ).
pub fn pigeonhole_bound(n: usize, epsilon: f64, count: usize) -> f64 {
    let nf = n as f64;
    let ln_m = (count as f64).ln() + nf * 2f64.ln()
        + ln_gamma(num_complex::Complex64::new(nf / 2.0, 0.0)).re
        - nf / 2.0 * PI.ln()
        - nf * epsilon.ln();
    ln_m.exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlmostPeriodSet {
    pub freqs: Vec<f64>,
    pub epsilon: f64,
    #[serde(rename = "N")]
    pub count: usize,
    pub min_gap: f64,
    pub s: Vec<f64>,
    #[serde(rename = "M")]
    pub bound: f64,
}

impl AlmostPeriodSet {
    /// Re-check every invariant from scratch.
    pub fn verify(&self) -> std::result::Result<(), String> {
        if self.s.len() != self.count {
            return Err(format!("{} values, expected {}", self.s.len(), self.count));
        }
        for (i, &s) in self.s.iter().enumerate() {
            let v: Vec<f64> = self.freqs.iter().map(|t| s * t).collect();
            let norm = torus_norm(&v);
            if !(norm < self.epsilon) {
                return Err(format!("s[{i}] = {s}: torus norm {norm} >= {}", self.epsilon));
            }
        }
        if self.s.first().is_some_and(|&s| s <= 1.0) {
            return Err("s_1 must exceed 1".into());
        }
        for w in self.s.windows(2) {
            if w[1] < w[0] + self.min_gap {
                return Err(format!("{} and {} closer than {}", w[0], w[1], self.min_gap));
            }
        }
        if self.s.last().is_some_and(|&s| s > self.bound + 1.0) {
            return Err("s_N exceeds M + 1".into());
        }
        Ok(())
    }
}

/// Window geometry: δ small enough that the torus image moves < ε/4 per
/// window and the midpoint rounding identifies the nearest lattice point.
pub fn grid_step(freqs: &[f64], epsilon: f64) -> f64 {
    let sum: f64 = freqs.iter().sum();
    let tmax = freqs.iter().copied().fold(0.0, f64::max);
    (epsilon / (4.0 * sum)).min((1.0 - 2.0 * epsilon) / tmax * 0.999)
}

fn norm_of(freqs: &[f64], s: f64) -> f64 {
    let v: Vec<f64> = freqs.iter().map(|t| s * t).collect();
    torus_norm(&v)
}

/// Smallest admissible s in window [u, u + δ] with s ≥ `start` (s > `start`
/// when `open`).
fn window_candidate(freqs: &[f64], eps: f64, u: f64, delta: f64, start: f64, open: bool) -> Option<f64> {
    let m = u + 0.5 * delta;
    let (mut a, mut r, mut q) = (0.0, 0.0, 0.0);
    for &t in freqs {
        let x = m * t;
        let ri = x - x.round();
        a += t * t;
        r += ri * t;
        q += ri * ri;
    }
    let inner = eps * (1.0 - 1e-7);
    let disc = r * r - a * (q - inner * inner);
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let lo = m + (-r - sq) / a;
    let hi = m + (-r + sq) / a;
    let mut s = lo.max(u).max(start);
    if open && s <= start {
        s = start + f64::EPSILON * start.abs().max(1.0) * 4.0;
    }
    if s >= hi || s > u + delta {
        return None;
    }
    // guard against rounding at the window edge
    for k in 0..8 {
        let cand = s + k as f64 * 1e-12 * s.abs().max(1.0);
        if cand < hi && norm_of(freqs, cand) < eps {
            return Some(cand);
        }
    }
    None
}

/// First admissible s ≥ start (or > start), scanning windows up to `limit`.
fn scan_from(freqs: &[f64], eps: f64, delta: f64, start: f64, open: bool, limit: f64) -> Option<f64> {
    const BLOCK: u64 = 1 << 14;
    const TASKS: u64 = 64;
    let total = ((limit - start) / delta).ceil().max(0.0) as u64 + 1;
    let mut base = 0u64;
    while base < total {
        let found = (0..TASKS)
            .into_par_iter()
            .map(|task| {
                let lo = base + task * BLOCK;
                let hi = (lo + BLOCK).min(total);
                (lo..hi).find_map(|k| {
                    let u = start + k as f64 * delta;
                    window_candidate(freqs, eps, u, delta, start, open)
                })
            })
            .find_first(|c| c.is_some())
            .flatten();
        if let Some(s) = found {
            return (s <= limit).then_some(s);
        }
        base += TASKS * BLOCK;
    }
    None
}

fn validate(freqs: &[f64], epsilon: f64, count: usize, min_gap: f64) -> Result<f64> {
    if freqs.is_empty() {
        return domain("need at least one frequency");
    }
    if freqs.len() > MAX_DIMENSION {
        return Err(Error::Capacity {
            what: "number of frequencies",
            value: freqs.len() as f64,
            limit: MAX_DIMENSION as f64,
        });
    }
    if let Some(t) = freqs.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return domain(format!("frequencies must be positive, got {t}"));
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return domain(format!("need 0 < epsilon < 1/2, got {epsilon}"));
    }
    if count == 0 {
        return domain("N must be at least 1");
    }
    if !(min_gap > 0.0 && min_gap.is_finite()) {
        return domain(format!("min_gap must be positive, got {min_gap}"));
    }
    let bound = pigeonhole_bound(freqs.len(), epsilon, count);
    let tmax = freqs.iter().copied().fold(0.0, f64::max);
    if (bound + 1.0) * tmax > MAX_SCALED_BOUND {
        return Err(Error::Capacity {
            what: "(M+1)*max freq",
            value: (bound + 1.0) * tmax,
            limit: MAX_SCALED_BOUND,
        });
    }
    Ok(bound)
}

/// N values 1 < s₁ < … < s_N ≤ M + 1, each with ‖sᵢ·t‖ < ε and gaps ≥ `min_gap`.
/// Each sᵢ is the smallest admissible value above its predecessor's window.
pub fn find_almost_periods(freqs: &[f64], epsilon: f64, count: usize, min_gap: f64) -> Result<AlmostPeriodSet> {
    let bound = validate(freqs, epsilon, count, min_gap)?;
    let delta = grid_step(freqs, epsilon);
    let limit = bound + 1.0;
    let mut s = Vec::with_capacity(count);
    let mut start = 1.0;
    let mut open = true;
    while s.len() < count {
        let reach = limit.min(start + SCAN_BUDGET as f64 * delta);
        match scan_from(freqs, epsilon, delta, start, open, reach) {
            Some(v) => {
                s.push(v);
                start = v + min_gap;
                open = false;
            }
            None if reach < limit => {
                s = pigeonhole_search(freqs, epsilon, count, min_gap, bound)?;
                break;
            }
            None => {
                return Err(Error::NotFound {
                    bound: limit,
                    step: delta,
                })
            }
        }
    }
    Ok(AlmostPeriodSet {
        freqs: freqs.to_vec(),
        epsilon,
        count,
        min_gap,
        s,
        bound,
    })
}

/// Pigeonhole search: multiples k·g of g = max(min_gap, 1) are bucketed into
/// torus cells of side ε/(2√n); two multiples in one cell give a difference
/// with torus norm below ε/2.
pub fn pigeonhole_search(
    freqs: &[f64],
    epsilon: f64,
    count: usize,
    min_gap: f64,
    bound: f64,
) -> Result<Vec<f64>> {
    let n = freqs.len();
    let side = epsilon / (2.0 * (n as f64).sqrt());
    let cells_per_axis = (1.0 / side).ceil() as u64;
    let g = min_gap.max(1.0) * (1.0 + 1e-9);
    let max_k = ((bound + 1.0) / g).floor() as u64;
    let mut seen: HashMap<Vec<u64>, u64> = HashMap::new();
    let mut out: Vec<f64> = Vec::new();
    for k in 0..=max_k {
        let s = k as f64 * g;
        let cell: Vec<u64> = freqs
            .iter()
            .map(|t| {
                let x = s * t;
                (((x - x.floor()) / side) as u64).min(cells_per_axis - 1)
            })
            .collect();
        if let Some(&j) = seen.get(&cell) {
            let d = (k - j) as f64 * g;
            if out.last().map_or(d > 1.0, |&prev| d >= prev + min_gap) && norm_of(freqs, d) < epsilon {
                out.push(d);
                if out.len() == count {
                    return Ok(out);
                }
            }
        }
        seen.insert(cell, k);
    }
    Err(Error::NotFound {
        bound: bound + 1.0,
        step: g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_examples() {
        assert_eq!(torus_norm(&[0.5]), 0.5);
        assert_eq!(torus_norm(&[1.0, 2.0]), 0.0);
        assert!((torus_norm(&[0.3, 0.8]) - 0.13f64.sqrt()).abs() < 1e-12);
        assert!((torus_norm(&[-0.3]) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn bound_formula() {
        // n = 1: M = 2N/ε
        assert!((pigeonhole_bound(1, 0.1, 3) - 60.0).abs() < 1e-9);
        // n = 2: M = 4N/(πε²)
        assert!((pigeonhole_bound(2, 0.25, 1) - 4.0 / (PI * 0.0625)).abs() < 1e-9);
        let m = pigeonhole_bound(3, 0.2, 2);
        assert!((pigeonhole_bound(3, 0.1, 2) / m - 8.0).abs() < 1e-9);
    }

    #[test]
    fn integer_frequency() {
        let r = find_almost_periods(&[1.0], 0.1, 2, 1.0).unwrap();
        r.verify().unwrap();
        assert!(r.s[0] > 1.0 && r.s[0] < 1.1);
        assert!(r.s[1] >= r.s[0] + 1.0);
    }

    #[test]
    fn sqrt2() {
        let r = find_almost_periods(&[2f64.sqrt()], 0.1, 1, 1.0).unwrap();
        r.verify().unwrap();
        let brute = (1..2_000_000)
            .map(|k| 1.0 + k as f64 * 1e-5)
            .find(|&s| norm_of(&[2f64.sqrt()], s) < 0.1)
            .unwrap();
        assert!((r.s[0] - brute).abs() <= 1e-5, "{} vs {brute}", r.s[0]);
    }

    #[test]
    fn pigeonhole_fallback_is_valid() {
        let freqs = [2f64.sqrt(), 3f64.sqrt()];
        // cubes need more room than the ball-volume bound M provides
        let m = 10_000.0;
        let s = pigeonhole_search(&freqs, 0.25, 3, 1.0, m).unwrap();
        let set = AlmostPeriodSet {
            freqs: freqs.to_vec(),
            epsilon: 0.25,
            count: 3,
            min_gap: 1.0,
            s,
            bound: m,
        };
        set.verify().unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        assert!(find_almost_periods(&[], 0.1, 1, 1.0).is_err());
        assert!(find_almost_periods(&[1.0], 0.5, 1, 1.0).is_err());
        assert!(find_almost_periods(&[1.0], 0.1, 0, 1.0).is_err());
        assert!(find_almost_periods(&[-1.0], 0.1, 1, 1.0).is_err());
        assert!(matches!(
            find_almost_periods(&[1.0; 9], 0.1, 1, 1.0),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn json_shape() {
        let r = find_almost_periods(&[2f64.sqrt()], 0.1, 1, 1.0).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for k in ["freqs", "epsilon", "N", "min_gap", "s", "M"] {
            assert!(v.get(k).is_some(), "{k}");
        }
    }
}
