//! Dirichlet characters modulo q.
//!
//! A character is stored exactly: its value at a unit `a` is `e^{2πi k/L}` where
//! `L` is the exponent of `(Z/qZ)^*` and `k` is an integer exponent. The group is
//! split by CRT into prime-power factors, each with a fixed set of generators
//! (least primitive root for odd `p^k`, `⟨-1, 5⟩` for `2^k`), and characters are
//! enumerated in mixed-radix order of their exponent digits, so the principal
//! character always has index 0.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::arith::{factorize, gcd, lcm, least_primitive_root, prime_power};
use crate::error::{domain, Error, Result};

/// Largest group order `build_characters` accepts.
pub const MAX_GROUP_ORDER: u64 = 10_000;

#[derive(Debug, Clone)]
struct Generator {
    /// Modulus of the prime-power factor this generator lives in.
    factor_modulus: u64,
    order: u64,
}

#[derive(Debug, Clone)]
pub struct CharacterTable {
    q: u64,
    phi: usize,
    exponent: u64,
    gens: Vec<Generator>,
    /// Discrete-log digits of every residue mod q (None if not a unit).
    logs: Vec<Option<Vec<u32>>>,
    /// Exponent digits of every character.
    digits: Vec<Vec<u32>>,
}

/// A single character with its values materialized as exact exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletCharacter {
    modulus: u64,
    index: usize,
    denom: u64,
    exps: Vec<Option<u32>>,
}

fn unit_root(k: u64, denom: u64) -> Complex64 {
    let k = k % denom;
    // exact values on the quarter points keep real characters exactly real
    if k == 0 {
        Complex64::new(1.0, 0.0)
    } else if 2 * k == denom {
        Complex64::new(-1.0, 0.0)
    } else if 4 * k == denom {
        Complex64::new(0.0, 1.0)
    } else if 4 * k == 3 * denom {
        Complex64::new(0.0, -1.0)
    } else {
        let (s, c) = (2.0 * PI * k as f64 / denom as f64).sin_cos();
        Complex64::new(c, s)
    }
}

/// Discrete logs inside one prime-power factor: returns digits per residue mod `m`.
fn factor_logs(p: u64, k: u32) -> (Vec<Generator>, Vec<Option<Vec<u32>>>) {
    let m = p.pow(k);
    let mut logs = vec![None; m as usize];
    if p == 2 {
        match k {
            1 => {
                logs[1] = Some(vec![]);
                (vec![], logs)
            }
            2 => {
                logs[1] = Some(vec![0]);
                logs[3] = Some(vec![1]);
                (vec![Generator { factor_modulus: m, order: 2 }], logs)
            }
            _ => {
                let ord5 = m / 4;
                let mut x = 1u64;
                for j in 0..ord5 {
                    logs[x as usize] = Some(vec![0, j as u32]);
                    logs[(m - x) as usize] = Some(vec![1, j as u32]);
                    x = x * 5 % m;
                }
                let gens = vec![
                    Generator { factor_modulus: m, order: 2 },
                    Generator { factor_modulus: m, order: ord5 },
                ];
                (gens, logs)
            }
        }
    } else {
        let g = least_primitive_root(p, k);
        let order = (p - 1) * p.pow(k - 1);
        let mut x = 1u64;
        for j in 0..order {
            logs[x as usize] = Some(vec![j as u32]);
            x = x * g % m;
        }
        (vec![Generator { factor_modulus: m, order }], logs)
    }
}

impl CharacterTable {
    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn phi(&self) -> usize {
        self.phi
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Exponent `L` of the unit group; all values are `L`-th roots of unity.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Value of character `idx` at `n` as an exponent `k` in `e^{2πik/L}`.
    pub fn exponent_at(&self, idx: usize, n: i64) -> Option<u32> {
        let r = n.rem_euclid(self.q as i64) as usize;
        let logs = self.logs[r].as_ref()?;
        let digits = &self.digits[idx];
        let mut acc = 0u64;
        for ((g, &e), &m) in self.gens.iter().zip(logs).zip(digits) {
            acc += (m as u64 * e as u64 % g.order) * (self.exponent / g.order);
        }
        Some((acc % self.exponent) as u32)
    }

    pub fn value(&self, idx: usize, n: i64) -> Complex64 {
        match self.exponent_at(idx, n) {
            Some(k) => unit_root(k as u64, self.exponent),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn is_principal(&self, idx: usize) -> bool {
        self.digits[idx].iter().all(|&d| d == 0)
    }

    /// `(1 - χ(-1)) / 2`.
    pub fn parity(&self, idx: usize) -> u8 {
        match self.exponent_at(idx, -1) {
            Some(0) => 0,
            _ => 1,
        }
    }

    pub fn conj_index(&self, idx: usize) -> usize {
        let digits: Vec<u32> = self.digits[idx]
            .iter()
            .zip(&self.gens)
            .map(|(&d, g)| ((g.order - d as u64) % g.order) as u32)
            .collect();
        self.index_of(&digits)
    }

    pub fn is_real(&self, idx: usize) -> bool {
        self.conj_index(idx) == idx
    }

    fn index_of(&self, digits: &[u32]) -> usize {
        digits
            .iter()
            .zip(&self.gens)
            .fold(0usize, |acc, (&d, g)| acc * g.order as usize + d as usize)
    }

    /// Materialize character `idx` over all residues.
    pub fn character(&self, idx: usize) -> DirichletCharacter {
        let exps = (0..self.q as i64).map(|n| self.exponent_at(idx, n)).collect();
        DirichletCharacter {
            modulus: self.q,
            index: idx,
            denom: self.exponent,
            exps,
        }
    }

    pub fn characters(&self) -> impl Iterator<Item = DirichletCharacter> + '_ {
        (0..self.len()).map(move |i| self.character(i))
    }

    /// Prime-power factor moduli of the generators, in enumeration order.
    pub fn generator_moduli(&self) -> Vec<u64> {
        self.gens.iter().map(|g| g.factor_modulus).collect()
    }
}

/// Build the full character group mod `q`.
pub fn build_characters(q: u64) -> Result<CharacterTable> {
    if q < 3 {
        return domain(format!("modulus must be at least 3, got {q}"));
    }
    let phi = crate::arith::euler_phi(q);
    if phi > MAX_GROUP_ORDER {
        return Err(Error::Capacity {
            what: "phi(q)",
            value: phi as f64,
            limit: MAX_GROUP_ORDER as f64,
        });
    }

    let factors = factorize(q);
    let mut gens = Vec::new();
    let mut per_factor = Vec::new();
    for &(p, k) in &factors {
        let (g, logs) = factor_logs(p, k);
        gens.extend(g);
        per_factor.push((p.pow(k), logs));
    }
    let exponent = gens.iter().fold(1u64, |acc, g| lcm(acc, g.order));

    let logs = (0..q)
        .map(|a| {
            if gcd(a, q) != 1 {
                return None;
            }
            let mut digits = Vec::with_capacity(gens.len());
            for (m, table) in &per_factor {
                digits.extend(table[(a % m) as usize].as_ref().expect("unit").iter().copied());
            }
            Some(digits)
        })
        .collect();

    let mut digits: Vec<Vec<u32>> = vec![vec![]];
    for g in &gens {
        digits = digits
            .into_iter()
            .flat_map(|prefix| {
                (0..g.order as u32).map(move |d| {
                    let mut v = prefix.clone();
                    v.push(d);
                    v
                })
            })
            .collect();
    }
    debug_assert_eq!(digits.len() as u64, phi);

    Ok(CharacterTable {
        q,
        phi: phi as usize,
        exponent,
        gens,
        logs,
        digits,
    })
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Index of this character in its `CharacterTable`.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn exponent_at(&self, n: i64) -> Option<u32> {
        self.exps[n.rem_euclid(self.modulus as i64) as usize]
    }

    pub fn value(&self, n: i64) -> Complex64 {
        match self.exponent_at(n) {
            Some(k) => unit_root(k as u64, self.denom),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn is_principal(&self) -> bool {
        self.exps.iter().all(|e| matches!(e, None | Some(0)))
    }

    pub fn parity(&self) -> u8 {
        match self.exponent_at(-1) {
            Some(0) => 0,
            _ => 1,
        }
    }

    pub fn is_real(&self) -> bool {
        self.exps
            .iter()
            .all(|e| e.map_or(true, |k| 2 * k as u64 % self.denom == 0))
    }

    pub fn conj(&self) -> DirichletCharacter {
        DirichletCharacter {
            modulus: self.modulus,
            index: self.index,
            denom: self.denom,
            exps: self
                .exps
                .iter()
                .map(|e| e.map(|k| ((self.denom - k as u64) % self.denom) as u32))
                .collect(),
        }
    }

    /// Smallest `d | q` such that the character is trivial on units `≡ 1 (mod d)`.
    pub fn conductor(&self) -> u64 {
        let q = self.modulus;
        (1..=q)
            .filter(|d| q % d == 0)
            .find(|&d| {
                (1..q)
                    .step_by(d as usize)
                    .all(|a| self.exps[a as usize].map_or(true, |k| k == 0))
            })
            .unwrap_or(q)
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    /// The primitive character mod the conductor that induces this one.
    pub fn primitive(&self) -> DirichletCharacter {
        let q = self.modulus;
        let d = self.conductor();
        if d == q {
            return self.clone();
        }
        let exps = (0..d)
            .map(|b| {
                if gcd(b, d) != 1 {
                    return None;
                }
                let mut a = if b == 0 { d } else { b };
                while gcd(a, q) != 1 {
                    a += d;
                }
                self.exps[(a % q) as usize]
            })
            .collect();
        DirichletCharacter {
            modulus: d,
            index: self.index,
            denom: self.denom,
            exps,
        }
    }

    /// Gauss sum `τ(χ) = Σ_a χ(a) e^{2πia/q}`.
    pub fn gauss_sum(&self) -> Complex64 {
        let q = self.modulus;
        if q == 1 {
            return Complex64::new(1.0, 0.0);
        }
        (1..q)
            .map(|a| {
                let (s, c) = (2.0 * PI * a as f64 / q as f64).sin_cos();
                self.value(a as i64) * Complex64::new(c, s)
            })
            .sum()
    }
}

/// `f(q) = #{x ∈ [1, q] : x² ≡ 1 (mod q)}`, via its multiplicative structure.
pub fn count_square_roots_of_unity(q: u64) -> u64 {
    if q == 0 {
        return 0;
    }
    factorize(q)
        .into_iter()
        .map(|(p, k)| match (p, k) {
            (2, 1) => 1,
            (2, 2) => 2,
            (2, _) => 4,
            _ => 2,
        })
        .product()
}

/// Von Mangoldt function.
pub fn von_mangoldt(n: u64) -> f64 {
    match prime_power(n) {
        Some((p, _)) => (p as f64).ln(),
        None => 0.0,
    }
}
