//! Segmented sieve of Eratosthenes and per-residue prime counting.
//!
//! The sieve works on odd numbers only, one segment of 2^20 odd numbers at a
//! time. Each segment starts from a copy of a presieved pattern for the
//! primes 3 and 5 (period 15 in odd-index space, i.e. the wheel mod 30), after
//! which primes from 7 up to the square root are crossed off.
//!
//! `census` runs the segments in parallel and merges the per-segment partial
//! sums in ascending segment order. Real accumulators therefore see the same
//! sequence of additions whatever the worker count, and results are
//! bit-for-bit reproducible.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

use crate::arith::gcd;
use crate::characters::DirichletCharacter;
use crate::error::{domain, Error, Result};
use crate::numeric::{fmt_sig, NeumaierSum};

pub const SEGMENT_ODDS: usize = 1 << 20;
pub const MAX_CENSUS_X: u64 = 10_000_000_000;
pub const MAX_REFERENCE_X: u64 = 100_000_000;

/// Primes up to `limit` by a plain odd-only sieve.
pub fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n / 2 + 1];
    let mut out = vec![2];
    let mut i = 3usize;
    while i <= n {
        if !composite[i / 2] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j / 2] = true;
                j += 2 * i;
            }
        }
        i += 2;
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Odd-only segmented sieve up to a fixed limit.
#[derive(Debug, Clone)]
pub struct SegmentedSieve {
    limit: u64,
    base: Vec<u64>,
    pattern: Vec<u8>,
}

impl SegmentedSieve {
    pub fn new(limit: u64) -> Self {
        let base = small_primes(isqrt(limit))
            .into_iter()
            .filter(|&p| p >= 7)
            .collect();
        // odd index j <-> n = 2j + 1; divisibility by 3 and 5 repeats with period 15
        let pattern = (0..SEGMENT_ODDS + 15)
            .map(|j| {
                let n = 2 * j + 1;
                u8::from(n % 3 != 0 && n % 5 != 0)
            })
            .collect();
        SegmentedSieve {
            limit,
            base,
            pattern,
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn segment_count(&self) -> usize {
        (self.limit / 2) as usize / SEGMENT_ODDS + 1
    }

    /// Primes in segment `s` (odd numbers `2j+1`, `j ∈ [s·2^20, (s+1)·2^20)`),
    /// plus 2, 3 and 5 in segment 0.
    pub fn segment_primes(&self, s: usize, out: &mut Vec<u64>) {
        out.clear();
        let j0 = (s * SEGMENT_ODDS) as u64;
        let lo = 2 * j0 + 1;
        if lo > self.limit {
            return;
        }
        let hi = (lo + 2 * SEGMENT_ODDS as u64 - 2).min(self.limit);
        let len = ((hi - lo) / 2 + 1) as usize;
        let off = (j0 % 15) as usize;
        let mut flags = self.pattern[off..off + len].to_vec();

        for &p in &self.base {
            let p2 = p * p;
            if p2 > hi {
                break;
            }
            let mut start = if p2 >= lo { p2 } else { lo.div_ceil(p) * p };
            if start % 2 == 0 {
                start += p;
            }
            let mut idx = ((start - lo) / 2) as usize;
            let step = p as usize;
            while idx < len {
                flags[idx] = 0;
                idx += step;
            }
        }

        if s == 0 {
            flags[0] = 0; // 1 is not prime
            for p in [2u64, 3, 5] {
                if p <= self.limit {
                    out.push(p);
                }
            }
        }
        out.extend(
            flags
                .iter()
                .enumerate()
                .filter(|(_, &f)| f != 0)
                .map(|(i, _)| lo + 2 * i as u64),
        );
    }
}

/// Sequential stream of primes `≤ limit`.
pub struct Primes {
    sieve: SegmentedSieve,
    seg: usize,
    buf: Vec<u64>,
    pos: usize,
}

impl Primes {
    pub fn up_to(limit: u64) -> Self {
        Primes {
            sieve: SegmentedSieve::new(limit),
            seg: 0,
            buf: Vec::new(),
            pos: 0,
        }
    }
}

impl Iterator for Primes {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        while self.pos >= self.buf.len() {
            if self.seg >= self.sieve.segment_count() {
                return None;
            }
            let mut buf = std::mem::take(&mut self.buf);
            self.sieve.segment_primes(self.seg, &mut buf);
            self.buf = buf;
            self.pos = 0;
            self.seg += 1;
        }
        let p = self.buf[self.pos];
        self.pos += 1;
        Some(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimePower {
    pub n: u64,
    pub p: u64,
    pub k: u32,
}

/// All `p^k ≤ limit` with `k ≥ 2`, ascending.
pub fn higher_prime_powers(limit: u64) -> Vec<PrimePower> {
    let mut out = Vec::new();
    for p in small_primes(isqrt(limit)) {
        let mut n = p * p;
        let mut k = 2;
        while n <= limit {
            out.push(PrimePower { n, p, k });
            match n.checked_mul(p) {
                Some(m) => n = m,
                None => break,
            }
            k += 1;
        }
    }
    out.sort_by_key(|pp| pp.n);
    out
}

/// Sequential stream of all prime powers `p^k ≤ limit`, `k ≥ 1`, ascending.
pub struct PrimePowers {
    primes: std::iter::Peekable<Primes>,
    higher: Vec<PrimePower>,
    hpos: usize,
}

impl PrimePowers {
    pub fn up_to(limit: u64) -> Self {
        PrimePowers {
            primes: Primes::up_to(limit).peekable(),
            higher: higher_prime_powers(limit),
            hpos: 0,
        }
    }
}

impl Iterator for PrimePowers {
    type Item = PrimePower;

    fn next(&mut self) -> Option<PrimePower> {
        let h = self.higher.get(self.hpos).copied();
        match (self.primes.peek().copied(), h) {
            (Some(p), Some(pp)) if pp.n < p => {
                self.hpos += 1;
                Some(pp)
            }
            (Some(p), _) => {
                self.primes.next();
                Some(PrimePower { n: p, p, k: 1 })
            }
            (None, Some(pp)) => {
                self.hpos += 1;
                Some(pp)
            }
            (None, None) => None,
        }
    }
}

/// π(x) from the segmented sieve, segments counted in parallel.
pub fn count_primes(x: u64) -> u64 {
    if x < 2 {
        return 0;
    }
    let sieve = SegmentedSieve::new(x);
    (0..sieve.segment_count())
        .into_par_iter()
        .map_init(Vec::new, |buf, s| {
            sieve.segment_primes(s, buf);
            buf.len() as u64
        })
        .sum()
}

/// π(x) by an unsegmented sieve over all integers (independent check).
pub fn pi_reference(x: u64) -> Result<u64> {
    if x > MAX_REFERENCE_X {
        return Err(Error::Capacity {
            what: "x",
            value: x as f64,
            limit: MAX_REFERENCE_X as f64,
        });
    }
    if x < 2 {
        return Ok(0);
    }
    let n = x as usize;
    let mut bits = vec![!0u64; n / 64 + 1];
    let clear = |bits: &mut [u64], i: usize| bits[i >> 6] &= !(1u64 << (i & 63));
    clear(&mut bits, 0);
    clear(&mut bits, 1);
    let mut p = 2usize;
    while p * p <= n {
        if bits[p >> 6] >> (p & 63) & 1 == 1 {
            let mut m = p * p;
            while m <= n {
                clear(&mut bits, m);
                m += p;
            }
        }
        p += 1;
    }
    let full = (n + 1) / 64;
    let mut count: u64 = bits[..full].iter().map(|w| w.count_ones() as u64).sum();
    for i in full * 64..=n {
        count += bits[i >> 6] >> (i & 63) & 1;
    }
    Ok(count)
}

/// Checkpointed π(x,q,a), ψ(x,q,a), Π(x,q,a) for every unit residue `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueCensus {
    pub q: u64,
    pub checkpoints: Vec<u64>,
    /// Residues coprime to `q`, ascending; columns of the per-residue tables.
    pub residues: Vec<u64>,
    /// `pi[i][j] = π(checkpoints[i], q, residues[j])`.
    pub pi: Vec<Vec<u64>>,
    pub psi: Vec<Vec<f64>>,
    pub big_pi: Vec<Vec<f64>>,
    pub pi_total: Vec<u64>,
    pub psi_total: Vec<f64>,
    pub big_pi_total: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
struct Bucket {
    count: Vec<u64>,
    psi: Vec<NeumaierSum>,
    big_pi: Vec<NeumaierSum>,
    count_total: u64,
    psi_total: NeumaierSum,
    big_pi_total: NeumaierSum,
}

impl Bucket {
    fn new(slots: usize) -> Self {
        Bucket {
            count: vec![0; slots],
            psi: vec![NeumaierSum::default(); slots],
            big_pi: vec![NeumaierSum::default(); slots],
            ..Default::default()
        }
    }

    fn add(&mut self, slot: Option<usize>, log_p: f64, weight: f64, is_prime: bool) {
        if is_prime {
            self.count_total += 1;
        }
        self.psi_total.add(log_p);
        self.big_pi_total.add(weight);
        if let Some(j) = slot {
            if is_prime {
                self.count[j] += 1;
            }
            self.psi[j].add(log_p);
            self.big_pi[j].add(weight);
        }
    }

    fn merge(&mut self, other: &Bucket) {
        for j in 0..self.count.len() {
            self.count[j] += other.count[j];
            self.psi[j].merge(&other.psi[j]);
            self.big_pi[j].merge(&other.big_pi[j]);
        }
        self.count_total += other.count_total;
        self.psi_total.merge(&other.psi_total);
        self.big_pi_total.merge(&other.big_pi_total);
    }
}

fn check_census_args(q: u64, x_max: u64, checkpoints: &[u64]) -> Result<()> {
    if q < 3 {
        return domain(format!("modulus must be at least 3, got {q}"));
    }
    if x_max > MAX_CENSUS_X {
        return Err(Error::Capacity {
            what: "x_max",
            value: x_max as f64,
            limit: MAX_CENSUS_X as f64,
        });
    }
    if checkpoints.is_empty() {
        return domain("empty checkpoint list");
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return domain("checkpoints must be strictly increasing");
    }
    if checkpoints[0] < 2 || *checkpoints.last().unwrap() > x_max {
        return domain(format!("checkpoints must lie in [2, {x_max}]"));
    }
    Ok(())
}

/// Residue census with the default rayon pool.
pub fn census(q: u64, x_max: u64, checkpoints: &[u64]) -> Result<ResidueCensus> {
    check_census_args(q, x_max, checkpoints)?;
    Ok(census_inner(q, checkpoints))
}

/// Residue census on a dedicated pool of `workers` threads.
pub fn census_with_workers(
    q: u64,
    x_max: u64,
    checkpoints: &[u64],
    workers: usize,
) -> Result<ResidueCensus> {
    check_census_args(q, x_max, checkpoints)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    Ok(pool.install(|| census_inner(q, checkpoints)))
}

fn census_inner(q: u64, checkpoints: &[u64]) -> ResidueCensus {
    let residues: Vec<u64> = (1..q).filter(|&a| gcd(a, q) == 1).collect();
    let mut slot_of = vec![None; q as usize];
    for (j, &a) in residues.iter().enumerate() {
        slot_of[a as usize] = Some(j);
    }
    let slots = residues.len();
    let limit = *checkpoints.last().unwrap();
    let sieve = SegmentedSieve::new(limit);
    let bucket_of = |n: u64| checkpoints.partition_point(|&c| c < n);

    // per-segment partials: (bucket index, bucket) in ascending bucket order
    let partials: Vec<Vec<(usize, Bucket)>> = (0..sieve.segment_count())
        .into_par_iter()
        .map_init(Vec::new, |buf, s| {
            sieve.segment_primes(s, buf);
            let mut out: Vec<(usize, Bucket)> = Vec::new();
            let Some(&first) = buf.first() else {
                return out;
            };
            let mut b = bucket_of(first);
            let mut cur = Bucket::new(slots);
            for &p in buf.iter() {
                while b < checkpoints.len() && p > checkpoints[b] {
                    out.push((b, std::mem::replace(&mut cur, Bucket::new(slots))));
                    b += 1;
                }
                if b == checkpoints.len() {
                    break;
                }
                cur.add(slot_of[(p % q) as usize], (p as f64).ln(), 1.0, true);
            }
            if b < checkpoints.len() {
                out.push((b, cur));
            }
            out
        })
        .collect();

    let mut buckets: Vec<Bucket> = (0..checkpoints.len()).map(|_| Bucket::new(slots)).collect();
    for part in &partials {
        for (b, bucket) in part {
            buckets[*b].merge(bucket);
        }
    }
    // prime powers p^k, k >= 2: a separate O(sqrt x) pass
    let mut extra: Vec<Bucket> = (0..checkpoints.len()).map(|_| Bucket::new(slots)).collect();
    for pp in higher_prime_powers(limit) {
        let b = bucket_of(pp.n);
        extra[b].add(
            slot_of[(pp.n % q) as usize],
            (pp.p as f64).ln(),
            1.0 / pp.k as f64,
            false,
        );
    }
    for (b, e) in buckets.iter_mut().zip(&extra) {
        b.merge(e);
    }

    let m = checkpoints.len();
    let mut census = ResidueCensus {
        q,
        checkpoints: checkpoints.to_vec(),
        residues,
        pi: Vec::with_capacity(m),
        psi: Vec::with_capacity(m),
        big_pi: Vec::with_capacity(m),
        pi_total: Vec::with_capacity(m),
        psi_total: Vec::with_capacity(m),
        big_pi_total: Vec::with_capacity(m),
    };
    let mut run = Bucket::new(slots);
    for b in &buckets {
        run.merge(b);
        census.pi.push(run.count.clone());
        census.psi.push(run.psi.iter().map(NeumaierSum::value).collect());
        census.big_pi.push(run.big_pi.iter().map(NeumaierSum::value).collect());
        census.pi_total.push(run.count_total);
        census.psi_total.push(run.psi_total.value());
        census.big_pi_total.push(run.big_pi_total.value());
    }
    census
}

/// One row of the census CSV export.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensusRow {
    pub x: u64,
    pub a: u64,
    pub pi: u64,
    pub psi: f64,
    pub big_pi: f64,
}

impl ResidueCensus {
    pub fn slot(&self, a: u64) -> Option<usize> {
        self.residues.binary_search(&(a % self.q)).ok()
    }

    pub fn rows(&self) -> impl Iterator<Item = CensusRow> + '_ {
        self.checkpoints.iter().enumerate().flat_map(move |(i, &x)| {
            self.residues.iter().enumerate().map(move |(j, &a)| CensusRow {
                x,
                a,
                pi: self.pi[i][j],
                psi: self.psi[i][j],
                big_pi: self.big_pi[i][j],
            })
        })
    }

    /// CSV with header `x,a,pi,psi,Pi`, reals to 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,a,pi,psi,Pi")?;
        for r in self.rows() {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.x,
                r.a,
                r.pi,
                fmt_sig(r.psi, 12),
                fmt_sig(r.big_pi, 12)
            )?;
        }
        Ok(())
    }
}

pub fn read_census_csv<R: BufRead>(r: R) -> Result<Vec<CensusRow>> {
    let mut rows = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if i == 0 {
            if line.trim() != "x,a,pi,psi,Pi" {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("unexpected header {line:?}"),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        let bad = |msg: &str| Error::Parse {
            line: lineno,
            msg: msg.to_string(),
        };
        if f.len() != 5 {
            return Err(bad("expected 5 fields"));
        }
        rows.push(CensusRow {
            x: f[0].parse().map_err(|_| bad("bad x"))?,
            a: f[1].parse().map_err(|_| bad("bad a"))?,
            pi: f[2].parse().map_err(|_| bad("bad pi"))?,
            psi: f[3].parse().map_err(|_| bad("bad psi"))?,
            big_pi: f[4].parse().map_err(|_| bad("bad Pi"))?,
        });
    }
    Ok(rows)
}

/// ψ(x, χ) = Σ_{n ≤ x} χ(n) Λ(n), by streaming prime powers.
pub fn psi_chi(x: f64, chi: &DirichletCharacter) -> Complex64 {
    if x < 2.0 {
        return Complex64::new(0.0, 0.0);
    }
    let mut re = NeumaierSum::default();
    let mut im = NeumaierSum::default();
    for pp in PrimePowers::up_to(x.floor() as u64) {
        let v = chi.value(pp.n as i64) * (pp.p as f64).ln();
        re.add(v.re);
        im.add(v.im);
    }
    Complex64::new(re.value(), im.value())
}

/// ψ(x, χ) at census checkpoint `i`, from the per-residue sums.
pub fn psi_chi_from_census(census: &ResidueCensus, i: usize, chi: &DirichletCharacter) -> Complex64 {
    assert_eq!(census.q, chi.modulus(), "character modulus must match census");
    census
        .residues
        .iter()
        .zip(&census.psi[i])
        .map(|(&a, &s)| chi.value(a as i64) * s)
        .sum()
}

/// Geometric checkpoint grid from `start` to `end` with the given ratio, always
/// including `end`.
pub fn geometric_checkpoints(start: u64, end: u64, ratio: f64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut x = start.max(2) as f64;
    while (x as u64) < end {
        let v = x as u64;
        if out.last() != Some(&v) {
            out.push(v);
        }
        x *= ratio;
    }
    if out.last() != Some(&end) {
        out.push(end);
    }
    out
}
