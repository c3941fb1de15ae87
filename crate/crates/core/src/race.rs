//! Prime races: π(x,q,1) against the strongest competing residue class.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arith::gcd;
use crate::characters::count_square_roots_of_unity;
use crate::error::{domain, Error, Result};
use crate::explicit_formula::{psi_from_series, DeltaSeries};
use crate::report::{Report, Status};
use crate::sieve::{geometric_checkpoints, higher_prime_powers, PrimePower, SegmentedSieve};
use crate::special::li;
use crate::zeta_zeros::ZeroList;

pub const MAX_RACE_X: u64 = 10_000_000_000;
pub const MAX_RACE_MODULUS: u64 = 1_000_000;
pub const CHECKPOINT_RATIO: f64 = 1.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// D turns positive: class 1 takes the lead.
    Up,
    Down,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub x: u64,
    pub direction: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VPoint {
    pub x: u64,
    pub v: u64,
}

/// Share of integers `1 ≤ x ≤ x_max` at which `residue` is the unique leader.
/// `residue == None` is the tied bucket.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeadShare {
    pub residue: Option<u64>,
    pub count: u64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaceReport {
    pub q: u64,
    pub x_max: u64,
    pub crossings: Vec<Crossing>,
    #[serde(rename = "V")]
    pub v: Vec<VPoint>,
    pub lead_histogram: Vec<LeadShare>,
}

impl RaceReport {
    /// V(x): crossings at or below `x`.
    pub fn v_at(&self, x: u64) -> u64 {
        self.crossings.partition_point(|c| c.x <= x) as u64
    }

    pub fn first_crossing(&self, direction: Direction) -> Option<u64> {
        self.crossings.iter().find(|c| c.direction == direction).map(|c| c.x)
    }

    pub fn directions_alternate(&self) -> bool {
        self.crossings.windows(2).all(|w| w[0].direction != w[1].direction && w[0].x < w[1].x)
    }

    pub fn write_crossings_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,direction")?;
        for c in &self.crossings {
            writeln!(w, "{},{}", c.x, c.direction.as_str())?;
        }
        Ok(())
    }

    pub fn write_v_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,V")?;
        for p in &self.v {
            writeln!(w, "{},{}", p.x, p.v)?;
        }
        Ok(())
    }

    pub fn summary(&self) -> Value {
        json!({
            "q": self.q,
            "x_max": self.x_max,
            "crossings": self.crossings.len(),
            "V": self.v_at(self.x_max),
            "first_up": self.first_crossing(Direction::Up),
            "first_down": self.first_crossing(Direction::Down),
            "last": self.crossings.last(),
            "alternating": self.directions_alternate(),
            "lead_histogram": self.lead_histogram,
        })
    }
}

pub fn read_crossings_csv<R: std::io::BufRead>(r: R) -> Result<Vec<Crossing>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if i == 0 {
            if line.trim() != "x,direction" {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("unexpected header {line:?}"),
                });
            }
            continue;
        }
        let bad = |msg: &str| Error::Parse {
            line: i + 1,
            msg: msg.to_string(),
        };
        let (x, d) = line.split_once(',').ok_or_else(|| bad("expected x,direction"))?;
        let x = x.trim().parse().map_err(|_| bad("bad x"))?;
        let direction = match d.trim() {
            "up" => Direction::Up,
            "down" => Direction::Down,
            _ => return Err(bad("direction must be up or down")),
        };
        out.push(Crossing { x, direction });
    }
    Ok(out)
}

fn check_race_args(q: u64, x_max: u64) -> Result<()> {
    if q < 3 {
        return domain(format!("race needs q ≥ 3, got {q}"));
    }
    if q > MAX_RACE_MODULUS {
        return Err(Error::Capacity {
            what: "modulus",
            value: q as f64,
            limit: MAX_RACE_MODULUS as f64,
        });
    }
    check_x_max(x_max)
}

fn check_x_max(x_max: u64) -> Result<()> {
    if x_max > MAX_RACE_X {
        return Err(Error::Capacity {
            what: "x_max",
            value: x_max as f64,
            limit: MAX_RACE_X as f64,
        });
    }
    Ok(())
}

/// Feed primes `≤ limit` in ascending order; segments are sieved in parallel batches.
fn for_each_prime<F: FnMut(u64)>(limit: u64, mut f: F) {
    if limit < 2 {
        return;
    }
    let sieve = SegmentedSieve::new(limit);
    let batch = rayon::current_num_threads().max(1) * 2;
    let total = sieve.segment_count();
    let mut s = 0;
    while s < total {
        let end = (s + batch).min(total);
        let chunks: Vec<Vec<u64>> = (s..end)
            .into_par_iter()
            .map(|i| {
                let mut buf = Vec::new();
                sieve.segment_primes(i, &mut buf);
                buf
            })
            .collect();
        for p in chunks.into_iter().flatten() {
            f(p);
        }
        s = end;
    }
}

/// Feed all prime powers `p^k ≤ limit` in ascending order.
fn for_each_prime_power<F: FnMut(PrimePower)>(limit: u64, mut f: F) {
    let higher = higher_prime_powers(limit);
    let mut h = 0;
    for_each_prime(limit, |p| {
        while h < higher.len() && higher[h].n < p {
            f(higher[h]);
            h += 1;
        }
        f(PrimePower { n: p, p, k: 1 });
    });
    for &pp in &higher[h..] {
        f(pp);
    }
}

fn sign(d: i64) -> i8 {
    d.signum() as i8
}

/// Exact scan of D(x) = π(x,q,1) − max_{a≢1} π(x,q,a) over all primes `≤ x_max`.
/// Stretches with D = 0 inherit the preceding sign.
pub fn race_scan(q: u64, x_max: u64) -> Result<RaceReport> {
    check_race_args(q, x_max)?;
    let units: Vec<u64> = (1..q).filter(|&a| gcd(a, q) == 1).collect();
    let mut counts = vec![0i64; q as usize];
    let mut max_other = 0i64;
    let mut leader_max = 0i64;
    let mut leader_mult = units.len();
    let mut leader = 1u64;
    let mut last_sign = 0i8;
    let mut crossings = Vec::new();
    let mut lead_counts = vec![0u64; q as usize];
    let mut tied = 0u64;
    let mut prev_x = 1u64;

    let mut credit = |upto: u64, mult: usize, leader: u64| {
        let span = upto - prev_x;
        if mult == 1 {
            lead_counts[leader as usize] += span;
        } else {
            tied += span;
        }
        prev_x = upto;
    };

    for_each_prime(x_max, |p| {
        let r = p % q;
        if gcd(r, q) != 1 {
            return;
        }
        credit(p, leader_mult, leader);
        let c = &mut counts[r as usize];
        *c += 1;
        let c = *c;
        if r != 1 && c > max_other {
            max_other = c;
        }
        if c > leader_max {
            leader_max = c;
            leader_mult = 1;
            leader = r;
        } else if c == leader_max {
            leader_mult += 1;
        }
        let s = sign(counts[1] - max_other);
        if s != 0 {
            if last_sign != 0 && s != last_sign {
                crossings.push(Crossing {
                    x: p,
                    direction: if s > 0 { Direction::Up } else { Direction::Down },
                });
            }
            last_sign = s;
        }
    });
    if x_max >= 1 {
        credit(x_max + 1, leader_mult, leader);
    }

    let denom = x_max.max(1) as f64;
    let mut lead_histogram: Vec<LeadShare> = units
        .iter()
        .map(|&a| LeadShare {
            residue: Some(a),
            count: lead_counts[a as usize],
            fraction: lead_counts[a as usize] as f64 / denom,
        })
        .collect();
    lead_histogram.push(LeadShare {
        residue: None,
        count: tied,
        fraction: tied as f64 / denom,
    });

    let mut grid = if x_max >= 2 {
        geometric_checkpoints(2, x_max, CHECKPOINT_RATIO)
    } else {
        Vec::new()
    };
    grid.extend(crossings.iter().map(|c| c.x));
    grid.sort_unstable();
    grid.dedup();
    let v = grid
        .into_iter()
        .map(|x| VPoint {
            x,
            v: crossings.partition_point(|c| c.x <= x) as u64,
        })
        .collect();

    Ok(RaceReport {
        q,
        x_max,
        crossings,
        v,
        lead_histogram,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiLiPoint {
    pub x: u64,
    pub pi: u64,
    pub li_minus_pi: f64,
    /// (ψ(x) − x)/√x.
    pub psi_error: f64,
    /// The same quantity from the truncated sum over zeros.
    pub psi_error_zeros: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extreme {
    pub value: f64,
    pub x: u64,
}

impl Extreme {
    fn new() -> Self {
        Extreme { value: 0.0, x: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiLiRace {
    pub x_max: u64,
    pub zero_height: f64,
    pub trajectory: Vec<PiLiPoint>,
    pub min_li_minus_pi: Option<Extreme>,
    /// Supremum and infimum of (ψ(x) − x)/√x on [2, x_max]; the infimum is
    /// approached from the left of the reported x.
    pub psi_max: Extreme,
    pub psi_min: Extreme,
    pub crossing_found: bool,
}

impl PiLiRace {
    pub fn report(&self) -> Report {
        Report::new(
            "pi-li-race",
            json!({"x_max": self.x_max, "T": self.zero_height}),
            json!({
                "min_li_minus_pi": self.min_li_minus_pi,
                "psi_max": self.psi_max,
                "psi_min": self.psi_min,
                "crossing_found": self.crossing_found,
                "checkpoints": self.trajectory.len(),
            }),
            json!("no sign change of li − π expected below x ≈ 1e316"),
            Status::ReportOnly,
        )
    }
}

/// li(x) − π(x) on the checkpoint grid and (ψ(x) − x)/√x at every prime power.
/// This scans a property; π − li is not expected to change sign in range.
pub fn pi_li_race_scan(x_max: u64, zeros: &ZeroList) -> Result<PiLiRace> {
    check_x_max(x_max)?;
    let height = zeros.complete_to();
    let series = DeltaSeries::zeta(zeros, height)?;
    let grid = if x_max >= 2 {
        geometric_checkpoints(2, x_max, CHECKPOINT_RATIO)
    } else {
        Vec::new()
    };

    let mut samples = Vec::with_capacity(grid.len());
    let mut g = 0;
    let mut pi = 0u64;
    let mut psi = 0.0f64;
    let mut psi_max = Extreme::new();
    let mut psi_min = Extreme::new();
    let observe = |v: f64, x: u64, hi: &mut Extreme, lo: &mut Extreme| {
        if v > hi.value || hi.x == 0 {
            *hi = Extreme { value: v, x };
        }
        if v < lo.value || lo.x == 0 {
            *lo = Extreme { value: v, x };
        }
    };
    let flush = |upto: u64, pi: u64, psi: f64, samples: &mut Vec<(u64, u64, f64)>, g: &mut usize| {
        while *g < grid.len() && grid[*g] < upto {
            samples.push((grid[*g], pi, psi));
            *g += 1;
        }
    };

    for_each_prime_power(x_max, |pp| {
        flush(pp.n, pi, psi, &mut samples, &mut g);
        let x = pp.n as f64;
        if pp.n > 2 {
            observe((psi - x) / x.sqrt(), pp.n, &mut psi_max, &mut psi_min);
        }
        psi += (pp.p as f64).ln();
        if pp.k == 1 {
            pi += 1;
        }
        observe((psi - x) / x.sqrt(), pp.n, &mut psi_max, &mut psi_min);
    });
    flush(u64::MAX, pi, psi, &mut samples, &mut g);
    if x_max >= 2 {
        let x = x_max as f64;
        observe((psi - x) / x.sqrt(), x_max, &mut psi_max, &mut psi_min);
    }

    let trajectory = samples
        .into_par_iter()
        .map(|(x, pi, psi)| {
            let xf = x as f64;
            Ok(PiLiPoint {
                x,
                pi,
                li_minus_pi: li(xf)? - pi as f64,
                psi_error: (psi - xf) / xf.sqrt(),
                psi_error_zeros: (psi_from_series(xf, &series)? - xf) / xf.sqrt(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let min_li_minus_pi = trajectory
        .iter()
        .map(|p| Extreme {
            value: p.li_minus_pi,
            x: p.x,
        })
        .min_by(|a, b| a.value.total_cmp(&b.value));
    let crossing_found = trajectory.iter().any(|p| p.li_minus_pi < 0.0);
    Ok(PiLiRace {
        x_max,
        zero_height: height,
        trajectory,
        min_li_minus_pi,
        psi_max,
        psi_min,
        crossing_found,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiExcursion {
    pub a: u64,
    /// (ψ(x_max,q,1) − ψ(x_max,q,a))/√x_max.
    pub at_x_max: f64,
    pub max: Extreme,
    pub min: Extreme,
    /// Prime-power events after which the normalized difference exceeds `upper`.
    pub events_above_upper: u64,
    /// Prime-power events after which it is below `lower`.
    pub events_below_lower: u64,
    pub first_above_upper: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiRace {
    pub q: u64,
    pub x_max: u64,
    pub f_q: u64,
    pub phi_q: u64,
    pub upper: f64,
    pub lower: f64,
    pub residues: Vec<PsiExcursion>,
}

impl PsiRace {
    pub fn report(&self) -> Report {
        Report::new(
            "psi-race",
            json!({"q": self.q, "x_max": self.x_max}),
            serde_json::to_value(&self.residues).unwrap_or(Value::Null),
            json!({
                "upper": self.upper,
                "lower": self.lower,
                "regime": format!("x > exp(27 q log q) ≈ exp({:.1})", 27.0 * self.q as f64 * (self.q as f64).ln()),
            }),
            Status::ReportOnly,
        )
    }
}

/// Per-residue extremes of (ψ(x,q,1) − ψ(x,q,a))/√x against 7f(q)/φ(q) and −1/φ(q).
pub fn psi_race_scan(q: u64, x_max: u64) -> Result<PsiRace> {
    check_race_args(q, x_max)?;
    let others: Vec<u64> = (2..q).filter(|&a| gcd(a, q) == 1).collect();
    let phi_q = others.len() as u64 + 1;
    let f_q = count_square_roots_of_unity(q);
    let upper = 7.0 * f_q as f64 / phi_q as f64;
    let lower = -1.0 / phi_q as f64;

    let mut psi = vec![0.0f64; q as usize];
    let mut ex: Vec<PsiExcursion> = others
        .iter()
        .map(|&a| PsiExcursion {
            a,
            at_x_max: 0.0,
            max: Extreme::new(),
            min: Extreme::new(),
            events_above_upper: 0,
            events_below_lower: 0,
            first_above_upper: None,
        })
        .collect();

    let observe = |e: &mut PsiExcursion, v: f64, x: u64| {
        if v > e.max.value || e.max.x == 0 {
            e.max = Extreme { value: v, x };
        }
        if v < e.min.value || e.min.x == 0 {
            e.min = Extreme { value: v, x };
        }
    };

    for_each_prime_power(x_max, |pp| {
        let r = pp.n % q;
        if gcd(r, q) != 1 {
            return;
        }
        let x = pp.n as f64;
        let sq = x.sqrt();
        for e in ex.iter_mut() {
            observe(e, (psi[1] - psi[e.a as usize]) / sq, pp.n);
        }
        psi[r as usize] += (pp.p as f64).ln();
        for e in ex.iter_mut() {
            let v = (psi[1] - psi[e.a as usize]) / sq;
            observe(e, v, pp.n);
            if v > upper {
                e.events_above_upper += 1;
                e.first_above_upper.get_or_insert(pp.n);
            }
            if v < lower {
                e.events_below_lower += 1;
            }
        }
    });
    if x_max >= 2 {
        let sq = (x_max as f64).sqrt();
        for e in ex.iter_mut() {
            let v = (psi[1] - psi[e.a as usize]) / sq;
            e.at_x_max = v;
            observe(e, v, x_max);
        }
    }

    Ok(PsiRace {
        q,
        x_max,
        f_q,
        phi_q,
        upper,
        lower,
        residues: ex,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn mod4_first_lead() {
        let r = race_scan(4, 30_000).unwrap();
        assert_eq!(r.first_crossing(Direction::Up), Some(26861));
        assert_eq!(r.crossings.len(), 2);
        assert!(r.directions_alternate());
    }

    #[test]
    fn mod3_small() {
        let r = race_scan(3, 100).unwrap();
        assert!(r.crossings.is_empty());
        assert!(race_scan(5, 2).unwrap().crossings.is_empty());
    }

    #[test]
    fn lead_histogram_sums_to_x_max() {
        let r = race_scan(5, 10_000).unwrap();
        let total: u64 = r.lead_histogram.iter().map(|s| s.count).sum();
        assert_eq!(total, 10_000);
        assert_eq!(r.v.last().unwrap().v, r.v_at(10_000));
    }

    #[test]
    fn capacity_and_domain() {
        assert!(matches!(race_scan(4, MAX_RACE_X + 1), Err(Error::Capacity { .. })));
        assert!(race_scan(2, 100).is_err());
    }

    #[test]
    fn psi_mod3_matches_direct() {
        let r = psi_race_scan(3, 1000).unwrap();
        let mut d = 0.0;
        for n in 2..=1000u64 {
            let p = (2..=n).find(|&p| n % p == 0).unwrap();
            let mut m = n;
            while m % p == 0 {
                m /= p;
            }
            if m == 1 && is_prime(p) {
                match n % 3 {
                    1 => d += (p as f64).ln(),
                    2 => d -= (p as f64).ln(),
                    _ => {}
                }
            }
        }
        assert!((r.residues[0].at_x_max - d / 1000f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.f_q, 2);
    }

    #[test]
    fn psi_trivial() {
        let r = psi_race_scan(4, 1).unwrap();
        assert!(r.residues.iter().all(|e| e.at_x_max == 0.0 && e.max.value == 0.0));
    }

    #[test]
    fn crossings_csv_round_trip() {
        let r = race_scan(4, 30_000).unwrap();
        let mut buf = Vec::new();
        r.write_crossings_csv(&mut buf).unwrap();
        assert_eq!(read_crossings_csv(&buf[..]).unwrap(), r.crossings);
    }
}
