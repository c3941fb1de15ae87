#![allow(dead_code)]

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Residue-tagged trial-division race: recomputes the max over all a ≢ 1 at every prime.
pub fn race_oracle(q: u64, x_max: u64) -> Vec<(u64, bool)> {
    let mut counts = vec![0i64; q as usize];
    let mut last = 0i64;
    let mut out = Vec::new();
    for n in 2..=x_max {
        if !is_prime(n) || gcd(n % q, q) != 1 {
            continue;
        }
        counts[(n % q) as usize] += 1;
        let other = (2..q)
            .filter(|&a| gcd(a, q) == 1)
            .map(|a| counts[a as usize])
            .max()
            .unwrap_or(0);
        let s = (counts[1] - other).signum();
        if s != 0 {
            if last != 0 && s != last {
                out.push((n, s > 0));
            }
            last = s;
        }
    }
    out
}

pub fn residue_counts(q: u64, x: u64) -> Vec<(u64, u64)> {
    (1..q)
        .filter(|&a| gcd(a, q) == 1)
        .map(|a| (a, (2..=x).filter(|&n| n % q == a && is_prime(n)).count() as u64))
        .collect()
}
