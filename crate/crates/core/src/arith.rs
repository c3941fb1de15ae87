//! Small integer helpers shared by the character and sieve code.

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Prime factorization by trial division, ascending primes with multiplicities.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// If `n = p^k` for a prime `p` and `k >= 1`, returns `(p, k)`.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let f = factorize(n);
    if f.len() == 1 {
        Some(f[0])
    } else {
        None
    }
}

/// Least primitive root modulo `p^k` for an odd prime `p`.
pub fn least_primitive_root(p: u64, k: u32) -> u64 {
    let m = p.pow(k);
    let order = (p - 1) * p.pow(k - 1);
    let factors: Vec<u64> = factorize(order).into_iter().map(|(r, _)| r).collect();
    (2..m)
        .find(|&g| gcd(g, m) == 1 && factors.iter().all(|&r| pow_mod(g, order / r, m) != 1))
        .expect("odd prime powers have primitive roots")
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && prime_power(n) == Some((n, 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_and_phi() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(1), vec![]);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(36), 12);
        assert_eq!(euler_phi(97), 96);
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(least_primitive_root(3, 1), 2);
        assert_eq!(least_primitive_root(7, 1), 3);
        assert_eq!(least_primitive_root(5, 2), 2);
        // 14 is a primitive root mod 29 but not mod 29^2; the least root mod 29 is 2.
        assert_eq!(least_primitive_root(29, 2), 2);
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
        assert!(is_prime(97));
        assert!(!is_prime(91));
    }
}
