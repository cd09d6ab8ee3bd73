//! Exact integer helpers for order finding, factoring and RSA.

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `a^x mod n` by binary exponentiation.
pub fn mod_exp(a: u64, x: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let n128 = n as u128;
    let mut base = (a as u128) % n128;
    let mut e = x;
    let mut acc: u128 = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % n128;
        }
        base = base * base % n128;
        e >>= 1;
    }
    acc as u64
}

pub fn mod_mul(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

/// `(g, x, y)` with `a x + b y = g = gcd(a, b)`.
pub fn extended_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = extended_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

pub fn mod_inverse(a: u64, n: u64) -> Option<u64> {
    let (g, x, _) = extended_gcd(a as i128, n as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(n as i128) as u64)
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_exp(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mod_mul(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `floor(n^{1/k})`
pub fn integer_root(n: u64, k: u32) -> u64 {
    if k == 1 || n < 2 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / k as f64).round() as u64;
    let pow_le = |r: u64| r.checked_pow(k).is_some_and(|p| p <= n);
    while !pow_le(r) {
        r -= 1;
    }
    while pow_le(r + 1) {
        r += 1;
    }
    r
}

/// If `n = b^k` with `k >= 2`, the smallest such base `b`, found by probing
/// `floor(n^{1/k})` and its successor.
pub fn perfect_power_base(n: u64) -> Option<(u64, u32)> {
    if n < 4 {
        return None;
    }
    let mut best = None;
    for k in 2..=64 - n.leading_zeros() {
        let r = integer_root(n, k);
        for b in [r, r + 1] {
            if b >= 2 && b.checked_pow(k) == Some(n) {
                best = Some((b, k));
            }
        }
    }
    best
}

/// Prime factors with multiplicity, ascending, by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        while n % p == 0 {
            out.push(p);
            n /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    let mut f = prime_factors(n);
    f.dedup();
    f.iter().fold(n, |acc, p| acc / p * (p - 1))
}

/// Smallest `r > 0` with `a^r = 1 mod n`, by stepping through powers.
pub fn multiplicative_order(a: u64, n: u64) -> Option<u64> {
    if n < 2 || gcd(a, n) != 1 {
        return None;
    }
    let a = a % n;
    let mut x = a;
    let mut r = 1;
    while x != 1 {
        x = mod_mul(x, a, n);
        r += 1;
        if r > n {
            return None;
        }
    }
    Some(r)
}

/// Partial quotients `[a0; a1, a2, ...]` of `p/q`.
pub fn continued_fraction(p: u64, q: u64) -> Vec<u64> {
    let (mut p, mut q) = (p, q);
    let mut out = Vec::new();
    while q != 0 {
        out.push(p / q);
        (p, q) = (q, p % q);
    }
    out
}

/// Convergents `h_k / k_k` of `p/q`, each in lowest terms.
pub fn convergents(p: u64, q: u64) -> Vec<(u64, u64)> {
    let (mut h0, mut h1) = (0u128, 1u128);
    let (mut k0, mut k1) = (1u128, 0u128);
    continued_fraction(p, q)
        .into_iter()
        .map(|a| {
            let a = a as u128;
            let h = a * h1 + h0;
            let k = a * k1 + k0;
            (h0, h1) = (h1, h);
            (k0, k1) = (k1, k);
            (h as u64, k as u64)
        })
        .collect()
}

/// The convergent of `q/big_q` with denominator below `n` lying within
/// `1/(2 big_q)` of it, if any (the last such one).
pub fn best_convergent(q: u64, big_q: u64, n: u64) -> Option<(u64, u64)> {
    convergents(q, big_q)
        .into_iter()
        .filter(|&(c, d)| {
            d > 0 && d < n && {
                // |q/Q - c/d| <= 1/(2Q)  <=>  2 |q d - c Q| <= d
                let lhs = (q as i128 * d as i128 - c as i128 * big_q as i128).abs() * 2;
                lhs <= d as i128
            }
        })
        .last()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_values() {
        assert_eq!(mod_exp(7, 4, 15), 1);
        assert_eq!(mod_exp(12083, 1794, 21823), 4866);
        assert_eq!(gcd(4866 - 1, 21823), 139);
        assert_eq!(gcd(4866 + 1, 21823), 157);
        assert_eq!(multiplicative_order(12083, 21823), Some(3588));
        assert_eq!(multiplicative_order(71, 25397), Some(522));
        assert_eq!(multiplicative_order(7, 15), Some(4));
    }

    #[test]
    fn fractions() {
        assert_eq!(continued_fraction(64, 256), vec![0, 4]);
        assert_eq!(continued_fraction(192, 256), vec![0, 1, 3]);
        assert_eq!(convergents(192, 256).last(), Some(&(3, 4)));
        assert_eq!(continued_fraction(6170930, 1 << 30), vec![0, 174, 1542732, 2]);
        assert_eq!(best_convergent(6170930, 1 << 30, 25397), Some((1, 174)));
        assert_eq!(best_convergent(64, 256, 15), Some((1, 4)));
    }

    #[test]
    fn primes_and_roots() {
        assert!(is_prime(139) && is_prime(157) && !is_prime(21823));
        assert!(is_prime(18446744073709551557));
        assert_eq!(integer_root(1 << 40, 4), 1024);
        assert_eq!(integer_root(26, 3), 2);
        assert_eq!(perfect_power_base(243), Some((3, 5)));
        assert_eq!(perfect_power_base(225), Some((15, 2)));
        assert_eq!(perfect_power_base(21823), None);
        assert_eq!(prime_factors(21823), vec![139, 157]);
        assert_eq!(euler_phi(21823), 138 * 156);
        assert_eq!(mod_inverse(3, 7), Some(5));
        assert_eq!(mod_inverse(2, 4), None);
    }
}
