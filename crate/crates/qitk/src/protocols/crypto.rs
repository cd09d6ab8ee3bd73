//! One-time pad over base-`B` digits, and textbook RSA on small moduli.

use rand::Rng;
use serde::Serialize;

use crate::algorithms::numtheory::{euler_phi, extended_gcd, gcd, is_prime, mod_exp};
use crate::algorithms::{factor, FactorOptions, FactorReport};
use crate::error::{QError, Result};

fn check_digits(text: &[u32], key: &[u32], base: u32) -> Result<()> {
    if base < 2 {
        return Err(QError::InvalidArgument("base must be at least 2".into()));
    }
    if key.len() < text.len() {
        return Err(QError::InvalidArgument(format!(
            "key has {} digits, text needs {}",
            key.len(),
            text.len()
        )));
    }
    if text.iter().chain(key).any(|&x| x >= base) {
        return Err(QError::InvalidArgument(format!("digit out of range for base {base}")));
    }
    Ok(())
}

/// `c_j = p_j + k_j mod B`
pub fn vernam_encrypt(plain: &[u32], key: &[u32], base: u32) -> Result<Vec<u32>> {
    check_digits(plain, key, base)?;
    Ok(plain.iter().zip(key).map(|(p, k)| (p + k) % base).collect())
}

pub fn vernam_decrypt(cipher: &[u32], key: &[u32], base: u32) -> Result<Vec<u32>> {
    check_digits(cipher, key, base)?;
    Ok(cipher.iter().zip(key).map(|(c, k)| (c + base - k) % base).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RsaKeyPair {
    pub n: u64,
    /// Public exponent.
    pub c: u64,
    /// Private exponent.
    pub d: u64,
    pub phi: u64,
}

impl RsaKeyPair {
    /// `c = 1` makes encryption the identity.
    pub fn is_degenerate(&self) -> bool {
        self.c % self.phi == 1
    }
}

fn private_exponent(c: u64, phi: u64) -> Result<u64> {
    if gcd(c, phi) != 1 {
        return Err(QError::InvalidArgument(format!("exponent {c} is not coprime to phi = {phi}")));
    }
    // Euler: c^{phi(phi) - 1} inverts c modulo phi
    let d = mod_exp(c, euler_phi(phi) - 1, phi);
    let (_, x, _) = extended_gcd(c as i128, phi as i128);
    if d != x.rem_euclid(phi as i128) as u64 {
        return Err(QError::Sanity("Euler and Euclid inverses disagree".into()));
    }
    Ok(d)
}

/// Key pair for `N = p1 p2` with public exponent `c`.
pub fn rsa_keygen(p1: u64, p2: u64, c: u64) -> Result<RsaKeyPair> {
    if p1 == p2 || !is_prime(p1) || !is_prime(p2) {
        return Err(QError::InvalidArgument("p1 and p2 must be distinct primes".into()));
    }
    let n = p1
        .checked_mul(p2)
        .filter(|&n| n < 1 << 62)
        .ok_or_else(|| QError::Unsupported("modulus too large".into()))?;
    let phi = (p1 - 1) * (p2 - 1);
    if c == 0 || c >= phi {
        return Err(QError::InvalidArgument(format!("exponent {c} must lie in [1, phi)")));
    }
    let d = private_exponent(c, phi)?;
    Ok(RsaKeyPair { n, c, d, phi })
}

fn check_block(b: u64, n: u64) -> Result<()> {
    if b >= n {
        return Err(QError::InvalidArgument(format!("block {b} is not below N = {n}")));
    }
    Ok(())
}

/// `B -> B^c mod N`
pub fn rsa_encrypt(block: u64, key: &RsaKeyPair) -> Result<u64> {
    check_block(block, key.n)?;
    Ok(mod_exp(block, key.c, key.n))
}

/// `C -> C^d mod N`
pub fn rsa_decrypt(cipher: u64, key: &RsaKeyPair) -> Result<u64> {
    check_block(cipher, key.n)?;
    Ok(mod_exp(cipher, key.d, key.n))
}

#[derive(Debug, Clone, Serialize)]
pub struct RsaBreak {
    pub p1: u64,
    pub p2: u64,
    pub phi: u64,
    pub d: u64,
    pub factoring: FactorReport,
}

/// Recover the private exponent from the public key `(N, c)` by factoring `N`.
pub fn rsa_break<R: Rng + ?Sized>(n: u64, c: u64, opts: &FactorOptions, rng: &mut R) -> Result<RsaBreak> {
    let report = factor(n, opts, rng)?;
    let (p1, p2) = report
        .factors
        .ok_or_else(|| QError::BudgetExhausted(format!("{n} was not factored")))?;
    let phi = (p1 - 1) * (p2 - 1);
    let d = private_exponent(c % phi, phi)?;
    Ok(RsaBreak {
        p1,
        p2,
        phi,
        d,
        factoring: report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::RngSeed;

    #[test]
    fn vernam_examples() {
        assert_eq!(vernam_encrypt(&[1, 0, 1, 0], &[0, 1, 1, 0], 2).unwrap(), vec![1, 1, 0, 0]);
        let text = [3, 1, 4, 1, 5];
        assert_eq!(vernam_encrypt(&text, &[0; 5], 10).unwrap(), text);
        assert!(vernam_encrypt(&text, &[0; 4], 10).is_err());
        let mut rng = RngSeed(41).rng();
        let p: Vec<u32> = (0..200).map(|_| rng.random_range(0..27)).collect();
        let q: Vec<u32> = (0..200).map(|_| rng.random_range(0..27)).collect();
        let k: Vec<u32> = (0..200).map(|_| rng.random_range(0..27)).collect();
        let cp = vernam_encrypt(&p, &k, 27).unwrap();
        assert_eq!(vernam_decrypt(&cp, &k, 27).unwrap(), p);
        // a reused key cancels in the difference of two ciphertexts
        let cq = vernam_encrypt(&q, &k, 27).unwrap();
        for i in 0..200 {
            assert_eq!((cp[i] + 27 - cq[i]) % 27, (p[i] + 27 - q[i]) % 27);
        }
    }

    #[test]
    fn rsa_round_trip() {
        let key = rsa_keygen(139, 157, 5).unwrap();
        assert_eq!(key.n, 21823);
        assert_eq!(key.c * key.d % key.phi, 1);
        let mut rng = RngSeed(42).rng();
        for _ in 0..100 {
            let b = rng.random_range(0..key.n);
            assert_eq!(rsa_decrypt(rsa_encrypt(b, &key).unwrap(), &key).unwrap(), b);
        }
        let id = rsa_keygen(139, 157, 1).unwrap();
        assert!(id.is_degenerate());
        assert_eq!(rsa_encrypt(1234, &id).unwrap(), 1234);
        assert!(rsa_keygen(139, 157, 2).is_err());
        assert!(rsa_keygen(139, 139, 5).is_err());
    }

    #[test]
    fn rsa_break_recovers_plaintext() {
        let key = rsa_keygen(139, 157, 7).unwrap();
        let secret = 4321;
        let cipher = rsa_encrypt(secret, &key).unwrap();
        let br = rsa_break(key.n, key.c, &FactorOptions::default(), &mut RngSeed(43).rng()).unwrap();
        assert_eq!((br.p1, br.p2), (139, 157));
        assert_eq!(br.d, key.d);
        let stolen = RsaKeyPair { d: br.d, ..key };
        assert_eq!(rsa_decrypt(cipher, &stolen).unwrap(), secret);
    }
}
