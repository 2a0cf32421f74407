//! RSA setup for the authorized-set protocol and its signing authority.

use super::primes::gen_safe_prime;
use super::schnorr::{mod_inverse, to_fixed_be};
use crate::{Error, Result};
use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::One;
use rand::Rng;

const KEYGEN_ATTEMPTS: u64 = 4_000_000;

/// Public RSA parameters `(N, e, g)` with `N` a product of two safe primes
/// and `g` a random element of the multiplicative group mod `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsaGroup {
    n: BigUint,
    e: BigUint,
    g: BigUint,
}

impl RsaGroup {
    pub fn new(n: BigUint, e: BigUint, g: BigUint) -> Result<Self> {
        if n.bits() < 32 {
            return Err(Error::Validation("modulus too small".into()));
        }
        if e <= BigUint::one() {
            return Err(Error::Validation("public exponent too small".into()));
        }
        if g <= BigUint::one() || g >= n || !g.gcd(&n).is_one() {
            return Err(Error::Validation("g is not a unit mod N".into()));
        }
        Ok(Self { n, e, g })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.n
    }

    pub fn public_exponent(&self) -> &BigUint {
        &self.e
    }

    pub fn generator(&self) -> &BigUint {
        &self.g
    }

    pub fn element_len(&self) -> usize {
        ((self.n.bits() + 7) / 8) as usize
    }

    /// Upper bound for protocol exponents: ⌊√N / 2⌋.
    pub fn half_range(&self) -> BigUint {
        self.n.sqrt() >> 1
    }

    pub fn pow(&self, base: &BigUint, exp: &BigUint) -> BigUint {
        base.modpow(exp, &self.n)
    }

    pub fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a * b % &self.n
    }

    pub fn inv(&self, a: &BigUint) -> Result<BigUint> {
        mod_inverse(a, &self.n).ok_or_else(|| Error::Validation("element not invertible".into()))
    }

    /// True iff `e` is a unit of Z*_N in `[2, N-1)`.
    pub fn is_element(&self, e: &BigUint) -> bool {
        e > &BigUint::one() && e < &self.n && e.gcd(&self.n).is_one()
    }

    pub fn check_element(&self, e: &BigUint) -> Result<()> {
        if self.is_element(e) {
            Ok(())
        } else {
            Err(Error::Validation("element is not a unit mod N".into()))
        }
    }

    pub fn encode_element(&self, e: &BigUint) -> Vec<u8> {
        to_fixed_be(e, self.element_len())
    }

    pub fn decode_element(&self, bytes: &[u8]) -> Result<BigUint> {
        if bytes.len() != self.element_len() {
            return Err(Error::MalformedPayload(format!(
                "element width {} != {}",
                bytes.len(),
                self.element_len()
            )));
        }
        let e = BigUint::from_bytes_be(bytes);
        if e >= self.n {
            return Err(Error::Validation("element exceeds modulus".into()));
        }
        Ok(e)
    }
}

/// Authority keypair: the public group plus the private exponent `d`.
///
/// Held only by the authorization authority; `d` is never placed in a
/// protocol message.
#[derive(Clone)]
pub struct CaKey {
    rsa: RsaGroup,
    d: BigUint,
}

impl CaKey {
    pub fn from_parts(rsa: RsaGroup, d: BigUint) -> Self {
        Self { rsa, d }
    }

    pub fn group(&self) -> &RsaGroup {
        &self.rsa
    }

    pub fn private_exponent(&self) -> &BigUint {
        &self.d
    }

    /// Raw RSA signature on an already-hashed element of Z*_N.
    pub fn sign_element(&self, hashed: &BigUint) -> BigUint {
        hashed.modpow(&self.d, &self.rsa.n)
    }
}

impl std::fmt::Debug for CaKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CaKey")
            .field("rsa", &self.rsa)
            .field("d", &"<private>")
            .finish()
    }
}

/// Generates an RSA group from two fresh safe primes, together with the
/// authority key. Deterministic for a fixed RNG seed.
pub fn gen_rsa<R: Rng + ?Sized>(bits_n: u64, rng: &mut R) -> Result<CaKey> {
    if bits_n < 128 {
        return Err(Error::InvalidArgument(format!(
            "RSA modulus size {bits_n} below the 128-bit floor"
        )));
    }
    let e = BigUint::from(65_537u32);
    let half = bits_n / 2;
    for _ in 0..16 {
        let (p, _) = gen_safe_prime(half, rng, KEYGEN_ATTEMPTS)?;
        let (q, _) = gen_safe_prime(bits_n - half, rng, KEYGEN_ATTEMPTS)?;
        if p == q {
            continue;
        }
        let n = &p * &q;
        let phi = (&p - 1u32) * (&q - 1u32);
        if !e.gcd(&phi).is_one() {
            continue;
        }
        let d = mod_inverse(&e, &phi)
            .ok_or_else(|| Error::ParamGen("public exponent not invertible".into()))?;
        let g = loop {
            let cand = rng.gen_biguint_range(&BigUint::from(2u32), &n);
            if cand.gcd(&n).is_one() {
                break cand;
            }
        };
        let rsa = RsaGroup::new(n, e.clone(), g)?;
        return Ok(CaKey::from_parts(rsa, d));
    }
    Err(Error::ParamGen("safe prime pair search failed".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn toy_key() -> CaKey {
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        gen_rsa(256, &mut rng).unwrap()
    }

    #[test]
    fn keygen_produces_consistent_exponents() {
        let key = toy_key();
        let rsa = key.group();
        let m = BigUint::from(0x1234_5678u32);
        let s = key.sign_element(&m);
        assert_eq!(rsa.pow(&s, rsa.public_exponent()), m);
    }

    #[test]
    fn keygen_is_deterministic() {
        let mut a = ChaCha20Rng::seed_from_u64(17);
        let mut b = ChaCha20Rng::seed_from_u64(17);
        let k1 = gen_rsa(256, &mut a).unwrap();
        let k2 = gen_rsa(256, &mut b).unwrap();
        assert_eq!(k1.group(), k2.group());
        assert_eq!(k1.private_exponent(), k2.private_exponent());
    }

    #[test]
    fn half_range_is_sqrt_over_two() {
        let key = toy_key();
        let w = key.group().half_range();
        let n = key.group().modulus();
        assert!(&(&w << 1) * &(&w << 1) <= n.clone() * 4u32);
        assert!((&w + 1u32).pow(2) * 4u32 > n.clone());
    }

    #[test]
    fn element_checks() {
        let key = toy_key();
        let rsa = key.group();
        assert!(rsa.check_element(rsa.generator()).is_ok());
        assert!(rsa.check_element(&BigUint::one()).is_err());
        assert!(rsa.check_element(rsa.modulus()).is_err());
    }
}
