//! Prime-order subgroup of the multiplicative group mod p.

use super::primes::{gen_prime, is_probable_prime};
use crate::{Error, Result};
use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;

const GEN_ATTEMPTS: u64 = 200_000;

/// Public parameters `(p, q, g)`: primes with `q | p-1` and a generator
/// `g` of the order-`q` subgroup mod `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchnorrGroup {
    p: BigUint,
    q: BigUint,
    g: BigUint,
    /// (p-1)/q, cached for hash-to-group cofactor exponentiation.
    cofactor: BigUint,
}

impl SchnorrGroup {
    /// Accepts externally supplied parameters after full validation.
    pub fn new(p: BigUint, q: BigUint, g: BigUint) -> Result<Self> {
        let p_minus_1 = &p - 1u32;
        if p <= BigUint::from(3u32) || q.is_zero() {
            return Err(Error::Validation("modulus too small".into()));
        }
        if !(&p_minus_1 % &q).is_zero() {
            return Err(Error::Validation("q does not divide p-1".into()));
        }
        if !is_probable_prime(&p) || !is_probable_prime(&q) {
            return Err(Error::Validation("p and q must both be prime".into()));
        }
        if g <= BigUint::one() || g >= p_minus_1 {
            return Err(Error::Validation("generator out of range".into()));
        }
        if !g.modpow(&q, &p).is_one() {
            return Err(Error::Validation("generator is not of order q".into()));
        }
        let cofactor = &p_minus_1 / &q;
        Ok(Self { p, q, g, cofactor })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.p
    }

    pub fn order(&self) -> &BigUint {
        &self.q
    }

    pub fn generator(&self) -> &BigUint {
        &self.g
    }

    pub fn cofactor(&self) -> &BigUint {
        &self.cofactor
    }

    /// Serialized width of one group element: ⌈bits(p)/8⌉ bytes.
    pub fn element_len(&self) -> usize {
        ((self.p.bits() + 7) / 8) as usize
    }

    /// True iff `e` is a non-identity element of the order-q subgroup.
    pub fn is_element(&self, e: &BigUint) -> bool {
        if e <= &BigUint::one() || e >= &self.p {
            return false;
        }
        e.modpow(&self.q, &self.p).is_one()
    }

    /// Validates a received element, rejecting values outside the subgroup.
    pub fn check_element(&self, e: &BigUint) -> Result<()> {
        if self.is_element(e) {
            Ok(())
        } else {
            Err(Error::Validation(
                "element outside the prime-order subgroup".into(),
            ))
        }
    }

    pub fn pow(&self, base: &BigUint, exp: &BigUint) -> BigUint {
        base.modpow(exp, &self.p)
    }

    pub fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a * b % &self.p
    }

    /// g^exp mod p.
    pub fn base_pow(&self, exp: &BigUint) -> BigUint {
        self.g.modpow(exp, &self.p)
    }

    /// Multiplicative inverse of `e` mod p.
    pub fn inv(&self, e: &BigUint) -> Result<BigUint> {
        mod_inverse(e, &self.p).ok_or_else(|| Error::Validation("element not invertible".into()))
    }

    /// Fixed-width big-endian encoding.
    pub fn encode_element(&self, e: &BigUint) -> Vec<u8> {
        to_fixed_be(e, self.element_len())
    }

    /// Decodes a fixed-width element and range-checks it against p.
    pub fn decode_element(&self, bytes: &[u8]) -> Result<BigUint> {
        if bytes.len() != self.element_len() {
            return Err(Error::MalformedPayload(format!(
                "element width {} != {}",
                bytes.len(),
                self.element_len()
            )));
        }
        let e = BigUint::from_bytes_be(bytes);
        if e >= self.p {
            return Err(Error::Validation("element exceeds modulus".into()));
        }
        Ok(e)
    }
}

/// Left-pads the big-endian representation of `v` to `width` bytes.
pub fn to_fixed_be(v: &BigUint, width: usize) -> Vec<u8> {
    let raw = v.to_bytes_be();
    assert!(raw.len() <= width, "value does not fit the fixed width");
    let mut out = vec![0u8; width - raw.len()];
    out.extend_from_slice(&raw);
    out
}

/// Extended-GCD modular inverse; `None` when gcd(a, m) != 1.
pub fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    use num_bigint::BigInt;
    let a = BigInt::from(a.clone());
    let m_int = BigInt::from(m.clone());
    let ext = a.extended_gcd(&m_int);
    if !ext.gcd.is_one() {
        return None;
    }
    let mut x = ext.x % &m_int;
    if x < BigInt::zero() {
        x += &m_int;
    }
    x.to_biguint()
}

/// Generates a fresh group with `bits_p`-bit modulus and `bits_q`-bit
/// subgroup order. Deterministic for a fixed RNG seed.
pub fn gen_schnorr<R: Rng + ?Sized>(bits_p: u64, bits_q: u64, rng: &mut R) -> Result<SchnorrGroup> {
    if bits_q >= bits_p {
        return Err(Error::InvalidArgument(format!(
            "subgroup size {bits_q} must be below modulus size {bits_p}"
        )));
    }
    if bits_q < 32 {
        return Err(Error::InvalidArgument(format!(
            "subgroup size {bits_q} below the 32-bit floor"
        )));
    }

    let q = gen_prime(bits_q, rng, GEN_ATTEMPTS)?;
    let one = BigUint::one();

    // p = q*k + 1 for random even k of the complementary size
    let k_bits = bits_p - bits_q;
    let mut p = BigUint::zero();
    let mut found = false;
    for _ in 0..GEN_ATTEMPTS {
        let mut k = rng.gen_biguint(k_bits);
        k.set_bit(k_bits - 1, true);
        k.set_bit(0, false);
        let candidate = &q * &k + &one;
        if candidate.bits() != bits_p {
            continue;
        }
        if is_probable_prime(&candidate) {
            p = candidate;
            found = true;
            break;
        }
    }
    if !found {
        return Err(Error::ParamGen(format!(
            "no {bits_p}-bit modulus found over the chosen q"
        )));
    }

    let cofactor = (&p - &one) / &q;
    let p_minus_1 = &p - &one;
    for _ in 0..GEN_ATTEMPTS {
        let h = rng.gen_biguint_range(&BigUint::from(2u32), &p_minus_1);
        let g = h.modpow(&cofactor, &p);
        if g > one && g < p_minus_1 {
            return SchnorrGroup::new(p, q, g);
        }
    }
    Err(Error::ParamGen("no subgroup generator found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn accepts_toy_group() {
        // 4^11 mod 23 = 1 and 4 != 1
        let g = SchnorrGroup::new(23u32.into(), 11u32.into(), 4u32.into()).unwrap();
        assert!(g.is_element(&4u32.into()));
        assert_eq!(g.element_len(), 1);
    }

    #[test]
    fn rejects_bad_generator_and_order() {
        // 5 generates the full group mod 23, not the order-11 subgroup
        assert!(SchnorrGroup::new(23u32.into(), 11u32.into(), 5u32.into()).is_err());
        // q = 7 does not divide 22
        assert!(SchnorrGroup::new(23u32.into(), 7u32.into(), 4u32.into()).is_err());
        // identity generator
        assert!(SchnorrGroup::new(23u32.into(), 11u32.into(), 1u32.into()).is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let mut a = ChaCha20Rng::seed_from_u64(99);
        let mut b = ChaCha20Rng::seed_from_u64(99);
        let g1 = gen_schnorr(256, 64, &mut a).unwrap();
        let g2 = gen_schnorr(256, 64, &mut b).unwrap();
        assert_eq!(g1, g2);
        assert_eq!(g1.modulus().bits(), 256);
        assert_eq!(g1.order().bits(), 64);
    }

    #[test]
    fn rejects_inverted_sizes() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        assert!(gen_schnorr(64, 64, &mut rng).is_err());
        assert!(gen_schnorr(64, 128, &mut rng).is_err());
    }

    #[test]
    fn generated_elements_stay_in_subgroup() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let grp = gen_schnorr(256, 64, &mut rng).unwrap();
        for _ in 0..32 {
            let e = rng.gen_biguint_range(&BigUint::one(), grp.order());
            let x = grp.base_pow(&e);
            assert!(grp.is_element(&x));
            assert!(grp.check_element(&x).is_ok());
        }
        assert!(grp.check_element(&BigUint::one()).is_err());
        assert!(grp.check_element(grp.modulus()).is_err());
    }

    #[test]
    fn fixed_width_roundtrip() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let grp = gen_schnorr(256, 64, &mut rng).unwrap();
        let e = grp.base_pow(&7u32.into());
        let enc = grp.encode_element(&e);
        assert_eq!(enc.len(), grp.element_len());
        assert_eq!(grp.decode_element(&enc).unwrap(), e);
    }
}
