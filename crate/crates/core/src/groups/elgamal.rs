//! Additively homomorphic encryption with message-in-the-exponent.
//!
//! Ciphertexts are pairs `(g^r, h^r * g^m)` over a Schnorr group. Products
//! add plaintexts, exponentiation scales them, and decryption is replaced
//! by a zero test: the equality protocols only need to know whether a
//! randomized difference is zero, never the difference itself.

use super::schnorr::SchnorrGroup;
use crate::{Error, Result};
use num_bigint::{BigUint, RandBigInt};
use num_traits::One;
use rand::Rng;
use std::sync::Arc;

/// Public encryption key `h = g^x`.
#[derive(Clone, Debug)]
pub struct ExpElgPublic {
    group: Arc<SchnorrGroup>,
    h: BigUint,
}

/// Key pair: the public half plus the secret exponent.
#[derive(Clone)]
pub struct ExpElgKeypair {
    public: ExpElgPublic,
    x: BigUint,
}

/// Ciphertext `(a, b) = (g^r, h^r * g^m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpElgCiphertext {
    pub a: BigUint,
    pub b: BigUint,
}

impl ExpElgPublic {
    pub fn group(&self) -> &Arc<SchnorrGroup> {
        &self.group
    }

    pub fn h(&self) -> &BigUint {
        &self.h
    }

    pub fn from_parts(group: Arc<SchnorrGroup>, h: BigUint) -> Result<Self> {
        group.check_element(&h)?;
        Ok(Self { group, h })
    }

    fn encode_message(&self, m: u64) -> Result<BigUint> {
        let m = BigUint::from(m);
        if &m >= self.group.order() {
            return Err(Error::MessageSpace(
                // value reported as-is; message space is [0, q)
                m.to_u64_digits().first().copied().unwrap_or(u64::MAX),
            ));
        }
        Ok(m)
    }

    /// Encrypts `m` in the exponent.
    pub fn encrypt<R: Rng + ?Sized>(&self, m: u64, rng: &mut R) -> Result<ExpElgCiphertext> {
        let m = self.encode_message(m)?;
        Ok(self.encrypt_exponent(&m, rng))
    }

    /// Encrypts `-m mod q` in the exponent.
    pub fn encrypt_neg<R: Rng + ?Sized>(&self, m: u64, rng: &mut R) -> Result<ExpElgCiphertext> {
        let m = self.encode_message(m)?;
        let neg = (self.group.order() - &m) % self.group.order();
        Ok(self.encrypt_exponent(&neg, rng))
    }

    fn encrypt_exponent<R: Rng + ?Sized>(&self, m: &BigUint, rng: &mut R) -> ExpElgCiphertext {
        let r = rng.gen_biguint_range(&BigUint::one(), self.group.order());
        let a = self.group.base_pow(&r);
        let b = self
            .group
            .mul(&self.group.pow(&self.h, &r), &self.group.base_pow(m));
        ExpElgCiphertext { a, b }
    }

    /// Componentwise product: ciphertext of the plaintext sum.
    pub fn product(&self, c1: &ExpElgCiphertext, c2: &ExpElgCiphertext) -> ExpElgCiphertext {
        ExpElgCiphertext {
            a: self.group.mul(&c1.a, &c2.a),
            b: self.group.mul(&c1.b, &c2.b),
        }
    }

    /// Componentwise exponentiation: ciphertext of `r * m`.
    pub fn scale(&self, c: &ExpElgCiphertext, r: &BigUint) -> ExpElgCiphertext {
        ExpElgCiphertext {
            a: self.group.pow(&c.a, r),
            b: self.group.pow(&c.b, r),
        }
    }
}

impl ExpElgKeypair {
    pub fn generate<R: Rng + ?Sized>(group: Arc<SchnorrGroup>, rng: &mut R) -> Self {
        let x = rng.gen_biguint_range(&BigUint::one(), group.order());
        let h = group.base_pow(&x);
        Self {
            public: ExpElgPublic { group, h },
            x,
        }
    }

    pub fn public(&self) -> &ExpElgPublic {
        &self.public
    }

    fn group(&self) -> &SchnorrGroup {
        &self.public.group
    }

    /// True iff the plaintext exponent is zero. Components are validated
    /// against the subgroup before use.
    pub fn is_zero(&self, c: &ExpElgCiphertext) -> Result<bool> {
        self.group().check_element(&c.a)?;
        self.group().check_element(&c.b)?;
        Ok(self.group().pow(&c.a, &self.x) == c.b)
    }
}

impl std::fmt::Debug for ExpElgKeypair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExpElgKeypair")
            .field("public", &self.public)
            .field("x", &"<private>")
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::schnorr::gen_schnorr;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn setup() -> (ExpElgKeypair, ChaCha20Rng) {
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        let grp = Arc::new(gen_schnorr(256, 64, &mut rng).unwrap());
        let kp = ExpElgKeypair::generate(grp, &mut rng);
        (kp, rng)
    }

    #[test]
    fn zero_test_detects_zero() {
        let (kp, mut rng) = setup();
        let c = kp.public().encrypt(0, &mut rng).unwrap();
        assert!(kp.is_zero(&c).unwrap());
        let c1 = kp.public().encrypt(5, &mut rng).unwrap();
        assert!(!kp.is_zero(&c1).unwrap());
    }

    #[test]
    fn encryption_is_probabilistic() {
        let (kp, mut rng) = setup();
        let c1 = kp.public().encrypt(42, &mut rng).unwrap();
        let c2 = kp.public().encrypt(42, &mut rng).unwrap();
        assert_ne!(c1, c2);
    }

    #[test]
    fn randomized_difference_matches_plaintext_equality() {
        let (kp, mut rng) = setup();
        let pk = kp.public().clone();
        let one = BigUint::one();
        for trial in 0..1000u64 {
            let a = rng.gen_range(0..u32::MAX as u64);
            let b = if trial % 4 == 0 {
                a
            } else {
                rng.gen_range(0..u32::MAX as u64)
            };
            let r = rng.gen_biguint_range(&one, pk.group().order());
            let diff = pk.scale(&pk.product(
                &pk.encrypt(a, &mut rng).unwrap(),
                &pk.encrypt_neg(b, &mut rng).unwrap(),
            ), &r);
            assert_eq!(kp.is_zero(&diff).unwrap(), a == b, "trial {trial}");
        }
    }

    #[test]
    fn malformed_ciphertext_rejected() {
        let (kp, mut rng) = setup();
        let c = kp.public().encrypt(1, &mut rng).unwrap();
        let bad = ExpElgCiphertext {
            a: c.a.clone(),
            b: kp.public().group().modulus() - 1u32, // order-2 element
        };
        assert!(kp.is_zero(&bad).is_err());
    }

    #[test]
    fn message_space_is_enforced() {
        let (kp, mut rng) = setup();
        // q is 64 bits here, so u64::MAX may or may not fit; use a value
        // that certainly exceeds it after reduction check
        let q = kp.public().group().order().clone();
        if q.bits() <= 64 {
            let too_big = u64::MAX;
            assert!(kp.public().encrypt(too_big, &mut rng).is_err());
        }
    }
}
