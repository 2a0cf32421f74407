//! Domain-tagged protocol exponents.

use super::rsa::RsaGroup;
use super::schnorr::{mod_inverse, SchnorrGroup};
use crate::{Error, Result};
use num_bigint::{BigUint, RandBigInt};
use num_traits::One;
use rand::Rng;

/// Range a scalar was sampled from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarDomain {
    /// `[1, q-1]` for a Schnorr group of order q.
    ModQ,
    /// `[1, ⌊√N/2⌋]` for an RSA modulus N.
    RsaHalfRange,
}

/// A secret exponent together with the range it was drawn from.
///
/// Zero is excluded in both domains so that inverses are always defined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scalar {
    value: BigUint,
    domain: ScalarDomain,
}

impl Scalar {
    /// Uniform in `[1, q-1]`.
    pub fn random_mod_q<R: Rng + ?Sized>(group: &SchnorrGroup, rng: &mut R) -> Self {
        let value = rng.gen_biguint_range(&BigUint::one(), group.order());
        Self {
            value,
            domain: ScalarDomain::ModQ,
        }
    }

    /// Uniform in `[1, ⌊√N/2⌋]`.
    pub fn random_rsa_half<R: Rng + ?Sized>(rsa: &RsaGroup, rng: &mut R) -> Self {
        let upper = rsa.half_range() + BigUint::one();
        let value = rng.gen_biguint_range(&BigUint::one(), &upper);
        Self {
            value,
            domain: ScalarDomain::RsaHalfRange,
        }
    }

    pub fn from_parts(value: BigUint, domain: ScalarDomain) -> Self {
        Self { value, domain }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn domain(&self) -> ScalarDomain {
        self.domain
    }

    /// Multiplicative inverse mod q. Defined for every mod-q scalar since
    /// q is prime and zero is excluded from the sample range.
    pub fn invert_mod_q(&self, group: &SchnorrGroup) -> Result<Scalar> {
        if self.domain != ScalarDomain::ModQ {
            return Err(Error::InvalidArgument(
                "inverse mod q requires a mod-q scalar".into(),
            ));
        }
        let inv = mod_inverse(&self.value, group.order())
            .ok_or_else(|| Error::Validation("scalar not invertible mod q".into()))?;
        Ok(Scalar {
            value: inv,
            domain: ScalarDomain::ModQ,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::schnorr::gen_schnorr;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn mod_q_scalars_are_nonzero_and_invertible() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let grp = gen_schnorr(256, 64, &mut rng).unwrap();
        for _ in 0..200 {
            let s = Scalar::random_mod_q(&grp, &mut rng);
            assert!(s.value().bits() > 0);
            assert!(s.value() < grp.order());
            let inv = s.invert_mod_q(&grp).unwrap();
            let prod = s.value() * inv.value() % grp.order();
            assert!(prod.is_one());
        }
    }

    #[test]
    fn half_range_scalars_respect_bound() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let key = crate::groups::rsa::gen_rsa(256, &mut rng).unwrap();
        let grp = gen_schnorr(256, 64, &mut rng).unwrap();
        let bound = key.group().half_range();
        for _ in 0..200 {
            let s = Scalar::random_rsa_half(key.group(), &mut rng);
            assert!(s.value() >= &BigUint::one());
            assert!(s.value() <= &bound);
            assert!(s.invert_mod_q(&grp).is_err());
        }
    }
}
