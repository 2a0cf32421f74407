//! Algebraic foundations: subgroup arithmetic, RSA authority keys,
//! hash-to-group maps, domain-tagged scalars and the homomorphic
//! encryption scheme used for equality testing.

pub mod elgamal;
pub mod hashing;
pub mod io;
pub mod primes;
pub mod rsa;
pub mod scalar;
pub mod schnorr;

pub use elgamal::{ExpElgCiphertext, ExpElgKeypair, ExpElgPublic};
pub use hashing::{DigestAlgo, HashSuite};
pub use rsa::{gen_rsa, CaKey, RsaGroup};
pub use scalar::{Scalar, ScalarDomain};
pub use schnorr::{gen_schnorr, SchnorrGroup};

use crate::Result;
use num_bigint::BigUint;

/// Signs the hash of an element's canonical bytes: the authorization an
/// authority issues over one fingerprint entry.
pub fn ca_authorize(ca: &CaKey, hash: &HashSuite, element_bytes: &[u8]) -> BigUint {
    let h = hash.hash_to_rsa(ca.group(), element_bytes);
    ca.sign_element(&h)
}

/// Checks `sigma^e == H(element_bytes)` against the public group.
pub fn ca_verify(rsa: &RsaGroup, hash: &HashSuite, element_bytes: &[u8], sigma: &BigUint) -> bool {
    if !rsa.is_element(sigma) {
        return false;
    }
    rsa.pow(sigma, rsa.public_exponent()) == hash.hash_to_rsa(rsa, element_bytes)
}

/// Convenience wrapper: batch-authorize a list of elements.
pub fn ca_authorize_all(
    ca: &CaKey,
    hash: &HashSuite,
    elements: &[Vec<u8>],
) -> Result<Vec<BigUint>> {
    Ok(crate::par::map_batch(elements, |e| ca_authorize(ca, hash, e)))
}
