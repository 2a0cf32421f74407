//! Private equality testing over ordered vectors.
//!
//! The client encrypts its vector elementwise and the server returns the
//! randomized, shuffled ciphertext differences. Decrypt-to-zero then
//! counts the positions where the vectors agree; the fresh permutation
//! hides which positions those were.

use crate::groups::{ExpElgCiphertext, ExpElgKeypair, ExpElgPublic};
use crate::par::map_batch;
use crate::suite::{check_header, random_permutation, DhParams};
use crate::wire::{
    build_payload, parse_lists, ProtocolMessage, SessionId, KIND_PET, PHASE_REQUEST,
    PHASE_RESPONSE,
};
use crate::{Error, Result};
use num_bigint::{BigUint, RandBigInt};
use num_traits::One;
use rand::Rng;

/// Sentinel plaintext for "no value at this slot"; compares equal only to
/// another absent slot.
pub const ABSENT_SENTINEL: u64 = (1 << 20) - 1;

fn encode_ciphertexts(params: &DhParams, cts: &[ExpElgCiphertext]) -> Vec<Vec<u8>> {
    let group = &params.group;
    cts.iter()
        .map(|ct| {
            let mut buf = group.encode_element(&ct.a);
            buf.extend_from_slice(&group.encode_element(&ct.b));
            buf
        })
        .collect()
}

fn decode_ciphertexts(params: &DhParams, items: &[Vec<u8>]) -> Result<Vec<ExpElgCiphertext>> {
    let group = &params.group;
    let width = group.element_len();
    items
        .iter()
        .map(|bytes| {
            let a = group.decode_element(&bytes[..width])?;
            let b = group.decode_element(&bytes[width..])?;
            Ok(ExpElgCiphertext { a, b })
        })
        .collect()
}

/// Client state: holds the decryption key and expected response length.
pub struct PetClient {
    params: DhParams,
    session: SessionId,
    keypair: ExpElgKeypair,
    len: usize,
    done: bool,
}

impl PetClient {
    /// Generates a fresh keypair and encrypts `values` in order.
    pub fn request<R: Rng + ?Sized>(
        params: &DhParams,
        values: &[u64],
        session: SessionId,
        rng: &mut R,
    ) -> Result<(Self, ProtocolMessage)> {
        if values.is_empty() {
            return Err(Error::EmptySet);
        }
        let keypair = ExpElgKeypair::generate(params.group.clone(), rng);
        let cts = values
            .iter()
            .map(|&v| keypair.public().encrypt(v, rng))
            .collect::<Result<Vec<_>>>()?;
        let h_items = vec![params.group.encode_element(keypair.public().h())];
        let ct_items = encode_ciphertexts(params, &cts);
        let (payload, _) = build_payload(&[&h_items, &ct_items]);
        let state = Self {
            params: params.clone(),
            session,
            keypair,
            len: values.len(),
            done: false,
        };
        Ok((
            state,
            ProtocolMessage::new(KIND_PET, PHASE_REQUEST, session, payload),
        ))
    }

    /// Counts zero-decrypting response elements. Returns the count only;
    /// slot indices are meaningless after the server's shuffle.
    pub fn count_matches(&mut self, msg: &ProtocolMessage) -> Result<u64> {
        if self.done {
            return Err(Error::SessionDone);
        }
        check_header(msg, KIND_PET, PHASE_RESPONSE, &self.session)?;
        let width = self.params.group.element_len();
        let lists = parse_lists(&msg.payload, &[2 * width])?;
        let cts = decode_ciphertexts(&self.params, &lists[0])?;
        if cts.len() != self.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                got: cts.len(),
            });
        }
        let zeros = map_batch(&cts, |ct| self.keypair.is_zero(ct));
        let mut count = 0u64;
        for z in zeros {
            if z? {
                count += 1;
            }
        }
        self.done = true;
        Ok(count)
    }
}

/// Stateless responder.
pub struct PetServer;

impl PetServer {
    /// Builds `(Enc(c_i) * Enc(-s_i))^{r_i}` for fresh nonzero `r_i`, then
    /// shuffles the list with a fresh permutation.
    pub fn respond<R: Rng + ?Sized>(
        params: &DhParams,
        values: &[u64],
        msg: &ProtocolMessage,
        session: &SessionId,
        rng: &mut R,
    ) -> Result<ProtocolMessage> {
        check_header(msg, KIND_PET, PHASE_REQUEST, session)?;
        let group = &params.group;
        let width = group.element_len();
        let lists = parse_lists(&msg.payload, &[width, 2 * width])?;
        if lists[0].len() != 1 {
            return Err(Error::MalformedPayload("expected one public key".into()));
        }
        let h = group.decode_element(&lists[0][0])?;
        let pk = ExpElgPublic::from_parts(group.clone(), h)?;
        let cts = decode_ciphertexts(params, &lists[1])?;
        if cts.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: values.len(),
                got: cts.len(),
            });
        }
        if params.validate_received {
            let ok = map_batch(&cts, |ct| group.is_element(&ct.a) && group.is_element(&ct.b));
            if ok.iter().any(|v| !v) {
                return Err(Error::Validation(
                    "query ciphertext component outside the subgroup".into(),
                ));
            }
        }

        // sample per-element randomizers up front so the parallel map
        // stays deterministic for a given rng stream
        let randomizers: Vec<BigUint> = (0..values.len())
            .map(|_| rng.gen_biguint_range(&BigUint::one(), group.order()))
            .collect();
        let work: Vec<(usize, &ExpElgCiphertext)> = cts.iter().enumerate().collect();
        let neg_encrypted: Vec<ExpElgCiphertext> = values
            .iter()
            .map(|&s| pk.encrypt_neg(s, rng))
            .collect::<Result<_>>()?;
        let diffs = map_batch(&work, |&(i, ct)| {
            pk.scale(&pk.product(ct, &neg_encrypted[i]), &randomizers[i])
        });

        let perm = random_permutation(diffs.len(), rng);
        let shuffled: Vec<ExpElgCiphertext> = perm.iter().map(|&i| diffs[i].clone()).collect();
        let items = encode_ciphertexts(params, &shuffled);
        let (payload, _) = build_payload(&[&items]);
        Ok(ProtocolMessage::new(
            KIND_PET,
            PHASE_RESPONSE,
            *session,
            payload,
        ))
    }
}

/// Reference oracle: positions where the two vectors agree.
pub fn plaintext_match_count(a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b.iter()).filter(|(x, y)| x == y).count() as u64
}
