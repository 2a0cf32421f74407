//! Cardinality-only set intersection.
//!
//! Both parties blind their hashed elements under fresh exponents; the
//! server re-blinds the client's values, shuffles them, and publishes
//! comparison tags for its own set keyed to the client's ephemeral public
//! value. The client can then count matches without identifying them.
//!
//! Server offline work here depends on nothing from the client, but the
//! online tags bind to the client's `X`, so one server state serves
//! exactly one exchange.

use super::{check_header, random_permutation, DhParams, ElementSet};
use crate::groups::Scalar;
use crate::par::map_batch;
use crate::wire::{
    build_payload, parse_lists, ProtocolMessage, SessionId, KIND_PSI_CA, PHASE_REQUEST,
    PHASE_RESPONSE,
};
use crate::{Error, Result};
use num_bigint::BigUint;
use rand::Rng;
use std::collections::HashSet;

/// Server side: precomputed `ks_j = H(ŝ_j)^{R_s'}` over the permuted set.
pub struct PsicaServer {
    params: DhParams,
    session: SessionId,
    rs: Scalar,
    rs_prime: Scalar,
    big_y: BigUint,
    ks: Vec<BigUint>,
    /// Offline permutation applied to the input set.
    permutation: Vec<usize>,
    consumed: bool,
}

impl PsicaServer {
    /// Offline phase: permute the set, sample `R_s, R_s'`, precompute the
    /// masked hashes. Emits no message.
    pub fn offline<R: Rng + ?Sized>(
        params: &DhParams,
        set: &ElementSet,
        session: SessionId,
        rng: &mut R,
    ) -> Result<Self> {
        let group = &params.group;
        let permutation = random_permutation(set.len(), rng);
        let rs = Scalar::random_mod_q(group, rng);
        let rs_prime = Scalar::random_mod_q(group, rng);
        let big_y = group.base_pow(rs.value());

        let shuffled: Vec<&Vec<u8>> = permutation.iter().map(|&i| &set.items()[i]).collect();
        let ks = map_batch(&shuffled, |bytes| {
            let h = params.hash.hash_to_schnorr(group, bytes);
            group.pow(&h, rs_prime.value())
        });
        Ok(Self {
            params: params.clone(),
            session,
            rs,
            rs_prime,
            big_y,
            ks,
            permutation,
            consumed: false,
        })
    }

    pub fn set_len(&self) -> usize {
        self.ks.len()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn masked_hashes(&self) -> &[BigUint] {
        &self.ks
    }

    /// Online phase: consume the client request, emit tags, `Y`, and the
    /// shuffled re-blinded client values.
    pub fn online<R: Rng + ?Sized>(
        &mut self,
        msg: &ProtocolMessage,
        rng: &mut R,
    ) -> Result<ProtocolMessage> {
        if self.consumed {
            return Err(Error::SessionDone);
        }
        check_header(msg, KIND_PSI_CA, PHASE_REQUEST, &self.session)?;
        let group = &self.params.group;
        let width = group.element_len();
        let lists = parse_lists(&msg.payload, &[width, width])?;
        let (x_list, a_list) = (&lists[0], &lists[1]);
        if x_list.len() != 1 {
            return Err(Error::MalformedPayload(format!(
                "expected one ephemeral value, got {}",
                x_list.len()
            )));
        }
        if a_list.is_empty() {
            return Err(Error::MalformedPayload("empty blinded list".into()));
        }

        let x = group.decode_element(&x_list[0])?;
        let a: Vec<BigUint> = a_list
            .iter()
            .map(|b| group.decode_element(b))
            .collect::<Result<_>>()?;
        if self.params.validate_received {
            group.check_element(&x)?;
            let ok = map_batch(&a, |e| group.is_element(e));
            if ok.iter().any(|v| !v) {
                return Err(Error::Validation(
                    "blinded client element outside the subgroup".into(),
                ));
            }
        }

        // re-blind and shuffle the client's values
        let mut a_prime = map_batch(&a, |e| group.pow(e, self.rs_prime.value()));
        let perm = random_permutation(a_prime.len(), rng);
        let shuffled: Vec<BigUint> = perm.iter().map(|&i| a_prime[i].clone()).collect();
        a_prime = shuffled;

        // tags for the server set, keyed to the client's X
        let key = group.pow(&x, self.rs.value());
        let tags = map_batch(&self.ks, |ks_j| {
            self.params
                .hash
                .tag_schnorr(group, &group.mul(&key, ks_j))
        });

        let tag_items: Vec<Vec<u8>> = tags;
        let y_items = vec![group.encode_element(&self.big_y)];
        let a_items: Vec<Vec<u8>> = a_prime.iter().map(|e| group.encode_element(e)).collect();
        let (payload, _) = build_payload(&[&tag_items, &y_items, &a_items]);
        self.consumed = true;
        Ok(ProtocolMessage::new(
            KIND_PSI_CA,
            PHASE_RESPONSE,
            self.session,
            payload,
        ))
    }
}

/// Client side: single blinding exponent pair across the whole vector.
pub struct PsicaClient {
    params: DhParams,
    session: SessionId,
    rc: Scalar,
    rc_prime_inv: Scalar,
    set_len: usize,
    done: bool,
}

impl PsicaClient {
    /// Offline phase plus the first message `X ‖ {a_i}` (transmission of
    /// which is accounted to the online exchange).
    pub fn request<R: Rng + ?Sized>(
        params: &DhParams,
        set: &ElementSet,
        session: SessionId,
        rng: &mut R,
    ) -> Result<(Self, ProtocolMessage)> {
        let group = &params.group;
        let rc = Scalar::random_mod_q(group, rng);
        let rc_prime = Scalar::random_mod_q(group, rng);
        let rc_prime_inv = rc_prime.invert_mod_q(group)?;
        let big_x = group.base_pow(rc.value());

        let blinded = map_batch(set.items(), |bytes| {
            let h = params.hash.hash_to_schnorr(group, bytes);
            group.pow(&h, rc_prime.value())
        });

        let x_items = vec![group.encode_element(&big_x)];
        let a_items: Vec<Vec<u8>> = blinded.iter().map(|e| group.encode_element(e)).collect();
        let (payload, _) = build_payload(&[&x_items, &a_items]);
        let state = Self {
            params: params.clone(),
            session,
            rc,
            rc_prime_inv,
            set_len: set.len(),
            done: false,
        };
        Ok((
            state,
            ProtocolMessage::new(KIND_PSI_CA, PHASE_REQUEST, session, payload),
        ))
    }

    /// Online phase: derive own tags and count how many appear in the
    /// server's list. Returns the cardinality alone.
    pub fn finalize(&mut self, msg: &ProtocolMessage) -> Result<u64> {
        if self.done {
            return Err(Error::SessionDone);
        }
        check_header(msg, KIND_PSI_CA, PHASE_RESPONSE, &self.session)?;
        let group = &self.params.group;
        let width = group.element_len();
        let lists = parse_lists(&msg.payload, &[self.params.hash.tag_len, width, width])?;
        let (ts_list, y_list, a_list) = (&lists[0], &lists[1], &lists[2]);
        if y_list.len() != 1 {
            return Err(Error::MalformedPayload(format!(
                "expected one ephemeral value, got {}",
                y_list.len()
            )));
        }
        if a_list.len() != self.set_len {
            return Err(Error::LengthMismatch {
                expected: self.set_len,
                got: a_list.len(),
            });
        }

        let y = group.decode_element(&y_list[0])?;
        let a_prime: Vec<BigUint> = a_list
            .iter()
            .map(|b| group.decode_element(b))
            .collect::<Result<_>>()?;
        if self.params.validate_received {
            group.check_element(&y)?;
            let ok = map_batch(&a_prime, |e| group.is_element(e));
            if ok.iter().any(|v| !v) {
                return Err(Error::Validation(
                    "re-blinded element outside the subgroup".into(),
                ));
            }
        }

        let key = group.pow(&y, self.rc.value());
        let own_tags = map_batch(&a_prime, |e| {
            let unblinded = group.pow(e, self.rc_prime_inv.value());
            self.params
                .hash
                .tag_schnorr(group, &group.mul(&key, &unblinded))
        });

        let server_tags: HashSet<&[u8]> = ts_list.iter().map(|t| t.as_slice()).collect();
        let count = own_tags
            .iter()
            .collect::<HashSet<_>>()
            .into_iter()
            .filter(|t| server_tags.contains(t.as_slice()))
            .count() as u64;
        self.done = true;
        Ok(count)
    }
}
