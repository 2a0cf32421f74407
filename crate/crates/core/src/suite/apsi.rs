//! Authorized set intersection over an RSA group.
//!
//! The client's elements only match when paired with a valid authority
//! signature: blinding is multiplicative (`a_i = σ_i · g^{R_c:i}`), and
//! the server's response exponent `2eR_s` strips the signature exactly
//! when `σ_i^e = H(c_i)`. Exponents are sampled from `[1, ⌊√N/2⌋]`.

use super::{check_header, random_permutation, ElementSet, RsaParams, TagSet};
use crate::groups::Scalar;
use crate::par::map_batch;
use crate::wire::{
    build_payload, parse_lists, ProtocolMessage, SessionId, KIND_APSI, PHASE_REQUEST,
    PHASE_RESPONSE, PHASE_SETUP,
};
use crate::{Error, Result};
use num_bigint::BigUint;
use rand::Rng;
use std::sync::Arc;

/// Server offline state: tags over the doubled-exponent masked hashes.
pub struct ApsiServer {
    params: RsaParams,
    /// 2 * e * R_s, the exponent applied to everything online.
    response_exponent: BigUint,
    big_y: BigUint,
    hashed: Vec<BigUint>,
    tags: Vec<Vec<u8>>,
    permutation: Vec<usize>,
}

impl ApsiServer {
    pub fn offline<R: Rng + ?Sized>(
        params: &RsaParams,
        set: &ElementSet,
        rng: &mut R,
    ) -> Result<Self> {
        let rsa = &params.rsa;
        let permutation = random_permutation(set.len(), rng);
        let rs = Scalar::random_rsa_half(rsa, rng);
        let two_rs = rs.value() << 1;
        let shuffled: Vec<&Vec<u8>> = permutation.iter().map(|&i| &set.items()[i]).collect();
        let hashed = map_batch(&shuffled, |bytes| params.hash.hash_to_rsa(rsa, bytes));
        let tags = map_batch(&hashed, |h| {
            params.hash.tag_rsa(rsa, &rsa.pow(h, &two_rs))
        });
        let response_exponent = &two_rs * rsa.public_exponent();
        let big_y = rsa.pow(rsa.generator(), &response_exponent);
        Ok(Self {
            params: params.clone(),
            response_exponent,
            big_y,
            hashed,
            tags,
            permutation,
        })
    }

    /// Fresh-session variant with a new `R_s` over the same permuted set.
    pub fn rerandomized<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        let rsa = &self.params.rsa;
        let rs = Scalar::random_rsa_half(rsa, rng);
        let two_rs = rs.value() << 1;
        let tags = map_batch(&self.hashed, |h| {
            self.params.hash.tag_rsa(rsa, &rsa.pow(h, &two_rs))
        });
        let response_exponent = &two_rs * rsa.public_exponent();
        let big_y = rsa.pow(rsa.generator(), &response_exponent);
        Self {
            params: self.params.clone(),
            response_exponent,
            big_y,
            hashed: self.hashed.clone(),
            tags,
            permutation: self.permutation.clone(),
        }
    }

    pub fn tags(&self) -> &[Vec<u8>] {
        &self.tags
    }

    pub fn set_len(&self) -> usize {
        self.tags.len()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn tags_message(&self, session: SessionId) -> ProtocolMessage {
        let (payload, _) = build_payload(&[&self.tags]);
        ProtocolMessage::new(KIND_APSI, PHASE_SETUP, session, payload)
    }

    /// Online phase: `Y = g^{2eR_s}` and `a'_i = a_i^{2eR_s}`, returned in
    /// request order.
    pub fn respond(&self, msg: &ProtocolMessage, session: &SessionId) -> Result<ProtocolMessage> {
        check_header(msg, KIND_APSI, PHASE_REQUEST, session)?;
        let rsa = &self.params.rsa;
        let width = rsa.element_len();
        let lists = parse_lists(&msg.payload, &[width])?;
        let a_list = &lists[0];
        if a_list.is_empty() {
            return Err(Error::MalformedPayload("empty blinded list".into()));
        }
        let a: Vec<BigUint> = a_list
            .iter()
            .map(|b| rsa.decode_element(b))
            .collect::<Result<_>>()?;
        if self.params.validate_received {
            let ok = map_batch(&a, |e| rsa.is_element(e));
            if ok.iter().any(|v| !v) {
                return Err(Error::Validation(
                    "blinded client element is not a unit mod N".into(),
                ));
            }
        }
        let a_prime = map_batch(&a, |e| rsa.pow(e, &self.response_exponent));
        let y_items = vec![rsa.encode_element(&self.big_y)];
        let a_items: Vec<Vec<u8>> = a_prime.iter().map(|e| rsa.encode_element(e)).collect();
        let (payload, _) = build_payload(&[&y_items, &a_items]);
        Ok(ProtocolMessage::new(
            KIND_APSI,
            PHASE_RESPONSE,
            *session,
            payload,
        ))
    }
}

/// Per-session wrapper enforcing single use of the online exchange.
pub struct ApsiServerSession {
    server: Arc<ApsiServer>,
    session: SessionId,
    responded: bool,
}

impl ApsiServerSession {
    pub fn new(server: Arc<ApsiServer>, session: SessionId) -> Self {
        Self {
            server,
            session,
            responded: false,
        }
    }

    pub fn tags_message(&self) -> ProtocolMessage {
        self.server.tags_message(self.session)
    }

    pub fn respond(&mut self, msg: &ProtocolMessage) -> Result<ProtocolMessage> {
        if self.responded {
            return Err(Error::SessionDone);
        }
        let out = self.server.respond(msg, &self.session)?;
        self.responded = true;
        Ok(out)
    }
}

/// Client state: elements paired one-to-one with their authorizations.
pub struct ApsiClient {
    params: RsaParams,
    session: SessionId,
    items: Vec<Vec<u8>>,
    scalars: Vec<Scalar>,
    done: bool,
}

impl ApsiClient {
    /// Blinds `a_i = σ_i · g^{R_c:i}`. Elements are deduplicated together
    /// with their signatures; `sigmas` must parallel `elements`.
    pub fn request<R: Rng + ?Sized>(
        params: &RsaParams,
        elements: &[Vec<u8>],
        sigmas: &[BigUint],
        session: SessionId,
        rng: &mut R,
    ) -> Result<(Self, ProtocolMessage)> {
        if elements.len() != sigmas.len() {
            return Err(Error::LengthMismatch {
                expected: elements.len(),
                got: sigmas.len(),
            });
        }
        if elements.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut seen = std::collections::HashSet::new();
        let mut items = Vec::new();
        let mut paired = Vec::new();
        for (e, s) in elements.iter().zip(sigmas.iter()) {
            if seen.insert(e.clone()) {
                items.push(e.clone());
                paired.push(s.clone());
            }
        }

        let rsa = &params.rsa;
        let scalars: Vec<Scalar> = (0..items.len())
            .map(|_| Scalar::random_rsa_half(rsa, rng))
            .collect();
        let pairs: Vec<(&BigUint, &Scalar)> = paired.iter().zip(scalars.iter()).collect();
        let blinded = map_batch(&pairs, |(sigma, r)| {
            rsa.mul(sigma, &rsa.pow(rsa.generator(), r.value()))
        });
        let a_items: Vec<Vec<u8>> = blinded.iter().map(|e| rsa.encode_element(e)).collect();
        let (payload, _) = build_payload(&[&a_items]);
        let state = Self {
            params: params.clone(),
            session,
            items,
            scalars,
            done: false,
        };
        Ok((
            state,
            ProtocolMessage::new(KIND_APSI, PHASE_REQUEST, session, payload),
        ))
    }

    /// Computes `tc_i = H'(a'_i · Y^{-R_c:i})` and returns the elements
    /// whose tags appear in the server's published list.
    pub fn finalize(&mut self, msg: &ProtocolMessage, tags: &TagSet) -> Result<Vec<Vec<u8>>> {
        if self.done {
            return Err(Error::SessionDone);
        }
        check_header(msg, KIND_APSI, PHASE_RESPONSE, &self.session)?;
        let rsa = &self.params.rsa;
        let width = rsa.element_len();
        let lists = parse_lists(&msg.payload, &[width, width])?;
        let (y_list, a_list) = (&lists[0], &lists[1]);
        if y_list.len() != 1 {
            return Err(Error::MalformedPayload(format!(
                "expected one ephemeral value, got {}",
                y_list.len()
            )));
        }
        if a_list.len() != self.items.len() {
            return Err(Error::LengthMismatch {
                expected: self.items.len(),
                got: a_list.len(),
            });
        }
        let y = rsa.decode_element(&y_list[0])?;
        let a_prime: Vec<BigUint> = a_list
            .iter()
            .map(|b| rsa.decode_element(b))
            .collect::<Result<_>>()?;
        if self.params.validate_received {
            rsa.check_element(&y)?;
            let ok = map_batch(&a_prime, |e| rsa.is_element(e));
            if ok.iter().any(|v| !v) {
                return Err(Error::Validation(
                    "re-blinded element is not a unit mod N".into(),
                ));
            }
        }

        // Y^{-R_c:i} via the modular inverse of Y, avoiding knowledge of φ(N)
        let y_inv = rsa.inv(&y)?;
        let pairs: Vec<(&BigUint, &Scalar)> = a_prime.iter().zip(self.scalars.iter()).collect();
        let own_tags = map_batch(&pairs, |(e, r)| {
            self.params
                .hash
                .tag_rsa(rsa, &rsa.mul(e, &rsa.pow(&y_inv, r.value())))
        });
        self.done = true;
        Ok(self
            .items
            .iter()
            .zip(own_tags.iter())
            .filter(|(_, tag)| tags.contains(tag))
            .map(|(item, _)| item.clone())
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{ca_authorize, gen_rsa, CaKey};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::collections::HashSet;
    use std::sync::OnceLock;

    fn ca() -> &'static CaKey {
        static KEY: OnceLock<CaKey> = OnceLock::new();
        KEY.get_or_init(|| {
            let mut rng = ChaCha20Rng::seed_from_u64(2024);
            gen_rsa(512, &mut rng).unwrap()
        })
    }

    fn params() -> RsaParams {
        RsaParams::new(Arc::new(ca().group().clone()))
    }

    fn elems(values: &[u32]) -> Vec<Vec<u8>> {
        values.iter().map(|v| v.to_be_bytes().to_vec()).collect()
    }

    fn authorize_all(p: &RsaParams, elements: &[Vec<u8>]) -> Vec<BigUint> {
        elements
            .iter()
            .map(|e| ca_authorize(ca(), &p.hash, e))
            .collect()
    }

    fn run(
        p: &RsaParams,
        client: &[u32],
        server: &[u32],
        corrupt: Option<usize>,
        seed: u64,
    ) -> Vec<Vec<u8>> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let session = SessionId::from_rng(&mut rng);
        let server_set = ElementSet::new(elems(server)).unwrap();
        let srv = ApsiServer::offline(p, &server_set, &mut rng).unwrap();
        let tags = TagSet::from_message(&srv.tags_message(session), p.hash.tag_len).unwrap();

        let client_elems = elems(client);
        let mut sigmas = authorize_all(p, &client_elems);
        if let Some(i) = corrupt {
            // replace with a random unit: no longer a signature on anything
            loop {
                use num_bigint::RandBigInt;
                let cand = rng.gen_biguint_below(p.rsa.modulus());
                if p.rsa.is_element(&cand) {
                    sigmas[i] = cand;
                    break;
                }
            }
        }
        let (mut cli, req) =
            ApsiClient::request(p, &client_elems, &sigmas, session, &mut rng).unwrap();
        let resp = srv.respond(&req, &session).unwrap();
        cli.finalize(&resp, &tags).unwrap()
    }

    #[test]
    fn authorized_subset_matches() {
        let p = params();
        let got = run(&p, &[2, 3, 9], &[1, 2, 3, 4], None, 1);
        let got: HashSet<Vec<u8>> = got.into_iter().collect();
        assert_eq!(got, elems(&[2, 3]).into_iter().collect());
    }

    #[test]
    fn corrupted_signature_never_matches() {
        let p = params();
        for trial in 0..20u64 {
            // element 0 is in the server set but carries a bogus sigma
            let got = run(&p, &[5, 6], &[5, 6, 7], Some(0), 100 + trial);
            let got: HashSet<Vec<u8>> = got.into_iter().collect();
            assert!(!got.contains(&5u32.to_be_bytes().to_vec()), "trial {trial}");
            assert!(got.contains(&6u32.to_be_bytes().to_vec()));
        }
    }

    #[test]
    fn matches_authorized_plaintext_oracle() {
        let p = params();
        let mut rng = ChaCha20Rng::seed_from_u64(55);
        for trial in 0..15u64 {
            let v = rng.gen_range(1..=12usize);
            let w = rng.gen_range(1..=12usize);
            let client: Vec<u32> = (0..v).map(|_| rng.gen_range(0..20u32)).collect();
            let server: Vec<u32> = (0..w).map(|_| rng.gen_range(0..20u32)).collect();
            let s_set: HashSet<u32> = server.iter().copied().collect();
            let mut expected = HashSet::new();
            let mut seen = HashSet::new();
            for c in &client {
                if seen.insert(*c) && s_set.contains(c) {
                    expected.insert(c.to_be_bytes().to_vec());
                }
            }
            let got: HashSet<Vec<u8>> =
                run(&p, &client, &server, None, 3000 + trial).into_iter().collect();
            assert_eq!(got, expected, "trial {trial}");
        }
    }

    #[test]
    fn tags_reusable_across_sessions_and_rerandomization_works() {
        let p = params();
        let mut rng = ChaCha20Rng::seed_from_u64(66);
        let server_set = ElementSet::new(elems(&[10, 11, 12])).unwrap();
        let srv = Arc::new(ApsiServer::offline(&p, &server_set, &mut rng).unwrap());
        let tags = TagSet::from_tags(srv.tags().to_vec());

        for s in 0..3u8 {
            let session = SessionId([s; 16]);
            let client_elems = elems(&[11]);
            let sigmas = authorize_all(&p, &client_elems);
            let (mut cli, req) =
                ApsiClient::request(&p, &client_elems, &sigmas, session, &mut rng).unwrap();
            let mut sess = ApsiServerSession::new(Arc::clone(&srv), session);
            let resp = sess.respond(&req).unwrap();
            assert_eq!(cli.finalize(&resp, &tags).unwrap().len(), 1);
            assert!(matches!(sess.respond(&req), Err(Error::SessionDone)));
        }

        let fresh = srv.rerandomized(&mut rng);
        assert_ne!(fresh.tags(), srv.tags());
    }

    #[test]
    fn sigma_element_pairing_is_required() {
        let p = params();
        let mut rng = ChaCha20Rng::seed_from_u64(67);
        let client_elems = elems(&[1, 2]);
        let sigmas = authorize_all(&p, &client_elems[..1]);
        assert!(matches!(
            ApsiClient::request(&p, &client_elems, &sigmas, SessionId([0; 16]), &mut rng),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn exponent_range_documented_by_scalars() {
        let p = params();
        let mut rng = ChaCha20Rng::seed_from_u64(68);
        let s = Scalar::random_rsa_half(&p.rsa, &mut rng);
        assert!(s.value() <= &p.rsa.half_range());
    }
}
