//! Binary message framing shared by the in-process state machines and the
//! TCP runners.
//!
//! Frame layout: 4-byte big-endian length (covering everything after the
//! length field), 1-byte protocol kind, 1-byte phase, 16-byte session id,
//! payload. Payloads are concatenated lists, each a 4-byte big-endian
//! element count followed by that many fixed-width elements; element
//! widths are implied by the protocol parameters, not the wire.

use crate::{Error, Result};
use std::io::{Read, Write};

pub const KIND_PSI_CA: u8 = 0x01;
pub const KIND_PSI: u8 = 0x02;
pub const KIND_APSI: u8 = 0x03;
pub const KIND_PET: u8 = 0x04;
pub const KIND_ERROR: u8 = 0xFF;

/// Session phases, strictly ordered within a session.
pub const PHASE_HELLO: u8 = 0;
pub const PHASE_SETUP: u8 = 1;
pub const PHASE_REQUEST: u8 = 2;
pub const PHASE_RESPONSE: u8 = 3;

/// Error codes carried in the phase byte of a `KIND_ERROR` frame. They
/// double as process exit codes.
pub const ERR_PROTOCOL: u8 = 2;
pub const ERR_VALIDATION: u8 = 3;
pub const ERR_IO: u8 = 4;

/// Hard cap on accepted frame sizes.
pub const MAX_FRAME_LEN: usize = 1 << 29; // 512 MiB

/// Caller-supplied opaque session identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SessionId(pub [u8; 16]);

impl SessionId {
    pub fn from_rng<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        let mut id = [0u8; 16];
        rng.fill_bytes(&mut id);
        Self(id)
    }
}

/// One protocol message, ready for framing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtocolMessage {
    pub kind: u8,
    pub phase: u8,
    pub session: SessionId,
    pub payload: Vec<u8>,
}

impl ProtocolMessage {
    pub fn new(kind: u8, phase: u8, session: SessionId, payload: Vec<u8>) -> Self {
        Self {
            kind,
            phase,
            session,
            payload,
        }
    }

    /// Total bytes this message occupies on the wire.
    pub fn framed_len(&self) -> usize {
        4 + 1 + 1 + 16 + self.payload.len()
    }

    pub fn write_frame<W: Write>(&self, w: &mut W) -> Result<()> {
        let body_len = 1 + 1 + 16 + self.payload.len();
        w.write_all(&(body_len as u32).to_be_bytes())?;
        w.write_all(&[self.kind, self.phase])?;
        w.write_all(&self.session.0)?;
        w.write_all(&self.payload)?;
        Ok(())
    }

    pub fn read_frame<R: Read>(r: &mut R) -> Result<Self> {
        let mut len = [0u8; 4];
        r.read_exact(&mut len)?;
        let body_len = u32::from_be_bytes(len) as usize;
        if body_len < 18 {
            return Err(Error::MalformedPayload(format!(
                "frame body {body_len} shorter than header"
            )));
        }
        if body_len > MAX_FRAME_LEN {
            return Err(Error::MalformedPayload(format!(
                "frame body {body_len} exceeds limit"
            )));
        }
        let mut head = [0u8; 2];
        r.read_exact(&mut head)?;
        let mut session = [0u8; 16];
        r.read_exact(&mut session)?;
        let mut payload = vec![0u8; body_len - 18];
        r.read_exact(&mut payload)?;
        Ok(Self {
            kind: head[0],
            phase: head[1],
            session: SessionId(session),
            payload,
        })
    }

    pub fn to_frame_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.framed_len());
        self.write_frame(&mut out).expect("vec write");
        out
    }

    /// Builds an error frame; the error class rides in the phase byte.
    pub fn error(session: SessionId, code: u8, detail: &str) -> Self {
        Self::new(KIND_ERROR, code, session, detail.as_bytes().to_vec())
    }
}

/// Serializes lists of fixed-width elements into a payload. Returns the
/// payload plus the element-only byte count (excluding list headers).
pub fn build_payload(lists: &[&[Vec<u8>]]) -> (Vec<u8>, usize) {
    let mut element_bytes = 0usize;
    let total: usize = lists
        .iter()
        .map(|l| 4 + l.iter().map(Vec::len).sum::<usize>())
        .sum();
    let mut out = Vec::with_capacity(total);
    for list in lists {
        out.extend_from_slice(&(list.len() as u32).to_be_bytes());
        for item in *list {
            out.extend_from_slice(item);
            element_bytes += item.len();
        }
    }
    (out, element_bytes)
}

/// Parses a payload into lists with the given element widths. The payload
/// must be consumed exactly.
pub fn parse_lists(payload: &[u8], widths: &[usize]) -> Result<Vec<Vec<Vec<u8>>>> {
    let mut lists = Vec::with_capacity(widths.len());
    let mut cursor = 0usize;
    for (idx, &width) in widths.iter().enumerate() {
        if cursor + 4 > payload.len() {
            return Err(Error::MalformedPayload(format!(
                "list {idx}: missing count header"
            )));
        }
        let count =
            u32::from_be_bytes(payload[cursor..cursor + 4].try_into().expect("4 bytes")) as usize;
        cursor += 4;
        let need = count
            .checked_mul(width)
            .ok_or_else(|| Error::MalformedPayload("list size overflow".into()))?;
        if cursor + need > payload.len() {
            return Err(Error::MalformedPayload(format!(
                "list {idx}: {count} elements of width {width} exceed payload"
            )));
        }
        let mut items = Vec::with_capacity(count);
        for i in 0..count {
            let start = cursor + i * width;
            items.push(payload[start..start + width].to_vec());
        }
        cursor += need;
        lists.push(items);
    }
    if cursor != payload.len() {
        return Err(Error::MalformedPayload(format!(
            "{} trailing bytes after the last list",
            payload.len() - cursor
        )));
    }
    Ok(lists)
}

/// Element-only bytes of a payload holding `num_lists` lists.
pub fn element_payload_len(payload: &[u8], num_lists: usize) -> usize {
    payload.len() - 4 * num_lists
}
