//! Binary parameter files.
//!
//! Layout: magic `GPRM`, version u16, kind u8 (1 = Schnorr, 2 = RSA),
//! bit lengths, then each parameter as a u32-length-prefixed big-endian
//! integer. Authority keys use magic `GCAK` and append the private
//! exponent; they are meant to stay on the authority's disk.

use super::rsa::{CaKey, RsaGroup};
use super::schnorr::SchnorrGroup;
use crate::{Error, Result};
use num_bigint::BigUint;
use std::io::{Read, Write};

const PARAMS_MAGIC: &[u8; 4] = b"GPRM";
const CA_MAGIC: &[u8; 4] = b"GCAK";
const VERSION: u16 = 1;

pub const KIND_SCHNORR: u8 = 1;
pub const KIND_RSA: u8 = 2;

/// Either public parameter set.
#[derive(Clone, Debug)]
pub enum GroupParams {
    Schnorr(SchnorrGroup),
    Rsa(RsaGroup),
}

fn write_uint<W: Write>(w: &mut W, v: &BigUint) -> Result<()> {
    let bytes = v.to_bytes_be();
    w.write_all(&(bytes.len() as u32).to_be_bytes())?;
    w.write_all(&bytes)?;
    Ok(())
}

fn read_uint<R: Read>(r: &mut R) -> Result<BigUint> {
    let mut len = [0u8; 4];
    r.read_exact(&mut len)?;
    let len = u32::from_be_bytes(len) as usize;
    if len > 1 << 20 {
        return Err(Error::MalformedPayload("oversized integer field".into()));
    }
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    Ok(BigUint::from_bytes_be(&buf))
}

fn check_magic<R: Read>(r: &mut R, expected: &[u8; 4]) -> Result<()> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != expected {
        return Err(Error::BadMagic {
            expected: String::from_utf8_lossy(expected).into_owned(),
            found: String::from_utf8_lossy(&magic).into_owned(),
        });
    }
    let mut ver = [0u8; 2];
    r.read_exact(&mut ver)?;
    let ver = u16::from_be_bytes(ver);
    if ver != VERSION {
        return Err(Error::UnsupportedVersion(ver));
    }
    Ok(())
}

pub fn write_params<W: Write>(w: &mut W, params: &GroupParams) -> Result<()> {
    w.write_all(PARAMS_MAGIC)?;
    w.write_all(&VERSION.to_be_bytes())?;
    match params {
        GroupParams::Schnorr(g) => {
            w.write_all(&[KIND_SCHNORR])?;
            w.write_all(&(g.modulus().bits() as u16).to_be_bytes())?;
            w.write_all(&(g.order().bits() as u16).to_be_bytes())?;
            write_uint(w, g.modulus())?;
            write_uint(w, g.order())?;
            write_uint(w, g.generator())?;
        }
        GroupParams::Rsa(r) => {
            w.write_all(&[KIND_RSA])?;
            w.write_all(&(r.modulus().bits() as u16).to_be_bytes())?;
            w.write_all(&0u16.to_be_bytes())?;
            write_uint(w, r.modulus())?;
            write_uint(w, r.public_exponent())?;
            write_uint(w, r.generator())?;
        }
    }
    Ok(())
}

/// Reads and re-validates a parameter set.
pub fn read_params<R: Read>(r: &mut R) -> Result<GroupParams> {
    check_magic(r, PARAMS_MAGIC)?;
    let mut kind = [0u8; 1];
    r.read_exact(&mut kind)?;
    let mut bits = [0u8; 4];
    r.read_exact(&mut bits)?;
    match kind[0] {
        KIND_SCHNORR => {
            let p = read_uint(r)?;
            let q = read_uint(r)?;
            let g = read_uint(r)?;
            Ok(GroupParams::Schnorr(SchnorrGroup::new(p, q, g)?))
        }
        KIND_RSA => {
            let n = read_uint(r)?;
            let e = read_uint(r)?;
            let g = read_uint(r)?;
            Ok(GroupParams::Rsa(RsaGroup::new(n, e, g)?))
        }
        k => Err(Error::MalformedPayload(format!("unknown group kind {k}"))),
    }
}

pub fn write_ca_key<W: Write>(w: &mut W, ca: &CaKey) -> Result<()> {
    w.write_all(CA_MAGIC)?;
    w.write_all(&VERSION.to_be_bytes())?;
    let rsa = ca.group();
    write_uint(w, rsa.modulus())?;
    write_uint(w, rsa.public_exponent())?;
    write_uint(w, rsa.generator())?;
    write_uint(w, ca.private_exponent())?;
    Ok(())
}

pub fn read_ca_key<R: Read>(r: &mut R) -> Result<CaKey> {
    check_magic(r, CA_MAGIC)?;
    let n = read_uint(r)?;
    let e = read_uint(r)?;
    let g = read_uint(r)?;
    let d = read_uint(r)?;
    Ok(CaKey::from_parts(RsaGroup::new(n, e, g)?, d))
}
