//! Genome and diff files.
//!
//! Genome file: magic `GNOM`, version u16, length u64, scale factor f64,
//! then the sequence packed 3 bits per symbol. Diff file: magic `GDIF`,
//! version u16, 32-byte reference id, record count u64, then repeated
//! (8-byte position, 1-byte symbol) records.

use super::diff::ReferenceDiff;
use super::{symbol_code, symbol_from_code, Genome};
use crate::{Error, Result};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

const GENOME_MAGIC: &[u8; 4] = b"GNOM";
const DIFF_MAGIC: &[u8; 4] = b"GDIF";
const VERSION: u16 = 1;

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

/// Packs symbols 3 bits each, little-endian within the bit stream.
fn pack_symbols(seq: &[u8]) -> Result<Vec<u8>> {
    let mut out = vec![0u8; (seq.len() * 3 + 7) / 8];
    for (i, &sym) in seq.iter().enumerate() {
        let code = symbol_code(sym)? as u16;
        let bit = i * 3;
        let byte = bit / 8;
        let shift = bit % 8;
        out[byte] |= (code << shift) as u8;
        if shift > 5 {
            out[byte + 1] |= (code >> (8 - shift)) as u8;
        }
    }
    Ok(out)
}

fn unpack_symbols(packed: &[u8], n: usize) -> Result<Vec<u8>> {
    let needed = (n * 3 + 7) / 8;
    if packed.len() != needed {
        return Err(Error::MalformedPayload(format!(
            "packed sequence holds {} bytes, expected {needed}",
            packed.len()
        )));
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let bit = i * 3;
        let byte = bit / 8;
        let shift = bit % 8;
        let mut code = (packed[byte] >> shift) as u16;
        if shift > 5 {
            code |= (packed[byte + 1] as u16) << (8 - shift);
        }
        out.push(symbol_from_code((code & 0b111) as u8)?);
    }
    Ok(out)
}

pub fn write_genome<W: Write>(w: &mut W, genome: &Genome) -> Result<()> {
    w.write_all(GENOME_MAGIC)?;
    w.write_all(&VERSION.to_be_bytes())?;
    w.write_all(&(genome.len() as u64).to_be_bytes())?;
    w.write_all(&genome.scale_factor().to_be_bytes())?;
    w.write_all(&pack_symbols(genome.symbols())?)?;
    Ok(())
}

pub fn read_genome<R: Read>(r: &mut R) -> Result<Genome> {
    check_magic(r, GENOME_MAGIC)?;
    let mut n = [0u8; 8];
    r.read_exact(&mut n)?;
    let n = u64::from_be_bytes(n) as usize;
    let mut scale = [0u8; 8];
    r.read_exact(&mut scale)?;
    let scale = f64::from_be_bytes(scale);
    let mut packed = vec![0u8; (n * 3 + 7) / 8];
    r.read_exact(&mut packed)?;
    let mut genome = Genome::from_symbols(unpack_symbols(&packed, n)?)?;
    genome.set_scale_factor(scale);
    Ok(genome)
}

pub fn save_genome(path: &Path, genome: &Genome) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_genome(&mut w, genome)
}

pub fn load_genome(path: &Path) -> Result<Genome> {
    let mut r = BufReader::new(File::open(path)?);
    read_genome(&mut r)
}

pub fn write_diff<W: Write>(w: &mut W, diff: &ReferenceDiff) -> Result<()> {
    w.write_all(DIFF_MAGIC)?;
    w.write_all(&VERSION.to_be_bytes())?;
    w.write_all(diff.reference_id())?;
    w.write_all(&(diff.len() as u64).to_be_bytes())?;
    for &(pos, sym) in diff.records() {
        w.write_all(&pos.to_be_bytes())?;
        w.write_all(&[sym])?;
    }
    Ok(())
}

pub fn read_diff<R: Read>(r: &mut R) -> Result<ReferenceDiff> {
    check_magic(r, DIFF_MAGIC)?;
    let mut id = [0u8; 32];
    r.read_exact(&mut id)?;
    let mut count = [0u8; 8];
    r.read_exact(&mut count)?;
    let count = u64::from_be_bytes(count);
    let mut records = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let mut rec = [0u8; 9];
        r.read_exact(&mut rec)?;
        let pos = u64::from_be_bytes(rec[..8].try_into().expect("8 bytes"));
        records.push((pos, rec[8]));
    }
    ReferenceDiff::from_parts(id, records)
}

pub fn save_diff(path: &Path, diff: &ReferenceDiff) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_diff(&mut w, diff)
}

pub fn load_diff(path: &Path) -> Result<ReferenceDiff> {
    let mut r = BufReader::new(File::open(path)?);
    read_diff(&mut r)
}
