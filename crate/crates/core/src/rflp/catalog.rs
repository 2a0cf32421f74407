//! Text catalog of enzymes and markers.
//!
//! One file holds both: enzyme lines are `name<TAB>pattern<TAB>offset`,
//! marker lines are `id<TAB>probe`. Blank lines and `#` comments are
//! skipped. The catalog digest feeds the common-input handshake.

use super::{Enzyme, Marker};
use crate::{Error, Result};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Catalog {
    pub enzymes: Vec<Enzyme>,
    pub markers: Vec<Marker>,
}

impl Catalog {
    pub fn new(enzymes: Vec<Enzyme>, markers: Vec<Marker>) -> Self {
        Self { enzymes, markers }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut enzymes = Vec::new();
        let mut markers = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match fields.len() {
                3 => {
                    let offset: usize = fields[2].parse().map_err(|_| {
                        Error::InvalidArgument(format!(
                            "line {}: bad cut offset {:?}",
                            lineno + 1,
                            fields[2]
                        ))
                    })?;
                    enzymes.push(Enzyme::new(fields[0], fields[1].as_bytes(), offset)?);
                }
                2 => {
                    let id: u16 = fields[0].parse().map_err(|_| {
                        Error::InvalidArgument(format!(
                            "line {}: bad marker id {:?}",
                            lineno + 1,
                            fields[0]
                        ))
                    })?;
                    markers.push(Marker::new(id, fields[1].as_bytes())?);
                }
                n => {
                    return Err(Error::InvalidArgument(format!(
                        "line {}: expected 2 or 3 tab-separated fields, got {n}",
                        lineno + 1
                    )));
                }
            }
        }
        Ok(Self { enzymes, markers })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for e in &self.enzymes {
            out.push_str(&format!(
                "{}\t{}\t{}\n",
                e.name,
                String::from_utf8_lossy(&e.pattern),
                e.offset
            ));
        }
        for m in &self.markers {
            out.push_str(&format!(
                "{}\t{}\n",
                m.id,
                String::from_utf8_lossy(&m.probe)
            ));
        }
        out
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render())?;
        Ok(())
    }

    /// Digest over the canonical rendering, used in config handshakes.
    pub fn digest(&self) -> [u8; 32] {
        Sha256::digest(self.render().as_bytes()).into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_render_round_trip() {
        let text = "# default catalog\nPstI\tCTGCAG\t5\n1\tACGTACGTACGTACGTACGT\n2\tTTTTGGGGCCCCAAAATTTT\n";
        let cat = Catalog::parse(text).unwrap();
        assert_eq!(cat.enzymes.len(), 1);
        assert_eq!(cat.markers.len(), 2);
        assert_eq!(cat.enzymes[0], Enzyme::pst_i());
        let again = Catalog::parse(&cat.render()).unwrap();
        assert_eq!(cat, again);
        assert_eq!(cat.digest(), again.digest());
    }

    #[test]
    fn bad_lines_are_rejected() {
        assert!(Catalog::parse("PstI\tCTGCAG\tfive\n").is_err());
        assert!(Catalog::parse("one two three four\n").is_err());
        assert!(Catalog::parse("1\tACGX\n").is_err());
    }
}
