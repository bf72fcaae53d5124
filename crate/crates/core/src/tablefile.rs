//! Byte tables on disk.
//!
//! Layout, all integers little-endian:
//!
//! | offset | size | field                                   |
//! |--------|------|-----------------------------------------|
//! | 0      | 8    | magic `CUBEMIXT`                        |
//! | 8      | 2    | format version (1)                      |
//! | 10     | 1    | table kind, see [`TableKind`]           |
//! | 11     | 1    | metric id (1 = 18-move half-turn metric)|
//! | 12     | 8    | entry count                             |
//! | 20     | 32   | SHA-256 of the payload                  |
//! | 52     | 12   | reserved, zero                          |
//! | 64     | n    | payload, one byte per entry             |

use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"CUBEMIXT";
pub const FORMAT_VERSION: u16 = 1;
pub const METRIC_HTM: u8 = 1;
pub const HEADER_LEN: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum TableKind {
    CornerPdb = 0,
    EdgesAPdb = 1,
    EdgesBPdb = 2,
    CornerDistance = 3,
    QuotientDistance = 4,
}

impl TableKind {
    pub fn from_byte(b: u8) -> Option<TableKind> {
        Some(match b {
            0 => TableKind::CornerPdb,
            1 => TableKind::EdgesAPdb,
            2 => TableKind::EdgesBPdb,
            3 => TableKind::CornerDistance,
            4 => TableKind::QuotientDistance,
            _ => return None,
        })
    }
}

pub fn encode_header(kind: TableKind, payload: &[u8]) -> [u8; HEADER_LEN] {
    let mut h = [0u8; HEADER_LEN];
    h[0..8].copy_from_slice(MAGIC);
    h[8..10].copy_from_slice(&FORMAT_VERSION.to_le_bytes());
    h[10] = kind as u8;
    h[11] = METRIC_HTM;
    h[12..20].copy_from_slice(&(payload.len() as u64).to_le_bytes());
    h[20..52].copy_from_slice(&Sha256::digest(payload));
    h
}

/// Writes atomically: a temporary file in the same directory, then rename.
pub fn write_table(path: &Path, kind: TableKind, payload: &[u8]) -> Result<()> {
    write_atomic(path, &[&encode_header(kind, payload), payload])
}

/// Writes the concatenation of `parts` to a sibling temporary file, syncs
/// it and renames it over `path`.
pub fn write_atomic(path: &Path, parts: &[&[u8]]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(Error::io(dir))?;
    }
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp).map_err(Error::io(&tmp))?;
        for p in parts {
            f.write_all(p).map_err(Error::io(&tmp))?;
        }
        f.sync_all().map_err(Error::io(&tmp))?;
    }
    fs::rename(&tmp, path).map_err(Error::io(path))
}

pub fn read_table(path: &Path, kind: TableKind, expected_len: usize) -> Result<Vec<u8>> {
    let mut bytes = fs::read(path).map_err(Error::io(path))?;
    let bad = |reason: String| Error::TableFormat {
        path: path.to_path_buf(),
        reason,
    };
    let header = parse_header(&bytes).map_err(bad)?;
    if header.kind != kind {
        return Err(bad(format!("holds {:?}, expected {:?}", header.kind, kind)));
    }
    if header.entries as usize != expected_len || bytes.len() != HEADER_LEN + expected_len {
        return Err(bad(format!(
            "has {} entries ({} payload bytes), expected {expected_len}",
            header.entries,
            bytes.len().saturating_sub(HEADER_LEN)
        )));
    }
    if Sha256::digest(&bytes[HEADER_LEN..]).as_slice() != header.digest {
        return Err(bad("payload digest mismatch".into()));
    }
    bytes.drain(..HEADER_LEN);
    Ok(bytes)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableHeader {
    pub version: u16,
    pub kind: TableKind,
    pub metric: u8,
    pub entries: u64,
    pub digest: [u8; 32],
}

pub fn parse_header(bytes: &[u8]) -> std::result::Result<TableHeader, String> {
    if bytes.len() < HEADER_LEN {
        return Err("shorter than the header".into());
    }
    if &bytes[0..8] != MAGIC {
        return Err("bad magic".into());
    }
    let version = u16::from_le_bytes([bytes[8], bytes[9]]);
    if version != FORMAT_VERSION {
        return Err(format!("unsupported format version {version}"));
    }
    let kind = TableKind::from_byte(bytes[10]).ok_or_else(|| format!("unknown table kind {}", bytes[10]))?;
    let metric = bytes[11];
    if metric != METRIC_HTM {
        return Err(format!("unknown metric id {metric}"));
    }
    let entries = u64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let digest: [u8; 32] = bytes[20..52].try_into().unwrap();
    Ok(TableHeader {
        version,
        kind,
        metric,
        entries,
        digest,
    })
}

pub fn read_header(path: &Path) -> Result<TableHeader> {
    use std::io::Read;
    let mut buf = [0u8; HEADER_LEN];
    fs::File::open(path)
        .and_then(|mut f| f.read_exact(&mut buf))
        .map_err(Error::io(path))?;
    parse_header(&buf).map_err(|reason| Error::TableFormat {
        path: path.to_path_buf(),
        reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.bin");
        let payload: Vec<u8> = (0..1000u32).map(|i| (i % 13) as u8).collect();
        write_table(&p, TableKind::EdgesAPdb, &payload).unwrap();
        let raw = fs::read(&p).unwrap();
        assert_eq!(&raw[..8], b"CUBEMIXT");
        assert_eq!(raw[10], 1);
        assert_eq!(u64::from_le_bytes(raw[12..20].try_into().unwrap()), 1000);
        assert_eq!(read_table(&p, TableKind::EdgesAPdb, 1000).unwrap(), payload);
        assert!(read_table(&p, TableKind::CornerPdb, 1000).is_err());
        assert!(read_table(&p, TableKind::EdgesAPdb, 999).is_err());
        let mut bad = raw.clone();
        bad[HEADER_LEN + 17] ^= 1;
        fs::write(&p, &bad).unwrap();
        assert!(matches!(
            read_table(&p, TableKind::EdgesAPdb, 1000),
            Err(Error::TableFormat { .. })
        ));
    }
}
