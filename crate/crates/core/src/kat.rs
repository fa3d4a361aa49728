//! Known-answer test files.
//!
//! A record is three lines `KEY=<64 hex>`, `PT=<64 hex>`, `CT=<64 hex>`.
//! Records are separated by blank lines; `#` lines are comments. Hex is the
//! serialized byte order of the state.

use crate::cipher::{CipherParams, Key256};
use crate::error::{Error, Result};
use crate::state::STATE_BYTES;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::fmt::Write as _;

/// Seed of the random part of the generated corpus.
pub const CORPUS_SEED: u64 = 0x4b41_545f_4d52_564e;
pub const RANDOM_RECORDS: usize = 100;
/// Serialized bit positions used for the single-bit keys and plaintexts.
pub const SINGLE_BITS: [usize; 10] = [0, 1, 7, 8, 63, 64, 127, 128, 191, 255];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KatRecord {
    pub key: [u8; STATE_BYTES],
    pub plaintext: [u8; STATE_BYTES],
    pub ciphertext: [u8; STATE_BYTES],
    /// 1-based line of the `KEY=` entry, 0 for generated records.
    pub line: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Path {
    Reference,
    Bitsliced,
}

fn single_bit(i: usize) -> [u8; STATE_BYTES] {
    let mut b = [0u8; STATE_BYTES];
    b[i / 8] = 0x80 >> (i % 8);
    b
}

/// (key, plaintext) inputs of the deterministic corpus.
pub fn corpus_inputs() -> Vec<([u8; STATE_BYTES], [u8; STATE_BYTES])> {
    let zero = [0u8; STATE_BYTES];
    let ones = [0xFFu8; STATE_BYTES];
    let mut v = vec![(zero, zero), (ones, ones), (zero, ones), (ones, zero)];
    v.extend(SINGLE_BITS.iter().map(|&i| (single_bit(i), zero)));
    v.extend(SINGLE_BITS.iter().map(|&i| (zero, single_bit(i))));
    let mut rng = ChaCha20Rng::seed_from_u64(CORPUS_SEED);
    v.extend((0..RANDOM_RECORDS).map(|_| (rng.gen(), rng.gen())));
    v
}

pub fn generate(params: &CipherParams) -> Vec<KatRecord> {
    corpus_inputs()
        .into_iter()
        .map(|(key, plaintext)| {
            let ciphertext = params
                .encrypt_block(&Key256::new(key), &plaintext)
                .expect("fixed-size block");
            KatRecord {
                key,
                plaintext,
                ciphertext,
                line: 0,
            }
        })
        .collect()
}

pub fn format(records: &[KatRecord]) -> String {
    let mut out = String::new();
    for (i, r) in records.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "KEY={}", hex::encode_upper(r.key));
        let _ = writeln!(out, "PT={}", hex::encode_upper(r.plaintext));
        let _ = writeln!(out, "CT={}", hex::encode_upper(r.ciphertext));
    }
    out
}

#[derive(Default)]
struct Partial {
    key: Option<[u8; STATE_BYTES]>,
    pt: Option<[u8; STATE_BYTES]>,
    ct: Option<[u8; STATE_BYTES]>,
    start: usize,
}

impl Partial {
    fn is_empty(&self) -> bool {
        self.key.is_none() && self.pt.is_none() && self.ct.is_none()
    }

    fn finish(self, line: usize) -> Result<KatRecord> {
        let missing = |what: &str| Error::Kat {
            line,
            msg: format!("record starting at line {} has no {what}", self.start),
        };
        Ok(KatRecord {
            key: self.key.ok_or_else(|| missing("KEY"))?,
            plaintext: self.pt.ok_or_else(|| missing("PT"))?,
            ciphertext: self.ct.ok_or_else(|| missing("CT"))?,
            line: self.start,
        })
    }
}

pub fn parse(text: &str) -> Result<Vec<KatRecord>> {
    let mut records = Vec::new();
    let mut cur = Partial::default();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let t = raw.trim();
        if t.starts_with('#') {
            continue;
        }
        if t.is_empty() {
            if !cur.is_empty() {
                records.push(std::mem::take(&mut cur).finish(line)?);
            }
            continue;
        }
        let (name, value) = t.split_once('=').ok_or_else(|| Error::Kat {
            line,
            msg: "expected NAME=HEX".into(),
        })?;
        let bytes = hex::decode(value.trim()).map_err(|e| Error::Kat {
            line,
            msg: format!("bad hex: {e}"),
        })?;
        let bytes: [u8; STATE_BYTES] = bytes.as_slice().try_into().map_err(|_| Error::Kat {
            line,
            msg: format!("expected {STATE_BYTES} bytes, found {}", bytes.len()),
        })?;
        if cur.is_empty() {
            cur.start = line;
        }
        let slot = match name.trim() {
            "KEY" => &mut cur.key,
            "PT" => &mut cur.pt,
            "CT" => &mut cur.ct,
            other => {
                return Err(Error::Kat {
                    line,
                    msg: format!("unknown field {other:?}"),
                })
            }
        };
        if slot.replace(bytes).is_some() {
            return Err(Error::Kat {
                line,
                msg: format!("duplicate {} in record", name.trim()),
            });
        }
    }
    if !cur.is_empty() {
        records.push(cur.finish(last_line)?);
    }
    Ok(records)
}

/// Re-encrypts every record; returns the records whose ciphertext differs.
pub fn verify(params: &CipherParams, records: &[KatRecord], path: Path) -> Vec<KatRecord> {
    records
        .iter()
        .filter(|r| {
            let key = Key256::new(r.key);
            let ct = match path {
                Path::Reference => params.encrypt_block(&key, &r.plaintext),
                Path::Bitsliced => params.encrypt_block_bitsliced(&key, &r.plaintext),
            }
            .expect("fixed-size block");
            ct != r.ciphertext
        })
        .copied()
        .collect()
}
