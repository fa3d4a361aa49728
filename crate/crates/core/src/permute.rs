//! PermuteSets: the inter-block permutation of 4-bit Sets.
//!
//! Each pair of adjacent columns `(2p, 2p + 1)` of a block is cut into two
//! Sets of four bits: half 0 covers rows 0 and 1, half 1 covers rows 2 and
//! 3. The 64 Sets are indexed `16 * block + 2 * pair + half` and moved as
//! atomic units.

use crate::error::{Error, Result};
use crate::state::{State256, BLOCKS, ROWS};
use serde::{Deserialize, Serialize};

pub const SETS: usize = 64;
pub const SETS_PER_BLOCK: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetIndex {
    pub block: usize,
    pub pair: usize,
    pub half: usize,
}

impl SetIndex {
    pub fn new(block: usize, pair: usize, half: usize) -> Result<Self> {
        if block >= BLOCKS {
            return Err(Error::Index {
                what: "block",
                index: block,
                limit: BLOCKS,
            });
        }
        if pair >= 8 {
            return Err(Error::Index {
                what: "pair",
                index: pair,
                limit: 8,
            });
        }
        if half >= 2 {
            return Err(Error::Index {
                what: "half",
                index: half,
                limit: 2,
            });
        }
        Ok(SetIndex { block, pair, half })
    }

    pub fn flat(&self) -> usize {
        SETS_PER_BLOCK * self.block + 2 * self.pair + self.half
    }

    pub fn from_flat(i: usize) -> Self {
        SetIndex {
            block: i / SETS_PER_BLOCK,
            pair: (i % SETS_PER_BLOCK) / 2,
            half: i % 2,
        }
    }

    /// Position of the Set inside its block, `2 * pair + half`.
    pub fn local(&self) -> usize {
        2 * self.pair + self.half
    }

    fn top_row(&self) -> usize {
        2 * self.half
    }

    // shift that brings the column pair to the two low bits of a row
    fn shift(&self) -> u32 {
        14 - 2 * self.pair as u32
    }
}

/// Reads a Set as `(r0:c0, r0:c1, r1:c0, r1:c1)`, most significant first.
pub fn extract_set(state: &State256, idx: SetIndex) -> u8 {
    let rows = state.rows();
    let base = idx.block * ROWS + idx.top_row();
    let hi = (rows[base] >> idx.shift()) & 3;
    let lo = (rows[base + 1] >> idx.shift()) & 3;
    ((hi << 2) | lo) as u8
}

pub fn inject_set(state: &mut State256, idx: SetIndex, value: u8) {
    let shift = idx.shift();
    let base = idx.block * ROWS + idx.top_row();
    let rows = state.rows_mut();
    let mask = !(3u16 << shift);
    rows[base] = (rows[base] & mask) | ((((value >> 2) & 3) as u16) << shift);
    rows[base + 1] = (rows[base + 1] & mask) | (((value & 3) as u16) << shift);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermuteReport {
    pub bijective: bool,
    pub block_spreading: bool,
    pub pair_splitting: bool,
}

impl PermuteReport {
    pub fn passes(&self) -> bool {
        self.bijective && self.block_spreading && self.pair_splitting
    }
}

/// `dest[i]` is the flat destination of the Set with flat index `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PermutationTable {
    dest: [u8; SETS],
}

impl Default for PermutationTable {
    fn default() -> Self {
        Self::default_table()
    }
}

impl PermutationTable {
    /// Wraps a destination array without checking it.
    pub fn from_dest(dest: [u8; SETS]) -> Self {
        PermutationTable { dest }
    }

    pub fn dest(&self) -> &[u8; SETS] {
        &self.dest
    }

    pub fn identity() -> Self {
        PermutationTable {
            dest: std::array::from_fn(|i| i as u8),
        }
    }

    /// Writing the in-block Set position as `4q + r`, Set `(b, 4q + r)`
    /// moves to `((b + r) mod 4, 4q + b)`. The four Sets of a group `(b, q)`
    /// land in four different blocks and each destination block receives
    /// one group member from every source block.
    pub fn default_table() -> Self {
        PermutationTable {
            dest: std::array::from_fn(|i| {
                let (b, s) = (i / SETS_PER_BLOCK, i % SETS_PER_BLOCK);
                let (q, r) = (s / 4, s % 4);
                (SETS_PER_BLOCK * ((b + r) % BLOCKS) + 4 * q + b) as u8
            }),
        }
    }

    pub fn map(&self, idx: SetIndex) -> SetIndex {
        SetIndex::from_flat(self.dest[idx.flat()] as usize)
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = 0u64;
        for &d in &self.dest {
            if d as usize >= SETS {
                return false;
            }
            seen |= 1 << d;
        }
        seen == u64::MAX
    }

    pub fn invert(&self) -> Result<PermutationTable> {
        if !self.is_bijective() {
            return Err(Error::NotBijective);
        }
        let mut inv = [0u8; SETS];
        for (src, &d) in self.dest.iter().enumerate() {
            inv[d as usize] = src as u8;
        }
        Ok(PermutationTable { dest: inv })
    }

    pub fn validate(&self) -> PermuteReport {
        let in_range = self.dest.iter().all(|&d| (d as usize) < SETS);
        let mut block_spreading = in_range;
        let mut pair_splitting = in_range;
        if in_range {
            for b in 0..BLOCKS {
                let mut per_dest = [0usize; BLOCKS];
                for s in 0..SETS_PER_BLOCK {
                    per_dest[self.dest[b * SETS_PER_BLOCK + s] as usize / SETS_PER_BLOCK] += 1;
                }
                block_spreading &= per_dest.iter().all(|&n| n == SETS_PER_BLOCK / BLOCKS);
                for p in 0..8 {
                    let top = self.dest[b * SETS_PER_BLOCK + 2 * p] as usize / SETS_PER_BLOCK;
                    let bottom =
                        self.dest[b * SETS_PER_BLOCK + 2 * p + 1] as usize / SETS_PER_BLOCK;
                    pair_splitting &= top != bottom;
                }
            }
        }
        PermuteReport {
            bijective: self.is_bijective(),
            block_spreading,
            pair_splitting,
        }
    }

    /// Moves every Set to its destination, internal bit order intact.
    pub fn apply(&self, state: &State256) -> State256 {
        let mut out = State256::zero();
        for (src, &d) in self.dest.iter().enumerate() {
            let v = extract_set(state, SetIndex::from_flat(src));
            inject_set(&mut out, SetIndex::from_flat(d as usize), v);
        }
        out
    }

    /// Parses 64 whitespace-separated integers; `#` starts a comment.
    pub fn load(text: &str) -> Result<Self> {
        let mut dest = Vec::with_capacity(SETS);
        for (lineno, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("");
            for tok in body.split_whitespace() {
                let v: usize = tok.parse().map_err(|_| {
                    Error::PermutationFormat(format!("line {}: bad integer {tok:?}", lineno + 1))
                })?;
                if v >= SETS {
                    return Err(Error::PermutationFormat(format!(
                        "line {}: {v} out of range 0..63",
                        lineno + 1
                    )));
                }
                dest.push(v as u8);
            }
        }
        let dest: [u8; SETS] = dest.as_slice().try_into().map_err(|_| {
            Error::PermutationFormat(format!("expected {SETS} entries, found {}", dest.len()))
        })?;
        Ok(PermutationTable { dest })
    }

    pub fn to_text(&self) -> String {
        self.dest
            .chunks(SETS_PER_BLOCK)
            .map(|c| {
                let line: Vec<String> = c.iter().map(|d| d.to_string()).collect();
                line.join(" ") + "\n"
            })
            .collect()
    }
}
