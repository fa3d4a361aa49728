//! The 4-bit involutive S-box.
//!
//! The S-box is defined by a circuit of 4 AND and 4 XOR gates acting on the
//! input bits `(a, b, c, d)`, with `a` the most significant bit of the
//! nibble. The same gate list drives three forms: a scalar evaluator, the
//! 16-entry table and a bitsliced evaluator over whole row lanes.

use crate::error::{Error, Result};
use crate::state::{State256, BLOCKS, COLS};
use std::ops::{BitAnd, BitXor};

/// Committed table; regenerated from the circuit by `build_table` and in tests.
pub const SBOX: [u8; 16] = [
    0x0, 0x2, 0x1, 0x3, 0x8, 0xB, 0x6, 0xD, 0x4, 0xE, 0xF, 0x5, 0xC, 0x7, 0x9, 0xA,
];

/// The gate list, generic over the word type so that one definition serves
/// both a single nibble (`u8` bits) and bitsliced lanes (`u16`/`u64`).
///
/// Gates evaluate top to bottom. Outputs are `(a', b', c', d')`.
#[inline(always)]
pub fn circuit<W>(a: W, b: W, c: W, d: W) -> (W, W, W, W)
where
    W: Copy + BitAnd<Output = W> + BitXor<Output = W>,
{
    let z = b & c;
    let x = a ^ z;
    let q = x & c;
    let s = q ^ d;
    let m = s & b;
    let t = m ^ c;
    let n = x & s;
    let p = n ^ b;
    (p, x, s, t)
}

/// Evaluates the circuit on one nibble. Only the low 4 bits of `x` are used.
pub fn eval_circuit(x: u8) -> u8 {
    let (a, b, c, d) = ((x >> 3) & 1, (x >> 2) & 1, (x >> 1) & 1, x & 1);
    let (a2, b2, c2, d2) = circuit(a, b, c, d);
    (a2 << 3) | (b2 << 2) | (c2 << 1) | d2
}

/// Applies the S-box to every lane position at once. Lane `i` carries row
/// `i` of many columns; 8 word operations per call.
#[inline(always)]
pub fn apply_bitsliced<W>(r0: W, r1: W, r2: W, r3: W) -> (W, W, W, W)
where
    W: Copy + BitAnd<Output = W> + BitXor<Output = W>,
{
    circuit(r0, r1, r2, r3)
}

/// The substitution table derived from the circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SBoxTable {
    entries: [u8; 16],
}

impl SBoxTable {
    /// Evaluates the circuit on all 16 inputs and checks the result is an
    /// involution.
    pub fn build_table() -> Result<Self> {
        let mut entries = [0u8; 16];
        for (i, e) in entries.iter_mut().enumerate() {
            *e = eval_circuit(i as u8);
        }
        if !is_involution(&entries) {
            return Err(Error::InvalidComponent(
                "S-box circuit does not yield an involution".into(),
            ));
        }
        Ok(SBoxTable { entries })
    }

    pub fn entries(&self) -> &[u8; 16] {
        &self.entries
    }

    #[inline]
    pub fn apply(&self, x: u8) -> u8 {
        self.entries[(x & 0xF) as usize]
    }

    /// Substitutes every one of the 64 columns.
    pub fn apply_columns(&self, state: &State256) -> State256 {
        let mut out = *state;
        for b in 0..BLOCKS {
            for c in 0..COLS {
                out.put_column(b, c, self.apply(state.column(b, c)));
            }
        }
        out
    }

    pub fn ddt(&self) -> [[u32; 16]; 16] {
        compute_ddt(&self.entries)
    }

    pub fn lat(&self) -> [[i32; 16]; 16] {
        compute_lat(&self.entries)
    }

    pub fn algebraic_degree(&self) -> u32 {
        algebraic_degree(&self.entries)
    }

    pub fn is_involution(&self) -> bool {
        is_involution(&self.entries)
    }
}

pub fn is_involution(table: &[u8; 16]) -> bool {
    (0..16).all(|i| table[(table[i] & 0xF) as usize] as usize == i)
}

pub fn is_bijective(table: &[u8; 16]) -> bool {
    let mut seen = 0u16;
    for &v in table {
        seen |= 1 << (v & 0xF);
    }
    seen == 0xFFFF
}

/// `ddt[din][dout] = #{x : S(x) ^ S(x ^ din) == dout}`.
pub fn compute_ddt(table: &[u8; 16]) -> [[u32; 16]; 16] {
    let mut ddt = [[0u32; 16]; 16];
    for (din, row) in ddt.iter_mut().enumerate() {
        for x in 0..16 {
            row[(table[x] ^ table[x ^ din]) as usize] += 1;
        }
    }
    ddt
}

/// `lat[alpha][beta] = #{x : alpha.x == beta.S(x)} - 8`.
pub fn compute_lat(table: &[u8; 16]) -> [[i32; 16]; 16] {
    let mut lat = [[-8i32; 16]; 16];
    for (alpha, row) in lat.iter_mut().enumerate() {
        for (beta, cell) in row.iter_mut().enumerate() {
            for (x, &y) in table.iter().enumerate() {
                let parity = ((alpha & x).count_ones() ^ (beta & y as usize).count_ones()) & 1;
                if parity == 0 {
                    *cell += 1;
                }
            }
        }
    }
    lat
}

/// Largest DDT entry over nonzero input differences.
pub fn max_differential(ddt: &[[u32; 16]; 16]) -> u32 {
    ddt[1..].iter().flatten().copied().max().unwrap_or(0)
}

/// Largest |LAT| entry over nonzero mask pairs.
pub fn max_linear(lat: &[[i32; 16]; 16]) -> u32 {
    lat.iter()
        .enumerate()
        .flat_map(|(a, row)| row.iter().enumerate().map(move |(b, &v)| (a, b, v)))
        .filter(|&(a, b, _)| a != 0 || b != 0)
        .map(|(_, _, v)| v.unsigned_abs())
        .max()
        .unwrap_or(0)
}

/// ANF coefficients of output bit `bit` (bit 3 = a'), indexed by monomial
/// mask over the input bits, via the binary Moebius transform.
pub fn anf(table: &[u8; 16], bit: u32) -> [u8; 16] {
    let mut f = [0u8; 16];
    for (x, v) in f.iter_mut().enumerate() {
        *v = (table[x] >> bit) & 1;
    }
    for i in 0..4 {
        for x in 0..16 {
            if x & (1 << i) != 0 {
                f[x] ^= f[x ^ (1 << i)];
            }
        }
    }
    f
}

/// Evaluates an ANF at `x`: XOR of coefficients whose monomial is covered by `x`.
pub fn eval_anf(coeffs: &[u8; 16], x: usize) -> u8 {
    (0..16)
        .filter(|&m| m & x == m)
        .fold(0, |acc, m| acc ^ coeffs[m])
}

pub fn algebraic_degree(table: &[u8; 16]) -> u32 {
    (0..4)
        .flat_map(|bit| {
            let coeffs = anf(table, bit);
            (0..16usize).filter(move |&m| coeffs[m] == 1)
        })
        .map(|m| m.count_ones())
        .max()
        .unwrap_or(0)
}
