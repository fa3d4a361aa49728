//! The 256-bit cipher state.
//!
//! The state is 4 blocks of 4 rows by 16 columns. Each row is held as a
//! `u16` with column 0 in the most significant bit. The byte layout is
//! block-major then row-major: block `b`, row `r` lives in bytes
//! `8b + 2r` (columns 0..8) and `8b + 2r + 1` (columns 8..16).
//!
//! A column is read as a nibble with row 0 in bit 3 and row 3 in bit 0.

use crate::error::{Error, Result};
use std::fmt;
use std::ops::{BitXor, BitXorAssign};

pub const BLOCKS: usize = 4;
pub const ROWS: usize = 4;
pub const COLS: usize = 16;
pub const STATE_BYTES: usize = 32;

/// 256-bit state value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct State256 {
    rows: [u16; BLOCKS * ROWS],
}

fn check(what: &'static str, index: usize, limit: usize) -> Result<()> {
    if index < limit {
        Ok(())
    } else {
        Err(Error::Index { what, index, limit })
    }
}

impl State256 {
    pub const fn zero() -> Self {
        State256 {
            rows: [0; BLOCKS * ROWS],
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let arr: &[u8; STATE_BYTES] = bytes.try_into().map_err(|_| Error::Size {
            expected: STATE_BYTES,
            actual: bytes.len(),
        })?;
        Ok(Self::from_array(arr))
    }

    pub fn from_array(bytes: &[u8; STATE_BYTES]) -> Self {
        let mut rows = [0u16; BLOCKS * ROWS];
        for (i, row) in rows.iter_mut().enumerate() {
            *row = u16::from_be_bytes([bytes[2 * i], bytes[2 * i + 1]]);
        }
        State256 { rows }
    }

    pub fn to_bytes(&self) -> [u8; STATE_BYTES] {
        let mut out = [0u8; STATE_BYTES];
        for (i, row) in self.rows.iter().enumerate() {
            out[2 * i..2 * i + 2].copy_from_slice(&row.to_be_bytes());
        }
        out
    }

    pub fn get_column(&self, block: usize, col: usize) -> Result<u8> {
        check("block", block, BLOCKS)?;
        check("column", col, COLS)?;
        Ok(self.column(block, col))
    }

    pub fn set_column(&mut self, block: usize, col: usize, value: u8) -> Result<()> {
        check("block", block, BLOCKS)?;
        check("column", col, COLS)?;
        check("nibble value", value as usize, 16)?;
        self.put_column(block, col, value);
        Ok(())
    }

    pub fn get_row(&self, block: usize, row: usize) -> Result<u16> {
        check("block", block, BLOCKS)?;
        check("row", row, ROWS)?;
        Ok(self.row(block, row))
    }

    pub fn set_row(&mut self, block: usize, row: usize, value: u16) -> Result<()> {
        check("block", block, BLOCKS)?;
        check("row", row, ROWS)?;
        self.rows[block * ROWS + row] = value;
        Ok(())
    }

    pub fn get_bit(&self, block: usize, row: usize, col: usize) -> Result<bool> {
        check("block", block, BLOCKS)?;
        check("row", row, ROWS)?;
        check("column", col, COLS)?;
        Ok(self.bit(block, row, col))
    }

    pub fn set_bit(&mut self, block: usize, row: usize, col: usize, value: bool) -> Result<()> {
        check("block", block, BLOCKS)?;
        check("row", row, ROWS)?;
        check("column", col, COLS)?;
        let mask = 0x8000u16 >> col;
        let r = &mut self.rows[block * ROWS + row];
        if value {
            *r |= mask;
        } else {
            *r &= !mask;
        }
        Ok(())
    }

    /// Flips bit `index` of the serialized form (bit 0 = MSB of byte 0).
    pub fn flip_bit(&mut self, index: usize) -> Result<()> {
        check("bit", index, 256)?;
        self.rows[index / 16] ^= 0x8000 >> (index % 16);
        Ok(())
    }

    pub fn xor(&self, other: &State256) -> State256 {
        let mut out = *self;
        out ^= *other;
        out
    }

    pub fn popcount(&self) -> u32 {
        self.rows.iter().map(|r| r.count_ones()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    /// Whether any bit of `block` is set.
    pub fn block_active(&self, block: usize) -> bool {
        self.rows[block * ROWS..(block + 1) * ROWS]
            .iter()
            .any(|&r| r != 0)
    }

    // Unchecked accessors for internal hot paths; indices are trusted.

    #[inline]
    pub(crate) fn row(&self, block: usize, row: usize) -> u16 {
        self.rows[block * ROWS + row]
    }

    #[inline]
    pub(crate) fn rows_mut(&mut self) -> &mut [u16; BLOCKS * ROWS] {
        &mut self.rows
    }

    #[inline]
    pub(crate) fn rows(&self) -> &[u16; BLOCKS * ROWS] {
        &self.rows
    }

    #[inline]
    pub(crate) fn bit(&self, block: usize, row: usize, col: usize) -> bool {
        (self.rows[block * ROWS + row] >> (15 - col)) & 1 == 1
    }

    #[inline]
    pub(crate) fn column(&self, block: usize, col: usize) -> u8 {
        let shift = 15 - col;
        let mut v = 0u8;
        for r in 0..ROWS {
            v = (v << 1) | ((self.rows[block * ROWS + r] >> shift) & 1) as u8;
        }
        v
    }

    #[inline]
    pub(crate) fn put_column(&mut self, block: usize, col: usize, value: u8) {
        let shift = 15 - col;
        for r in 0..ROWS {
            let bit = ((value >> (3 - r)) & 1) as u16;
            let row = &mut self.rows[block * ROWS + r];
            *row = (*row & !(1 << shift)) | (bit << shift);
        }
    }
}

impl BitXor for State256 {
    type Output = State256;
    fn bitxor(self, rhs: State256) -> State256 {
        self.xor(&rhs)
    }
}

impl BitXorAssign for State256 {
    fn bitxor_assign(&mut self, rhs: State256) {
        for (a, b) in self.rows.iter_mut().zip(rhs.rows.iter()) {
            *a ^= b;
        }
    }
}

impl fmt::Debug for State256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "State256({})", hex::encode(self.to_bytes()))
    }
}

impl fmt::Display for State256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.to_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_bytes_give_zero_state() {
        let s = State256::from_bytes(&[0u8; 32]).unwrap();
        assert!(s.is_zero());
        assert_eq!(State256::zero().to_bytes(), [0u8; 32]);
    }

    #[test]
    fn first_bit_is_block0_row0_col0() {
        let mut b = [0u8; 32];
        b[0] = 0x80;
        let s = State256::from_bytes(&b).unwrap();
        assert_eq!(s.popcount(), 1);
        assert!(s.get_bit(0, 0, 0).unwrap());
    }

    #[test]
    fn byte8_lsb_is_block1_row0_col7() {
        let mut b = [0u8; 32];
        b[8] = 0x01;
        let s = State256::from_bytes(&b).unwrap();
        assert_eq!(s.popcount(), 1);
        assert!(s.get_bit(1, 0, 7).unwrap());
    }

    #[test]
    fn last_bit_serializes_to_byte31() {
        let mut s = State256::zero();
        s.set_bit(3, 3, 15, true).unwrap();
        let mut want = [0u8; 32];
        want[31] = 0x01;
        assert_eq!(s.to_bytes(), want);
    }

    #[test]
    fn wrong_length_rejected() {
        assert_eq!(
            State256::from_bytes(&[0u8; 31]),
            Err(Error::Size {
                expected: 32,
                actual: 31
            })
        );
        assert!(State256::from_bytes(&[0u8; 33]).is_err());
    }

    #[test]
    fn column_msb_is_row0() {
        let mut s = State256::zero();
        assert_eq!(s.get_column(2, 3).unwrap(), 0);
        s.set_bit(0, 0, 5, true).unwrap();
        assert_eq!(s.get_column(0, 5).unwrap(), 0x8);
        s.set_column(2, 9, 0xA).unwrap();
        assert_eq!(s.get_column(2, 9).unwrap(), 0xA);
    }

    #[test]
    fn rows_and_columns_share_bits() {
        let mut s = State256::zero();
        s.set_column(1, 0, 0x8).unwrap();
        assert_eq!(s.get_row(1, 0).unwrap(), 0x8000);

        let mut s = State256::zero();
        s.set_row(1, 2, 0xFFFF).unwrap();
        for c in 0..16 {
            assert_eq!(s.get_column(1, c).unwrap(), 0b0010);
        }
    }

    #[test]
    fn out_of_range_indices() {
        let mut s = State256::zero();
        assert!(s.get_column(4, 0).is_err());
        assert!(s.get_column(0, 16).is_err());
        assert!(s.set_column(0, 0, 16).is_err());
        assert!(s.get_row(0, 4).is_err());
        assert!(s.set_row(5, 0, 1).is_err());
        assert!(s.flip_bit(256).is_err());
    }

    fn arb_state() -> impl Strategy<Value = State256> {
        any::<[u8; 32]>().prop_map(|b| State256::from_array(&b))
    }

    proptest! {
        #[test]
        fn bytes_round_trip(b in any::<[u8; 32]>()) {
            prop_assert_eq!(State256::from_bytes(&b).unwrap().to_bytes(), b);
        }

        #[test]
        fn column_and_row_views_agree(s in arb_state()) {
            for b in 0..BLOCKS {
                for r in 0..ROWS {
                    for c in 0..COLS {
                        let via_col = (s.get_column(b, c).unwrap() >> (3 - r)) & 1;
                        let via_row = (s.get_row(b, r).unwrap() >> (15 - c)) & 1;
                        prop_assert_eq!(via_col as u16, via_row);
                    }
                }
            }
        }

        #[test]
        fn xor_laws(a in arb_state(), b in arb_state(), c in arb_state()) {
            prop_assert_eq!(a ^ b, b ^ a);
            prop_assert_eq!((a ^ b) ^ c, a ^ (b ^ c));
            prop_assert!((a ^ a).is_zero());
            prop_assert_eq!(a ^ State256::zero(), a);
        }

        #[test]
        fn xor_matches_bytewise(x in any::<[u8; 32]>(), y in any::<[u8; 32]>()) {
            let mut z = [0u8; 32];
            for i in 0..32 { z[i] = x[i] ^ y[i]; }
            prop_assert_eq!(State256::from_array(&x) ^ State256::from_array(&y), State256::from_array(&z));
        }

        #[test]
        fn flip_bit_matches_byte_layout(i in 0usize..256) {
            let mut s = State256::zero();
            s.flip_bit(i).unwrap();
            let mut want = [0u8; 32];
            want[i / 8] = 0x80 >> (i % 8);
            prop_assert_eq!(s.to_bytes(), want);
        }
    }
}
