//! Block encryption and decryption.
//!
//! One round is `X <- L(PermuteSets(S(X)))` followed by `X <- X ^ K ^ C(r)`,
//! after an initial whitening `X <- P ^ K`. The same 256-bit key is used
//! every round. S and L are involutions, so decryption reuses them and
//! only the Set permutation is inverted.

use crate::error::{Error, Result};
use crate::lbox::{LBoxLookup, LBoxMatrix};
use crate::permute::{PermutationTable, SetIndex, SETS};
use crate::sbox::{self, SBoxTable};
use crate::state::{State256, STATE_BYTES};

pub const DEFAULT_ROUNDS: usize = 28;
pub const MAX_ROUNDS: usize = 255;
pub const KEY_BYTES: usize = 32;

/// 256-bit key, laid out like a state.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Key256([u8; KEY_BYTES]);

impl Key256 {
    pub fn new(bytes: [u8; KEY_BYTES]) -> Self {
        Key256(bytes)
    }

    pub fn from_slice(bytes: &[u8]) -> Result<Self> {
        let arr: [u8; KEY_BYTES] = bytes.try_into().map_err(|_| Error::Size {
            expected: KEY_BYTES,
            actual: bytes.len(),
        })?;
        Ok(Key256(arr))
    }

    pub fn as_bytes(&self) -> &[u8; KEY_BYTES] {
        &self.0
    }

    pub fn state(&self) -> State256 {
        State256::from_array(&self.0)
    }
}

impl std::fmt::Debug for Key256 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Key256(..)")
    }
}

/// AES `xtime`: multiplication by `x` modulo `x^8 + x^4 + x^3 + x + 1`.
pub fn xtime(v: u8) -> u8 {
    (v << 1) ^ if v & 0x80 != 0 { 0x1B } else { 0 }
}

/// AES round-constant bytes `rc(1) .. rc(n)`.
pub fn rcon(n: usize) -> Vec<u8> {
    std::iter::successors(Some(1u8), |&v| Some(xtime(v)))
        .take(n)
        .collect()
}

/// Round constants `C(0) .. C(rounds - 1)`. In `C(r)` the first byte of
/// block `b` is `rc(r + 1) ^ b`; every other byte is zero.
pub fn round_constants(rounds: usize) -> Result<Vec<State256>> {
    if !(1..=MAX_ROUNDS).contains(&rounds) {
        return Err(Error::Rounds(rounds));
    }
    Ok(rcon(rounds)
        .into_iter()
        .map(|rc| {
            let mut bytes = [0u8; STATE_BYTES];
            for b in 0..4 {
                bytes[8 * b] = rc ^ b as u8;
            }
            State256::from_array(&bytes)
        })
        .collect())
}

/// One grouped move of the bitsliced Set permutation: bits selected by
/// `mask` in lane `src` are shifted by `shift` (positive = left) into lane
/// `dst`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct LaneMove {
    src: usize,
    dst: usize,
    mask: u64,
    shift: i32,
}

fn lane_bit(block: usize, pair: usize) -> i32 {
    (48 - 16 * block as i32) + 14 - 2 * pair as i32
}

fn compile_schedule(table: &PermutationTable) -> Vec<LaneMove> {
    let mut moves: Vec<LaneMove> = Vec::new();
    for src_flat in 0..SETS {
        let src = SetIndex::from_flat(src_flat);
        let dst = table.map(src);
        let from = lane_bit(src.block, src.pair);
        let to = lane_bit(dst.block, dst.pair);
        for k in 0..2 {
            let (sl, dl) = (2 * src.half + k, 2 * dst.half + k);
            let shift = to - from;
            let mask = 3u64 << from;
            match moves
                .iter_mut()
                .find(|m| m.src == sl && m.dst == dl && m.shift == shift)
            {
                Some(m) => m.mask |= mask,
                None => moves.push(LaneMove {
                    src: sl,
                    dst: dl,
                    mask,
                    shift,
                }),
            }
        }
    }
    moves
}

type Lanes = [u64; 4];

fn to_lanes(s: &State256) -> Lanes {
    let rows = s.rows();
    std::array::from_fn(|r| (0..4).fold(0u64, |acc, b| (acc << 16) | rows[b * 4 + r] as u64))
}

fn from_lanes(l: &Lanes) -> State256 {
    let mut s = State256::zero();
    let rows = s.rows_mut();
    for (r, lane) in l.iter().enumerate() {
        for b in 0..4 {
            rows[b * 4 + r] = (lane >> (48 - 16 * b)) as u16;
        }
    }
    s
}

/// Everything one encryption needs, validated and precomputed.
#[derive(Clone, Debug)]
pub struct CipherParams {
    rounds: usize,
    sbox: SBoxTable,
    lbox_matrix: LBoxMatrix,
    lbox: LBoxLookup,
    permute: PermutationTable,
    permute_inv: PermutationTable,
    constants: Vec<State256>,
    schedule: Vec<LaneMove>,
}

impl CipherParams {
    /// Builds parameters from the given components.
    ///
    /// Only what decryption depends on is enforced here: the L-box must be
    /// an invertible involution and the permutation a bijection. Use
    /// [`CipherParams::validated`] to also require branch number 8 and the
    /// Set-spreading properties.
    pub fn new(rounds: usize, lbox: LBoxMatrix, permute: PermutationTable) -> Result<Self> {
        let constants = match rounds {
            0 => Vec::new(),
            n => round_constants(n)?,
        };
        if !lbox.is_involutive() {
            return Err(Error::InvalidComponent(
                "L-box matrix is not involutive".into(),
            ));
        }
        let permute_inv = permute.invert()?;
        Ok(CipherParams {
            rounds,
            sbox: SBoxTable::build_table()?,
            lbox: LBoxLookup::new(&lbox),
            lbox_matrix: lbox,
            schedule: compile_schedule(&permute),
            permute,
            permute_inv,
            constants,
        })
    }

    /// Like [`CipherParams::new`] but every component must pass its full
    /// validator.
    pub fn validated(rounds: usize, lbox: LBoxMatrix, permute: PermutationTable) -> Result<Self> {
        let lr = lbox.validate();
        if !lr.passes() {
            return Err(Error::InvalidComponent(format!(
                "L-box fails validation: {lr:?}"
            )));
        }
        let pr = permute.validate();
        if !pr.passes() {
            return Err(Error::InvalidComponent(format!(
                "permutation fails validation: {pr:?}"
            )));
        }
        Self::new(rounds, lbox, permute)
    }

    pub fn with_rounds(rounds: usize) -> Result<Self> {
        Self::new(
            rounds,
            LBoxMatrix::default_matrix(),
            PermutationTable::default_table(),
        )
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn sbox(&self) -> &SBoxTable {
        &self.sbox
    }

    pub fn lbox_matrix(&self) -> &LBoxMatrix {
        &self.lbox_matrix
    }

    pub fn lbox(&self) -> &LBoxLookup {
        &self.lbox
    }

    pub fn permute(&self) -> &PermutationTable {
        &self.permute
    }

    pub fn constants(&self) -> &[State256] {
        &self.constants
    }

    /// `L(PermuteSets(S(x)))`, without key addition.
    pub fn round_function(&self, x: &State256) -> State256 {
        let x = self.sbox.apply_columns(x);
        let x = self.permute.apply(&x);
        self.lbox.apply_state(&x)
    }

    pub fn encrypt_state(&self, key: &State256, pt: &State256) -> State256 {
        let mut x = *pt ^ *key;
        for c in &self.constants {
            x = self.round_function(&x);
            x ^= *key ^ *c;
        }
        x
    }

    pub fn decrypt_state(&self, key: &State256, ct: &State256) -> State256 {
        let mut x = *ct;
        for c in self.constants.iter().rev() {
            x ^= *key ^ *c;
            x = self.lbox.apply_state(&x);
            x = self.permute_inv.apply(&x);
            x = self.sbox.apply_columns(&x);
        }
        x ^ *key
    }

    pub fn encrypt_block(&self, key: &Key256, plaintext: &[u8]) -> Result<[u8; STATE_BYTES]> {
        let pt = State256::from_bytes(plaintext)?;
        Ok(self.encrypt_state(&key.state(), &pt).to_bytes())
    }

    pub fn decrypt_block(&self, key: &Key256, ciphertext: &[u8]) -> Result<[u8; STATE_BYTES]> {
        let ct = State256::from_bytes(ciphertext)?;
        Ok(self.decrypt_state(&key.state(), &ct).to_bytes())
    }

    /// Bitsliced encryption on four 64-bit row lanes (lane `r` holds row
    /// `r` of blocks 0..4, block 0 in the high 16 bits). Bit-identical to
    /// [`CipherParams::encrypt_block`].
    pub fn encrypt_block_bitsliced(
        &self,
        key: &Key256,
        plaintext: &[u8],
    ) -> Result<[u8; STATE_BYTES]> {
        let pt = State256::from_bytes(plaintext)?;
        let k = to_lanes(&key.state());
        let mut x = to_lanes(&pt);
        for (xi, ki) in x.iter_mut().zip(k) {
            *xi ^= ki;
        }
        for c in &self.constants {
            let c = to_lanes(c);
            let (a, b, cc, d) = sbox::apply_bitsliced(x[0], x[1], x[2], x[3]);
            let s = [a, b, cc, d];
            let mut p = [0u64; 4];
            for m in &self.schedule {
                let bits = s[m.src] & m.mask;
                p[m.dst] |= if m.shift >= 0 {
                    bits << m.shift
                } else {
                    bits >> -m.shift
                };
            }
            for (r, lane) in p.iter().enumerate() {
                let l = &self.lbox;
                let mixed = (l.apply((lane >> 48) as u16) as u64) << 48
                    | (l.apply((lane >> 32) as u16) as u64) << 32
                    | (l.apply((lane >> 16) as u16) as u64) << 16
                    | l.apply(*lane as u16) as u64;
                x[r] = mixed ^ k[r] ^ c[r];
            }
        }
        Ok(from_lanes(&x).to_bytes())
    }

    /// Hamming distance between the encryptions of `plaintext` and of
    /// `plaintext` with serialized bit `bit` flipped.
    pub fn avalanche_probe(&self, key: &Key256, plaintext: &[u8], bit: usize) -> Result<u32> {
        let pt = State256::from_bytes(plaintext)?;
        let mut flipped = pt;
        flipped.flip_bit(bit)?;
        let k = key.state();
        Ok((self.encrypt_state(&k, &pt) ^ self.encrypt_state(&k, &flipped)).popcount())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rcon_sequence() {
        assert_eq!(
            rcon(10),
            vec![0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1B, 0x36]
        );
    }

    #[test]
    fn first_constant_layout() {
        let c = round_constants(1).unwrap();
        let b = c[0].to_bytes();
        assert_eq!((b[0], b[8], b[16], b[24]), (0x01, 0x00, 0x03, 0x02));
        assert_eq!(c[0].popcount(), 4);
    }

    #[test]
    fn constants_distinct_over_default_rounds() {
        let c = round_constants(DEFAULT_ROUNDS).unwrap();
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                assert_ne!(c[i], c[j]);
            }
            // blocks differ from each other
            let bytes = c[i].to_bytes();
            let firsts = [bytes[0], bytes[8], bytes[16], bytes[24]];
            for x in 0..4 {
                for y in x + 1..4 {
                    assert_ne!(firsts[x], firsts[y]);
                }
            }
        }
    }

    #[test]
    fn constant_round_range() {
        assert_eq!(round_constants(0), Err(Error::Rounds(0)));
        assert_eq!(round_constants(256), Err(Error::Rounds(256)));
        assert_eq!(round_constants(255).unwrap().len(), 255);
        assert!(CipherParams::with_rounds(256).is_err());
    }

    #[test]
    fn zero_rounds_is_whitening() {
        let p = CipherParams::with_rounds(0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let k: [u8; 32] = rng.gen();
        let pt: [u8; 32] = rng.gen();
        let ct = p.encrypt_block(&Key256::new(k), &pt).unwrap();
        let want: Vec<u8> = k.iter().zip(pt).map(|(a, b)| a ^ b).collect();
        assert_eq!(ct.to_vec(), want);
        assert_eq!(p.decrypt_block(&Key256::new(k), &ct).unwrap(), pt);
        for bit in [0, 100, 255] {
            assert_eq!(p.avalanche_probe(&Key256::new(k), &pt, bit).unwrap(), 1);
        }
    }

    #[test]
    fn size_errors() {
        let p = CipherParams::with_rounds(4).unwrap();
        let k = Key256::new([0; 32]);
        assert!(p.encrypt_block(&k, &[0u8; 31]).is_err());
        assert!(p.decrypt_block(&k, &[0u8; 33]).is_err());
        assert!(p.encrypt_block_bitsliced(&k, &[]).is_err());
        assert!(Key256::from_slice(&[0u8; 16]).is_err());
        assert!(p.avalanche_probe(&k, &[0u8; 32], 256).is_err());
    }

    #[test]
    fn round_trip_small_rounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for rounds in [1, 2, 3, 5] {
            let p = CipherParams::with_rounds(rounds).unwrap();
            for _ in 0..50 {
                let k = Key256::new(rng.gen());
                let pt: [u8; 32] = rng.gen();
                let ct = p.encrypt_block(&k, &pt).unwrap();
                assert_eq!(p.decrypt_block(&k, &ct).unwrap(), pt);
                assert_eq!(p.encrypt_block_bitsliced(&k, &pt).unwrap(), ct);
            }
        }
    }

    #[test]
    fn lane_conversion_round_trip() {
        let s = State256::from_array(&std::array::from_fn(|i| (i * 29 + 7) as u8));
        assert_eq!(from_lanes(&to_lanes(&s)), s);
    }

    #[test]
    fn schedule_matches_permutation() {
        let t = PermutationTable::default_table();
        let sched = compile_schedule(&t);
        let s = State256::from_array(&std::array::from_fn(|i| (i * 53 + 1) as u8));
        let l = to_lanes(&s);
        let mut out = [0u64; 4];
        for m in &sched {
            let bits = l[m.src] & m.mask;
            out[m.dst] |= if m.shift >= 0 {
                bits << m.shift
            } else {
                bits >> -m.shift
            };
        }
        assert_eq!(from_lanes(&out), t.apply(&s));
        // grouped masks never overlap within a source lane
        let total: u32 = sched.iter().map(|m| m.mask.count_ones()).sum();
        assert_eq!(total, 256);
    }

    #[test]
    fn rejects_non_involutive_lbox() {
        let mut rows = *LBoxMatrix::identity().rows();
        rows[0] |= 1;
        rows[15] |= 0x8000;
        let m = LBoxMatrix::from_rows(rows);
        assert!(CipherParams::new(4, m, PermutationTable::default_table()).is_err());
        assert!(CipherParams::validated(
            4,
            LBoxMatrix::identity(),
            PermutationTable::default_table()
        )
        .is_err());
        assert!(CipherParams::validated(
            4,
            LBoxMatrix::default_matrix(),
            PermutationTable::identity()
        )
        .is_err());
    }
}
