//! Counter mode around the 256-bit block cipher.
//!
//! Counter block `i` is `nonce (16 bytes) || i as a 128-bit big-endian
//! integer`, starting at 0. Encryption and decryption are the same XOR.

use marvin::{CipherParams, Key256};

pub const NONCE_BYTES: usize = 16;
pub const BLOCK_BYTES: usize = 32;

pub fn counter_block(nonce: &[u8; NONCE_BYTES], counter: u128) -> [u8; BLOCK_BYTES] {
    let mut block = [0u8; BLOCK_BYTES];
    block[..NONCE_BYTES].copy_from_slice(nonce);
    block[NONCE_BYTES..].copy_from_slice(&counter.to_be_bytes());
    block
}

/// XORs `data` in place with the keystream for `nonce`.
pub fn apply_keystream(
    params: &CipherParams,
    key: &Key256,
    nonce: &[u8; NONCE_BYTES],
    data: &mut [u8],
) {
    for (i, chunk) in data.chunks_mut(BLOCK_BYTES).enumerate() {
        let ks = params
            .encrypt_block_bitsliced(key, &counter_block(nonce, i as u128))
            .expect("counter block is one block long");
        for (d, k) in chunk.iter_mut().zip(ks) {
            *d ^= k;
        }
    }
}
