use marvin::{CipherParams, Key256, State256};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::collections::HashSet;
use std::sync::Arc;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decrypt_inverts_encrypt(rounds in 0usize..=28, k in any::<[u8; 32]>(), pt in any::<[u8; 32]>()) {
        let p = CipherParams::with_rounds(rounds).unwrap();
        let key = Key256::new(k);
        let ct = p.encrypt_block(&key, &pt).unwrap();
        prop_assert_eq!(p.decrypt_block(&key, &ct).unwrap(), pt);
        prop_assert_eq!(p.encrypt_block_bitsliced(&key, &pt).unwrap(), ct);
    }
}

#[test]
fn no_collisions_for_fixed_key() {
    let p = CipherParams::with_rounds(28).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(77);
    let key = Key256::new(rng.gen());
    let mut inputs = HashSet::new();
    let mut outputs = HashSet::new();
    while inputs.len() < 100_000 {
        let pt: [u8; 32] = rng.gen();
        if inputs.insert(pt) {
            assert!(outputs.insert(p.encrypt_block_bitsliced(&key, &pt).unwrap()));
        }
    }
}

#[test]
fn round_structure_matches_layer_composition() {
    let p = CipherParams::with_rounds(3).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let key = State256::from_array(&rng.gen());
    let pt = State256::from_array(&rng.gen());
    let mut x = pt ^ key;
    for c in p.constants() {
        let s = p.sbox().apply_columns(&x);
        let q = p.permute().apply(&s);
        x = p.lbox().apply_state(&q) ^ key ^ *c;
    }
    assert_eq!(p.encrypt_state(&key, &pt), x);
}

#[test]
fn shared_params_across_threads() {
    let p = Arc::new(CipherParams::with_rounds(28).unwrap());
    let key = Key256::new([0x42; 32]);
    let expected: Vec<_> = (0..8u8)
        .map(|i| p.encrypt_block(&key, &[i; 32]).unwrap())
        .collect();
    let handles: Vec<_> = (0..8u8)
        .map(|i| {
            let p = Arc::clone(&p);
            std::thread::spawn(move || p.encrypt_block_bitsliced(&key, &[i; 32]).unwrap())
        })
        .collect();
    let got: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    assert_eq!(got, expected);
}
