//! Seeded search for an involutive 16x16 binary matrix with branch number 8.
//!
//! Usage: cargo run --release -p marvin --example search_lbox [seed] [max_attempts]

use marvin::lbox::{search_involution, SEARCH_SEED};

fn main() {
    let mut args = std::env::args().skip(1);
    let seed = args
        .next()
        .map(|s| s.parse().expect("seed must be an integer"))
        .unwrap_or(SEARCH_SEED);
    let max: u64 = args
        .next()
        .map(|s| s.parse().expect("attempt limit must be an integer"))
        .unwrap_or(1_000_000);
    match search_involution(seed, max) {
        Some((m, attempts)) => {
            eprintln!("found after {attempts} candidates: {:?}", m.validate());
            println!("# seeded search, seed {seed}, candidate {attempts}");
            print!("{}", m.to_text());
        }
        None => {
            eprintln!("no branch-8 involution in {max} candidates");
            std::process::exit(1);
        }
    }
}
