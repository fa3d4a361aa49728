//! Marvin-256: a 256-bit extended LS-design block cipher, with tooling to
//! audit the properties of its components.

pub mod analysis;
pub mod cipher;
pub mod error;
pub mod kat;
pub mod lbox;
pub mod permute;
pub mod sbox;
pub mod state;

pub use cipher::{CipherParams, Key256, DEFAULT_ROUNDS};
pub use error::{Error, Result};
pub use lbox::{LBoxLookup, LBoxMatrix, LBoxReport};
pub use permute::{PermutationTable, PermuteReport, SetIndex};
pub use sbox::SBoxTable;
pub use state::State256;
