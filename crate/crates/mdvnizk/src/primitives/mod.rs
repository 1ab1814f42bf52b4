//! Commodity primitives: keyed-hash commitments, a circuit-friendly toy PRF,
//! and a Regev-style public-key encryption scheme whose public keys are plain
//! residue strings (so a uniform string of the right length parses as a key).
//!
//! None of these are secure at the shipped parameters; they realize the
//! interfaces the protocol needs at desk scale.

pub mod commit;
pub mod pke;
pub mod prf;

pub use commit::{commit, verify_open, Commitment};
pub use pke::{PkeCiphertext, PkeKeypair, PkeParams, PkeSecretKey};
pub use prf::PrfKey;
