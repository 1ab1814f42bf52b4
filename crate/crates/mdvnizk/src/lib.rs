//! A desk-scale compiler from sigma protocols to reusable
//! malicious-designated-verifier NIZKs, plus the attack that motivates its
//! key-derivation step.
//!
//! Everything runs at toy parameters on a laptop: lattice encryption over a
//! 16-bit modulus, a rotate-AND-XOR PRF, MPC-in-the-head proofs, and a
//! density-matrix simulator small enough to diagonalize by hand. No component
//! is secure at shipped sizes; the point is that every algorithm, reduction
//! and counterexample in the construction is executable and testable.

pub mod adversaries;
pub mod bits;
pub mod circuits;
pub mod error;
pub mod fhe;
pub mod nizk;
pub mod primitives;
pub mod protocol;
pub mod qsim;
pub mod rng;
pub mod stats;
pub mod sigma;
pub mod wire;

pub use bits::Bits;
pub use error::{Error, Result};
