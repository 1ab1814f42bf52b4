//! Sigma-protocol interface and the Blum Graph-Hamiltonicity instantiation.
//!
//! The compiler in the protocol layer needs exactly one structural property
//! from a sigma protocol: the third message γ must be a pure classical
//! function of the challenge β and the prover's randomness tape r — never of
//! the witness directly. Backends realize this by folding every
//! witness-derived value γ could need into the tape when it is sampled
//! ([`SigmaBackend::sample_randomness`]), so `p3` and its circuit
//! compilation are plain selections over tape bits.
//!
//! Instances, witnesses and first messages cross the trait boundary as
//! backend-owned canonical byte encodings; γ is a fixed-length bit string.

pub mod ham;

use rand::RngCore;

use crate::bits::Bits;
use crate::circuits::{Builder, Wire};
use crate::error::Result;

pub trait SigmaBackend {
    fn name(&self) -> &'static str;

    /// ℓ_r: randomness-tape length in bits.
    fn randomness_len(&self) -> usize;

    /// ℓ_β: challenge length in bits.
    fn challenge_len(&self) -> usize;

    /// ℓ_γ: response length in bits.
    fn gamma_len(&self) -> usize;

    /// Sample the structured randomness tape for one proof. Witness-derived
    /// response material lives in the tape so that `p3` is pure in (β, r).
    fn sample_randomness(&self, inst: &[u8], wit: &[u8], rng: &mut dyn RngCore) -> Result<Bits>;

    /// First prover message α; deterministic in (inst, wit, r).
    fn p1(&self, inst: &[u8], wit: &[u8], r: &Bits) -> Result<Vec<u8>>;

    /// Third prover message; a pure function of (β, r) by construction.
    fn p3(&self, beta: &Bits, r: &Bits) -> Bits;

    /// Emit the `p3` computation into a circuit: given β wires and tape
    /// wires, return ℓ_γ output wires agreeing with [`SigmaBackend::p3`]
    /// bit for bit.
    fn compile_p3(&self, b: &mut Builder, beta: &[Wire], r: &[Wire]) -> Vec<Wire>;

    /// Verifier predicate ΣV; malformed transcripts are `false`, not errors.
    fn verify(&self, inst: &[u8], alpha: &[u8], beta: &Bits, gamma: &Bits) -> bool;

    /// Special zero-knowledge simulator ΣS: accepting (α, γ) for a known β.
    fn simulate(&self, inst: &[u8], beta: &Bits, rng: &mut dyn RngCore)
        -> Result<(Vec<u8>, Bits)>;
}

/// ΣV's challenge message: uniform ℓ_β bits.
pub fn sigma_challenge(backend: &dyn SigmaBackend, rng: &mut dyn RngCore) -> Bits {
    Bits::random(backend.challenge_len(), rng)
}

#[cfg(test)]
mod tests {
    use super::ham::HamBackend;
    use super::*;
    use crate::rng;

    #[test]
    fn challenge_length_and_balance() {
        let backend = HamBackend::new(3, 16, 32);
        let mut r = rng::stream(&rng::root_from_u64(1), "sigma.chal");
        let a = sigma_challenge(&backend, &mut r);
        let b = sigma_challenge(&backend, &mut r);
        assert_eq!(a.len(), backend.challenge_len());
        assert_ne!(a, b);

        let mut ones = 0usize;
        let mut total = 0usize;
        for _ in 0..10_000 {
            let c = sigma_challenge(&backend, &mut r);
            ones += c.iter().filter(|&b| b == 1).count();
            total += c.len();
        }
        let freq = ones as f64 / total as f64;
        assert!((freq - 0.5).abs() < 0.02, "challenge bit frequency {freq}");
    }
}
