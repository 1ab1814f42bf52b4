//! Transparent reference backend: the ciphertext *is* the plaintext.
//!
//! Payload layout: 16-byte nonce, then the plaintext bits packed LSB-first.
//! Decryption ignores the key material entirely (extract is decryption), and
//! evaluation decrypts, runs the circuit in the clear, and freshly encrypts
//! the output. Evaluations of any two circuits that agree on the input are
//! therefore identically distributed, which makes the circuit-privacy claim
//! hold with equality instead of statistical distance.
//!
//! Insecure by design; it exists so protocol-layer behavior can be tested
//! exactly.

use rand::RngCore;

use crate::bits::Bits;
use crate::circuits::Circuit;
use crate::error::{Error, Result};

pub const NONCE_LEN: usize = 16;

pub(super) fn gen_material(rng: &mut impl RngCore) -> Vec<u8> {
    // opaque key id: unused by decryption, present so independent keys are
    // distinguishable values
    let mut id = vec![0u8; 16];
    rng.fill_bytes(&mut id);
    id
}

pub fn fresh_nonce(rng: &mut impl RngCore) -> [u8; NONCE_LEN] {
    let mut nonce = [0u8; NONCE_LEN];
    rng.fill_bytes(&mut nonce);
    nonce
}

/// Deterministic encryption at a caller-chosen nonce, so relation checks can
/// re-derive ciphertexts from a randomness tape.
pub fn encrypt(x: &Bits, nonce: &[u8; NONCE_LEN]) -> Vec<u8> {
    let mut payload = nonce.to_vec();
    payload.extend_from_slice(&x.to_bytes());
    payload
}

pub fn decrypt(payload: &[u8], arity: usize) -> Result<Bits> {
    let body = payload
        .get(NONCE_LEN..)
        .ok_or(Error::ExtractFailure)?;
    if body.len() != arity.div_ceil(8) {
        return Err(Error::DecodeFailure(format!(
            "payload body {} bytes for arity {arity}",
            body.len()
        )));
    }
    let all = Bits::from_bytes(body);
    // padding bits past the arity must be zero for the ciphertext to be in
    // the support of enc
    if all.iter().skip(arity).any(|b| b == 1) {
        return Err(Error::DecodeFailure("nonzero padding bits".into()));
    }
    Ok(all.slice(0..arity))
}

pub fn nonce_of(payload: &[u8]) -> Result<[u8; NONCE_LEN]> {
    payload
        .get(..NONCE_LEN)
        .and_then(|s| <[u8; NONCE_LEN]>::try_from(s).ok())
        .ok_or(Error::ExtractFailure)
}

/// Eval at a caller-chosen output nonce: decrypt, compute, re-encrypt.
pub fn eval(
    c: &Circuit,
    payload: &[u8],
    arity: usize,
    out_nonce: &[u8; NONCE_LEN],
) -> Result<Vec<u8>> {
    let x = decrypt(payload, arity)?;
    let y = c.eval(&x)?;
    Ok(encrypt(&y, out_nonce))
}
