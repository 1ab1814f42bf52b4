//! Transcript-check backend: the proof is the witness itself, masked under
//! a stream derived from the crs and the statement.
//!
//! The verifier unmasks the witness and re-evaluates the relation circuit.
//! Complete and sound inside a test harness (the verifier literally checks
//! the relation), but there is no zero-knowledge whatsoever — the witness is
//! recoverable by anyone holding the crs. Used for fast plumbing tests and
//! never in zero-knowledge acceptance experiments.

use sha2::{Digest, Sha256};

use crate::bits::Bits;
use crate::nizk::{NizkCrs, Statement};
use crate::wire::{put_varint, Reader};

fn mask(crs: &NizkCrs, stmt: &Statement, len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len);
    let mut counter = 0u32;
    while out.len() < len {
        let mut h = Sha256::new();
        h.update(b"mdvnizk.transcript-check");
        h.update(counter.to_le_bytes());
        h.update(&crs.bytes);
        h.update(stmt.digest());
        out.extend_from_slice(&h.finalize());
        counter += 1;
    }
    out.truncate(len);
    out
}

pub fn prove(crs: &NizkCrs, stmt: &Statement, witness: &Bits) -> Vec<u8> {
    let packed = witness.to_bytes();
    let mut payload = Vec::new();
    put_varint(&mut payload, witness.len() as u64);
    payload.extend(
        packed
            .iter()
            .zip(mask(crs, stmt, packed.len()))
            .map(|(&b, m)| b ^ m),
    );
    payload
}

pub fn verify(crs: &NizkCrs, stmt: &Statement, payload: &[u8]) -> bool {
    let mut r = Reader::new(payload, "transcript-check proof");
    let Ok(bit_len) = r.usize() else {
        return false;
    };
    if bit_len != stmt.circuit.inputs as usize {
        return false;
    }
    let Ok(masked) = r.bytes(bit_len.div_ceil(8)) else {
        return false;
    };
    if r.finish().is_err() {
        return false;
    }
    let packed: Vec<u8> = masked
        .iter()
        .zip(mask(crs, stmt, masked.len()))
        .map(|(&b, m)| b ^ m)
        .collect();
    let witness = Bits::from_bytes(&packed).slice(0..bit_len);
    match stmt.circuit.eval(&witness) {
        Ok(out) => !out.is_empty() && out.iter().all(|b| b == 1),
        Err(_) => false,
    }
}
