//! Explicitly modeled programmable random oracle.
//!
//! The Fiat–Shamir backend derives its challenges from this object instead
//! of a bare hash call, so the zero-knowledge simulator can *program*
//! individual query answers — the standard executable model of FS
//! simulation. Honest parties only query; the simulator programs each query
//! at most once, and a conflicting programming attempt is a hard error
//! rather than a silently wrong answer.

use std::collections::HashMap;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Default)]
pub struct ProgrammableOracle {
    programmed: HashMap<Vec<u8>, Vec<u8>>,
}

impl ProgrammableOracle {
    pub fn new() -> Self {
        Self::default()
    }

    /// Answer a query with `len` bytes: the programmed answer if one exists,
    /// otherwise counter-mode expansion of a keyed hash.
    pub fn query(&self, input: &[u8], len: usize) -> Vec<u8> {
        if let Some(ans) = self.programmed.get(input) {
            assert_eq!(ans.len(), len, "programmed answer length mismatch");
            return ans.clone();
        }
        let mut out = Vec::with_capacity(len);
        let mut counter = 0u32;
        while out.len() < len {
            let mut h = Sha256::new();
            h.update(b"mdvnizk.fs");
            h.update(counter.to_le_bytes());
            h.update((input.len() as u64).to_le_bytes());
            h.update(input);
            out.extend_from_slice(&h.finalize());
            counter += 1;
        }
        out.truncate(len);
        out
    }

    /// Force the answer for one query. At most once per query.
    pub fn program(&mut self, input: &[u8], answer: Vec<u8>) -> Result<()> {
        if self.programmed.contains_key(input) {
            return Err(Error::ProgrammingConflict(input.len()));
        }
        self.programmed.insert(input.to_vec(), answer);
        Ok(())
    }

    pub fn programmed_count(&self) -> usize {
        self.programmed.len()
    }
}
