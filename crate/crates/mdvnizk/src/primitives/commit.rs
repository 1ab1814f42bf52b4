//! Keyed-hash commitments with a salt of λ bits.
//!
//! Computationally binding and hiding under standard hash assumptions; the
//! protocol never needs statistical binding from these.

use sha2::{Digest, Sha256};

use crate::bits::Bits;

pub const COM_LEN: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Commitment {
    pub com: [u8; COM_LEN],
    pub message: Vec<u8>,
    pub salt: Bits,
}

pub fn commit(message: &[u8], salt: &Bits) -> [u8; COM_LEN] {
    let mut h = Sha256::new();
    h.update(b"mdvnizk.commit");
    let salt_bytes = salt.to_bytes();
    h.update((salt.len() as u32).to_le_bytes());
    h.update(&salt_bytes);
    h.update((message.len() as u32).to_le_bytes());
    h.update(message);
    h.finalize().into()
}

pub fn verify_open(com: &[u8; COM_LEN], message: &[u8], salt: &Bits) -> bool {
    commit(message, salt) == *com
}

impl Commitment {
    pub fn new(message: Vec<u8>, salt: Bits) -> Self {
        let com = commit(&message, &salt);
        Commitment { com, message, salt }
    }

    pub fn verify(&self) -> bool {
        verify_open(&self.com, &self.message, &self.salt)
    }
}
