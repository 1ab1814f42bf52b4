//! Bit-string values.
//!
//! Circuits, PRF outputs, sigma-protocol challenges and FHE plaintexts are all
//! bit strings. One byte per bit keeps indexing trivial; none of the strings
//! involved are large enough for packing to matter.

use std::fmt;
use std::ops::{Index, IndexMut};

use rand::RngCore;

/// A string of bits, each stored as a 0/1 byte.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Bits(Vec<u8>);

impl Bits {
    pub fn new() -> Self {
        Bits(Vec::new())
    }

    pub fn zeros(len: usize) -> Self {
        Bits(vec![0; len])
    }

    pub fn from_vec(v: Vec<u8>) -> Self {
        debug_assert!(v.iter().all(|&b| b <= 1));
        Bits(v)
    }

    /// Parse a string of '0'/'1' characters. Panics on anything else; intended
    /// for literals in tests and docs.
    pub fn from_str01(s: &str) -> Self {
        Bits(
            s.chars()
                .map(|c| match c {
                    '0' => 0,
                    '1' => 1,
                    _ => panic!("not a bit: {c:?}"),
                })
                .collect(),
        )
    }

    pub fn random(len: usize, rng: &mut (impl RngCore + ?Sized)) -> Self {
        let mut bytes = vec![0u8; len];
        rng.fill_bytes(&mut bytes);
        for b in bytes.iter_mut() {
            *b &= 1;
        }
        Bits(bytes)
    }

    /// LSB-first expansion of each byte.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        let mut out = Vec::with_capacity(bytes.len() * 8);
        for &byte in bytes {
            for i in 0..8 {
                out.push((byte >> i) & 1);
            }
        }
        Bits(out)
    }

    /// Inverse of [`Bits::from_bytes`]; zero-pads a ragged tail.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.0.len().div_ceil(8)];
        for (i, &b) in self.0.iter().enumerate() {
            out[i / 8] |= b << (i % 8);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn push(&mut self, bit: u8) {
        debug_assert!(bit <= 1);
        self.0.push(bit);
    }

    pub fn extend(&mut self, other: &Bits) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Bits {
        Bits(self.0[range].to_vec())
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().copied()
    }

    /// Interpret the first `width` bits as an LSB-first integer.
    pub fn to_uint(&self) -> u64 {
        self.0
            .iter()
            .take(64)
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i))
    }

    /// LSB-first encoding of `value` into `width` bits.
    pub fn from_uint(value: u64, width: usize) -> Self {
        Bits((0..width).map(|i| ((value >> i) & 1) as u8).collect())
    }
}

impl Index<usize> for Bits {
    type Output = u8;
    fn index(&self, i: usize) -> &u8 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Bits {
    fn index_mut(&mut self, i: usize) -> &mut u8 {
        &mut self.0[i]
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits(")?;
        for &b in self.0.iter().take(64) {
            write!(f, "{b}")?;
        }
        if self.0.len() > 64 {
            write!(f, "… len={}", self.0.len())?;
        }
        write!(f, ")")
    }
}

impl FromIterator<u8> for Bits {
    fn from_iter<T: IntoIterator<Item = u8>>(iter: T) -> Self {
        Bits(iter.into_iter().collect())
    }
}
