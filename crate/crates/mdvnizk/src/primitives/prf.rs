//! Toy pseudorandom function built from a rotate-AND-XOR permutation over a
//! 64-bit state.
//!
//! Chosen for cheap circuit compilation: the same keyed computation must run
//! inside homomorphically evaluated circuits and inside NIZK relations, so the
//! round function uses only XOR, AND and fixed rotations. This is a toy PRF
//! with no concrete security claim.

use rand::RngCore;

use crate::bits::Bits;
use crate::circuits::{Builder, Wire};
use crate::wire::{put_frame, put_varint, Reader};

const STATE_BITS: usize = 64;
const ROUNDS: usize = 16;
const ROT_A: u32 = 1;
const ROT_B: u32 = 8;
const ROT_C: u32 = 2;
const ROT_D: u32 = 25;

/// SplitMix64-derived round constants; fixed schedule shared by every
/// permutation call.
fn round_constant(round: usize) -> u64 {
    let mut z = (round as u64).wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn permute(mut s: u64) -> u64 {
    for round in 0..ROUNDS {
        s = s.rotate_right(ROT_A)
            ^ (s.rotate_right(ROT_B) & s.rotate_right(ROT_C))
            ^ s.rotate_right(ROT_D)
            ^ round_constant(round);
    }
    s
}

/// Absorption schedule: header block binding (λ, ℓ, |msg|), then key bits,
/// then message bits, 64 bits per block, LSB-first, zero-padded.
fn blocks(key_bits: &Bits, msg_bits: &Bits, out_len: usize) -> Vec<u64> {
    let header = (key_bits.len() as u64)
        | ((out_len as u64) << 16)
        | ((msg_bits.len() as u64) << 32);
    let mut out = vec![header];
    for chunk in key_bits.as_slice().chunks(STATE_BITS) {
        out.push(Bits::from_vec(chunk.to_vec()).to_uint());
    }
    for chunk in msg_bits.as_slice().chunks(STATE_BITS) {
        out.push(Bits::from_vec(chunk.to_vec()).to_uint());
    }
    out
}

fn eval_bits(key_bits: &Bits, msg_bits: &Bits, out_len: usize) -> Bits {
    let mut s = 0u64;
    for block in blocks(key_bits, msg_bits, out_len) {
        s ^= block;
        s = permute(s);
    }
    let mut out = Bits::new();
    loop {
        let take = (out_len - out.len()).min(STATE_BITS);
        out.extend(&Bits::from_uint(s, take));
        if out.len() == out_len {
            return out;
        }
        s = permute(s);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrfKey {
    pub key_bits: Bits,
    pub out_len: usize,
}

impl PrfKey {
    /// prfGen: uniform key of λ bits, output length ℓ.
    pub fn generate(lambda: usize, out_len: usize, rng: &mut impl RngCore) -> Self {
        assert!(lambda >= 16, "security parameter too small");
        assert!(out_len >= 1);
        PrfKey {
            key_bits: Bits::random(lambda, rng),
            out_len,
        }
    }

    /// Deterministic rebuild from an explicit randomness tape; the tape is
    /// exactly the key bits, which is what verifier-setup consistency checks
    /// re-derive.
    pub fn from_tape(tape: &Bits, out_len: usize) -> Self {
        PrfKey {
            key_bits: tape.clone(),
            out_len,
        }
    }

    pub fn lambda(&self) -> usize {
        self.key_bits.len()
    }

    /// prfF: deterministic evaluation on a byte-string input.
    pub fn eval(&self, x: &[u8]) -> Bits {
        eval_bits(&self.key_bits, &Bits::from_bytes(x), self.out_len)
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"PRF1");
        put_varint(&mut out, self.out_len as u64);
        put_varint(&mut out, self.key_bits.len() as u64);
        put_frame(&mut out, &self.key_bits.to_bytes());
        out
    }

    pub fn decode_from(r: &mut Reader<'_>) -> crate::error::Result<Self> {
        r.tag(b"PRF1")?;
        let out_len = r.usize()?;
        let bit_len = r.usize()?;
        let bytes = r.frame()?;
        let all = Bits::from_bytes(bytes);
        Ok(PrfKey {
            key_bits: all.slice(0..bit_len),
            out_len,
        })
    }
}

/// Emit the PRF computation into a circuit builder.
///
/// `key` and `msg` are wire slices, so either side can be secret (circuit
/// input) or baked in as constant gates. Mirrors [`PrfKey::eval`] bit for
/// bit: `out_wires[i]` evaluates to bit `i` of the direct evaluation.
pub fn compile(b: &mut Builder, key: &[Wire], msg: &[Wire], out_len: usize) -> Vec<Wire> {
    let zero = b.constant(0);
    let mut state: Vec<Wire> = vec![zero; STATE_BITS];

    let header = (key.len() as u64) | ((out_len as u64) << 16) | ((msg.len() as u64) << 32);
    absorb_const(b, &mut state, header);
    permute_wires(b, &mut state);
    for chunk in key.chunks(STATE_BITS).chain(msg.chunks(STATE_BITS)) {
        for (i, &w) in chunk.iter().enumerate() {
            state[i] = b.xor(state[i], w);
        }
        permute_wires(b, &mut state);
    }

    let mut out = Vec::with_capacity(out_len);
    loop {
        let take = (out_len - out.len()).min(STATE_BITS);
        out.extend_from_slice(&state[..take]);
        if out.len() == out_len {
            return out;
        }
        permute_wires(b, &mut state);
    }
}

fn absorb_const(b: &mut Builder, state: &mut [Wire], block: u64) {
    for (i, w) in state.iter_mut().enumerate() {
        if (block >> i) & 1 == 1 {
            *w = b.not(*w);
        }
    }
}

fn permute_wires(b: &mut Builder, state: &mut Vec<Wire>) {
    for round in 0..ROUNDS {
        let rc = round_constant(round);
        let mut next = Vec::with_capacity(STATE_BITS);
        for i in 0..STATE_BITS {
            // bit i of rotate_right(s, r) is s[(i + r) % 64]
            let a = state[(i + ROT_A as usize) % STATE_BITS];
            let bw = state[(i + ROT_B as usize) % STATE_BITS];
            let c = state[(i + ROT_C as usize) % STATE_BITS];
            let d = state[(i + ROT_D as usize) % STATE_BITS];
            let nonlin = b.and(bw, c);
            let mut v = b.xor(a, nonlin);
            v = b.xor(v, d);
            if (rc >> i) & 1 == 1 {
                v = b.not(v);
            }
            next.push(v);
        }
        *state = next;
    }
}
