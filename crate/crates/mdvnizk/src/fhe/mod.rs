//! Leveled homomorphic encryption with statistical circuit privacy.
//!
//! Two backends behind one interface:
//!
//! * **Transparent** (reference, default): the ciphertext stores the
//!   plaintext in the clear next to a fresh nonce, and `fhe_eval` computes
//!   the circuit in the clear and re-encrypts the output with a fresh nonce.
//!   Circuit privacy is therefore *perfect* — evaluations of agreeing
//!   circuits are identically distributed — which lets protocol tests be
//!   exact. It offers no secrecy at all and says so.
//! * **Lattice** (optional): a small GSW-style scheme with noise flooding,
//!   where ciphertexts actually hide the plaintext from anyone without the
//!   key. Its extractor enumerates the deliberately tiny key space, a
//!   bounded stand-in for an unbounded algorithm.
//!
//! Both enforce the circuit size bound recorded at key generation.

pub mod gsw;
pub mod transparent;

use rand::RngCore;

use crate::bits::Bits;
use crate::circuits::Circuit;
use crate::error::{Error, Result};
use crate::wire::{put_frame, put_varint, Reader};

/// Default circuit size bound s(λ): every relation circuit in the protocol
/// fits far below this.
pub const DEFAULT_BOUND: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FheBackend {
    Transparent,
    Lattice,
}

impl FheBackend {
    fn id(self) -> u8 {
        match self {
            FheBackend::Transparent => 0x01,
            FheBackend::Lattice => 0x02,
        }
    }

    fn from_id(id: u8) -> Result<Self> {
        match id {
            0x01 => Ok(FheBackend::Transparent),
            0x02 => Ok(FheBackend::Lattice),
            _ => Err(Error::malformed("fhe backend", format!("id {id:#04x}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FheSecretKey {
    pub backend: FheBackend,
    pub lambda: usize,
    /// Circuit size bound s; evals above it are rejected.
    pub bound: u64,
    /// Backend key material (transparent: opaque key id; lattice: seed).
    pub material: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FheCiphertext {
    pub backend: FheBackend,
    pub lambda: usize,
    pub bound: u64,
    /// Number of plaintext bits.
    pub arity: usize,
    pub payload: Vec<u8>,
}

/// fheGen: fresh key at security parameter λ with circuit size bound `bound`.
pub fn fhe_gen(
    backend: FheBackend,
    lambda: usize,
    bound: u64,
    rng: &mut impl RngCore,
) -> FheSecretKey {
    assert!(bound >= 1);
    let material = match backend {
        FheBackend::Transparent => transparent::gen_material(rng),
        FheBackend::Lattice => gsw::gen_material(rng),
    };
    FheSecretKey {
        backend,
        lambda,
        bound,
        material,
    }
}

/// fheEnc with fresh randomness from `rng`.
pub fn fhe_enc(sk: &FheSecretKey, x: &Bits, rng: &mut impl RngCore) -> FheCiphertext {
    let payload = match sk.backend {
        FheBackend::Transparent => {
            transparent::encrypt(x, &transparent::fresh_nonce(rng))
        }
        FheBackend::Lattice => gsw::encrypt(&sk.material, x, rng),
    };
    FheCiphertext {
        backend: sk.backend,
        lambda: sk.lambda,
        bound: sk.bound,
        arity: x.len(),
        payload,
    }
}

/// fheDec: deterministic; rejects cross-backend ciphertexts.
pub fn fhe_dec(sk: &FheSecretKey, ct: &FheCiphertext) -> Result<Bits> {
    if sk.backend != ct.backend {
        return Err(Error::BackendMismatch {
            expected: sk.backend.id(),
            got: ct.backend.id(),
        });
    }
    match sk.backend {
        FheBackend::Transparent => transparent::decrypt(&ct.payload, ct.arity),
        FheBackend::Lattice => gsw::decrypt(&sk.material, &ct.payload, ct.arity),
    }
}

/// fheEval: homomorphic evaluation of `c` on `ct`; enforces arity and the
/// leveled bound; randomness for output re-randomization comes from `rng`.
pub fn fhe_eval(c: &Circuit, ct: &FheCiphertext, rng: &mut impl RngCore) -> Result<FheCiphertext> {
    if c.inputs as usize != ct.arity {
        return Err(Error::InputArity {
            expected: ct.arity,
            got: c.inputs as usize,
        });
    }
    if c.size() as u64 > ct.bound {
        return Err(Error::LevelExceeded {
            size: c.size() as u64,
            bound: ct.bound,
        });
    }
    let payload = match ct.backend {
        FheBackend::Transparent => {
            transparent::eval(c, &ct.payload, ct.arity, &transparent::fresh_nonce(rng))?
        }
        FheBackend::Lattice => gsw::eval(c, &ct.payload, ct.arity, rng)?,
    };
    Ok(FheCiphertext {
        backend: ct.backend,
        lambda: ct.lambda,
        bound: ct.bound,
        arity: c.output_len(),
        payload,
    })
}

/// fheSim: unbounded-simulator analog. On the transparent backend the output
/// is *identically* distributed to `fhe_eval` of any circuit that evaluates
/// to `y`, because eval is itself a fresh encryption of the output.
pub fn fhe_sim(
    backend: FheBackend,
    lambda: usize,
    y: &Bits,
    rng: &mut impl RngCore,
) -> Result<FheCiphertext> {
    match backend {
        FheBackend::Transparent => Ok(FheCiphertext {
            backend,
            lambda,
            bound: DEFAULT_BOUND,
            arity: y.len(),
            payload: transparent::encrypt(y, &transparent::fresh_nonce(rng)),
        }),
        // simulating a lattice ciphertext requires key material the
        // simulator does not hold; the unbounded analog stops here
        FheBackend::Lattice => Err(Error::UnsupportedBackend(
            "fhe_sim on the lattice backend",
        )),
    }
}

/// fheExt: recover the unique plaintext of any ciphertext in the support of
/// enc, without being handed the key. Transparent: read the plaintext.
/// Lattice: exhaustive search of the (deliberately tiny) key space — a
/// bounded analog of an unbounded brute-force extractor.
pub fn fhe_extract(ct: &FheCiphertext) -> Result<Bits> {
    match ct.backend {
        FheBackend::Transparent => transparent::decrypt(&ct.payload, ct.arity),
        FheBackend::Lattice => gsw::extract(&ct.payload, ct.arity),
    }
}

impl FheSecretKey {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"FHK1");
        out.push(self.backend.id());
        put_varint(&mut out, self.lambda as u64);
        put_varint(&mut out, self.bound);
        put_frame(&mut out, &self.material);
        out
    }

    pub fn decode_from(r: &mut Reader<'_>) -> Result<Self> {
        r.tag(b"FHK1")?;
        let backend = FheBackend::from_id(r.byte()?)?;
        let lambda = r.usize()?;
        let bound = r.varint()?;
        let material = r.frame()?.to_vec();
        Ok(FheSecretKey {
            backend,
            lambda,
            bound,
            material,
        })
    }
}

impl FheCiphertext {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"FHC1");
        out.push(self.backend.id());
        put_varint(&mut out, self.lambda as u64);
        put_varint(&mut out, self.bound);
        put_varint(&mut out, self.arity as u64);
        put_frame(&mut out, &self.payload);
        out
    }

    pub fn decode_from(r: &mut Reader<'_>) -> Result<Self> {
        r.tag(b"FHC1")?;
        let backend = FheBackend::from_id(r.byte()?)?;
        let lambda = r.usize()?;
        let bound = r.varint()?;
        let arity = r.usize()?;
        let payload = r.frame()?.to_vec();
        Ok(FheCiphertext {
            backend,
            lambda,
            bound,
            arity,
            payload,
        })
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes, "fhe ciphertext");
        let ct = Self::decode_from(&mut r)?;
        r.finish()?;
        Ok(ct)
    }
}
