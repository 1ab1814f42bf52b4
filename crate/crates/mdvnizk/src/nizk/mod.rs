//! NP NIZK over the protocol's two consistency relations.
//!
//! The primary backend is Fiat–Shamir over a 3-party MPC-in-the-head sigma
//! protocol for circuit satisfiability, with the random oracle modeled as an
//! explicit [`oracle::ProgrammableOracle`] so the trapdoor simulator can
//! program challenges. A second "transcript-check" backend (the witness,
//! masked under a crs-derived stream) is complete and sound in-harness but
//! has no zero-knowledge; it exists for fast plumbing tests only.
//!
//! A [`Statement`] is a relation id, the canonical encoding of the public
//! tuple, and the relation compiled to a boolean [`Circuit`]; a witness is
//! the circuit input assignment. The NIZK layer proves "the circuit accepts
//! some input"; protocol-level relation checks that cannot be expressed as
//! circuit clauses live in [`relation`].

pub mod mpcith;
pub mod oracle;
pub mod relation;
pub mod transcript_check;

use rand::RngCore;
use sha2::{Digest, Sha256};

use crate::bits::Bits;
use crate::circuits::Circuit;
use crate::error::{Error, Result};
use crate::wire::{put_frame, put_varint, Reader};

pub use oracle::ProgrammableOracle;

/// Relation ids on the wire.
pub const REL_V: u8 = 0x01;
pub const REL_P: u8 = 0x02;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NizkCrs {
    pub lambda: usize,
    pub bytes: Vec<u8>,
}

/// crs length in bytes: a pure function of λ.
pub fn crs_len(lambda: usize) -> usize {
    lambda
}

/// nizkSetup: a plain uniform string.
pub fn nizk_setup(lambda: usize, rng: &mut (impl RngCore + ?Sized)) -> NizkCrs {
    assert!(lambda >= 16);
    let mut bytes = vec![0u8; crs_len(lambda)];
    rng.fill_bytes(&mut bytes);
    NizkCrs { lambda, bytes }
}

impl NizkCrs {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        put_varint(&mut out, self.lambda as u64);
        put_frame(&mut out, &self.bytes);
        out
    }

    pub fn decode_from(r: &mut Reader<'_>) -> Result<Self> {
        let lambda = r.usize()?;
        let bytes = r.frame()?.to_vec();
        if bytes.len() != crs_len(lambda) {
            return Err(Error::malformed("nizk crs", "length does not match λ"));
        }
        Ok(NizkCrs { lambda, bytes })
    }
}

#[derive(Clone, Debug)]
pub struct Statement {
    pub relation: u8,
    /// Canonical byte encoding of the public tuple; bound by the proof.
    pub tuple: Vec<u8>,
    /// The relation compiled to a circuit with output 1 iff satisfied.
    pub circuit: Circuit,
}

impl Statement {
    pub fn new(relation: u8, tuple: Vec<u8>, circuit: Circuit) -> Result<Self> {
        if relation != REL_V && relation != REL_P {
            return Err(Error::UnknownRelation(relation));
        }
        Ok(Statement {
            relation,
            tuple,
            circuit,
        })
    }

    /// Digest bound into every Fiat–Shamir query for this statement.
    pub fn digest(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"mdvnizk.stmt");
        h.update([self.relation]);
        h.update((self.tuple.len() as u64).to_le_bytes());
        h.update(&self.tuple);
        h.update(self.circuit.encode());
        h.finalize().into()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NizkBackendKind {
    Mpcith,
    TranscriptCheck,
}

impl NizkBackendKind {
    fn id(self) -> u8 {
        match self {
            NizkBackendKind::Mpcith => 0x01,
            NizkBackendKind::TranscriptCheck => 0x02,
        }
    }

    fn from_id(id: u8) -> Result<Self> {
        match id {
            0x01 => Ok(NizkBackendKind::Mpcith),
            0x02 => Ok(NizkBackendKind::TranscriptCheck),
            _ => Err(Error::malformed("nizk proof", format!("backend id {id:#04x}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NizkProof {
    pub kind: NizkBackendKind,
    pub payload: Vec<u8>,
}

impl NizkProof {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"NZK1");
        out.push(self.kind.id());
        put_frame(&mut out, &self.payload);
        out
    }

    pub fn decode_from(r: &mut Reader<'_>) -> Result<Self> {
        r.tag(b"NZK1")?;
        let kind = NizkBackendKind::from_id(r.byte()?)?;
        let payload = r.frame()?.to_vec();
        Ok(NizkProof { kind, payload })
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes, "nizk proof");
        let p = Self::decode_from(&mut r)?;
        r.finish()?;
        Ok(p)
    }
}

/// Round count t(λ).
pub fn round_count(lambda: usize) -> usize {
    16.max(lambda / 8)
}

/// nizkP: fail-closed — refuses to prove if the witness does not satisfy
/// the statement circuit.
pub fn nizk_prove(
    kind: NizkBackendKind,
    crs: &NizkCrs,
    oracle: &ProgrammableOracle,
    stmt: &Statement,
    witness: &Bits,
    rng: &mut (impl RngCore + ?Sized),
) -> Result<NizkProof> {
    match stmt.circuit.eval(witness) {
        Ok(out) if out.iter().all(|b| b == 1) && !out.is_empty() => {}
        Ok(_) => return Err(Error::FalseWitness),
        Err(e) => return Err(e),
    }
    let payload = match kind {
        NizkBackendKind::Mpcith => mpcith::prove(crs, oracle, stmt, witness, rng)?,
        NizkBackendKind::TranscriptCheck => transcript_check::prove(crs, stmt, witness),
    };
    Ok(NizkProof { kind, payload })
}

/// nizkV: deterministic; malformed proofs are `false`, never errors.
pub fn nizk_verify(
    crs: &NizkCrs,
    oracle: &ProgrammableOracle,
    stmt: &Statement,
    proof: &NizkProof,
) -> bool {
    match proof.kind {
        NizkBackendKind::Mpcith => mpcith::verify(crs, oracle, stmt, &proof.payload),
        NizkBackendKind::TranscriptCheck => transcript_check::verify(crs, stmt, &proof.payload),
    }
}

/// Trapdoor: in the programmable-oracle model the "trapdoor" is the right to
/// program the session oracle for this crs.
#[derive(Clone, Debug)]
pub struct NizkTrapdoor {
    pub crs: NizkCrs,
}

/// nizkSim setup half: the simulated crs is honestly uniform; the trapdoor
/// binds it.
pub fn nizk_sim_setup(
    lambda: usize,
    rng: &mut (impl RngCore + ?Sized),
) -> (NizkCrs, NizkTrapdoor) {
    let crs = nizk_setup(lambda, rng);
    let td = NizkTrapdoor { crs: crs.clone() };
    (crs, td)
}

/// nizkSim proving half: simulate a proof without a witness by programming
/// the oracle. Only the MPC-in-the-head backend has a simulator.
pub fn nizk_sim_prove(
    td: &NizkTrapdoor,
    oracle: &mut ProgrammableOracle,
    stmt: &Statement,
    rng: &mut (impl RngCore + ?Sized),
) -> Result<NizkProof> {
    let payload = mpcith::sim_prove(&td.crs, oracle, stmt, rng)?;
    Ok(NizkProof {
        kind: NizkBackendKind::Mpcith,
        payload,
    })
}
