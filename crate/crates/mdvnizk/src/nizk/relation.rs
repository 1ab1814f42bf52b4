//! The two consistency relations of the compiled protocol.
//!
//! REL_V: "(c_V, c_rV, ek) is consistent" — there exist r₁, r₂ such that
//! c_V is produced by key generation and FHE encryption with randomness r₁,
//! and c_rV = pkeEnc(ek, r₁; r₂).
//!
//! REL_P: "(evc_P, c_rΞ, ek) is consistent" — there exist x, r_Ξ, r₁, r₂
//! such that evc_P = fheEval(C_{x,r_Ξ}, c_V; r₁) and c_rΞ = pkeEnc(ek, r_Ξ; r₂).
//! The instance x is an existential variable here, not part of the proved
//! tuple: a proof stays valid when the same (evc_P, c_rΞ) is replayed
//! against a different instance, and the protocol rejects such replays at
//! the sigma-verification step because the challenge is instance-dependent.
//! The ciphertext c_V parametrizes the relation as public context.
//!
//! Each relation splits into a circuit clause (proved by the NIZK backends)
//! and a PKE re-encryption clause. Compiling lattice encryption to boolean
//! gates is far outside desk scale, so the PKE clause is checked natively by
//! [`relation_check_v`] / [`relation_check_p`] (used fail-closed by honest
//! provers and by the transcript-check backend) and is not covered by the
//! MPC-in-the-head proof; the proof still binds the ciphertext bytes through
//! the statement tuple hash.

use crate::bits::Bits;
use crate::circuits::{Builder, Circuit, Wire};
use crate::error::{Error, Result};
use crate::fhe::{transparent, FheBackend, FheCiphertext};
use crate::nizk::{Statement, REL_P, REL_V};
use crate::primitives::{pke, prf};
use crate::sigma::SigmaBackend;
use crate::wire::{put_frame, put_varint, Reader};

pub const NONCE_BITS: usize = 8 * transparent::NONCE_LEN;

/// r₁ of VSetup: the tagged concatenation of prfGen, fheGen and fheEnc
/// randomness (conceptually one string; we keep the segments separate on
/// the wire).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VSetupTape {
    /// prfGen randomness: the PRF key bits.
    pub r_prf: Bits,
    /// fheGen randomness: the FHE key material.
    pub fhe_material: Vec<u8>,
    /// fheEnc randomness: the encryption nonce.
    pub fhe_nonce: [u8; transparent::NONCE_LEN],
}

impl VSetupTape {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"TRV1");
        put_varint(&mut out, self.r_prf.len() as u64);
        put_frame(&mut out, &self.r_prf.to_bytes());
        put_frame(&mut out, &self.fhe_material);
        put_frame(&mut out, &self.fhe_nonce);
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes, "vsetup tape");
        r.tag(b"TRV1")?;
        let bit_len = r.usize()?;
        let r_prf = Bits::from_bytes(r.frame()?).slice(0..bit_len);
        let fhe_material = r.frame()?.to_vec();
        let fhe_nonce = <[u8; transparent::NONCE_LEN]>::try_from(r.frame()?)
            .map_err(|_| Error::malformed("vsetup tape", "nonce length"))?;
        r.finish()?;
        Ok(VSetupTape {
            r_prf,
            fhe_material,
            fhe_nonce,
        })
    }
}

#[derive(Clone, Debug)]
pub struct RelVStatement {
    pub c_v: FheCiphertext,
    pub c_rv: pke::PkeCiphertext,
    pub ek: Vec<u8>,
}

#[derive(Clone, Debug)]
pub struct RelVWitness {
    pub tape: VSetupTape,
    /// r₂: PKE encryption coins for c_rV.
    pub coins: [u8; pke::COIN_LEN],
}

#[derive(Clone, Debug)]
pub struct RelPStatement {
    pub evc_p: FheCiphertext,
    pub c_rxi: pke::PkeCiphertext,
    pub ek: Vec<u8>,
    /// Public context parametrizing the relation (not part of the tuple).
    pub c_v: FheCiphertext,
}

#[derive(Clone, Debug)]
pub struct RelPWitness {
    /// Instance encoding (existential in this relation).
    pub x: Vec<u8>,
    /// Sigma-protocol randomness tape.
    pub r_xi: Bits,
    /// r₁: FHE evaluation re-randomization nonce.
    pub eval_nonce: [u8; transparent::NONCE_LEN],
    /// r₂: PKE encryption coins for c_rΞ.
    pub coins: [u8; pke::COIN_LEN],
}

fn require_transparent(ct: &FheCiphertext, what: &'static str) -> Result<()> {
    if ct.backend != FheBackend::Transparent {
        return Err(Error::UnsupportedBackend(what));
    }
    Ok(())
}

/// Equality-with-constants gadget: 1 iff every wire matches its target bit.
fn eq_consts(b: &mut Builder, wires: &[Wire], target: &Bits) -> Wire {
    assert_eq!(wires.len(), target.len());
    let eqs: Vec<Wire> = wires
        .iter()
        .zip(target.iter())
        .map(|(&w, bit)| b.eq_const(w, bit))
        .collect();
    b.all(&eqs)
}

fn nonce_bits(nonce: &[u8; transparent::NONCE_LEN]) -> Bits {
    Bits::from_bytes(nonce)
}

impl RelVStatement {
    fn tuple(&self) -> Vec<u8> {
        let mut out = Vec::new();
        put_frame(&mut out, &self.c_v.encode());
        put_frame(&mut out, &self.c_rv.encode());
        put_frame(&mut out, &self.ek);
        out
    }

    /// Circuit clause: the witness's PRF-key bits and encryption nonce
    /// reproduce c_V exactly. Inputs: key bits (c_V arity), then 128 nonce
    /// bits.
    pub fn circuit(&self) -> Result<Circuit> {
        require_transparent(&self.c_v, "REL_V circuit on a lattice ciphertext")?;
        let plain = transparent::decrypt(&self.c_v.payload, self.c_v.arity)?;
        let nonce = transparent::nonce_of(&self.c_v.payload)?;
        let n_key = self.c_v.arity;
        let mut b = Builder::new((n_key + NONCE_BITS) as u32);
        let key_wires: Vec<Wire> = (0..n_key as u32).collect();
        let nonce_wires: Vec<Wire> = (n_key as u32..(n_key + NONCE_BITS) as u32).collect();
        let key_ok = eq_consts(&mut b, &key_wires, &plain);
        let nonce_ok = eq_consts(&mut b, &nonce_wires, &nonce_bits(&nonce));
        let ok = b.and(key_ok, nonce_ok);
        Ok(b.finish(vec![ok]))
    }

    pub fn to_statement(&self) -> Result<Statement> {
        Statement::new(REL_V, self.tuple(), self.circuit()?)
    }
}

impl RelVWitness {
    /// Input assignment for the REL_V circuit.
    pub fn circuit_input(&self) -> Bits {
        let mut bits = self.tape.r_prf.clone();
        bits.extend(&nonce_bits(&self.tape.fhe_nonce));
        bits
    }
}

/// Full REL_V check: circuit clause plus native re-execution of the FHE and
/// PKE encryptions from the witness randomness.
pub fn relation_check_v(stmt: &RelVStatement, wit: &RelVWitness) -> bool {
    let Ok(circuit) = stmt.circuit() else {
        return false;
    };
    match circuit.eval(&wit.circuit_input()) {
        Ok(out) if out.iter().all(|b| b == 1) && !out.is_empty() => {}
        _ => return false,
    }
    // re-derive c_V byte-exactly from the tape
    let expected_payload = transparent::encrypt(&wit.tape.r_prf, &wit.tape.fhe_nonce);
    if stmt.c_v.payload != expected_payload || stmt.c_v.arity != wit.tape.r_prf.len() {
        return false;
    }
    // PKE clause: c_rV = pkeEnc(ek, r_V; r₂)
    match pke::encrypt_with_coins(stmt.c_rv.lambda, &stmt.ek, &wit.tape.encode(), &wit.coins) {
        Ok(ct) => ct == stmt.c_rv,
        Err(_) => false,
    }
}

/// The circuit C_{x,r_Ξ} the prover evaluates homomorphically on c_V: input
/// is the PRF key, output is the sigma response γ = ΣP3(PRF_k(x), r_Ξ).
pub fn build_prover_circuit(
    x: &[u8],
    r_xi: &Bits,
    backend: &dyn SigmaBackend,
    key_bits: usize,
) -> Circuit {
    let mut b = Builder::new(key_bits as u32);
    let key_wires: Vec<Wire> = (0..key_bits as u32).collect();
    let msg_wires = b.constants(&Bits::from_bytes(x));
    let beta = prf::compile(&mut b, &key_wires, &msg_wires, backend.challenge_len());
    let r_wires = b.constants(r_xi);
    let gamma = backend.compile_p3(&mut b, &beta, &r_wires);
    b.finish(gamma)
}

impl RelPStatement {
    fn tuple(&self) -> Vec<u8> {
        let mut out = Vec::new();
        put_frame(&mut out, &self.evc_p.encode());
        put_frame(&mut out, &self.c_rxi.encode());
        put_frame(&mut out, &self.ek);
        out
    }

    /// Circuit clause. Inputs: instance bits (8·x_len), then the sigma tape
    /// (ℓ_r), then 128 evaluation-nonce bits. The PRF key enters as
    /// constants read from the transparent c_V, so the circuit depends on
    /// (c_V, evc_P) but never on the instance value — the property that
    /// keeps replayed proofs valid until sigma verification.
    pub fn circuit(&self, backend: &dyn SigmaBackend, x_len: usize) -> Result<Circuit> {
        require_transparent(&self.c_v, "REL_P circuit on a lattice ciphertext")?;
        require_transparent(&self.evc_p, "REL_P circuit on a lattice ciphertext")?;
        let key = transparent::decrypt(&self.c_v.payload, self.c_v.arity)?;
        let gamma_target = transparent::decrypt(&self.evc_p.payload, self.evc_p.arity)?;
        let nonce_target = transparent::nonce_of(&self.evc_p.payload)?;
        if gamma_target.len() != backend.gamma_len() {
            return Err(Error::malformed("rel_p statement", "γ arity mismatch"));
        }
        let n_x = 8 * x_len;
        let n_r = backend.randomness_len();
        let total = n_x + n_r + NONCE_BITS;
        let mut b = Builder::new(total as u32);
        let x_wires: Vec<Wire> = (0..n_x as u32).collect();
        let r_wires: Vec<Wire> = (n_x as u32..(n_x + n_r) as u32).collect();
        let nonce_wires: Vec<Wire> = ((n_x + n_r) as u32..total as u32).collect();
        let key_wires = b.constants(&key);
        let beta = prf::compile(&mut b, &key_wires, &x_wires, backend.challenge_len());
        let gamma = backend.compile_p3(&mut b, &beta, &r_wires);
        let gamma_ok = eq_consts(&mut b, &gamma, &gamma_target);
        let nonce_ok = eq_consts(&mut b, &nonce_wires, &nonce_bits(&nonce_target));
        let ok = b.and(gamma_ok, nonce_ok);
        Ok(b.finish(vec![ok]))
    }

    pub fn to_statement(&self, backend: &dyn SigmaBackend, x_len: usize) -> Result<Statement> {
        Statement::new(REL_P, self.tuple(), self.circuit(backend, x_len)?)
    }
}

impl RelPWitness {
    pub fn circuit_input(&self) -> Bits {
        let mut bits = Bits::from_bytes(&self.x);
        bits.extend(&self.r_xi);
        bits.extend(&nonce_bits(&self.eval_nonce));
        bits
    }
}

/// Full REL_P check: native re-execution of both clauses.
pub fn relation_check_p(
    stmt: &RelPStatement,
    backend: &dyn SigmaBackend,
    wit: &RelPWitness,
) -> bool {
    if require_transparent(&stmt.c_v, "").is_err() || require_transparent(&stmt.evc_p, "").is_err()
    {
        return false;
    }
    if wit.r_xi.len() != backend.randomness_len() {
        return false;
    }
    // evc_P = fheEval(C_{x,r_Ξ}, c_V; r₁)
    let circuit = build_prover_circuit(&wit.x, &wit.r_xi, backend, stmt.c_v.arity);
    let Ok(payload) =
        transparent::eval(&circuit, &stmt.c_v.payload, stmt.c_v.arity, &wit.eval_nonce)
    else {
        return false;
    };
    if stmt.evc_p.payload != payload || stmt.evc_p.arity != backend.gamma_len() {
        return false;
    }
    // c_rΞ = pkeEnc(ek, r_Ξ; r₂)
    match pke::encrypt_with_coins(stmt.c_rxi.lambda, &stmt.ek, &wit.r_xi.to_bytes(), &wit.coins) {
        Ok(ct) => ct == stmt.c_rxi,
        Err(_) => false,
    }
}
