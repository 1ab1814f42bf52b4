//! Executable attacks: the naive single-theorem construction, the
//! bit-by-bit challenge-decoding prover that breaks it, the resulting
//! forger, and the demonstration that the PRF-fixed protocol resists the
//! same adversary class.
//!
//! The naive construction publishes pvk = fheEnc(β) for a single random
//! sigma challenge β and accepts (α, evc) if evc decrypts to an accepting
//! response. Because the verifier's verdict leaks one bit per query, a
//! malicious prover holding any yes-instance can decode β bit by bit:
//! behave honestly on every repetition except i, and on repetition i inject
//! (homomorphically) the response for challenge bit 0 regardless of the
//! encrypted bit. Acceptance then reveals b_i. With β known, the sigma
//! zero-knowledge simulator forges proofs for no-instances.
//!
//! The fixed protocol derives β_x = PRF_k(x) per instance and demands π_P,
//! so the same strategy collapses: verdicts about one instance say nothing
//! about another instance's challenge, and the dishonest homomorphic
//! evaluation cannot be certified.

use rand::RngCore;
use serde::Serialize;

use crate::bits::Bits;
use crate::circuits::{build_const_circuit, Builder, Circuit, Wire};
use crate::error::{Error, Result};
use crate::fhe::{fhe_dec, fhe_enc, fhe_eval, fhe_gen, FheBackend, FheCiphertext, FheSecretKey, DEFAULT_BOUND};
use crate::nizk::{nizk_verify, NizkBackendKind, ProgrammableOracle};
use crate::protocol::{self, Crs, ProveOutcome, PublicVerKey, QmaProof, SecretVerKey};
use crate::sigma::SigmaBackend;

/// Verdict oracle: the adversary's only view of the verifier. Counts
/// queries against a budget and logs (instance, verdict) pairs; never
/// exposes key material.
pub struct VerdictOracle<'a, P> {
    verdict: Box<dyn Fn(&[u8], &P) -> bool + 'a>,
    budget: u64,
    log: Vec<(Vec<u8>, bool)>,
}

impl<'a, P> VerdictOracle<'a, P> {
    pub fn new(budget: u64, verdict: impl Fn(&[u8], &P) -> bool + 'a) -> Self {
        VerdictOracle {
            verdict: Box::new(verdict),
            budget,
            log: Vec::new(),
        }
    }

    pub fn query(&mut self, x: &[u8], proof: &P) -> Result<bool> {
        if self.log.len() as u64 >= self.budget {
            return Err(Error::BudgetExhausted(self.budget));
        }
        let accept = (self.verdict)(x, proof);
        self.log.push((x.to_vec(), accept));
        Ok(accept)
    }

    pub fn queries(&self) -> u64 {
        self.log.len() as u64
    }

    pub fn log(&self) -> &[(Vec<u8>, bool)] {
        &self.log
    }
}

/// The naive verifier key pair: an FHE encryption of one challenge β.
pub struct NaiveKeys {
    pub pvk: FheCiphertext,
    pub beta: Bits,
    pub fhek: FheSecretKey,
}

#[derive(Clone, Debug)]
pub struct NaiveProof {
    pub alpha: Vec<u8>,
    pub evc: FheCiphertext,
}

/// Naive VSetup: β uniform, pvk = fheEnc(β), svk = (β, fhek).
pub fn naive_vsetup(
    lambda: usize,
    challenge_len: usize,
    rng: &mut impl RngCore,
) -> NaiveKeys {
    assert!(challenge_len >= 1);
    let fhek = fhe_gen(FheBackend::Transparent, lambda, DEFAULT_BOUND, rng);
    let beta = Bits::random(challenge_len, rng);
    let pvk = fhe_enc(&fhek, &beta, rng);
    NaiveKeys { pvk, beta, fhek }
}

/// The response circuit the naive prover evaluates on the encrypted β:
/// γ = ΣP3(β, r) with the tape as constants. `forced_zero` replaces one
/// challenge-bit wire with constant 0 — the attack's "respond as if
/// b_i = 0" injection; `None` is the honest prover.
fn response_circuit(
    backend: &dyn SigmaBackend,
    r: &Bits,
    forced_zero: Option<usize>,
) -> Circuit {
    let len = backend.challenge_len();
    let mut b = Builder::new(len as u32);
    let beta_w: Vec<Wire> = (0..len)
        .map(|i| {
            if forced_zero == Some(i) {
                b.constant(0)
            } else {
                i as Wire
            }
        })
        .collect();
    let r_w = b.constants(r);
    let gamma = backend.compile_p3(&mut b, &beta_w, &r_w);
    b.finish(gamma)
}

/// Naive prover: the proof is (α, evc) with no consistency proof attached.
pub fn naive_prove(
    keys_pvk: &FheCiphertext,
    backend: &dyn SigmaBackend,
    x: &[u8],
    wit: &[u8],
    rng: &mut impl RngCore,
) -> Result<NaiveProof> {
    let r = backend.sample_randomness(x, wit, rng)?;
    let alpha = backend.p1(x, wit, &r)?;
    let evc = fhe_eval(&response_circuit(backend, &r, None), keys_pvk, rng)?;
    Ok(NaiveProof { alpha, evc })
}

/// Naive verifier: decrypt γ and run the sigma verdict under the fixed β.
pub fn naive_verify(
    keys: &NaiveKeys,
    backend: &dyn SigmaBackend,
    x: &[u8],
    proof: &NaiveProof,
) -> bool {
    let Ok(gamma) = fhe_dec(&keys.fhek, &proof.evc) else {
        return false;
    };
    backend.verify(x, &proof.alpha, &keys.beta, &gamma)
}

/// The §-1.2-style decoder: recover β̂ from the verdict oracle using one
/// query per challenge bit. For bit i the prover is honest everywhere but
/// forces repetition i's response to the b_i = 0 branch; acceptance means
/// the guess matched.
pub fn decode_challenge(
    oracle: &mut VerdictOracle<'_, NaiveProof>,
    keys_pvk: &FheCiphertext,
    backend: &dyn SigmaBackend,
    x_yes: &[u8],
    wit: &[u8],
    rng: &mut impl RngCore,
) -> Result<Bits> {
    let mut decoded = Bits::new();
    for i in 0..backend.challenge_len() {
        let r = backend.sample_randomness(x_yes, wit, rng)?;
        let alpha = backend.p1(x_yes, wit, &r)?;
        let evc = fhe_eval(&response_circuit(backend, &r, Some(i)), keys_pvk, rng)?;
        let accept = oracle.query(x_yes, &NaiveProof { alpha, evc })?;
        decoded.push(if accept { 0 } else { 1 });
    }
    Ok(decoded)
}

/// Forge a naive proof for any instance once β̂ is known: run the sigma
/// simulator and inject its response as a constant circuit.
pub fn forge_proof(
    keys_pvk: &FheCiphertext,
    backend: &dyn SigmaBackend,
    beta_hat: &Bits,
    x_no: &[u8],
    rng: &mut impl RngCore,
) -> Result<NaiveProof> {
    let (alpha, gamma) = backend.simulate(x_no, beta_hat, rng)?;
    let evc = fhe_eval(
        &build_const_circuit(&gamma, keys_pvk.arity as u32),
        keys_pvk,
        rng,
    )?;
    Ok(NaiveProof { alpha, evc })
}

/// Which clause of the fixed protocol's verifier rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailStage {
    Accepted,
    PiP,
    Sigma,
}

/// Telemetry variant of the real verifier: reports the first failing
/// clause. Harness observability only — a real adversary sees one bit.
pub fn verify_stages(
    crs: &Crs,
    pvk: &PublicVerKey,
    svk: &SecretVerKey,
    x: &[u8],
    proof: &QmaProof,
    backend: &dyn SigmaBackend,
    oracle: &ProgrammableOracle,
) -> FailStage {
    let stmt = crate::nizk::relation::RelPStatement {
        evc_p: proof.evc_p.clone(),
        c_rxi: proof.c_rxi.clone(),
        ek: crs.ek.clone(),
        c_v: pvk.c_v.clone(),
    };
    let pi_ok = stmt
        .to_statement(backend, x.len())
        .map(|s| nizk_verify(&crs.nizk_crs, oracle, &s, &proof.pi_p))
        .unwrap_or(false);
    if !pi_ok {
        return FailStage::PiP;
    }
    let beta_x = svk.prfk.eval(x);
    let sigma_ok = fhe_dec(&svk.fhek, &proof.evc_p)
        .map(|gamma| backend.verify(x, &proof.alpha, &beta_x, &gamma))
        .unwrap_or(false);
    if sigma_ok {
        FailStage::Accepted
    } else {
        FailStage::Sigma
    }
}

/// One JSON-line experiment report.
#[derive(Clone, Debug, Serialize)]
pub struct AttackReport {
    pub experiment: String,
    pub seed: u64,
    pub k: usize,
    pub queries: u64,
    pub decoded: bool,
    pub forged_accepted: bool,
    pub fail_stage: Option<FailStage>,
}

impl AttackReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Run the naive-protocol attack end to end: decode β, then forge a proof
/// for the no-instance.
pub fn attack_naive_protocol(
    keys: &NaiveKeys,
    backend: &dyn SigmaBackend,
    x_yes: &[u8],
    wit: &[u8],
    x_no: &[u8],
    budget: u64,
    seed: u64,
    rng: &mut impl RngCore,
) -> Result<AttackReport> {
    let mut oracle = VerdictOracle::new(budget, |x: &[u8], p: &NaiveProof| {
        naive_verify(keys, backend, x, p)
    });
    let beta_hat = decode_challenge(&mut oracle, &keys.pvk, backend, x_yes, wit, rng)?;
    let decoded = beta_hat == keys.beta;
    let forged = forge_proof(&keys.pvk, backend, &beta_hat, x_no, rng)?;
    let queries = oracle.queries();
    let forged_accepted = oracle.query(x_no, &forged)?;
    Ok(AttackReport {
        experiment: "attack_naive".into(),
        seed,
        k: backend.challenge_len(),
        queries: queries + 1,
        decoded,
        forged_accepted,
        fail_stage: None,
    })
}

/// The same adversary class against the fixed protocol. The decoding
/// queries carry the dishonestly evaluated ciphertext but cannot carry a
/// valid π_P (the prover's relation is false, so the NIZK prover refuses
/// fail-closed); the adversary attaches a π_P replayed from an honest proof
/// of x_yes, which the verifier rejects on the forced queries and which
/// gives the forgery nothing: x_no's challenge is an independent PRF
/// output.
#[allow(clippy::too_many_arguments)]
pub fn attack_fixed_protocol(
    crs: &Crs,
    pvk: &PublicVerKey,
    svk: &SecretVerKey,
    backend: &dyn SigmaBackend,
    nizk_kind: NizkBackendKind,
    nizk_oracle: &ProgrammableOracle,
    x_yes: &[u8],
    wit: &[u8],
    x_no: &[u8],
    budget: u64,
    seed: u64,
    rng: &mut crate::rng::Rng,
) -> Result<AttackReport> {
    assert!(budget >= backend.challenge_len() as u64 + 1);
    let mut oracle = VerdictOracle::new(budget, |x: &[u8], p: &QmaProof| {
        protocol::verify(crs, pvk, svk, x, p, backend, nizk_oracle)
    });

    // an honest proof of the yes-instance: its π_P is the only certified
    // NIZK material the adversary can obtain
    let honest = protocol::prove(
        crs, pvk, x_yes, wit, backend, nizk_kind, nizk_oracle, rng,
    )?;
    let ProveOutcome::Proof(honest) = honest else {
        return Err(Error::malformed("attack harness", "honest prover aborted"));
    };

    // phase 1: the bit-decoding strategy, transplanted verbatim
    let mut beta_hat = Bits::new();
    for i in 0..backend.challenge_len() {
        let r = backend.sample_randomness(x_yes, wit, rng)?;
        let alpha = backend.p1(x_yes, wit, &r)?;
        // forced response under the real c_V: inputs are PRF-key bits, so
        // splice the forced selector into the honest prover circuit by
        // computing β = PRF(key) then muxing with bit i zeroed
        let evc_p = fhe_eval(
            &forced_prover_circuit(backend, x_yes, &r, i, pvk.c_v.arity),
            &pvk.c_v,
            rng,
        )?;
        let c_rxi = crate::primitives::pke::encrypt(crs.lambda, &crs.ek, &r.to_bytes(), rng)?;
        let probe = QmaProof {
            alpha,
            evc_p,
            c_rxi,
            pi_p: honest.pi_p.clone(), // replay: best available certificate
        };
        let accept = oracle.query(x_yes, &probe)?;
        beta_hat.push(if accept { 0 } else { 1 });
    }
    let decoded = beta_hat == svk.prfk.eval(x_yes);

    // phase 2: forgery on the no-instance under the decoded guess
    let (alpha, gamma) = backend.simulate(x_no, &beta_hat, rng)?;
    let evc_p = fhe_eval(
        &build_const_circuit(&gamma, pvk.c_v.arity as u32),
        &pvk.c_v,
        rng,
    )?;
    let zero = vec![0u8; backend.randomness_len().div_ceil(8)];
    let c_rxi = crate::primitives::pke::encrypt(crs.lambda, &crs.ek, &zero, rng)?;
    let forged = QmaProof {
        alpha,
        evc_p,
        c_rxi,
        pi_p: honest.pi_p.clone(),
    };
    let fail_stage = verify_stages(crs, pvk, svk, x_no, &forged, backend, nizk_oracle);
    let queries = oracle.queries();
    let forged_accepted = oracle.query(x_no, &forged)?;
    Ok(AttackReport {
        experiment: "attack_fixed".into(),
        seed,
        k: backend.challenge_len(),
        queries: queries + 1,
        decoded,
        forged_accepted,
        fail_stage: Some(fail_stage),
    })
}

/// The fixed-protocol analog of [`response_circuit`]: input is the PRF key;
/// compute β = PRF(key, x), zero out challenge bit `forced`, then select
/// the response from the tape.
fn forced_prover_circuit(
    backend: &dyn SigmaBackend,
    x: &[u8],
    r: &Bits,
    forced: usize,
    key_bits: usize,
) -> Circuit {
    let mut b = Builder::new(key_bits as u32);
    let key_w: Vec<Wire> = (0..key_bits as Wire).collect();
    let msg_w = b.constants(&Bits::from_bytes(x));
    let mut beta = crate::primitives::prf::compile(&mut b, &key_w, &msg_w, backend.challenge_len());
    beta[forced] = b.constant(0);
    let r_w = b.constants(r);
    let gamma = backend.compile_p3(&mut b, &beta, &r_w);
    b.finish(gamma)
}

/// Soundness baseline: a witness-less prover guessing the challenge fresh
/// each trial against the naive protocol. Expected accept rate 2^-k.
pub fn random_guess_prover(
    keys: &NaiveKeys,
    backend: &dyn SigmaBackend,
    x_no: &[u8],
    trials: usize,
    rng: &mut impl RngCore,
) -> Result<u64> {
    let mut accepted = 0;
    for _ in 0..trials {
        let guess = Bits::random(backend.challenge_len(), rng);
        let proof = forge_proof(&keys.pvk, backend, &guess, x_no, rng)?;
        if naive_verify(keys, backend, x_no, &proof) {
            accepted += 1;
        }
    }
    Ok(accepted)
}
