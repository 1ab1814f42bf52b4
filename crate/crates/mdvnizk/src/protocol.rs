//! The compiled protocol: Setup, VSetup, Prove, Verify, and the
//! zero-knowledge simulator.
//!
//! This is the compiler's output, generic over a [`SigmaBackend`]: the
//! verifier publishes an FHE encryption of a PRF key; the prover evaluates,
//! under that encryption, the circuit mapping the PRF key to its sigma
//! response for the instance-dependent challenge β_x = PRF_k(x). The PRF
//! makes the challenge a deterministic function of the instance, which is
//! what defeats the bit-by-bit challenge-decoding attack on the naive
//! "encrypt β directly" variant (see the `adversaries` module). Two NIZK
//! proofs keep both sides honest: π_V that the verifier's key material is
//! well-formed, π_P that the prover's evaluated ciphertext was produced by a
//! legitimate response circuit.
//!
//! The simulator re-derives the verifier's secrets from c_rV with the PKE
//! secret key hidden in the simulated CRS, runs the sigma simulator, and
//! injects the simulated response as a constant circuit.

use rand::RngCore;

use crate::bits::Bits;
use crate::circuits::build_const_circuit;
use crate::error::{Error, Result};
use crate::fhe::{transparent, FheBackend, FheCiphertext, FheSecretKey, DEFAULT_BOUND};
use crate::nizk::relation::{
    build_prover_circuit, relation_check_p, relation_check_v, RelPStatement, RelPWitness,
    RelVStatement, RelVWitness, VSetupTape,
};
use crate::nizk::{
    nizk_prove, nizk_setup, nizk_sim_prove, nizk_sim_setup, nizk_verify, NizkBackendKind, NizkCrs,
    NizkProof, NizkTrapdoor, ProgrammableOracle,
};
use crate::primitives::pke::{self, PkeCiphertext, PkeSecretKey, COIN_LEN};
use crate::primitives::prf::PrfKey;
use crate::sigma::SigmaBackend;
use crate::wire::{put_frame, put_varint, Reader};

/// The common random string: a NIZK crs plus a uniform string ek that
/// doubles as a PKE public key (honest setup samples it uniformly; the
/// simulator plants a real key with the same distribution of lengths).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crs {
    pub lambda: usize,
    pub nizk_crs: NizkCrs,
    pub ek: Vec<u8>,
}

#[derive(Clone, Debug)]
pub struct PublicVerKey {
    pub c_v: FheCiphertext,
    pub c_rv: PkeCiphertext,
    pub pi_v: NizkProof,
}

#[derive(Clone, Debug)]
pub struct SecretVerKey {
    pub prfk: PrfKey,
    pub fhek: FheSecretKey,
}

#[derive(Clone, Debug)]
pub struct QmaProof {
    pub alpha: Vec<u8>,
    pub evc_p: FheCiphertext,
    pub c_rxi: PkeCiphertext,
    pub pi_p: NizkProof,
}

/// Simulator trapdoor: the oracle-programming right plus the PKE secret key
/// matching the planted ek.
pub struct Trapdoor {
    pub td: NizkTrapdoor,
    pub sk: PkeSecretKey,
}

/// Prover outcome: a distinguished abort when the verifier's key fails
/// validation, per the protocol ("aborts otherwise").
#[derive(Clone, Debug)]
pub enum ProveOutcome {
    Proof(QmaProof),
    Abort,
}

impl ProveOutcome {
    pub fn into_proof(self) -> Option<QmaProof> {
        match self {
            ProveOutcome::Proof(p) => Some(p),
            ProveOutcome::Abort => None,
        }
    }
}

/// Setup: both crs components are plain uniform strings.
pub fn setup(lambda: usize, rng: &mut (impl RngCore + ?Sized)) -> Crs {
    assert!(lambda >= 16);
    let nizk_crs = nizk_setup(lambda, rng);
    let mut ek = vec![0u8; pke::PkeParams::new(lambda).pk_len()];
    rng.fill_bytes(&mut ek);
    Crs {
        lambda,
        nizk_crs,
        ek,
    }
}

fn rel_v_statement(crs: &Crs, pvk: &PublicVerKey) -> RelVStatement {
    RelVStatement {
        c_v: pvk.c_v.clone(),
        c_rv: pvk.c_rv.clone(),
        ek: crs.ek.clone(),
    }
}

/// VSetup: sample the PRF and FHE keys from an explicit randomness tape,
/// encrypt the PRF key under the FHE, encrypt the tape under ek, and prove
/// the whole bundle consistent.
pub fn vsetup(
    crs: &Crs,
    backend: &dyn SigmaBackend,
    nizk_kind: NizkBackendKind,
    oracle: &ProgrammableOracle,
    rng: &mut (impl RngCore + ?Sized),
) -> Result<(PublicVerKey, SecretVerKey)> {
    let lambda = crs.lambda;
    let fhek = {
        let mut material = vec![0u8; 16];
        rng.fill_bytes(&mut material);
        FheSecretKey {
            backend: FheBackend::Transparent,
            lambda,
            bound: DEFAULT_BOUND,
            material,
        }
    };
    let mut fhe_nonce = [0u8; transparent::NONCE_LEN];
    rng.fill_bytes(&mut fhe_nonce);
    let tape = VSetupTape {
        r_prf: Bits::random(lambda, rng),
        fhe_material: fhek.material.clone(),
        fhe_nonce,
    };
    let prfk = PrfKey::from_tape(&tape.r_prf, backend.challenge_len());
    let c_v = FheCiphertext {
        backend: FheBackend::Transparent,
        lambda,
        bound: DEFAULT_BOUND,
        arity: tape.r_prf.len(),
        payload: transparent::encrypt(&tape.r_prf, &tape.fhe_nonce),
    };
    let mut coins = [0u8; COIN_LEN];
    rng.fill_bytes(&mut coins);
    let c_rv = pke::encrypt_with_coins(lambda, &crs.ek, &tape.encode(), &coins)?;

    let stmt = RelVStatement {
        c_v: c_v.clone(),
        c_rv: c_rv.clone(),
        ek: crs.ek.clone(),
    };
    let wit = RelVWitness { tape, coins };
    if !relation_check_v(&stmt, &wit) {
        return Err(Error::InvalidWitness("vsetup relation check failed".into()));
    }
    let pi_v = nizk_prove(
        nizk_kind,
        &crs.nizk_crs,
        oracle,
        &stmt.to_statement()?,
        &wit.circuit_input(),
        rng,
    )?;
    Ok((
        PublicVerKey { c_v, c_rv, pi_v },
        SecretVerKey { prfk, fhek },
    ))
}

/// Is the verifier's published key bundle accepted? (The prover-side check
/// that gates proving.)
pub fn check_pvk(crs: &Crs, pvk: &PublicVerKey, oracle: &ProgrammableOracle) -> bool {
    match rel_v_statement(crs, pvk).to_statement() {
        Ok(stmt) => nizk_verify(&crs.nizk_crs, oracle, &stmt, &pvk.pi_v),
        Err(_) => false,
    }
}

/// Prove: abort if π_V is invalid; otherwise run the sigma prover with the
/// response computed under the verifier's FHE encryption.
pub fn prove(
    crs: &Crs,
    pvk: &PublicVerKey,
    x: &[u8],
    wit: &[u8],
    backend: &dyn SigmaBackend,
    nizk_kind: NizkBackendKind,
    oracle: &ProgrammableOracle,
    rng: &mut (impl RngCore + ?Sized),
) -> Result<ProveOutcome> {
    if !check_pvk(crs, pvk, oracle) {
        return Ok(ProveOutcome::Abort);
    }
    let r_xi = backend.sample_randomness(x, wit, &mut AsDyn(rng))?;
    let alpha = backend.p1(x, wit, &r_xi)?;
    let circuit = build_prover_circuit(x, &r_xi, backend, pvk.c_v.arity);
    let evc_p = crate::fhe::fhe_eval(&circuit, &pvk.c_v, &mut AsDyn(rng))?;
    let eval_nonce = transparent::nonce_of(&evc_p.payload)?;
    let mut coins = [0u8; COIN_LEN];
    rng.fill_bytes(&mut coins);
    let c_rxi = pke::encrypt_with_coins(crs.lambda, &crs.ek, &r_xi.to_bytes(), &coins)?;

    let stmt = RelPStatement {
        evc_p: evc_p.clone(),
        c_rxi: c_rxi.clone(),
        ek: crs.ek.clone(),
        c_v: pvk.c_v.clone(),
    };
    let p_wit = RelPWitness {
        x: x.to_vec(),
        r_xi,
        eval_nonce,
        coins,
    };
    if !relation_check_p(&stmt, backend, &p_wit) {
        return Err(Error::InvalidWitness("prove relation check failed".into()));
    }
    let pi_p = nizk_prove(
        nizk_kind,
        &crs.nizk_crs,
        oracle,
        &stmt.to_statement(backend, x.len())?,
        &p_wit.circuit_input(),
        rng,
    )?;
    Ok(ProveOutcome::Proof(QmaProof {
        alpha,
        evc_p,
        c_rxi,
        pi_p,
    }))
}

/// Verify: π_P plus the sigma verdict under the instance-dependent
/// challenge β_x = PRF_k(x) and the decrypted response γ.
pub fn verify(
    crs: &Crs,
    pvk: &PublicVerKey,
    svk: &SecretVerKey,
    x: &[u8],
    proof: &QmaProof,
    backend: &dyn SigmaBackend,
    oracle: &ProgrammableOracle,
) -> bool {
    let stmt = RelPStatement {
        evc_p: proof.evc_p.clone(),
        c_rxi: proof.c_rxi.clone(),
        ek: crs.ek.clone(),
        c_v: pvk.c_v.clone(),
    };
    let Ok(statement) = stmt.to_statement(backend, x.len()) else {
        return false;
    };
    if !nizk_verify(&crs.nizk_crs, oracle, &statement, &proof.pi_p) {
        return false;
    }
    let beta_x = svk.prfk.eval(x);
    let Ok(gamma) = crate::fhe::fhe_dec(&svk.fhek, &proof.evc_p) else {
        return false;
    };
    backend.verify(x, &proof.alpha, &beta_x, &gamma)
}

/// Simulated setup: the NIZK crs comes from the NIZK simulator and ek is a
/// real PKE public key whose secret key joins the trapdoor.
pub fn sim_setup(lambda: usize, rng: &mut (impl RngCore + ?Sized)) -> (Crs, Trapdoor) {
    assert!(lambda >= 16);
    let (nizk_crs, td) = nizk_sim_setup(lambda, rng);
    let kp = pke::generate(lambda, &mut AsDyn(rng));
    (
        Crs {
            lambda,
            nizk_crs,
            ek: kp.pk,
        },
        Trapdoor { td, sk: kp.sk },
    )
}

/// Adapter: the pke module takes `impl RngCore`, our callers hold
/// `&mut (impl RngCore + ?Sized)`.
struct AsDyn<'a, R: RngCore + ?Sized>(&'a mut R);

impl<R: RngCore + ?Sized> RngCore for AsDyn<'_, R> {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.0.try_fill_bytes(dest)
    }
}

/// Witnessless proof simulation. Returns `None` (the protocol's ⊥) if π_V
/// fails or the key material decrypted from c_rV does not re-derive c_V.
pub fn sim_prove(
    crs: &Crs,
    td: &Trapdoor,
    pvk: &PublicVerKey,
    x: &[u8],
    backend: &dyn SigmaBackend,
    oracle: &mut ProgrammableOracle,
    rng: &mut (impl RngCore + ?Sized),
) -> Result<Option<QmaProof>> {
    if !check_pvk(crs, pvk, oracle) {
        return Ok(None);
    }
    // step (a): recover the verifier's setup randomness and re-derive the
    // key material; any mismatch means a malicious pvk
    let Ok(r_v_bytes) = pke::decrypt(&td.sk, &pvk.c_rv) else {
        return Ok(None);
    };
    let Ok(tape) = VSetupTape::decode(&r_v_bytes) else {
        return Ok(None);
    };
    let expected_payload = transparent::encrypt(&tape.r_prf, &tape.fhe_nonce);
    if pvk.c_v.payload != expected_payload
        || pvk.c_v.arity != tape.r_prf.len()
        || pvk.c_v.lambda != crs.lambda
    {
        return Ok(None);
    }
    let prfk = PrfKey::from_tape(&tape.r_prf, backend.challenge_len());

    // steps (b)-(c): sigma-simulate for the decoded challenge and inject
    // the simulated response as a constant circuit
    let beta_x = prfk.eval(x);
    let (alpha, gamma) = backend.simulate(x, &beta_x, &mut AsDyn(rng))?;
    let evc_p = crate::fhe::fhe_eval(
        &build_const_circuit(&gamma, pvk.c_v.arity as u32),
        &pvk.c_v,
        &mut AsDyn(rng),
    )?;

    // step (d): c_rΞ encrypts the all-zero string of the tape length
    let zero_len = backend.randomness_len().div_ceil(8);
    let c_rxi = pke::encrypt(crs.lambda, &crs.ek, &vec![0u8; zero_len], &mut AsDyn(rng))?;

    // step (e): simulate π_P by programming the oracle
    let stmt = RelPStatement {
        evc_p: evc_p.clone(),
        c_rxi: c_rxi.clone(),
        ek: crs.ek.clone(),
        c_v: pvk.c_v.clone(),
    };
    let pi_p = nizk_sim_prove(&td.td, oracle, &stmt.to_statement(backend, x.len())?, rng)?;
    Ok(Some(QmaProof {
        alpha,
        evc_p,
        c_rxi,
        pi_p,
    }))
}

impl Crs {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"CRS1");
        put_varint(&mut out, self.lambda as u64);
        out.extend_from_slice(&self.nizk_crs.encode());
        put_frame(&mut out, &self.ek);
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes, "crs");
        r.tag(b"CRS1")?;
        let lambda = r.usize()?;
        let nizk_crs = NizkCrs::decode_from(&mut r)?;
        let ek = r.frame()?.to_vec();
        r.finish()?;
        if ek.len() != pke::PkeParams::new(lambda).pk_len() {
            return Err(Error::malformed("crs", "ek length does not match λ"));
        }
        Ok(Crs {
            lambda,
            nizk_crs,
            ek,
        })
    }
}

impl PublicVerKey {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"PVK1");
        out.extend_from_slice(&self.c_v.encode());
        out.extend_from_slice(&self.c_rv.encode());
        out.extend_from_slice(&self.pi_v.encode());
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes, "pvk");
        r.tag(b"PVK1")?;
        let c_v = FheCiphertext::decode_from(&mut r)?;
        let c_rv = PkeCiphertext::decode_from(&mut r)?;
        let pi_v = NizkProof::decode_from(&mut r)?;
        r.finish()?;
        Ok(PublicVerKey { c_v, c_rv, pi_v })
    }
}

impl SecretVerKey {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"SVK1");
        out.extend_from_slice(&self.prfk.encode());
        out.extend_from_slice(&self.fhek.encode());
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes, "svk");
        r.tag(b"SVK1")?;
        let prfk = PrfKey::decode_from(&mut r)?;
        let fhek = FheSecretKey::decode_from(&mut r)?;
        r.finish()?;
        Ok(SecretVerKey { prfk, fhek })
    }
}

impl QmaProof {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"QPF1");
        put_frame(&mut out, &self.alpha);
        out.extend_from_slice(&self.evc_p.encode());
        out.extend_from_slice(&self.c_rxi.encode());
        out.extend_from_slice(&self.pi_p.encode());
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes, "proof");
        r.tag(b"QPF1")?;
        let alpha = r.frame()?.to_vec();
        let evc_p = FheCiphertext::decode_from(&mut r)?;
        let c_rxi = PkeCiphertext::decode_from(&mut r)?;
        let pi_p = NizkProof::decode_from(&mut r)?;
        r.finish()?;
        Ok(QmaProof {
            alpha,
            evc_p,
            c_rxi,
            pi_p,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::cldm::{bell_instance, CldmBackend};
    use crate::rng;
    use crate::sigma::ham::{HamBackend, HamInstance};

    const LAMBDA: usize = 16;

    fn ham_backend() -> HamBackend {
        HamBackend::new(4, 4, LAMBDA)
    }

    fn session(
        seed: u64,
    ) -> (
        Crs,
        PublicVerKey,
        SecretVerKey,
        HamBackend,
        ProgrammableOracle,
        crate::rng::Rng,
    ) {
        let mut r = rng::stream(&rng::root_from_u64(seed), "protocol.test");
        let backend = ham_backend();
        let oracle = ProgrammableOracle::new();
        let crs = setup(LAMBDA, &mut r);
        let (pvk, svk) = vsetup(&crs, &backend, NizkBackendKind::Mpcith, &oracle, &mut r).unwrap();
        (crs, pvk, svk, backend, oracle, r)
    }

    #[test]
    fn setup_contract() {
        let mut r = rng::stream(&rng::root_from_u64(1), "protocol.setup");
        let a = setup(LAMBDA, &mut r);
        let b = setup(LAMBDA, &mut r);
        assert_eq!(a.ek.len(), pke::PkeParams::new(LAMBDA).pk_len());
        assert_ne!(a, b);
        assert_eq!(Crs::decode(&a.encode()).unwrap(), a);
    }

    #[test]
    fn vsetup_contract_and_reexecution() {
        let (crs, pvk, svk, _, oracle, _) = session(2);
        assert!(check_pvk(&crs, &pvk, &oracle));
        // c_V round-trips to the PRF key under fhek
        assert_eq!(
            crate::fhe::fhe_dec(&svk.fhek, &pvk.c_v).unwrap(),
            svk.prfk.key_bits
        );
        // under a simulated crs (real ek), c_rV decrypts to a tape that
        // re-derives identical key material
        let mut r = rng::stream(&rng::root_from_u64(20), "protocol.reexec");
        let backend = ham_backend();
        let oracle = ProgrammableOracle::new();
        let (crs, td) = sim_setup(LAMBDA, &mut r);
        let (pvk, svk) = vsetup(&crs, &backend, NizkBackendKind::Mpcith, &oracle, &mut r).unwrap();
        let tape = VSetupTape::decode(&pke::decrypt(&td.sk, &pvk.c_rv).unwrap()).unwrap();
        assert_eq!(tape.r_prf, svk.prfk.key_bits);
        assert_eq!(tape.fhe_material, svk.fhek.material);
        assert_eq!(
            transparent::encrypt(&tape.r_prf, &tape.fhe_nonce),
            pvk.c_v.payload
        );
    }

    #[test]
    fn end_to_end_completeness_ham() {
        let (crs, pvk, svk, backend, oracle, mut r) = session(3);
        for _ in 0..5 {
            let (inst, wit) = HamInstance::random_ham(4, &mut r);
            let out = prove(
                &crs,
                &pvk,
                &inst.encode(),
                &wit.encode(),
                &backend,
                NizkBackendKind::Mpcith,
                &oracle,
                &mut r,
            )
            .unwrap();
            let proof = out.into_proof().expect("honest pvk must not abort");
            // composition: evc_P decrypts to the sigma response for β_x
            let gamma = crate::fhe::fhe_dec(&svk.fhek, &proof.evc_p).unwrap();
            let beta_x = svk.prfk.eval(&inst.encode());
            assert!(backend.verify(&inst.encode(), &proof.alpha, &beta_x, &gamma));
            assert!(verify(&crs, &pvk, &svk, &inst.encode(), &proof, &backend, &oracle));
            assert_eq!(
                QmaProof::decode(&proof.encode()).unwrap().encode(),
                proof.encode()
            );
        }
    }

    #[test]
    fn end_to_end_completeness_cldm() {
        let mut r = rng::stream(&rng::root_from_u64(4), "protocol.cldm");
        let (instance, wit) = bell_instance(0.01);
        let backend = CldmBackend::new(&instance, 2, LAMBDA);
        let oracle = ProgrammableOracle::new();
        let crs = setup(LAMBDA, &mut r);
        let (pvk, svk) = vsetup(&crs, &backend, NizkBackendKind::Mpcith, &oracle, &mut r).unwrap();
        let out = prove(
            &crs,
            &pvk,
            &instance.encode(),
            &wit.encode(),
            &backend,
            NizkBackendKind::Mpcith,
            &oracle,
            &mut r,
        )
        .unwrap();
        let proof = out.into_proof().unwrap();
        assert!(verify(&crs, &pvk, &svk, &instance.encode(), &proof, &backend, &oracle));
    }

    #[test]
    fn replay_against_other_instance_rejected() {
        let (crs, pvk, svk, backend, oracle, mut r) = session(5);
        let (inst, wit) = HamInstance::random_ham(4, &mut r);
        let proof = prove(
            &crs,
            &pvk,
            &inst.encode(),
            &wit.encode(),
            &backend,
            NizkBackendKind::Mpcith,
            &oracle,
            &mut r,
        )
        .unwrap()
        .into_proof()
        .unwrap();
        let mut rejected = 0;
        let mut trials = 0;
        while trials < 20 {
            let (inst2, _) = HamInstance::random_ham(4, &mut r);
            if inst2.encode() == inst.encode() {
                continue;
            }
            trials += 1;
            if !verify(&crs, &pvk, &svk, &inst2.encode(), &proof, &backend, &oracle) {
                rejected += 1;
            }
        }
        assert!(rejected >= 19, "replays accepted: {}", 20 - rejected);
        // the NIZK itself still accepts: the statement does not mention x,
        // so replays die only at the sigma check
        let stmt = RelPStatement {
            evc_p: proof.evc_p.clone(),
            c_rxi: proof.c_rxi.clone(),
            ek: crs.ek.clone(),
            c_v: pvk.c_v.clone(),
        };
        let statement = stmt.to_statement(&backend, inst.encode().len()).unwrap();
        assert!(nizk_verify(&crs.nizk_crs, &oracle, &statement, &proof.pi_p));
    }

    #[test]
    fn mutated_pvk_causes_abort() {
        let (crs, pvk, _, backend, oracle, mut r) = session(6);
        let (inst, wit) = HamInstance::random_ham(4, &mut r);
        let mut bad = pvk.clone();
        bad.pi_v.payload[0] ^= 1;
        let out = prove(
            &crs,
            &bad,
            &inst.encode(),
            &wit.encode(),
            &backend,
            NizkBackendKind::Mpcith,
            &oracle,
            &mut r,
        )
        .unwrap();
        assert!(matches!(out, ProveOutcome::Abort));
    }

    #[test]
    fn reusability_one_key_many_proofs() {
        let (crs, pvk, svk, backend, oracle, mut r) = session(7);
        for _ in 0..10 {
            let (inst, wit) = HamInstance::random_ham(4, &mut r);
            let proof = prove(
                &crs,
                &pvk,
                &inst.encode(),
                &wit.encode(),
                &backend,
                NizkBackendKind::Mpcith,
                &oracle,
                &mut r,
            )
            .unwrap()
            .into_proof()
            .unwrap();
            assert!(verify(&crs, &pvk, &svk, &inst.encode(), &proof, &backend, &oracle));
        }
    }

    #[test]
    fn challenge_instance_separation() {
        // at the default repetition count the challenge is 16 bits, so
        // distinct instances collide with probability 2^-16
        let mut r = rng::stream(&rng::root_from_u64(8), "protocol.sep");
        let prfk = PrfKey::generate(LAMBDA, 16, &mut r);
        let mut distinct = 0;
        for _ in 0..100 {
            let (a, _) = HamInstance::random_ham(4, &mut r);
            let (b, _) = HamInstance::random_ham(4, &mut r);
            if a.encode() == b.encode() || prfk.eval(&a.encode()) != prfk.eval(&b.encode()) {
                distinct += 1;
            }
        }
        assert!(distinct >= 99, "challenge collisions: {}", 100 - distinct);
    }

    #[test]
    fn sim_setup_matches_honest_format() {
        let mut r = rng::stream(&rng::root_from_u64(9), "protocol.simsetup");
        let honest = setup(LAMBDA, &mut r);
        let (sim, td) = sim_setup(LAMBDA, &mut r);
        assert_eq!(honest.ek.len(), sim.ek.len());
        assert_eq!(honest.encode().len(), sim.encode().len());
        assert_eq!(Crs::decode(&sim.encode()).unwrap(), sim);
        // planted ek is a working PKE key
        let ct = pke::encrypt(LAMBDA, &sim.ek, b"probe", &mut r).unwrap();
        assert_eq!(pke::decrypt(&td.sk, &ct).unwrap(), b"probe");
    }

    #[test]
    fn sim_prove_accepts_and_matches_structure() {
        let mut r = rng::stream(&rng::root_from_u64(10), "protocol.simprove");
        let backend = ham_backend();
        let (crs, td) = sim_setup(LAMBDA, &mut r);
        let oracle = ProgrammableOracle::new();
        let (pvk, svk) = vsetup(&crs, &backend, NizkBackendKind::Mpcith, &oracle, &mut r).unwrap();
        let (inst, wit) = HamInstance::random_ham(4, &mut r);

        let mut sim_oracle = ProgrammableOracle::new();
        let sim_proof = sim_prove(
            &crs,
            &td,
            &pvk,
            &inst.encode(),
            &backend,
            &mut sim_oracle,
            &mut r,
        )
        .unwrap()
        .expect("honest pvk must simulate");
        assert!(verify(
            &crs,
            &pvk,
            &svk,
            &inst.encode(),
            &sim_proof,
            &backend,
            &sim_oracle
        ));

        // field-by-field length equality with a real proof
        let real = prove(
            &crs,
            &pvk,
            &inst.encode(),
            &wit.encode(),
            &backend,
            NizkBackendKind::Mpcith,
            &oracle,
            &mut r,
        )
        .unwrap()
        .into_proof()
        .unwrap();
        assert_eq!(real.alpha.len(), sim_proof.alpha.len());
        assert_eq!(real.evc_p.encode().len(), sim_proof.evc_p.encode().len());
        assert_eq!(real.c_rxi.encode().len(), sim_proof.c_rxi.encode().len());
        assert_eq!(real.pi_p.encode().len(), sim_proof.pi_p.encode().len());
    }

    #[test]
    fn sim_prove_rejects_mismatched_pvk() {
        let mut r = rng::stream(&rng::root_from_u64(11), "protocol.simrej");
        let backend = ham_backend();
        let (crs, td) = sim_setup(LAMBDA, &mut r);
        let oracle = ProgrammableOracle::new();
        let (pvk, _) = vsetup(&crs, &backend, NizkBackendKind::Mpcith, &oracle, &mut r).unwrap();
        let (inst, _) = HamInstance::random_ham(4, &mut r);

        // c_V swapped for an encryption of a different key: π_V no longer
        // verifies (the statement changed), so simulation refuses
        let mut bad = pvk.clone();
        let other = Bits::random(LAMBDA, &mut r);
        let mut nonce = [0u8; transparent::NONCE_LEN];
        r.fill_bytes(&mut nonce);
        bad.c_v.payload = transparent::encrypt(&other, &nonce);
        let mut o = ProgrammableOracle::new();
        assert!(sim_prove(&crs, &td, &bad, &inst.encode(), &backend, &mut o, &mut r)
            .unwrap()
            .is_none());

        // c_rV encrypting a tape that derives different key material, with
        // π_V itself simulated so it verifies: the re-derivation check must
        // still catch the mismatch
        let mut bad = pvk.clone();
        let wrong_tape = VSetupTape {
            r_prf: Bits::random(LAMBDA, &mut r),
            fhe_material: vec![0u8; 16],
            fhe_nonce: [0u8; transparent::NONCE_LEN],
        };
        bad.c_rv = pke::encrypt(LAMBDA, &crs.ek, &wrong_tape.encode(), &mut r).unwrap();
        let mut o = ProgrammableOracle::new();
        let stmt = RelVStatement {
            c_v: bad.c_v.clone(),
            c_rv: bad.c_rv.clone(),
            ek: crs.ek.clone(),
        };
        bad.pi_v =
            nizk_sim_prove(&td.td, &mut o, &stmt.to_statement().unwrap(), &mut r).unwrap();
        assert!(check_pvk(&crs, &bad, &o), "simulated π_V must verify");
        assert!(sim_prove(&crs, &td, &bad, &inst.encode(), &backend, &mut o, &mut r)
            .unwrap()
            .is_none());
    }

    #[test]
    fn key_codecs_round_trip() {
        let (_, pvk, svk, _, _, _) = session(12);
        assert_eq!(PublicVerKey::decode(&pvk.encode()).unwrap().encode(), pvk.encode());
        assert_eq!(SecretVerKey::decode(&svk.encode()).unwrap().encode(), svk.encode());
    }
}
