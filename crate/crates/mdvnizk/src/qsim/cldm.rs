//! Consistency-of-Local-Density-Matrices sigma protocol on the toy
//! density-matrix simulator.
//!
//! The prover holds an n-qubit witness state; the instance is a list of
//! constraints (S_j, ρ_j, δ_j) claiming the reduced state on qubit subset
//! S_j is within trace distance δ_j of ρ_j. Per repetition the prover sends
//! the quantum-one-time-padded witness plus per-qubit commitments to the pad
//! bits; the challenge selects one constraint; the response opens the pads
//! on that constraint's qubits. The verifier un-pads those qubits, traces
//! down to S_j and checks the trace distance.
//!
//! As with the Hamiltonicity backend, the third message is a pure selection
//! over a structured randomness tape: the tape pre-lays one opening block
//! per possible challenge value, so `p3` (and its circuit compilation) is a
//! multiplexer and never touches the quantum state.

use rand::RngCore;

use crate::bits::Bits;
use crate::circuits::{Builder, Wire};
use crate::error::{Error, Result};
use crate::primitives::commit::{self, COM_LEN};
use crate::qsim::{
    apply_qotp, embed, partial_trace, trace_distance, DensityMatrix, QState, MAX_QUBITS,
};
use crate::sigma::SigmaBackend;
use crate::wire::{put_frame, put_varint, Reader};
use num_complex::Complex64;

/// Numerical slack added to every trace-distance acceptance threshold.
pub const DELTA_SLACK: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct CldmConstraint {
    /// Strictly increasing qubit subset S_j.
    pub qubits: Vec<usize>,
    /// Target reduced density matrix on |S_j| qubits.
    pub target: DensityMatrix,
    /// Trace-distance tolerance δ_j.
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CldmInstance {
    pub n: usize,
    pub constraints: Vec<CldmConstraint>,
}

impl CldmInstance {
    pub fn new(n: usize, constraints: Vec<CldmConstraint>) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::malformed("cldm instance", "qubit count"));
        }
        if constraints.is_empty() {
            return Err(Error::malformed("cldm instance", "no constraints"));
        }
        for con in &constraints {
            if con.qubits.is_empty()
                || con.qubits.windows(2).any(|w| w[0] >= w[1])
                || con.qubits.iter().any(|&q| q >= n)
            {
                return Err(Error::malformed("cldm instance", "constraint qubit set"));
            }
            if con.target.nrows() != 1 << con.qubits.len() {
                return Err(Error::malformed("cldm instance", "target dimension"));
            }
            crate::qsim::check_density(&con.target)?;
            if !(0.0..=1.0).contains(&con.delta) {
                return Err(Error::malformed("cldm instance", "delta out of range"));
            }
        }
        Ok(CldmInstance { n, constraints })
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"CLD1");
        put_varint(&mut out, self.n as u64);
        put_varint(&mut out, self.constraints.len() as u64);
        for con in &self.constraints {
            put_varint(&mut out, con.qubits.len() as u64);
            for &q in &con.qubits {
                put_varint(&mut out, q as u64);
            }
            out.extend_from_slice(&con.delta.to_le_bytes());
            let d = con.target.nrows();
            for r in 0..d {
                for c in 0..d {
                    let z = con.target[(r, c)];
                    out.extend_from_slice(&z.re.to_le_bytes());
                    out.extend_from_slice(&z.im.to_le_bytes());
                }
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes, "cldm instance");
        r.tag(b"CLD1")?;
        let n = r.usize()?;
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::malformed("cldm instance", "qubit count"));
        }
        let m = r.usize()?;
        let mut constraints = Vec::with_capacity(m);
        for _ in 0..m {
            let s = r.usize()?;
            if s > n {
                return Err(Error::malformed("cldm instance", "subset larger than n"));
            }
            let mut qubits = Vec::with_capacity(s);
            for _ in 0..s {
                qubits.push(r.usize()?);
            }
            let delta = f64::from_le_bytes(r.bytes(8)?.try_into().unwrap());
            let d = 1usize << s;
            let mut target = DensityMatrix::zeros(d, d);
            for row in 0..d {
                for col in 0..d {
                    let re = f64::from_le_bytes(r.bytes(8)?.try_into().unwrap());
                    let im = f64::from_le_bytes(r.bytes(8)?.try_into().unwrap());
                    target[(row, col)] = Complex64::new(re, im);
                }
            }
            constraints.push(CldmConstraint {
                qubits,
                target,
                delta,
            });
        }
        r.finish()?;
        CldmInstance::new(n, constraints)
    }

    /// Does `state` satisfy every constraint within its tolerance?
    pub fn is_satisfied_by(&self, state: &QState) -> bool {
        state.n() == self.n
            && self.constraints.iter().all(|con| {
                partial_trace(state, &con.qubits)
                    .and_then(|rho| trace_distance(&rho, &con.target))
                    .map(|td| td <= con.delta + DELTA_SLACK)
                    .unwrap_or(false)
            })
    }
}

pub struct CldmBackend {
    n: usize,
    k: usize,
    lambda: usize,
    /// Constraint count; challenges are reduced mod m.
    m: usize,
    /// Challenge bits per repetition: ⌈log2(m)⌉, at least 1.
    c: usize,
}

impl CldmBackend {
    pub fn new(instance: &CldmInstance, k: usize, lambda: usize) -> Self {
        assert!(k >= 1 && lambda >= 16);
        let m = instance.constraints.len();
        let c = (usize::BITS - (m - 1).max(1).leading_zeros()) as usize;
        CldmBackend {
            n: instance.n,
            k,
            lambda,
            m,
            c,
        }
    }

    /// Per-qubit opening slot: pad bits a_i, b_i plus the commitment salt.
    fn slot_len(&self) -> usize {
        2 + self.lambda
    }

    /// One opening block (= per-repetition γ): a slot per qubit, zeroed
    /// outside the selected constraint's subset.
    fn block_len(&self) -> usize {
        self.n * self.slot_len()
    }

    /// Tape layout per repetition:
    /// [a (n) | b (n) | salts (n·λ) | 2^c opening blocks].
    fn rep_r_len(&self) -> usize {
        2 * self.n + self.n * self.lambda + (1 << self.c) * self.block_len()
    }

    fn blocks_off(&self) -> usize {
        2 * self.n + self.n * self.lambda
    }

    fn challenge_index(&self, beta: &Bits, rep: usize) -> usize {
        beta.slice(rep * self.c..(rep + 1) * self.c).to_uint() as usize % self.m
    }
}

/// α codec: "SGC1" ‖ k ‖ n ‖ per repetition: framed padded state, then n
/// pad commitments.
fn encode_alpha(k: usize, n: usize, reps: &[(Vec<u8>, Vec<[u8; COM_LEN]>)]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(b"SGC1");
    put_varint(&mut out, k as u64);
    put_varint(&mut out, n as u64);
    for (state, coms) in reps {
        put_frame(&mut out, state);
        for com in coms {
            out.extend_from_slice(com);
        }
    }
    out
}

#[allow(clippy::type_complexity)]
fn decode_alpha(bytes: &[u8], k: usize, n: usize) -> Result<Vec<(QState, Vec<[u8; COM_LEN]>)>> {
    let mut r = Reader::new(bytes, "cldm alpha");
    r.tag(b"SGC1")?;
    if r.usize()? != k || r.usize()? != n {
        return Err(Error::malformed("cldm alpha", "header mismatch"));
    }
    let mut reps = Vec::with_capacity(k);
    for _ in 0..k {
        let state = QState::decode(r.frame()?)?;
        if state.n() != n {
            return Err(Error::malformed("cldm alpha", "state arity"));
        }
        let mut coms = Vec::with_capacity(n);
        for _ in 0..n {
            coms.push(r.bytes(COM_LEN)?.try_into().unwrap());
        }
        reps.push((state, coms));
    }
    r.finish()?;
    Ok(reps)
}

/// Commitment message for qubit i: the two pad bits in one byte.
fn pad_msg(a: u8, b: u8) -> [u8; 1] {
    [a | (b << 1)]
}

impl SigmaBackend for CldmBackend {
    fn name(&self) -> &'static str {
        "cldm"
    }

    fn randomness_len(&self) -> usize {
        self.k * self.rep_r_len()
    }

    fn challenge_len(&self) -> usize {
        self.k * self.c
    }

    fn gamma_len(&self) -> usize {
        self.k * self.block_len()
    }

    fn sample_randomness(&self, inst: &[u8], _wit: &[u8], rng: &mut dyn RngCore) -> Result<Bits> {
        let instance = CldmInstance::decode(inst)?;
        if instance.n != self.n || instance.constraints.len() != self.m {
            return Err(Error::malformed("cldm tape", "instance shape mismatch"));
        }
        let mut tape = Bits::new();
        for _ in 0..self.k {
            let a = Bits::random(self.n, rng);
            let b = Bits::random(self.n, rng);
            let salts = Bits::random(self.n * self.lambda, rng);
            tape.extend(&a);
            tape.extend(&b);
            tape.extend(&salts);
            for j in 0..1usize << self.c {
                let subset = &instance.constraints[j % self.m].qubits;
                for i in 0..self.n {
                    if subset.contains(&i) {
                        tape.push(a[i]);
                        tape.push(b[i]);
                        tape.extend(&salts.slice(i * self.lambda..(i + 1) * self.lambda));
                    } else {
                        for _ in 0..self.slot_len() {
                            tape.push(0);
                        }
                    }
                }
            }
        }
        Ok(tape)
    }

    fn p1(&self, inst: &[u8], wit: &[u8], r: &Bits) -> Result<Vec<u8>> {
        let instance = CldmInstance::decode(inst)?;
        let witness = QState::decode(wit)?;
        if witness.n() != instance.n || instance.n != self.n {
            return Err(Error::malformed("cldm p1", "witness arity"));
        }
        if r.len() != self.randomness_len() {
            return Err(Error::malformed("cldm p1", "tape length"));
        }
        let mut reps = Vec::with_capacity(self.k);
        for rep in 0..self.k {
            let off = rep * self.rep_r_len();
            let a: Vec<u8> = (0..self.n).map(|i| r[off + i]).collect();
            let b: Vec<u8> = (0..self.n).map(|i| r[off + self.n + i]).collect();
            let salts = r.slice(off + 2 * self.n..off + self.blocks_off());
            let padded = apply_qotp(&witness, &a, &b)?;
            let coms: Vec<[u8; COM_LEN]> = (0..self.n)
                .map(|i| {
                    let salt = salts.slice(i * self.lambda..(i + 1) * self.lambda);
                    commit::commit(&pad_msg(a[i], b[i]), &salt)
                })
                .collect();
            reps.push((padded.encode(), coms));
        }
        Ok(encode_alpha(self.k, self.n, &reps))
    }

    fn p3(&self, beta: &Bits, r: &Bits) -> Bits {
        assert_eq!(beta.len(), self.challenge_len());
        assert_eq!(r.len(), self.randomness_len());
        let mut gamma = Bits::new();
        for rep in 0..self.k {
            let idx = beta.slice(rep * self.c..(rep + 1) * self.c).to_uint() as usize;
            let start = rep * self.rep_r_len() + self.blocks_off() + idx * self.block_len();
            gamma.extend(&r.slice(start..start + self.block_len()));
        }
        gamma
    }

    fn compile_p3(&self, b: &mut Builder, beta: &[Wire], r: &[Wire]) -> Vec<Wire> {
        assert_eq!(beta.len(), self.challenge_len());
        assert_eq!(r.len(), self.randomness_len());
        let mut out = Vec::with_capacity(self.gamma_len());
        for rep in 0..self.k {
            let sel = &beta[rep * self.c..(rep + 1) * self.c];
            let blocks = rep * self.rep_r_len() + self.blocks_off();
            for bit in 0..self.block_len() {
                let entries: Vec<Wire> = (0..1usize << self.c)
                    .map(|j| r[blocks + j * self.block_len() + bit])
                    .collect();
                out.push(b.mux_tree(sel, &entries));
            }
        }
        out
    }

    fn verify(&self, inst: &[u8], alpha: &[u8], beta: &Bits, gamma: &Bits) -> bool {
        let Ok(instance) = CldmInstance::decode(inst) else {
            return false;
        };
        if instance.n != self.n
            || instance.constraints.len() != self.m
            || beta.len() != self.challenge_len()
            || gamma.len() != self.gamma_len()
        {
            return false;
        }
        let Ok(reps) = decode_alpha(alpha, self.k, self.n) else {
            return false;
        };
        for (rep, (state, coms)) in reps.iter().enumerate() {
            let con = &instance.constraints[self.challenge_index(beta, rep)];
            let block = gamma.slice(rep * self.block_len()..(rep + 1) * self.block_len());
            let mut a = vec![0u8; self.n];
            let mut b = vec![0u8; self.n];
            for i in 0..self.n {
                let slot = block.slice(i * self.slot_len()..(i + 1) * self.slot_len());
                if con.qubits.contains(&i) {
                    let (ai, bi) = (slot[0], slot[1]);
                    let salt = slot.slice(2..self.slot_len());
                    if !commit::verify_open(&coms[i], &pad_msg(ai, bi), &salt) {
                        return false;
                    }
                    a[i] = ai;
                    b[i] = bi;
                } else if slot.iter().any(|bit| bit != 0) {
                    // canonical form: unopened slots are zero
                    return false;
                }
            }
            // un-pad the opened qubits; pads on traced-out qubits act
            // locally there and cannot affect the kept marginal
            let Ok(unpadded) = apply_qotp(state, &a, &b) else {
                return false;
            };
            let accept = partial_trace(&unpadded, &con.qubits)
                .and_then(|rho| trace_distance(&rho, &con.target))
                .map(|td| td <= con.delta + DELTA_SLACK)
                .unwrap_or(false);
            if !accept {
                return false;
            }
        }
        true
    }

    fn simulate(
        &self,
        inst: &[u8],
        beta: &Bits,
        rng: &mut dyn RngCore,
    ) -> Result<(Vec<u8>, Bits)> {
        let instance = CldmInstance::decode(inst)?;
        if instance.n != self.n || beta.len() != self.challenge_len() {
            return Err(Error::malformed("cldm simulate", "shape mismatch"));
        }
        let mut reps = Vec::with_capacity(self.k);
        let mut gamma = Bits::new();
        for rep in 0..self.k {
            let con = &instance.constraints[self.challenge_index(beta, rep)];
            // a state consistent with exactly the challenged constraint
            let state = embed(self.n, &con.qubits, &con.target)?;
            let a: Vec<u8> = (0..self.n).map(|_| (rng.next_u32() & 1) as u8).collect();
            let b: Vec<u8> = (0..self.n).map(|_| (rng.next_u32() & 1) as u8).collect();
            let padded = apply_qotp(&state, &a, &b)?;
            let mut coms = Vec::with_capacity(self.n);
            for i in 0..self.n {
                if con.qubits.contains(&i) {
                    let salt = Bits::random(self.lambda, rng);
                    coms.push(commit::commit(&pad_msg(a[i], b[i]), &salt));
                    gamma.push(a[i]);
                    gamma.push(b[i]);
                    gamma.extend(&salt);
                } else {
                    // unopened: a garbage commitment is indistinguishable
                    // from a real one by hiding
                    let mut garbage = [0u8; COM_LEN];
                    rng.fill_bytes(&mut garbage);
                    coms.push(garbage);
                    for _ in 0..self.slot_len() {
                        gamma.push(0);
                    }
                }
            }
            reps.push((padded.encode(), coms));
        }
        Ok((encode_alpha(self.k, self.n, &reps), gamma))
    }
}

/// A small satisfiable demo instance with a Bell-state witness: both
/// single-qubit marginals must be maximally mixed.
pub fn bell_instance(delta: f64) -> (CldmInstance, QState) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bell = QState::from_vector(
        2,
        &[
            Complex64::new(h, 0.0),
            Complex64::ZERO,
            Complex64::ZERO,
            Complex64::new(h, 0.0),
        ],
    )
    .unwrap();
    let mixed = QState::maximally_mixed(1).matrix().clone();
    let instance = CldmInstance::new(
        2,
        vec![
            CldmConstraint {
                qubits: vec![0],
                target: mixed.clone(),
                delta,
            },
            CldmConstraint {
                qubits: vec![1],
                target: mixed,
                delta,
            },
        ],
    )
    .unwrap();
    (instance, bell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::sigma::sigma_challenge;

    const LAMBDA: usize = 16;

    fn setup(k: usize) -> (CldmInstance, QState, CldmBackend) {
        let (instance, wit) = bell_instance(0.01);
        let backend = CldmBackend::new(&instance, k, LAMBDA);
        (instance, wit, backend)
    }

    #[test]
    fn instance_codec_and_satisfaction() {
        let (instance, wit, _) = setup(2);
        assert_eq!(CldmInstance::decode(&instance.encode()).unwrap(), instance);
        assert!(instance.is_satisfied_by(&wit));
        assert!(!instance.is_satisfied_by(&QState::basis(2, 0)));
    }

    #[test]
    fn honest_transcript_accepts_all_challenges() {
        let mut r = rng::stream(&rng::root_from_u64(1), "cldm.complete");
        let (instance, wit, backend) = setup(2);
        let tape = backend
            .sample_randomness(&instance.encode(), &wit.encode(), &mut r)
            .unwrap();
        let alpha = backend.p1(&instance.encode(), &wit.encode(), &tape).unwrap();
        // exhaustive over the 2-bit-per-rep challenge space
        for bval in 0..1u64 << backend.challenge_len() {
            let beta = Bits::from_uint(bval, backend.challenge_len());
            let gamma = backend.p3(&beta, &tape);
            assert!(backend.verify(&instance.encode(), &alpha, &beta, &gamma));
        }
    }

    #[test]
    fn compile_p3_matches_direct() {
        let mut r = rng::stream(&rng::root_from_u64(2), "cldm.compile");
        let (instance, wit, backend) = setup(2);
        let tape = backend
            .sample_randomness(&instance.encode(), &wit.encode(), &mut r)
            .unwrap();
        let mut b = Builder::new((backend.challenge_len() + backend.randomness_len()) as u32);
        let beta_wires: Vec<Wire> = (0..backend.challenge_len() as u32).collect();
        let r_wires: Vec<Wire> = (backend.challenge_len() as u32
            ..(backend.challenge_len() + backend.randomness_len()) as u32)
            .collect();
        let outs = backend.compile_p3(&mut b, &beta_wires, &r_wires);
        let circuit = b.finish(outs);
        for bval in 0..1u64 << backend.challenge_len() {
            let beta = Bits::from_uint(bval, backend.challenge_len());
            let mut input = beta.clone();
            input.extend(&tape);
            assert_eq!(circuit.eval(&input).unwrap(), backend.p3(&beta, &tape));
        }
    }

    #[test]
    fn tampered_transcripts_rejected() {
        let mut r = rng::stream(&rng::root_from_u64(3), "cldm.tamper");
        let (instance, wit, backend) = setup(2);
        let tape = backend
            .sample_randomness(&instance.encode(), &wit.encode(), &mut r)
            .unwrap();
        let alpha = backend.p1(&instance.encode(), &wit.encode(), &tape).unwrap();
        let beta = sigma_challenge(&backend, &mut r);
        let gamma = backend.p3(&beta, &tape);

        // flip an opened pad bit: commitment check fails
        let mut bad = gamma.clone();
        bad[0] ^= 1;
        assert!(!backend.verify(&instance.encode(), &alpha, &beta, &bad));

        // flip a bit in an unopened (zero) slot: canonical-form check fails
        let mut bad = gamma.clone();
        let unopened = (0..backend.gamma_len())
            .find(|&i| {
                let rep = i / backend.block_len();
                let qubit = (i % backend.block_len()) / backend.slot_len();
                let j = backend.challenge_index(&beta, rep);
                !instance.constraints[j].qubits.contains(&qubit)
            })
            .unwrap();
        bad[unopened] ^= 1;
        assert!(!backend.verify(&instance.encode(), &alpha, &beta, &bad));

        // corrupt the padded state: force a nonzero imaginary part on the
        // last diagonal entry so the decoded matrix is not Hermitian
        let mut bad_alpha = alpha.clone();
        let off = bad_alpha.len() - COM_LEN * backend.n - 1;
        bad_alpha[off] ^= 0x40;
        assert!(!backend.verify(&instance.encode(), &bad_alpha, &beta, &gamma));
    }

    #[test]
    fn simulator_contract() {
        let mut r = rng::stream(&rng::root_from_u64(4), "cldm.sim");
        let (instance, _, backend) = setup(2);
        for _ in 0..100 {
            let beta = sigma_challenge(&backend, &mut r);
            let (alpha, gamma) = backend.simulate(&instance.encode(), &beta, &mut r).unwrap();
            assert!(backend.verify(&instance.encode(), &alpha, &beta, &gamma));
        }
    }

    #[test]
    fn no_instance_cheating_rate() {
        // conflicting constraints on qubit 0: |0⟩⟨0| versus |1⟩⟨1| with
        // tight tolerance — no global state satisfies both. The canonical
        // cheater commits the best single state for constraint 0 and wins
        // only when every repetition challenges constraint 0.
        let mut r = rng::stream(&rng::root_from_u64(5), "cldm.cheat");
        let zero = QState::basis(1, 0).matrix().clone();
        let one = QState::basis(1, 1).matrix().clone();
        let instance = CldmInstance::new(
            1,
            vec![
                CldmConstraint {
                    qubits: vec![0],
                    target: zero,
                    delta: 0.01,
                },
                CldmConstraint {
                    qubits: vec![0],
                    target: one,
                    delta: 0.01,
                },
            ],
        )
        .unwrap();
        let k = 4;
        let backend = CldmBackend::new(&instance, k, LAMBDA);
        let cheat_wit = QState::basis(1, 0);
        let tape = backend
            .sample_randomness(&instance.encode(), &cheat_wit.encode(), &mut r)
            .unwrap();
        let alpha = backend
            .p1(&instance.encode(), &cheat_wit.encode(), &tape)
            .unwrap();
        let mut accepts = 0;
        let total = 1u64 << backend.challenge_len();
        for bval in 0..total {
            let beta = Bits::from_uint(bval, backend.challenge_len());
            let gamma = backend.p3(&beta, &tape);
            if backend.verify(&instance.encode(), &alpha, &beta, &gamma) {
                accepts += 1;
            }
        }
        assert_eq!(accepts, 1, "cheater must win only the all-zero challenge");
        assert!((accepts as f64 / total as f64) <= 0.5f64.powi(k as i32) + 1e-12);
    }

    #[test]
    fn malformed_inputs_rejected() {
        let mut r = rng::stream(&rng::root_from_u64(6), "cldm.malformed");
        let (instance, wit, backend) = setup(2);
        let tape = backend
            .sample_randomness(&instance.encode(), &wit.encode(), &mut r)
            .unwrap();
        let alpha = backend.p1(&instance.encode(), &wit.encode(), &tape).unwrap();
        let beta = sigma_challenge(&backend, &mut r);
        let gamma = backend.p3(&beta, &tape);
        assert!(!backend.verify(&instance.encode(), &alpha[..alpha.len() - 1], &beta, &gamma));
        assert!(!backend.verify(&instance.encode(), &alpha, &beta, &gamma.slice(1..gamma.len())));
        assert!(!backend.verify(b"garbage", &alpha, &beta, &gamma));
    }
}
