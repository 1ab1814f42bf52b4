//! Blum's Graph-Hamiltonicity protocol with parallel repetition.
//!
//! Per repetition the prover commits to every cell of the permuted adjacency
//! matrix φ(G). Challenge bit 0: reveal φ and open all n² commitments;
//! challenge bit 1: open exactly the n cells of the permuted cycle.
//!
//! The randomness tape is structured so the response is a pure selection
//! over tape bits: per repetition it holds the branch-0 block (φ encoding
//! and all cell salts) followed by the branch-1 block (cycle cell
//! coordinates and copies of those cells' salts, both derived from the
//! witness at sampling time). `p3` then muxes whole blocks on the challenge
//! bit, which is what lets the protocol layer compile it into a boolean
//! circuit evaluated under FHE.

use rand::RngCore;

use crate::bits::Bits;
use crate::circuits::{Builder, Wire};
use crate::error::{Error, Result};
use crate::primitives::commit::{commit, COM_LEN};
use crate::sigma::SigmaBackend;
use crate::wire::{put_varint, Reader};

/// Graph on `n ≤ 16` vertices as a symmetric adjacency bit matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HamInstance {
    pub n: usize,
    /// Row-major n×n bits; `adj[u*n+v]`.
    pub adj: Vec<u8>,
}

/// Hamiltonian cycle as the vertex visiting order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HamWitness {
    pub cycle: Vec<u8>,
}

impl HamInstance {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        assert!((3..=16).contains(&n));
        let mut adj = vec![0u8; n * n];
        for &(u, v) in edges {
            assert!(u < n && v < n && u != v);
            adj[u * n + v] = 1;
            adj[v * n + u] = 1;
        }
        HamInstance { n, adj }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v] == 1
    }

    /// The triangle K3 with its unique cycle.
    pub fn k3() -> (HamInstance, HamWitness) {
        (
            HamInstance::new(3, &[(0, 1), (1, 2), (2, 0)]),
            HamWitness { cycle: vec![0, 1, 2] },
        )
    }

    /// The 4-vertex path: connected, no Hamiltonian cycle.
    pub fn p4() -> HamInstance {
        HamInstance::new(4, &[(0, 1), (1, 2), (2, 3)])
    }

    /// Random Hamiltonian graph: a hidden random cycle plus noise edges.
    pub fn random_ham(n: usize, rng: &mut impl RngCore) -> (HamInstance, HamWitness) {
        let mut order: Vec<u8> = (0..n as u8).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.next_u32() as usize % (i + 1));
        }
        let mut edges: Vec<(usize, usize)> = (0..n)
            .map(|j| (order[j] as usize, order[(j + 1) % n] as usize))
            .collect();
        for u in 0..n {
            for v in u + 1..n {
                if rng.next_u32() % 3 == 0 {
                    edges.push((u, v));
                }
            }
        }
        (HamInstance::new(n, &edges), HamWitness { cycle: order })
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"HIN1");
        put_varint(&mut out, self.n as u64);
        out.extend_from_slice(&Bits::from_vec(self.adj.clone()).to_bytes());
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes, "ham instance");
        r.tag(b"HIN1")?;
        let n = r.usize()?;
        if !(3..=16).contains(&n) {
            return Err(Error::malformed("ham instance", format!("n = {n}")));
        }
        let adj_bytes = r.bytes((n * n).div_ceil(8))?;
        r.finish()?;
        let adj = Bits::from_bytes(adj_bytes).slice(0..n * n).as_slice().to_vec();
        Ok(HamInstance { n, adj })
    }
}

impl HamWitness {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"HWT1");
        put_varint(&mut out, self.cycle.len() as u64);
        out.extend_from_slice(&self.cycle);
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes, "ham witness");
        r.tag(b"HWT1")?;
        let n = r.usize()?;
        let cycle = r.bytes(n)?.to_vec();
        r.finish()?;
        Ok(HamWitness { cycle })
    }

    pub fn is_valid_for(&self, inst: &HamInstance) -> bool {
        let n = inst.n;
        if self.cycle.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for &v in &self.cycle {
            if (v as usize) >= n || seen[v as usize] {
                return false;
            }
            seen[v as usize] = true;
        }
        (0..n).all(|j| {
            inst.has_edge(self.cycle[j] as usize, self.cycle[(j + 1) % n] as usize)
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct HamBackend {
    pub n: usize,
    /// Parallel repetitions; one challenge bit each.
    pub k: usize,
    /// Commitment salt length in bits.
    pub lambda: usize,
}

impl HamBackend {
    pub fn new(n: usize, k: usize, lambda: usize) -> Self {
        assert!((3..=16).contains(&n));
        assert!(k >= 1);
        assert!(lambda >= 16);
        HamBackend { n, k, lambda }
    }

    fn phi_bits(&self) -> usize {
        4 * self.n
    }

    /// Branch 0: φ encoding then all n² cell salts.
    fn block0_len(&self) -> usize {
        self.phi_bits() + self.n * self.n * self.lambda
    }

    /// Branch 1: n (u, v) nibble pairs then the n cycle-cell salts.
    fn block1_len(&self) -> usize {
        8 * self.n + self.n * self.lambda
    }

    fn rep_r_len(&self) -> usize {
        self.block0_len() + self.block1_len()
    }

    /// Per-repetition response length: branch blocks zero-padded to a
    /// common size (branch 0 is the longer one at every legal parameter).
    fn rep_gamma_len(&self) -> usize {
        self.block0_len()
    }

    fn salt_range(&self, rep_off: usize, cell: usize) -> std::ops::Range<usize> {
        let start = rep_off + self.phi_bits() + cell * self.lambda;
        start..start + self.lambda
    }

    fn decode_phi(&self, r: &Bits, rep_off: usize) -> Option<Vec<usize>> {
        let n = self.n;
        let phi: Vec<usize> = (0..n)
            .map(|v| r.slice(rep_off + 4 * v..rep_off + 4 * v + 4).to_uint() as usize)
            .collect();
        let mut seen = vec![false; n];
        for &img in &phi {
            if img >= n || seen[img] {
                return None;
            }
            seen[img] = true;
        }
        Some(phi)
    }

    /// Adjacency bit of φ(G) at cell (x, y): φ(G)[φ(a)][φ(b)] = G[a][b].
    fn permuted_cell(&self, inst: &HamInstance, phi: &[usize], x: usize, y: usize) -> u8 {
        let inv = |w: usize| phi.iter().position(|&img| img == w).unwrap();
        inst.adj[inv(x) * self.n + inv(y)]
    }

    /// Tape for one proof. `cycle` is not validated here so adversarial
    /// tapes can be built; public callers go through `sample_randomness`.
    pub fn build_tape(&self, cycle: &[u8], rng: &mut dyn RngCore) -> Bits {
        let n = self.n;
        let mut tape = Bits::new();
        for _ in 0..self.k {
            // φ: uniform permutation, nibble-encoded
            let mut phi: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                phi.swap(i, rng.next_u32() as usize % (i + 1));
            }
            for &img in &phi {
                tape.extend(&Bits::from_uint(img as u64, 4));
            }
            // all n² cell salts
            let salts = Bits::random(n * n * self.lambda, rng);
            tape.extend(&salts);
            // branch 1: permuted cycle cells and copies of their salts
            let mut cells = Bits::new();
            let mut cycle_salts = Bits::new();
            for j in 0..n {
                let u = phi[cycle[j] as usize];
                let v = phi[cycle[(j + 1) % n] as usize];
                cells.extend(&Bits::from_uint(u as u64, 4));
                cells.extend(&Bits::from_uint(v as u64, 4));
                let cell = u * n + v;
                cycle_salts.extend(&salts.slice(cell * self.lambda..(cell + 1) * self.lambda));
            }
            tape.extend(&cells);
            tape.extend(&cycle_salts);
        }
        debug_assert_eq!(tape.len(), self.randomness_len());
        tape
    }

    fn encode_alpha(&self, coms: &[[u8; COM_LEN]]) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"SGA1");
        put_varint(&mut out, self.k as u64);
        put_varint(&mut out, self.n as u64);
        for c in coms {
            out.extend_from_slice(c);
        }
        out
    }

    fn decode_alpha(&self, alpha: &[u8]) -> Option<Vec<[u8; COM_LEN]>> {
        let mut r = Reader::new(alpha, "sigma alpha");
        r.tag(b"SGA1").ok()?;
        if r.usize().ok()? != self.k || r.usize().ok()? != self.n {
            return None;
        }
        let count = self.k * self.n * self.n;
        let mut coms = Vec::with_capacity(count);
        for _ in 0..count {
            coms.push(<[u8; COM_LEN]>::try_from(r.bytes(COM_LEN).ok()?).ok()?);
        }
        r.finish().ok()?;
        Some(coms)
    }

    fn verify_rep(
        &self,
        inst: &HamInstance,
        coms: &[[u8; COM_LEN]],
        beta_bit: u8,
        gamma_rep: &Bits,
    ) -> bool {
        let n = self.n;
        if beta_bit == 0 {
            // γ = φ ‖ all salts; recompute φ(G) and check every commitment
            let Some(phi) = self.decode_phi(gamma_rep, 0) else {
                return false;
            };
            for x in 0..n {
                for y in 0..n {
                    let cell = x * n + y;
                    let salt = gamma_rep.slice(self.salt_range(0, cell));
                    let bit = self.permuted_cell(inst, &phi, x, y);
                    if commit(&[bit], &salt) != coms[cell] {
                        return false;
                    }
                }
            }
            true
        } else {
            // γ = n (u, v) cells ‖ their salts; openings must all be 1-bits
            // and the cells must form a single cycle covering every vertex
            let cells_off = 0;
            let salts_off = 8 * n;
            let mut us = Vec::with_capacity(n);
            let mut vs = Vec::with_capacity(n);
            for j in 0..n {
                let u = gamma_rep.slice(cells_off + 8 * j..cells_off + 8 * j + 4).to_uint()
                    as usize;
                let v = gamma_rep
                    .slice(cells_off + 8 * j + 4..cells_off + 8 * j + 8)
                    .to_uint() as usize;
                if u >= n || v >= n {
                    return false;
                }
                us.push(u);
                vs.push(v);
            }
            let mut seen = vec![false; n];
            for j in 0..n {
                if vs[j] != us[(j + 1) % n] || seen[us[j]] {
                    return false;
                }
                seen[us[j]] = true;
            }
            for j in 0..n {
                let salt =
                    gamma_rep.slice(salts_off + j * self.lambda..salts_off + (j + 1) * self.lambda);
                if commit(&[1], &salt) != coms[us[j] * n + vs[j]] {
                    return false;
                }
            }
            true
        }
    }
}

impl SigmaBackend for HamBackend {
    fn name(&self) -> &'static str {
        "ham"
    }

    fn randomness_len(&self) -> usize {
        self.k * self.rep_r_len()
    }

    fn challenge_len(&self) -> usize {
        self.k
    }

    fn gamma_len(&self) -> usize {
        self.k * self.rep_gamma_len()
    }

    fn sample_randomness(&self, inst: &[u8], wit: &[u8], rng: &mut dyn RngCore) -> Result<Bits> {
        let inst = HamInstance::decode(inst)?;
        let wit = HamWitness::decode(wit)?;
        if inst.n != self.n {
            return Err(Error::malformed("ham instance", "vertex count mismatch"));
        }
        if !wit.is_valid_for(&inst) {
            return Err(Error::InvalidWitness("not a Hamiltonian cycle".into()));
        }
        Ok(self.build_tape(&wit.cycle, rng))
    }

    fn p1(&self, inst: &[u8], _wit: &[u8], r: &Bits) -> Result<Vec<u8>> {
        let inst = HamInstance::decode(inst)?;
        if r.len() != self.randomness_len() {
            return Err(Error::InputArity {
                expected: self.randomness_len(),
                got: r.len(),
            });
        }
        let n = self.n;
        let mut coms = Vec::with_capacity(self.k * n * n);
        for rep in 0..self.k {
            let off = rep * self.rep_r_len();
            let phi = self
                .decode_phi(r, off)
                .ok_or_else(|| Error::malformed("ham tape", "φ is not a permutation"))?;
            for x in 0..n {
                for y in 0..n {
                    let bit = self.permuted_cell(&inst, &phi, x, y);
                    let salt = r.slice(self.salt_range(off, x * n + y));
                    coms.push(commit(&[bit], &salt));
                }
            }
        }
        Ok(self.encode_alpha(&coms))
    }

    fn p3(&self, beta: &Bits, r: &Bits) -> Bits {
        assert_eq!(beta.len(), self.challenge_len());
        assert_eq!(r.len(), self.randomness_len());
        let mut gamma = Bits::new();
        for rep in 0..self.k {
            let off = rep * self.rep_r_len();
            if beta[rep] == 0 {
                gamma.extend(&r.slice(off..off + self.block0_len()));
            } else {
                gamma.extend(&r.slice(off + self.block0_len()..off + self.rep_r_len()));
                // zero-pad the shorter branch to the common block size
                gamma.extend(&Bits::zeros(self.block0_len() - self.block1_len()));
            }
        }
        gamma
    }

    fn compile_p3(&self, b: &mut Builder, beta: &[Wire], r: &[Wire]) -> Vec<Wire> {
        assert_eq!(beta.len(), self.challenge_len());
        assert_eq!(r.len(), self.randomness_len());
        let zero = b.constant(0);
        let mut out = Vec::with_capacity(self.gamma_len());
        for rep in 0..self.k {
            let off = rep * self.rep_r_len();
            for j in 0..self.rep_gamma_len() {
                let w0 = r[off + j];
                let w1 = if j < self.block1_len() {
                    r[off + self.block0_len() + j]
                } else {
                    zero
                };
                out.push(b.mux(beta[rep], w0, w1));
            }
        }
        out
    }

    fn verify(&self, inst: &[u8], alpha: &[u8], beta: &Bits, gamma: &Bits) -> bool {
        let Ok(inst) = HamInstance::decode(inst) else {
            return false;
        };
        if inst.n != self.n
            || beta.len() != self.challenge_len()
            || gamma.len() != self.gamma_len()
        {
            return false;
        }
        let Some(coms) = self.decode_alpha(alpha) else {
            return false;
        };
        let per = self.rep_gamma_len();
        let nn = self.n * self.n;
        (0..self.k).all(|rep| {
            let gamma_rep = gamma.slice(rep * per..(rep + 1) * per);
            self.verify_rep(&inst, &coms[rep * nn..(rep + 1) * nn], beta[rep], &gamma_rep)
        })
    }

    fn simulate(
        &self,
        inst: &[u8],
        beta: &Bits,
        rng: &mut dyn RngCore,
    ) -> Result<(Vec<u8>, Bits)> {
        let inst = HamInstance::decode(inst)?;
        if beta.len() != self.challenge_len() {
            return Err(Error::InputArity {
                expected: self.challenge_len(),
                got: beta.len(),
            });
        }
        let n = self.n;
        let mut coms = Vec::with_capacity(self.k * n * n);
        let mut gamma = Bits::new();
        for rep in 0..self.k {
            // uniform permutation, used as φ (branch 0) or as the fake
            // cycle's visiting order (branch 1)
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                perm.swap(i, rng.next_u32() as usize % (i + 1));
            }
            let salts = Bits::random(n * n * self.lambda, rng);
            if beta[rep] == 0 {
                // honest branch-0: commit to φ(G), reveal φ and all salts
                for x in 0..n {
                    for y in 0..n {
                        let cell = x * n + y;
                        let bit = self.permuted_cell(&inst, &perm, x, y);
                        let salt = salts.slice(cell * self.lambda..(cell + 1) * self.lambda);
                        coms.push(commit(&[bit], &salt));
                    }
                }
                for &img in &perm {
                    gamma.extend(&Bits::from_uint(img as u64, 4));
                }
                gamma.extend(&salts);
            } else {
                // commit to a permuted *complete cycle* graph; open only the
                // cycle cells — the graph needs no Hamiltonian cycle at all
                let mut cycle_cells = vec![false; n * n];
                for j in 0..n {
                    cycle_cells[perm[j] * n + perm[(j + 1) % n]] = true;
                }
                for cell in 0..n * n {
                    let bit = u8::from(cycle_cells[cell]);
                    let salt = salts.slice(cell * self.lambda..(cell + 1) * self.lambda);
                    coms.push(commit(&[bit], &salt));
                }
                let mut block = Bits::new();
                for j in 0..n {
                    let (u, v) = (perm[j], perm[(j + 1) % n]);
                    block.extend(&Bits::from_uint(u as u64, 4));
                    block.extend(&Bits::from_uint(v as u64, 4));
                }
                for j in 0..n {
                    let cell = perm[j] * n + perm[(j + 1) % n];
                    block.extend(&salts.slice(cell * self.lambda..(cell + 1) * self.lambda));
                }
                block.extend(&Bits::zeros(self.rep_gamma_len() - self.block1_len()));
                gamma.extend(&block);
            }
        }
        Ok((self.encode_alpha(&coms), gamma))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::sigma::sigma_challenge;

    fn run_honest(
        backend: &HamBackend,
        inst: &HamInstance,
        wit: &HamWitness,
        beta: &Bits,
        rng: &mut impl RngCore,
    ) -> (Vec<u8>, Bits) {
        let tape = backend
            .sample_randomness(&inst.encode(), &wit.encode(), rng)
            .unwrap();
        let alpha = backend.p1(&inst.encode(), &wit.encode(), &tape).unwrap();
        let gamma = backend.p3(beta, &tape);
        (alpha, gamma)
    }

    #[test]
    fn k3_commitment_count_and_determinism() {
        let (inst, wit) = HamInstance::k3();
        let backend = HamBackend::new(3, 1, 32);
        let mut r = rng::stream(&rng::root_from_u64(1), "ham.k3");
        let tape = backend
            .sample_randomness(&inst.encode(), &wit.encode(), &mut r)
            .unwrap();
        let a1 = backend.p1(&inst.encode(), &wit.encode(), &tape).unwrap();
        let a2 = backend.p1(&inst.encode(), &wit.encode(), &tape).unwrap();
        assert_eq!(a1, a2);
        assert_eq!(backend.decode_alpha(&a1).unwrap().len(), 9);
    }

    #[test]
    fn completeness_defaults() {
        let backend = HamBackend::new(8, 16, 32);
        let mut r = rng::stream(&rng::root_from_u64(2), "ham.complete");
        let (inst, wit) = HamInstance::random_ham(8, &mut r);
        for _ in 0..1000 {
            let beta = sigma_challenge(&backend, &mut r);
            let (alpha, gamma) = run_honest(&backend, &inst, &wit, &beta, &mut r);
            assert!(backend.verify(&inst.encode(), &alpha, &beta, &gamma));
        }
    }

    #[test]
    fn branch_response_lengths() {
        // branch 0 carries φ + n² salts, branch 1 carries n cells + n salts
        let backend = HamBackend::new(4, 1, 32);
        assert_eq!(backend.block0_len(), 16 + 16 * 32);
        assert_eq!(backend.block1_len(), 32 + 4 * 32);
        let (inst, wit) = (
            HamInstance::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]),
            HamWitness { cycle: vec![0, 1, 2, 3] },
        );
        let mut r = rng::stream(&rng::root_from_u64(3), "ham.branch");
        for bit in [0u8, 1] {
            let beta = Bits::from_vec(vec![bit]);
            let (alpha, gamma) = run_honest(&backend, &inst, &wit, &beta, &mut r);
            assert_eq!(gamma.len(), backend.gamma_len());
            assert!(backend.verify(&inst.encode(), &alpha, &beta, &gamma));
        }
    }

    #[test]
    fn p3_is_deterministic() {
        let backend = HamBackend::new(8, 4, 32);
        let mut r = rng::stream(&rng::root_from_u64(4), "ham.det");
        let (inst, wit) = HamInstance::random_ham(8, &mut r);
        let tape = backend
            .sample_randomness(&inst.encode(), &wit.encode(), &mut r)
            .unwrap();
        let beta = sigma_challenge(&backend, &mut r);
        assert_eq!(backend.p3(&beta, &tape), backend.p3(&beta, &tape));
    }

    #[test]
    fn cheating_accept_rate_exact() {
        // P4 has no Hamiltonian cycle. The canonical cheat commits honestly
        // to φ(G) each repetition: branch 0 verifies, branch 1 cannot.
        // Exhaustively over challenges the accept rate is exactly 2^-k.
        let inst = HamInstance::p4();
        let mut r = rng::stream(&rng::root_from_u64(5), "ham.cheat");
        for k in [2usize, 8] {
            let backend = HamBackend::new(4, k, 32);
            // identity "cycle" 0-1-2-3-0: edge (3,0) is missing from P4
            let tape = backend.build_tape(&[0, 1, 2, 3], &mut r);
            let alpha = backend.p1(&inst.encode(), &[], &tape).unwrap();
            let mut accepted = 0u64;
            for v in 0..(1u64 << k) {
                let beta = Bits::from_uint(v, k);
                let gamma = backend.p3(&beta, &tape);
                if backend.verify(&inst.encode(), &alpha, &beta, &gamma) {
                    accepted += 1;
                }
            }
            assert_eq!(accepted, 1, "k={k}: only the all-zero challenge accepts");
        }
    }

    #[test]
    fn mutation_rejected() {
        let backend = HamBackend::new(8, 4, 32);
        let mut r = rng::stream(&rng::root_from_u64(6), "ham.mut");
        let (inst, wit) = HamInstance::random_ham(8, &mut r);
        for _ in 0..50 {
            let beta = sigma_challenge(&backend, &mut r);
            let (alpha, gamma) = run_honest(&backend, &inst, &wit, &beta, &mut r);
            let mut bad_gamma = gamma.clone();
            let i = r.next_u32() as usize % bad_gamma.len();
            bad_gamma[i] ^= 1;
            if backend.verify(&inst.encode(), &alpha, &beta, &bad_gamma) {
                // the only don't-care bits are the zero padding after the
                // short branch-1 block; anything else must reject
                let rep = i / backend.rep_gamma_len();
                let within = i % backend.rep_gamma_len();
                assert_eq!(beta[rep], 1, "accepted flip outside padding");
                assert!(within >= backend.block1_len(), "accepted flip outside padding");
            }
        }
    }

    #[test]
    fn simulator_contract() {
        let (inst, _) = HamInstance::k3();
        let backend = HamBackend::new(3, 8, 32);
        let mut r = rng::stream(&rng::root_from_u64(7), "ham.sim");
        for _ in 0..100 {
            let beta = sigma_challenge(&backend, &mut r);
            let (alpha, gamma) = backend.simulate(&inst.encode(), &beta, &mut r).unwrap();
            assert!(backend.verify(&inst.encode(), &alpha, &beta, &gamma));
            assert_eq!(gamma.len(), backend.gamma_len());
        }
    }

    #[test]
    fn simulator_structure_matches_honest() {
        let (inst, wit) = HamInstance::k3();
        let backend = HamBackend::new(3, 8, 32);
        let mut r = rng::stream(&rng::root_from_u64(8), "ham.struct");
        let beta = sigma_challenge(&backend, &mut r);
        let (ha, hg) = run_honest(&backend, &inst, &wit, &beta, &mut r);
        let (sa, sg) = backend.simulate(&inst.encode(), &beta, &mut r).unwrap();
        assert_eq!(ha.len(), sa.len());
        assert_eq!(hg.len(), sg.len());
    }

    #[test]
    fn simulator_succeeds_on_no_instance() {
        // the fact the naive single-theorem protocol attack exploits:
        // knowing β, accepting transcripts exist even without a cycle
        let inst = HamInstance::p4();
        let backend = HamBackend::new(4, 8, 32);
        let mut r = rng::stream(&rng::root_from_u64(9), "ham.noinst");
        let beta = sigma_challenge(&backend, &mut r);
        let (alpha, gamma) = backend.simulate(&inst.encode(), &beta, &mut r).unwrap();
        assert!(backend.verify(&inst.encode(), &alpha, &beta, &gamma));
    }

    #[test]
    fn compile_p3_matches_direct() {
        let backend = HamBackend::new(4, 3, 16);
        let mut r = rng::stream(&rng::root_from_u64(10), "ham.circ");
        let (inst, wit) = (
            HamInstance::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]),
            HamWitness { cycle: vec![0, 1, 2, 3] },
        );
        let tape = backend
            .sample_randomness(&inst.encode(), &wit.encode(), &mut r)
            .unwrap();
        let lb = backend.challenge_len();
        let lr = backend.randomness_len();
        let mut b = Builder::new((lb + lr) as u32);
        let beta_wires: Vec<Wire> = (0..lb as u32).collect();
        let r_wires: Vec<Wire> = (lb as u32..(lb + lr) as u32).collect();
        let outs = backend.compile_p3(&mut b, &beta_wires, &r_wires);
        let circuit = b.finish(outs);
        for v in 0..(1u64 << lb) {
            let beta = Bits::from_uint(v, lb);
            let mut input = beta.clone();
            input.extend(&tape);
            assert_eq!(circuit.eval(&input).unwrap(), backend.p3(&beta, &tape));
        }
    }

    #[test]
    fn instance_witness_codecs_round_trip() {
        let mut r = rng::stream(&rng::root_from_u64(11), "ham.codec");
        let (inst, wit) = HamInstance::random_ham(9, &mut r);
        assert_eq!(HamInstance::decode(&inst.encode()).unwrap(), inst);
        assert_eq!(HamWitness::decode(&wit.encode()).unwrap(), wit);
    }
}
