//! Small density-matrix simulator backing the CLDM sigma protocol.
//!
//! States are immutable 2^n × 2^n complex density matrices (n ≤ 6) with
//! Hermiticity, unit trace and positive semidefiniteness enforced to 1e-9
//! after every operation. Qubit i occupies the i-th most significant bit of
//! the basis index, so `kron(A, B)` acts as A on qubit 0 and B on qubit 1.
//!
//! The protocol layer only needs quantum one-time pads, partial traces and
//! trace distance; everything is double-precision dense linear algebra.

pub mod cldm;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::wire::{put_varint, Reader};

pub type DensityMatrix = DMatrix<Complex64>;

pub const MAX_QUBITS: usize = 6;
/// Tolerance on the state invariants (Hermiticity, trace, PSD).
pub const EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct QState {
    n: usize,
    rho: DensityMatrix,
}

fn infinity_norm(m: &DensityMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Real eigenvalues of a Hermitian matrix.
fn hermitian_eigenvalues(m: &DensityMatrix) -> Vec<f64> {
    m.clone().symmetric_eigen().eigenvalues.iter().copied().collect()
}

/// Check the density-matrix invariants on a raw matrix.
pub fn check_density(m: &DensityMatrix) -> Result<()> {
    let d = m.nrows();
    if d == 0 || m.ncols() != d || !d.is_power_of_two() {
        return Err(Error::malformed("density matrix", "shape"));
    }
    if infinity_norm(&(m - m.adjoint())) >= EPS {
        return Err(Error::malformed("density matrix", "not Hermitian"));
    }
    let tr: Complex64 = m.trace();
    if (tr.re - 1.0).abs() >= EPS || tr.im.abs() >= EPS {
        return Err(Error::malformed("density matrix", "trace != 1"));
    }
    if hermitian_eigenvalues(m).into_iter().any(|ev| ev < -EPS) {
        return Err(Error::malformed("density matrix", "not PSD"));
    }
    Ok(())
}

impl QState {
    pub fn new(n: usize, rho: DensityMatrix) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::malformed("qstate", "more than 6 qubits"));
        }
        if rho.nrows() != 1 << n {
            return Err(Error::malformed("qstate", "dimension does not match n"));
        }
        check_density(&rho)?;
        Ok(QState { n, rho })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DensityMatrix {
        &self.rho
    }

    /// |v⟩⟨v| for a normalized state vector.
    pub fn from_vector(n: usize, v: &[Complex64]) -> Result<Self> {
        if v.len() != 1 << n {
            return Err(Error::malformed("qstate", "vector length"));
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() >= EPS {
            return Err(Error::malformed("qstate", "vector not normalized"));
        }
        let d = v.len();
        let rho = DensityMatrix::from_fn(d, d, |r, c| v[r] * v[c].conj());
        QState::new(n, rho)
    }

    /// Computational basis state |idx⟩⟨idx|.
    pub fn basis(n: usize, idx: usize) -> Self {
        let d = 1usize << n;
        assert!(idx < d);
        let mut v = vec![Complex64::ZERO; d];
        v[idx] = Complex64::ONE;
        QState::from_vector(n, &v).unwrap()
    }

    /// Maximally mixed state I/2^n.
    pub fn maximally_mixed(n: usize) -> Self {
        let d = 1usize << n;
        let rho = DensityMatrix::from_diagonal_element(d, d, Complex64::new(1.0 / d as f64, 0.0));
        QState { n, rho }
    }

    /// "QST1" ‖ n ‖ row-major (re, im) little-endian doubles.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"QST1");
        put_varint(&mut out, self.n as u64);
        for r in 0..self.rho.nrows() {
            for c in 0..self.rho.ncols() {
                let z = self.rho[(r, c)];
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes, "qstate");
        r.tag(b"QST1")?;
        let n = r.usize()?;
        if n > MAX_QUBITS {
            return Err(Error::malformed("qstate", "more than 6 qubits"));
        }
        let d = 1usize << n;
        let mut rho = DensityMatrix::zeros(d, d);
        for row in 0..d {
            for col in 0..d {
                let re = f64::from_le_bytes(r.bytes(8)?.try_into().unwrap());
                let im = f64::from_le_bytes(r.bytes(8)?.try_into().unwrap());
                rho[(row, col)] = Complex64::new(re, im);
            }
        }
        r.finish()?;
        QState::new(n, rho)
    }
}

/// Bitmask with qubit i at bit position n-1-i.
fn qubit_mask(n: usize, bits: &[u8]) -> usize {
    bits.iter()
        .enumerate()
        .filter(|&(_, &b)| b != 0)
        .map(|(i, _)| 1usize << (n - 1 - i))
        .sum()
}

/// Quantum one-time pad: conjugate by ⊗_i X^{a_i} Z^{b_i}. Involutive.
///
/// For the Pauli string U = X^a Z^b we have U|j⟩ = (−1)^{⟨j,b⟩} |j ⊕ a⟩, so
/// (UρU†)[r][c] = (−1)^{⟨r⊕a,b⟩ + ⟨c⊕a,b⟩} ρ[r⊕a][c⊕a] — a pure index
/// shuffle with sign flips, no matrix multiplication needed.
pub fn apply_qotp(state: &QState, a: &[u8], b: &[u8]) -> Result<QState> {
    let n = state.n;
    if a.len() != n || b.len() != n {
        return Err(Error::malformed("qotp", "pad length mismatch"));
    }
    let am = qubit_mask(n, a);
    let bm = qubit_mask(n, b);
    let d = 1usize << n;
    let sign = |j: usize| -> f64 {
        if (j & bm).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    let rho = DensityMatrix::from_fn(d, d, |r, c| {
        state.rho[(r ^ am, c ^ am)] * (sign(r ^ am) * sign(c ^ am))
    });
    QState::new(n, rho)
}

/// Interleave `keep`-qubit index `k_idx` and traced-qubit index `t_idx`
/// into a full n-qubit basis index.
fn merge_index(n: usize, keep: &[usize], k_idx: usize, t_idx: usize) -> usize {
    let mut full = 0usize;
    let mut ki = 0;
    let mut ti = 0;
    for q in 0..n {
        let bit = if keep.contains(&q) {
            let b = (k_idx >> (keep.len() - 1 - ki)) & 1;
            ki += 1;
            b
        } else {
            let b = (t_idx >> ti) & 1;
            ti += 1;
            b
        };
        full |= bit << (n - 1 - q);
    }
    full
}

/// Trace out every qubit not in `keep` (strictly increasing subset of [n]).
/// Empty `keep` yields the 1×1 matrix [1].
pub fn partial_trace(state: &QState, keep: &[usize]) -> Result<DensityMatrix> {
    let n = state.n;
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&q| q >= n) {
        return Err(Error::malformed("partial trace", "keep set not sorted in [n]"));
    }
    let s = keep.len();
    let d = 1usize << s;
    let traced = 1usize << (n - s);
    let mut out = DensityMatrix::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            let mut acc = Complex64::ZERO;
            for t in 0..traced {
                acc += state.rho[(merge_index(n, keep, r, t), merge_index(n, keep, c, t))];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// The n-qubit state equal to `target` on the qubits in `keep` and
/// maximally mixed (and uncorrelated) elsewhere.
pub fn embed(n: usize, keep: &[usize], target: &DensityMatrix) -> Result<QState> {
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&q| q >= n) {
        return Err(Error::malformed("embed", "keep set not sorted in [n]"));
    }
    let s = keep.len();
    if target.nrows() != 1 << s {
        return Err(Error::malformed("embed", "target dimension"));
    }
    let d = 1usize << n;
    let traced = 1usize << (n - s);
    let scale = Complex64::new(1.0 / traced as f64, 0.0);
    let mut rho = DensityMatrix::zeros(d, d);
    for r in 0..1 << s {
        for c in 0..1 << s {
            for t in 0..traced {
                rho[(merge_index(n, keep, r, t), merge_index(n, keep, c, t))] =
                    target[(r, c)] * scale;
            }
        }
    }
    QState::new(n, rho)
}

/// ½ Σ |eig(ρ − σ)|; symmetric, in [0, 1], zero iff equal.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.shape() != sigma.shape() {
        return Err(Error::malformed("trace distance", "dimension mismatch"));
    }
    let diff = rho - sigma;
    Ok(0.5 * hermitian_eigenvalues(&diff).into_iter().map(f64::abs).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn bell() -> QState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        QState::from_vector(2, &[c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]).unwrap()
    }

    /// Random pure state via a normalized Gaussian-ish vector.
    pub(crate) fn random_pure(n: usize, r: &mut impl Rng) -> QState {
        let d = 1usize << n;
        let mut v: Vec<Complex64> = (0..d)
            .map(|_| c(r.gen::<f64>() - 0.5, r.gen::<f64>() - 0.5))
            .collect();
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= norm;
        }
        QState::from_vector(n, &v).unwrap()
    }

    #[test]
    fn qotp_identity_and_pauli_x() {
        let zero = QState::basis(1, 0);
        assert_eq!(apply_qotp(&zero, &[0], &[0]).unwrap(), zero);
        let flipped = apply_qotp(&zero, &[1], &[0]).unwrap();
        assert_eq!(flipped, QState::basis(1, 1));
        assert!(apply_qotp(&zero, &[0, 0], &[0]).is_err());
    }

    #[test]
    fn qotp_round_trip_random() {
        let mut r = rng::stream(&rng::root_from_u64(1), "qsim.qotp");
        for _ in 0..20 {
            let st = random_pure(3, &mut r);
            let a: Vec<u8> = (0..3).map(|_| r.gen_range(0..2)).collect();
            let b: Vec<u8> = (0..3).map(|_| r.gen_range(0..2)).collect();
            let padded = apply_qotp(&st, &a, &b).unwrap();
            // X^a Z^b is self-inverse only up to global phase; conjugation
            // cancels the phase, so re-applying the same pads restores ρ
            let back = apply_qotp(&padded, &a, &b).unwrap();
            assert!(infinity_norm(&(back.matrix() - st.matrix())) < 1e-9);
        }
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let rho = partial_trace(&bell(), &[1]).unwrap();
        let half = DensityMatrix::from_diagonal_element(2, 2, c(0.5, 0.0));
        assert!(infinity_norm(&(rho - half)) < 1e-9);
    }

    #[test]
    fn product_state_partial_trace() {
        // |0⟩ ⊗ |1⟩: keeping qubit 0 gives |0⟩⟨0|
        let st = QState::basis(2, 0b01);
        let rho = partial_trace(&st, &[0]).unwrap();
        assert!(infinity_norm(&(rho - QState::basis(1, 0).matrix())) < 1e-9);
        // keeping qubit 1 gives |1⟩⟨1|
        let rho = partial_trace(&st, &[1]).unwrap();
        assert!(infinity_norm(&(rho - QState::basis(1, 1).matrix())) < 1e-9);
        // empty keep: scalar 1
        let rho = partial_trace(&st, &[]).unwrap();
        assert!((rho[(0, 0)] - c(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn partial_trace_preserves_trace_and_validity() {
        let mut r = rng::stream(&rng::root_from_u64(2), "qsim.pt");
        for _ in 0..20 {
            let st = random_pure(3, &mut r);
            let rho = partial_trace(&st, &[0, 2]).unwrap();
            assert!(check_density(&rho).is_ok());
        }
    }

    #[test]
    fn trace_distance_properties() {
        let mut r = rng::stream(&rng::root_from_u64(3), "qsim.td");
        let z = QState::basis(1, 0);
        let o = QState::basis(1, 1);
        assert!(trace_distance(z.matrix(), z.matrix()).unwrap() < 1e-9);
        assert!((trace_distance(z.matrix(), o.matrix()).unwrap() - 1.0).abs() < 1e-9);
        for _ in 0..100 {
            let a = random_pure(2, &mut r);
            let b = random_pure(2, &mut r);
            let cc = random_pure(2, &mut r);
            let ab = trace_distance(a.matrix(), b.matrix()).unwrap();
            let bc = trace_distance(b.matrix(), cc.matrix()).unwrap();
            let ac = trace_distance(a.matrix(), cc.matrix()).unwrap();
            assert!(ac <= ab + bc + 1e-9, "triangle inequality violated");
            assert!((ab - trace_distance(b.matrix(), a.matrix()).unwrap()).abs() < 1e-12);
            assert!((0.0..=1.0 + 1e-9).contains(&ab));
        }
    }

    #[test]
    fn pad_average_is_maximally_mixed() {
        // perfect hiding: the pad-average over all 4^n pads equals I/2^n
        let mut r = rng::stream(&rng::root_from_u64(4), "qsim.hide");
        for n in 1..=3usize {
            let st = random_pure(n, &mut r);
            let d = 1usize << n;
            let mut acc = DensityMatrix::zeros(d, d);
            for am in 0..d {
                for bm in 0..d {
                    let a: Vec<u8> = (0..n).map(|i| ((am >> (n - 1 - i)) & 1) as u8).collect();
                    let b: Vec<u8> = (0..n).map(|i| ((bm >> (n - 1 - i)) & 1) as u8).collect();
                    acc += apply_qotp(&st, &a, &b).unwrap().matrix();
                }
            }
            acc /= c((d * d) as f64, 0.0);
            let mixed = QState::maximally_mixed(n);
            assert!(infinity_norm(&(acc - mixed.matrix())) < 1e-6, "n={n}");
        }
    }

    #[test]
    fn embed_matches_partial_trace() {
        let mut r = rng::stream(&rng::root_from_u64(5), "qsim.embed");
        let target = {
            let st = random_pure(1, &mut r);
            st.matrix().clone()
        };
        let st = embed(3, &[1], &target).unwrap();
        assert!(infinity_norm(&(partial_trace(&st, &[1]).unwrap() - &target)) < 1e-9);
        // other marginals are maximally mixed
        let m = partial_trace(&st, &[0]).unwrap();
        assert!(infinity_norm(&(m - QState::maximally_mixed(1).matrix())) < 1e-9);
    }

    #[test]
    fn serialization_round_trip_and_rejects() {
        let mut r = rng::stream(&rng::root_from_u64(6), "qsim.ser");
        let st = random_pure(2, &mut r);
        assert_eq!(QState::decode(&st.encode()).unwrap(), st);
        // non-Hermitian tamper is rejected
        let mut bytes = st.encode();
        let off = bytes.len() - 1;
        bytes[off] ^= 0x40; // nonzero imaginary part on a diagonal entry
        assert!(QState::decode(&bytes).is_err());
        assert!(QState::decode(&bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn invariants_hold_after_randomized_operations() {
        let mut r = rng::stream(&rng::root_from_u64(7), "qsim.fuzz");
        let mut st = random_pure(3, &mut r);
        for _ in 0..10_000 {
            let a: Vec<u8> = (0..3).map(|_| r.gen_range(0..2)).collect();
            let b: Vec<u8> = (0..3).map(|_| r.gen_range(0..2)).collect();
            st = apply_qotp(&st, &a, &b).unwrap(); // constructor re-checks invariants
        }
        assert!(check_density(st.matrix()).is_ok());
    }
}
