//! Regev-style public-key encryption with residue-string public keys.
//!
//! The public key is a raw string of mod-q residues, so a uniform byte string
//! of the right length parses as a syntactically valid encryption key — the
//! property the protocol's common random string depends on. Long messages use
//! a hybrid layout: the lattice part encapsulates a 128-bit seed, the body is
//! the message XORed with a stream derived from that seed. Noise magnitudes
//! are chosen so decryption is correct for *every* encryption-randomness
//! choice once the key pair is honest. Toy parameters, no security claim.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::wire::{put_frame, put_varint, Reader};

pub const SEED_BITS: usize = 128;
/// Deterministic encryption coins, for relation re-execution checks.
pub const COIN_LEN: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PkeParams {
    pub lambda: usize,
    /// LWE dimension.
    pub n: usize,
    /// Number of public-key columns.
    pub m: usize,
    pub q: u32,
}

impl PkeParams {
    pub fn new(lambda: usize) -> Self {
        assert!(lambda >= 16);
        // 4λ columns with {-1,0,1} noise keeps |e·r| ≤ 4λ for any
        // r ∈ {0,1}^m; correctness against malicious encryptors needs that
        // below q/4, so the modulus grows with λ past the default.
        let m = 4 * lambda;
        let q = 3329u32.max(4 * m as u32 + 1);
        assert!(q <= u16::MAX as u32, "λ too large for u16 residues");
        PkeParams { lambda, n: 64, m, q }
    }

    /// ℓ_pk(λ): byte length of a serialized public key.
    pub fn pk_len(&self) -> usize {
        (self.n * self.m + self.m) * 2
    }
}

/// Public key parsed out of a residue string: A (n×m) and b (m).
struct ParsedPk {
    a: Vec<u16>, // row-major n×m
    b: Vec<u16>,
}

fn parse_pk(params: &PkeParams, bytes: &[u8]) -> Result<ParsedPk> {
    if bytes.len() != params.pk_len() {
        return Err(Error::malformed(
            "pke public key",
            format!("expected {} bytes, got {}", params.pk_len(), bytes.len()),
        ));
    }
    let q = params.q as u16;
    let mut residues = bytes
        .chunks_exact(2)
        .map(|c| u16::from_le_bytes([c[0], c[1]]) % q);
    let a = residues.by_ref().take(params.n * params.m).collect();
    let b = residues.collect();
    Ok(ParsedPk { a, b })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PkeSecretKey {
    pub params: PkeParams,
    /// s ∈ Z_q^n.
    s: Vec<u16>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PkeKeypair {
    pub pk: Vec<u8>,
    pub sk: PkeSecretKey,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PkeCiphertext {
    pub lambda: usize,
    /// Per seed bit: n residues of A·r, then one residue of b·r + bit·⌊q/2⌋.
    kem: Vec<u16>,
    body: Vec<u8>,
}

fn stream_bytes(seed: &Bits, len: usize) -> Vec<u8> {
    let mut h = Sha256::new();
    h.update(b"mdvnizk.pke.stream");
    h.update(seed.to_bytes());
    let mut rng = ChaCha20Rng::from_seed(h.finalize().into());
    let mut out = vec![0u8; len];
    rng.fill_bytes(&mut out);
    out
}

/// pkeGen: sample (pk, sk) at parameters for λ.
pub fn generate(lambda: usize, rng: &mut impl RngCore) -> PkeKeypair {
    let params = PkeParams::new(lambda);
    let q = params.q as u32;
    let s: Vec<u16> = (0..params.n).map(|_| (rng.next_u32() % q) as u16).collect();
    let a: Vec<u16> = (0..params.n * params.m)
        .map(|_| (rng.next_u32() % q) as u16)
        .collect();
    let mut b = vec![0u16; params.m];
    for (j, bj) in b.iter_mut().enumerate() {
        let mut acc = 0u64;
        for i in 0..params.n {
            acc += s[i] as u64 * a[i * params.m + j] as u64;
        }
        // e_j uniform in {-1, 0, 1}
        let e = rng.gen_range(0..3) as u64; // 0,1,2 ~ q-1,0,1 after shift
        let shifted = acc + (q as u64 - 1) + e;
        *bj = (shifted % q as u64) as u16;
    }
    let mut pk = Vec::with_capacity(params.pk_len());
    for &v in a.iter().chain(b.iter()) {
        pk.extend_from_slice(&v.to_le_bytes());
    }
    PkeKeypair {
        pk,
        sk: PkeSecretKey { params, s },
    }
}

/// pkeEnc with explicit coins, so relation checks can re-execute it.
pub fn encrypt_with_coins(
    lambda: usize,
    pk_bytes: &[u8],
    message: &[u8],
    coins: &[u8; COIN_LEN],
) -> Result<PkeCiphertext> {
    let params = PkeParams::new(lambda);
    let pk = parse_pk(&params, pk_bytes)?;
    let mut rng = ChaCha20Rng::from_seed(*coins);
    let q = params.q as u64;
    let half = q / 2;

    let seed = Bits::random(SEED_BITS, &mut rng);
    let mut kem = Vec::with_capacity(SEED_BITS * (params.n + 1));
    for bit_idx in 0..SEED_BITS {
        let r: Vec<u8> = (0..params.m).map(|_| (rng.next_u32() & 1) as u8).collect();
        for i in 0..params.n {
            let mut acc = 0u64;
            for (j, &rj) in r.iter().enumerate() {
                if rj == 1 {
                    acc += pk.a[i * params.m + j] as u64;
                }
            }
            kem.push((acc % q) as u16);
        }
        let mut acc = 0u64;
        for (j, &rj) in r.iter().enumerate() {
            if rj == 1 {
                acc += pk.b[j] as u64;
            }
        }
        if seed[bit_idx] == 1 {
            acc += half;
        }
        kem.push((acc % q) as u16);
    }

    let body = message
        .iter()
        .zip(stream_bytes(&seed, message.len()))
        .map(|(&m, s)| m ^ s)
        .collect();
    Ok(PkeCiphertext { lambda, kem, body })
}

/// pkeEnc: fresh coins from the caller's stream.
pub fn encrypt(
    lambda: usize,
    pk_bytes: &[u8],
    message: &[u8],
    rng: &mut impl RngCore,
) -> Result<PkeCiphertext> {
    let mut coins = [0u8; COIN_LEN];
    rng.fill_bytes(&mut coins);
    encrypt_with_coins(lambda, pk_bytes, message, &coins)
}

/// pkeDec: deterministic; recovers the seed via nearest-plateau rounding and
/// unmasks the body.
pub fn decrypt(sk: &PkeSecretKey, ct: &PkeCiphertext) -> Result<Vec<u8>> {
    let params = sk.params;
    if ct.lambda != params.lambda {
        return Err(Error::DecodeFailure(format!(
            "ciphertext for λ={} under key for λ={}",
            ct.lambda, params.lambda
        )));
    }
    if ct.kem.len() != SEED_BITS * (params.n + 1) {
        return Err(Error::DecodeFailure("kem length mismatch".into()));
    }
    let q = params.q as u64;
    let mut seed = Bits::new();
    for chunk in ct.kem.chunks_exact(params.n + 1) {
        let (c1, c2) = (&chunk[..params.n], chunk[params.n] as u64);
        let mut dot = 0u64;
        for (si, &ci) in sk.s.iter().zip(c1) {
            dot += *si as u64 * ci as u64;
        }
        let centered = (c2 + q * params.n as u64 - dot % (q * params.n as u64)) % q;
        let dist0 = centered.min(q - centered);
        let dist1 = centered.abs_diff(q / 2);
        seed.push(u8::from(dist1 < dist0));
    }
    Ok(ct
        .body
        .iter()
        .zip(stream_bytes(&seed, ct.body.len()))
        .map(|(&c, s)| c ^ s)
        .collect())
}

impl PkeCiphertext {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"CT1\0");
        put_varint(&mut out, self.lambda as u64);
        put_varint(&mut out, self.kem.len() as u64);
        for &v in &self.kem {
            out.extend_from_slice(&v.to_le_bytes());
        }
        put_frame(&mut out, &self.body);
        out
    }

    pub fn decode_from(r: &mut Reader<'_>) -> Result<Self> {
        r.tag(b"CT1\0")?;
        let lambda = r.usize()?;
        let kem_len = r.usize()?;
        let kem_bytes = r.bytes(kem_len * 2)?;
        let kem = kem_bytes
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]))
            .collect();
        let body = r.frame()?.to_vec();
        Ok(PkeCiphertext { lambda, kem, body })
    }
}

impl PkeSecretKey {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"SK1\0");
        put_varint(&mut out, self.params.lambda as u64);
        for &v in &self.s {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn decode_from(r: &mut Reader<'_>) -> Result<Self> {
        r.tag(b"SK1\0")?;
        let params = PkeParams::new(r.usize()?);
        let bytes = r.bytes(params.n * 2)?;
        let s = bytes
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]))
            .collect();
        Ok(PkeSecretKey { params, s })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn pk_length_contract() {
        let mut r = rng::stream(&rng::root_from_u64(1), "pke.len");
        for lambda in [16usize, 32] {
            let kp = generate(lambda, &mut r);
            assert_eq!(kp.pk.len(), PkeParams::new(lambda).pk_len());
        }
    }

    #[test]
    fn uniform_string_parses_as_key() {
        let mut r = rng::stream(&rng::root_from_u64(2), "pke.uniform");
        let params = PkeParams::new(32);
        let mut ek = vec![0u8; params.pk_len()];
        r.fill_bytes(&mut ek);
        // encryption under a uniform string must not fail
        encrypt(32, &ek, b"message under a random string", &mut r).unwrap();
    }

    #[test]
    fn round_trip_random_messages() {
        let mut r = rng::stream(&rng::root_from_u64(3), "pke.rt");
        let kp = generate(32, &mut r);
        for _ in 0..100 {
            let len = rand::Rng::gen_range(&mut r, 0..48);
            let msg: Vec<u8> = (0..len).map(|_| rand::Rng::gen(&mut r)).collect();
            let ct = encrypt(32, &kp.pk, &msg, &mut r).unwrap();
            assert_eq!(decrypt(&kp.sk, &ct).unwrap(), msg);
        }
    }

    #[test]
    fn empty_message_round_trip() {
        let mut r = rng::stream(&rng::root_from_u64(4), "pke.empty");
        let kp = generate(32, &mut r);
        let ct = encrypt(32, &kp.pk, b"", &mut r).unwrap();
        assert_eq!(decrypt(&kp.sk, &ct).unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn distinct_randomness_distinct_ciphertexts() {
        let mut r = rng::stream(&rng::root_from_u64(5), "pke.rand");
        let kp = generate(32, &mut r);
        let a = encrypt(32, &kp.pk, b"same message", &mut r).unwrap();
        let b = encrypt(32, &kp.pk, b"same message", &mut r).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn adversarial_coins_still_decrypt() {
        // correctness against malicious encryptors: the coins are chosen by
        // the encryptor; any value must decrypt correctly under honest keys
        let mut r = rng::stream(&rng::root_from_u64(6), "pke.mal");
        let kp = generate(32, &mut r);
        for trial in 0..1000u64 {
            let mut coins = [0u8; COIN_LEN];
            coins[..8].copy_from_slice(&trial.to_le_bytes());
            coins[8..16].copy_from_slice(&trial.wrapping_mul(0x5851f42d4c957f2d).to_le_bytes());
            let msg = trial.to_le_bytes();
            let ct = encrypt_with_coins(32, &kp.pk, &msg, &coins).unwrap();
            assert_eq!(decrypt(&kp.sk, &ct).unwrap(), msg);
        }
    }

    #[test]
    fn wrong_key_garbles() {
        let mut r = rng::stream(&rng::root_from_u64(7), "pke.wrong");
        let kp = generate(32, &mut r);
        let other = generate(32, &mut r);
        let mut wrong = 0;
        for trial in 0..100u64 {
            let msg = trial.to_le_bytes();
            let ct = encrypt(32, &kp.pk, &msg, &mut r).unwrap();
            match decrypt(&other.sk, &ct) {
                Ok(out) if out == msg => {}
                _ => wrong += 1,
            }
        }
        assert!(wrong >= 99, "wrong key decrypted correctly {}/100", 100 - wrong);
    }

    #[test]
    fn serialization_round_trip() {
        let mut r = rng::stream(&rng::root_from_u64(8), "pke.ser");
        let kp = generate(16, &mut r);
        let ct = encrypt(16, &kp.pk, b"wire", &mut r).unwrap();
        let bytes = ct.encode();
        let mut rd = Reader::new(&bytes, "pke ct");
        let ct2 = PkeCiphertext::decode_from(&mut rd).unwrap();
        rd.finish().unwrap();
        assert_eq!(ct, ct2);

        let skb = kp.sk.encode();
        let mut rd = Reader::new(&skb, "pke sk");
        let sk2 = PkeSecretKey::decode_from(&mut rd).unwrap();
        rd.finish().unwrap();
        assert_eq!(kp.sk, sk2);
    }
}
