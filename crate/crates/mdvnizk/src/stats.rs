//! Experiment statistics: two-sample chi-square over byte histograms,
//! exact exhaustive acceptance rates, and a seeded trial runner with an
//! optional data-parallel implementation.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::sigma::SigmaBackend;

#[derive(Clone, Copy, Debug)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Same-distribution hypothesis not rejected at significance 0.01.
    pub pass: bool,
}

pub const SIGNIFICANCE: f64 = 0.01;

fn histogram(samples: &[Vec<u8>], bins: usize) -> Vec<u64> {
    let mut h = vec![0u64; bins];
    for s in samples {
        for &b in s {
            h[b as usize * bins / 256] += 1;
        }
    }
    h
}

/// Two-sample chi-square over byte-value histograms with `bins` equal-width
/// bins (bins divides 256). Bins with too few pooled observations are
/// merged into their neighbor to keep the asymptotics honest.
pub fn chi_square_same_dist(
    samples_a: &[Vec<u8>],
    samples_b: &[Vec<u8>],
    bins: usize,
) -> Result<ChiSquareResult> {
    if samples_a.len() < 100 || samples_b.len() < 100 {
        return Err(Error::malformed("chi-square", "fewer than 100 samples"));
    }
    assert!(bins >= 2 && 256 % bins == 0);
    let ha = histogram(samples_a, bins);
    let hb = histogram(samples_b, bins);
    let na: u64 = ha.iter().sum();
    let nb: u64 = hb.iter().sum();
    if na == 0 || nb == 0 {
        return Err(Error::malformed("chi-square", "empty samples"));
    }

    // merge adjacent bins until every pooled bin has ≥ 5 expected counts
    let mut merged: Vec<(u64, u64)> = Vec::new();
    let mut acc = (0u64, 0u64);
    for i in 0..bins {
        acc.0 += ha[i];
        acc.1 += hb[i];
        if acc.0 + acc.1 >= 10 {
            merged.push(acc);
            acc = (0, 0);
        }
    }
    if acc != (0, 0) {
        if let Some(last) = merged.last_mut() {
            last.0 += acc.0;
            last.1 += acc.1;
        } else {
            merged.push(acc);
        }
    }
    if merged.len() < 2 {
        // both histograms concentrated in one pooled bin: identical support
        return Ok(ChiSquareResult {
            statistic: 0.0,
            p_value: 1.0,
            pass: true,
        });
    }

    let total = (na + nb) as f64;
    let mut stat = 0.0;
    for &(a, b) in &merged {
        let col = (a + b) as f64;
        let ea = col * na as f64 / total;
        let eb = col * nb as f64 / total;
        stat += (a as f64 - ea).powi(2) / ea + (b as f64 - eb).powi(2) / eb;
    }
    let df = (merged.len() - 1) as f64;
    let dist = ChiSquared::new(df).expect("df >= 1");
    let p_value = 1.0 - dist.cdf(stat);
    Ok(ChiSquareResult {
        statistic: stat,
        p_value,
        pass: p_value >= SIGNIFICANCE,
    })
}

/// Exact acceptance fraction of a fixed (α, tape) strategy over the full
/// challenge space. Exact rational as (accepting, total); requires
/// challenge spaces up to 2^12.
pub fn exhaustive_accept_rate(
    backend: &dyn SigmaBackend,
    x: &[u8],
    alpha: &[u8],
    tape: &Bits,
) -> Result<(u64, u64)> {
    let len = backend.challenge_len();
    if len > 12 {
        return Err(Error::malformed(
            "exhaustive enumeration",
            "challenge space larger than 2^12",
        ));
    }
    let total = 1u64 << len;
    let mut accepting = 0u64;
    for bval in 0..total {
        let beta = Bits::from_uint(bval, len);
        let gamma = backend.p3(&beta, tape);
        if backend.verify(x, alpha, &beta, &gamma) {
            accepting += 1;
        }
    }
    Ok((accepting, total))
}

/// Run `n` independent seeded trials and count successes. Each trial sees
/// only its index-derived seed, so parallel and sequential execution give
/// identical results.
#[cfg(feature = "parallel")]
pub fn run_trials<F>(n: u64, root: u64, trial: F) -> u64
where
    F: Fn(u64) -> bool + Sync,
{
    use rayon::prelude::*;
    (0..n)
        .into_par_iter()
        .filter(|&i| trial(root.wrapping_add(i)))
        .count() as u64
}

#[cfg(not(feature = "parallel"))]
pub fn run_trials<F>(n: u64, root: u64, trial: F) -> u64
where
    F: Fn(u64) -> bool + Sync,
{
    (0..n).filter(|&i| trial(root.wrapping_add(i))).count() as u64
}
