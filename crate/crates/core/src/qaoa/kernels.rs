//! Statevector kernels: phase separation, transverse-field mixing, and the
//! reductions over basis states.
//!
//! Every kernel comes in a `_seq` and (with the `parallel` feature) a `_par`
//! variant that perform the same arithmetic in the same order within each
//! fixed-size chunk, and combine chunk results in index order. The
//! un-suffixed entry points pick a variant by length, and all of them return
//! bit-identical floats regardless of feature flags or thread count.

use num_complex::Complex64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk size for reductions and the energy-table walk. Fixed (rather than
/// derived from thread count) so that splitting the work differently cannot
/// change any rounding.
pub const SUM_CHUNK: usize = 4096;

/// Below this many amplitudes the parallel variants are skipped: the
/// fork-join overhead outweighs the work, and small statevectors are
/// exactly the ones solved many-at-a-time by the worker pool, which wants
/// the cores for itself.
pub const PAR_MIN_LEN: usize = 1 << 17;

/// Multiply each amplitude by `exp(-i * gamma * E(z))`.
pub fn apply_cost_layer(amps: &mut [Complex64], values: &[f64], gamma: f64) {
    debug_assert_eq!(amps.len(), values.len());
    #[cfg(feature = "parallel")]
    if amps.len() >= PAR_MIN_LEN {
        apply_cost_layer_par(amps, values, gamma);
        return;
    }
    apply_cost_layer_seq(amps, values, gamma);
}

pub fn apply_cost_layer_seq(amps: &mut [Complex64], values: &[f64], gamma: f64) {
    for (a, &e) in amps.iter_mut().zip(values) {
        *a *= phase(gamma, e);
    }
}

#[cfg(feature = "parallel")]
pub fn apply_cost_layer_par(amps: &mut [Complex64], values: &[f64], gamma: f64) {
    amps.par_chunks_mut(SUM_CHUNK)
        .zip(values.par_chunks(SUM_CHUNK))
        .for_each(|(ac, vc)| apply_cost_layer_seq(ac, vc, gamma));
}

#[inline]
fn phase(gamma: f64, e: f64) -> Complex64 {
    let (sn, cs) = (gamma * e).sin_cos();
    Complex64::new(cs, -sn)
}

/// Apply `exp(i * beta * X)` on every qubit of a `k`-qubit statevector.
///
/// Each single-qubit factor mixes the amplitude pairs that differ only in
/// that qubit with the rotation
/// `[[cos b, i sin b], [i sin b, cos b]]`; the factors commute, so they are
/// applied lowest qubit first.
pub fn apply_mixer_layer(amps: &mut [Complex64], k: usize, beta: f64) {
    debug_assert_eq!(amps.len(), 1 << k);
    #[cfg(feature = "parallel")]
    if amps.len() >= PAR_MIN_LEN {
        apply_mixer_layer_par(amps, k, beta);
        return;
    }
    apply_mixer_layer_seq(amps, k, beta);
}

pub fn apply_mixer_layer_seq(amps: &mut [Complex64], k: usize, beta: f64) {
    let (sn, cs) = beta.sin_cos();
    for i in 0..k {
        let half = 1usize << i;
        for block in amps.chunks_mut(half << 1) {
            let (lo, hi) = block.split_at_mut(half);
            mix_pairs(lo, hi, cs, sn);
        }
    }
}

#[cfg(feature = "parallel")]
pub fn apply_mixer_layer_par(amps: &mut [Complex64], k: usize, beta: f64) {
    let (sn, cs) = beta.sin_cos();
    for i in 0..k {
        let half = 1usize << i;
        if half >= SUM_CHUNK {
            // High qubits give a handful of huge blocks; parallelize the
            // pair loop inside each block instead of across blocks.
            for block in amps.chunks_mut(half << 1) {
                let (lo, hi) = block.split_at_mut(half);
                lo.par_chunks_mut(SUM_CHUNK)
                    .zip(hi.par_chunks_mut(SUM_CHUNK))
                    .for_each(|(lc, hc)| mix_pairs(lc, hc, cs, sn));
            }
        } else {
            amps.par_chunks_mut(half << 1).for_each(|block| {
                let (lo, hi) = block.split_at_mut(half);
                mix_pairs(lo, hi, cs, sn);
            });
        }
    }
}

/// Rotate the amplitude pairs `(lo[p], hi[p])`, where `lo` holds the states
/// with the active qubit clear and `hi` those with it set.
#[inline]
fn mix_pairs(lo: &mut [Complex64], hi: &mut [Complex64], cs: f64, sn: f64) {
    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
        let (ar, ai) = (a.re, a.im);
        let (br, bi) = (b.re, b.im);
        *a = Complex64::new(cs * ar - sn * bi, cs * ai + sn * br);
        *b = Complex64::new(cs * br - sn * ai, cs * bi + sn * ar);
    }
}

/// `<psi| E |psi>`: the probability-weighted mean of the tabulated energies.
pub fn expectation(amps: &[Complex64], values: &[f64]) -> f64 {
    debug_assert_eq!(amps.len(), values.len());
    #[cfg(feature = "parallel")]
    if amps.len() >= PAR_MIN_LEN {
        return expectation_par(amps, values);
    }
    expectation_seq(amps, values)
}

pub fn expectation_seq(amps: &[Complex64], values: &[f64]) -> f64 {
    fold_chunk_sums(amps.len(), |start, end| {
        expectation_chunk(&amps[start..end], &values[start..end])
    })
}

#[cfg(feature = "parallel")]
pub fn expectation_par(amps: &[Complex64], values: &[f64]) -> f64 {
    let partials: Vec<f64> = amps
        .par_chunks(SUM_CHUNK)
        .zip(values.par_chunks(SUM_CHUNK))
        .map(|(ac, vc)| expectation_chunk(ac, vc))
        .collect();
    partials.iter().sum()
}

#[inline]
fn expectation_chunk(amps: &[Complex64], values: &[f64]) -> f64 {
    amps.iter()
        .zip(values)
        .map(|(a, &e)| a.norm_sqr() * e)
        .sum()
}

/// Two-level deterministic sum: `term(start, end)` over consecutive
/// `SUM_CHUNK`-sized ranges of `0..len`, partial sums added in range order.
pub fn fold_chunk_sums(len: usize, term: impl Fn(usize, usize) -> f64) -> f64 {
    let mut total = 0.0;
    let mut start = 0;
    while start < len {
        let end = len.min(start + SUM_CHUNK);
        total += term(start, end);
        start = end;
    }
    total
}
