//! Statevector construction and norms.
//!
//! Basis index convention throughout the solver: bit `i` of the index is the
//! value of variable `i`, so index 1 on three qubits is the assignment
//! `x = (1, 0, 0)`.

use super::kernels;
use num_complex::Complex64;

/// The uniform superposition `|+>^k`: every amplitude `2^(-k/2)`.
pub fn plus_state(k: usize) -> Vec<Complex64> {
    let len = 1usize << k;
    let amp = Complex64::new((len as f64).sqrt().recip(), 0.0);
    vec![amp; len]
}

/// Squared 2-norm of a statevector.
///
/// Summed with the same fixed-chunk two-level scheme as the other
/// reductions, so the result is bit-identical however the work is split.
pub fn norm_sq(amps: &[Complex64]) -> f64 {
    kernels::fold_chunk_sums(amps.len(), |start, end| {
        amps[start..end].iter().map(|a| a.norm_sqr()).sum()
    })
}

/// Probability of basis state `z`.
pub fn probability(amps: &[Complex64], z: usize) -> f64 {
    amps[z].norm_sqr()
}

/// Cumulative probabilities, for inverse-transform sampling. The last entry
/// is the total weight (1 up to rounding for a normalized state).
pub fn cumulative_probabilities(amps: &[Complex64]) -> Vec<f64> {
    let mut cdf = Vec::with_capacity(amps.len());
    let mut acc = 0.0;
    for a in amps {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    cdf
}
