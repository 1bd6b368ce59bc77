//! Classical reference solvers: exact enumeration for small problems and a
//! restarted simulated annealer for everything else. Both serve as baselines
//! and as reference energies for approximation ratios.

use super::{BitString, QuboError, QuboProblem};
use crate::seed::derive_seed;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Exhaustive enumeration cap; 2^26 states is a few seconds of walking.
pub const BRUTE_FORCE_MAX_N: usize = 26;

const SA_STREAM: u64 = 0x616e_6e65_616c; // "anneal"

/// Exact minimizer by Gray-code enumeration: each step flips one bit, so the
/// running energy is maintained with O(n) flip deltas instead of O(n^2)
/// evaluations. Ties on the computed energy go to the lexicographically
/// smallest assignment.
pub fn brute_force_solve(q: &QuboProblem) -> Result<(BitString, f64), QuboError> {
    let n = q.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(QuboError::TooLarge {
            n,
            max: BRUTE_FORCE_MAX_N,
        });
    }
    let m = q.matrix();
    let mut bits = vec![0u8; n];
    let mut energy = 0.0f64; // all-zeros assignment
    let mut best_bits = bits.clone();
    let mut best_energy = energy;
    for t in 1..(1u64 << n) {
        let b = t.trailing_zeros() as usize; // Gray-code step flips this bit
        energy += m.flip_delta_bits(&bits, b);
        bits[b] ^= 1;
        if energy < best_energy || (energy == best_energy && bits < best_bits) {
            best_energy = energy;
            best_bits.copy_from_slice(&bits);
        }
    }
    let best = BitString::from_bits(best_bits).expect("bits are 0/1");
    // Re-evaluate from scratch so the reported energy carries no walk drift.
    let exact = q.energy(&best)?;
    Ok((best, exact))
}

/// Annealing schedule. The defaults match the reference configuration used
/// throughout the test suite: geometric cooling from the largest coefficient
/// magnitude down to `1e-3` over 10^4 sweeps, best-of-10 restarts.
#[derive(Clone, Debug)]
pub struct SaConfig {
    pub restarts: usize,
    pub sweeps: usize,
    /// Starting temperature; defaults to `max |Q_ij|` (or 1 if the matrix is
    /// all zeros).
    pub t_initial: Option<f64>,
    pub t_final: f64,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig {
            restarts: 10,
            sweeps: 10_000,
            t_initial: None,
            t_final: 1e-3,
        }
    }
}

impl SaConfig {
    /// Shorter schedule for quick smoke runs.
    pub fn quick() -> Self {
        SaConfig {
            restarts: 4,
            sweeps: 1_000,
            t_initial: None,
            t_final: 1e-3,
        }
    }
}

/// Single-flip Metropolis annealer with restarts. Each restart draws its own
/// starting assignment and proposal stream from a seed derived from `seed`
/// and the restart index, so results do not depend on whether restarts run
/// sequentially or on the rayon pool. Returns the best assignment seen across
/// all restarts (ties: lower energy first, then lexicographic, then earlier
/// restart), with the energy re-evaluated from scratch.
pub fn simulated_annealing_solve(
    q: &QuboProblem,
    cfg: &SaConfig,
    seed: u64,
) -> Result<(BitString, f64), QuboError> {
    if cfg.restarts == 0 || cfg.sweeps == 0 {
        return Err(QuboError::InvalidInput(
            "annealing needs at least one restart and one sweep".into(),
        ));
    }
    if let Some(t0) = cfg.t_initial {
        if !(t0.is_finite() && t0 > 0.0) {
            return Err(QuboError::InvalidInput("t_initial must be positive".into()));
        }
    }
    if !(cfg.t_final.is_finite() && cfg.t_final > 0.0) {
        return Err(QuboError::InvalidInput("t_final must be positive".into()));
    }

    let t0 = cfg
        .t_initial
        .unwrap_or_else(|| {
            let m = q.matrix().max_abs();
            if m > 0.0 {
                m
            } else {
                1.0
            }
        })
        .max(cfg.t_final);

    let run_restart = |r: usize| -> (f64, BitString) {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, SA_STREAM, r as u64]));
        let n = q.n();
        let m = q.matrix();
        let mut bits: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2u8)).collect();
        let mut energy = m.energy_bits(&bits);
        let mut best_bits = bits.clone();
        let mut best_energy = energy;
        let ratio = cfg.t_final / t0;
        for sweep in 0..cfg.sweeps {
            let frac = if cfg.sweeps > 1 {
                sweep as f64 / (cfg.sweeps - 1) as f64
            } else {
                1.0
            };
            let temp = t0 * ratio.powf(frac);
            for _ in 0..n {
                let i = rng.gen_range(0..n);
                let delta = m.flip_delta_bits(&bits, i);
                if delta < 0.0 || rng.gen::<f64>() < (-delta / temp).exp() {
                    bits[i] ^= 1;
                    energy += delta;
                    if energy < best_energy {
                        best_energy = energy;
                        best_bits.copy_from_slice(&bits);
                    }
                }
            }
        }
        (best_energy, BitString::from_bits(best_bits).expect("bits"))
    };

    let per_restart: Vec<(f64, BitString)> = run_restarts(cfg.restarts, run_restart);

    let mut best: Option<(f64, BitString)> = None;
    for (e, b) in per_restart {
        let exact = q.energy(&b)?;
        debug_assert!((exact - e).abs() <= 1e-6 * (1.0 + e.abs()));
        match &best {
            Some((be, bb)) if exact > *be || (exact == *be && b >= *bb) => {}
            _ => best = Some((exact, b)),
        }
    }
    let (energy, bits) = best.expect("at least one restart");
    Ok((bits, energy))
}

#[cfg(feature = "parallel")]
fn run_restarts<F>(restarts: usize, f: F) -> Vec<(f64, BitString)>
where
    F: Fn(usize) -> (f64, BitString) + Send + Sync,
{
    use rayon::prelude::*;
    (0..restarts).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_restarts<F>(restarts: usize, f: F) -> Vec<(f64, BitString)>
where
    F: Fn(usize) -> (f64, BitString) + Send + Sync,
{
    (0..restarts).map(f).collect()
}
