//! Gradient-free parameter search for the circuit angles.
//!
//! A plain Nelder-Mead simplex with the textbook coefficients
//! (reflection 1, expansion 2, contraction 0.5, shrink 0.5). The objective
//! is a noiseless statevector expectation, but it is cheap to make no
//! smoothness assumptions and simplex search needs none. The search is
//! budgeted in objective evaluations, and the best point ever evaluated is
//! what gets returned, even if a later simplex wandered off.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

/// Initial step sizes for the simplex, per angle kind. Gammas live on a
/// larger interval, so they get the larger spread.
pub const GAMMA_STEP: f64 = 0.4;
pub const BETA_STEP: f64 = 0.2;

#[derive(Clone, Debug)]
pub struct NelderMeadConfig {
    /// Hard cap on objective evaluations.
    pub max_evals: usize,
    /// Stop once every vertex is within this distance (max-norm) of the
    /// best one.
    pub tol: f64,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        NelderMeadConfig {
            max_evals: 200,
            tol: 1e-3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OptimizeOutcome {
    pub best_point: Vec<f64>,
    pub best_value: f64,
    /// Objective evaluations actually spent.
    pub evals: usize,
}

/// Random starting angles for a `p`-layer circuit, flat layout (gammas then
/// betas): gammas uniform on `[0, 2 pi)`, betas uniform on `[0, pi)`, drawn
/// in that order so the stream is stable.
pub fn initial_params(p: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut flat = Vec::with_capacity(2 * p);
    for _ in 0..p {
        flat.push(rng.gen_range(0.0..TAU));
    }
    for _ in 0..p {
        flat.push(rng.gen_range(0.0..PI));
    }
    flat
}

/// Initial per-dimension simplex steps for a `p`-layer flat parameter
/// vector.
pub fn initial_steps(p: usize) -> Vec<f64> {
    let mut steps = vec![GAMMA_STEP; p];
    steps.extend(std::iter::repeat_n(BETA_STEP, p));
    steps
}

/// Minimize `f` starting from `x0`, with the simplex spanned by
/// `x0 + steps[i] * e_i`.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    steps: &[f64],
    cfg: &NelderMeadConfig,
) -> OptimizeOutcome {
    assert_eq!(x0.len(), steps.len());
    assert!(cfg.max_evals >= 1, "need at least one evaluation");
    let dim = x0.len();

    let mut evals = 0usize;
    let mut best_point = x0.to_vec();
    let mut best_value = f64::INFINITY;
    // Every objective call goes through here so the budget and the
    // best-seen tracking cannot be bypassed.
    let mut eval = |x: &[f64], evals: &mut usize, bp: &mut Vec<f64>, bv: &mut f64| -> Option<f64> {
        if *evals >= cfg.max_evals {
            return None;
        }
        *evals += 1;
        let v = f(x);
        if v < *bv {
            *bv = v;
            bp.clear();
            bp.extend_from_slice(x);
        }
        Some(v)
    };

    macro_rules! eval_or_stop {
        ($x:expr) => {
            match eval($x, &mut evals, &mut best_point, &mut best_value) {
                Some(v) => v,
                None => {
                    return OptimizeOutcome {
                        best_point,
                        best_value,
                        evals,
                    }
                }
            }
        };
    }

    // Build and evaluate the starting simplex: x0 plus one step along each
    // axis.
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = eval_or_stop!(x0);
    simplex.push((x0.to_vec(), v0));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += steps[i];
        let v = eval_or_stop!(&x);
        simplex.push((x, v));
    }

    loop {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective"));

        // Converged when the simplex has collapsed onto its best vertex.
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
            })
            .fold(0.0f64, f64::max);
        if diameter < cfg.tol {
            break;
        }

        let worst = simplex.len() - 1;
        let centroid: Vec<f64> = (0..dim)
            .map(|i| simplex[..worst].iter().map(|(x, _)| x[i]).sum::<f64>() / worst as f64)
            .collect();
        let towards = |from: &[f64], scale: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(from)
                .map(|(c, x)| c + scale * (c - x))
                .collect()
        };

        let reflected = towards(&simplex[worst].0, 1.0);
        let fr = eval_or_stop!(&reflected);

        if fr < simplex[0].1 {
            // Best so far; try stretching further the same way.
            let expanded = towards(&simplex[worst].0, 2.0);
            let fe = eval_or_stop!(&expanded);
            simplex[worst] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < simplex[worst - 1].1 {
            simplex[worst] = (reflected, fr);
            continue;
        }

        // Reflection did not help; contract toward the centroid, on the
        // reflected side if that was at least better than the worst vertex.
        let contracted = if fr < simplex[worst].1 {
            towards(&simplex[worst].0, 0.5)
        } else {
            towards(&simplex[worst].0, -0.5)
        };
        let fc = eval_or_stop!(&contracted);
        if fc < simplex[worst].1.min(fr) {
            simplex[worst] = (contracted, fc);
            continue;
        }

        // Shrink everything toward the best vertex.
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = anchor
                .iter()
                .zip(&vertex.0)
                .map(|(a, b)| a + 0.5 * (b - a))
                .collect();
            let v = eval_or_stop!(&x);
            *vertex = (x, v);
        }
    }

    OptimizeOutcome {
        best_point,
        best_value,
        evals,
    }
}
