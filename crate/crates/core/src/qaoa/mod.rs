//! Depth-`p` variational statevector solver for sub-problems.
//!
//! One solve tabulates the sub-problem energies, searches the circuit
//! angles with a simplex optimizer whose objective is the exact statevector
//! expectation, then samples measurements from the best circuit found and
//! keeps the lowest-energy assignment seen. Everything is deterministic in
//! the task seed.

pub mod ansatz;
pub mod kernels;
pub mod optimize;
pub mod sample;
pub mod state;
pub mod table;

pub use ansatz::{circuit_expectation, evolve, QaoaParams};
pub use optimize::{initial_params, initial_steps, nelder_mead, NelderMeadConfig};
pub use sample::{sample_best, SampleOutcome};
pub use table::{EnergyTable, QAOA_MAX_QUBITS};

use crate::decompose::SubQubo;
use crate::qubo::BitString;
use crate::seed::derive_seed;
use serde::{Deserialize, Serialize};
use std::time::{Duration, Instant};
use thiserror::Error;

const OPT_STREAM: u64 = 0x616e_6773; // "angs"
const SAMPLE_STREAM: u64 = 0x7368_6f74; // "shot"

#[derive(Debug, Error)]
pub enum QaoaError {
    #[error("{k} variables exceeds the statevector limit of {max}")]
    TooManyQubits { k: usize, max: usize },
    #[error("invalid solver configuration: {0}")]
    BadConfig(String),
}

/// Knobs for one sub-problem solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaConfig {
    /// Circuit depth (number of cost/mixer rounds).
    #[serde(default = "default_layers")]
    pub layers: usize,
    /// Measurements drawn from the optimized circuit.
    #[serde(default = "default_shots")]
    pub shots: usize,
    /// Objective-evaluation budget for the angle search.
    #[serde(default = "default_max_evals")]
    pub max_evals: usize,
    /// Simplex collapse tolerance for the angle search.
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_layers() -> usize {
    1
}
fn default_shots() -> usize {
    1024
}
fn default_max_evals() -> usize {
    200
}
fn default_tol() -> f64 {
    1e-3
}

impl Default for QaoaConfig {
    fn default() -> Self {
        QaoaConfig {
            layers: default_layers(),
            shots: default_shots(),
            max_evals: default_max_evals(),
            tol: default_tol(),
        }
    }
}

impl QaoaConfig {
    pub fn validate(&self) -> Result<(), QaoaError> {
        if self.layers == 0 {
            return Err(QaoaError::BadConfig("layers must be at least 1".into()));
        }
        if self.shots == 0 {
            return Err(QaoaError::BadConfig("shots must be at least 1".into()));
        }
        if self.max_evals == 0 {
            return Err(QaoaError::BadConfig(
                "max_evals must be at least 1".into(),
            ));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(QaoaError::BadConfig(
                "tol must be a positive finite number".into(),
            ));
        }
        Ok(())
    }
}

/// What one sub-problem solve produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaResult {
    /// Best measured assignment, in sub-problem variable order.
    pub best_bits: BitString,
    /// Its energy under the sub-problem matrix, recomputed from scratch.
    pub best_energy: f64,
    /// The angles the search settled on.
    pub params: QaoaParams,
    /// Objective evaluations spent by the search.
    pub evals: usize,
    #[serde(with = "crate::duration_secs")]
    pub wall_time: Duration,
}

/// Solve one sub-problem end to end. `seed` drives both the angle search's
/// starting point and the measurement draws, through separate derived
/// streams, so a task is exactly reproducible from its seed alone.
pub fn solve_subqubo(sub: &SubQubo, cfg: &QaoaConfig, seed: u64) -> Result<QaoaResult, QaoaError> {
    cfg.validate()?;
    let start = Instant::now();
    let table = EnergyTable::build(sub.matrix())?;

    let x0 = initial_params(cfg.layers, derive_seed(&[seed, OPT_STREAM]));
    let steps = initial_steps(cfg.layers);
    let nm = NelderMeadConfig {
        max_evals: cfg.max_evals,
        tol: cfg.tol,
    };
    let opt = nelder_mead(
        |flat| circuit_expectation(&table, &QaoaParams::from_flat(flat)),
        &x0,
        &steps,
        &nm,
    );

    let params = QaoaParams::from_flat(&opt.best_point);
    let amps = evolve(&table, &params);
    let sampled = sample_best(&amps, &table, cfg.shots, derive_seed(&[seed, SAMPLE_STREAM]));

    let best_bits = BitString::from_index(sampled.best_index as u64, table.k());
    let best_energy = sub.matrix().energy_bits(best_bits.as_slice());
    Ok(QaoaResult {
        best_bits,
        best_energy,
        params,
        evals: opt.evals,
        wall_time: start.elapsed(),
    })
}
