//! The alternating-layer circuit: uniform superposition, then `p` rounds of
//! phase separation followed by transverse-field mixing.

use super::kernels::{apply_cost_layer, apply_mixer_layer, expectation};
use super::state::plus_state;
use super::table::EnergyTable;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Circuit angles: one `(gamma, beta)` pair per layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Self {
        assert_eq!(gammas.len(), betas.len(), "one beta per gamma");
        QaoaParams { gammas, betas }
    }

    /// Number of layers.
    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    /// Flat layout used by the optimizer: all gammas, then all betas.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = self.gammas.clone();
        flat.extend_from_slice(&self.betas);
        flat
    }

    pub fn from_flat(flat: &[f64]) -> Self {
        assert!(flat.len().is_multiple_of(2), "flat params come in (gamma, beta) halves");
        let p = flat.len() / 2;
        QaoaParams {
            gammas: flat[..p].to_vec(),
            betas: flat[p..].to_vec(),
        }
    }
}

/// Run the circuit and return the final statevector.
pub fn evolve(table: &EnergyTable, params: &QaoaParams) -> Vec<Complex64> {
    let mut amps = plus_state(table.k());
    for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
        apply_cost_layer(&mut amps, table.values(), gamma);
        apply_mixer_layer(&mut amps, table.k(), beta);
    }
    amps
}

/// The energy expectation of the circuit output for `params`; this is the
/// scalar the classical optimizer minimizes.
pub fn circuit_expectation(table: &EnergyTable, params: &QaoaParams) -> f64 {
    let amps = evolve(table, params);
    expectation(&amps, table.values())
}
