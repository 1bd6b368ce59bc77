//! The QUBO model: minimize `x^T Q x` over binary vectors `x`, with `Q`
//! stored upper-triangular (diagonal = linear terms).

mod generate;
mod io;
mod ising;
pub mod matrix;
mod maxcut;
mod solve;

pub use generate::generate_dense_qubo;
pub use io::{
    load_problem, read_maxcut, read_qubo, write_maxcut, write_maxcut_file, write_qubo,
    write_qubo_file, LoadedProblem,
};
pub use ising::{spin_of_bit, IsingCost};
pub use matrix::TriMatrix;
pub use maxcut::{generate_maxcut, MaxCutInstance};
pub use solve::{brute_force_solve, simulated_annealing_solve, SaConfig, BRUTE_FORCE_MAX_N};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuboError {
    #[error("assignment has {got} bits but the problem has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("variable index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("dimension {n} exceeds the limit of {max} for this operation")]
    TooLarge { n: usize, max: usize },
    #[error("coefficient ({i}, {j}) must be finite")]
    NonFinite { i: usize, j: usize },
    #[error("{0}")]
    InvalidInput(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A binary assignment. Bit `i` is variable `x_i`; displayed as the digit
/// string `x_0 x_1 ... x_{n-1}`. The derived `Ord` is lexicographic in that
/// same variable order, which is the tie-break used by the exact solver and
/// the measurement sampler.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    pub fn zeros(n: usize) -> Self {
        BitString { bits: vec![0; n] }
    }

    pub fn from_bits(bits: Vec<u8>) -> Result<Self, QuboError> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(QuboError::InvalidInput(format!(
                "bit {pos} is {}, expected 0 or 1",
                bits[pos]
            )));
        }
        Ok(BitString { bits })
    }

    /// Uniformly random assignment; one `u64` seed fully determines it.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        BitString {
            bits: (0..n).map(|_| rng.gen_range(0..2u8)).collect(),
        }
    }

    /// Little-endian decoding: bit `i` of `index` becomes `x_i`.
    pub fn from_index(index: u64, n: usize) -> Self {
        assert!(n <= 63, "index form only supports up to 63 variables");
        BitString {
            bits: (0..n).map(|i| ((index >> i) & 1) as u8).collect(),
        }
    }

    /// Inverse of [`BitString::from_index`].
    pub fn to_index(&self) -> u64 {
        assert!(self.bits.len() <= 63);
        self.bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> u8 {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: u8) {
        assert!(value <= 1);
        self.bits[i] = value;
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] ^= 1;
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

/// A QUBO instance: coefficient matrix plus bookkeeping identity.
///
/// Problems are built once (by a generator, the file reader, or
/// [`QuboProblem::from_entries`]) and treated as read-only afterwards; all
/// solver paths take `&QuboProblem` and may share it freely across threads.
#[derive(Clone, Debug, PartialEq)]
pub struct QuboProblem {
    matrix: TriMatrix,
    name: String,
    seed: Option<u64>,
}

impl QuboProblem {
    pub fn zeros(n: usize, name: impl Into<String>) -> Result<Self, QuboError> {
        if n == 0 {
            return Err(QuboError::InvalidInput("dimension must be at least 1".into()));
        }
        Ok(QuboProblem {
            matrix: TriMatrix::zeros(n),
            name: name.into(),
            seed: None,
        })
    }

    pub(crate) fn from_matrix(matrix: TriMatrix, name: impl Into<String>) -> Self {
        QuboProblem {
            matrix,
            name: name.into(),
            seed: None,
        }
    }

    /// Builds a problem from `(i, j, value)` coefficient entries. Entries
    /// with `i > j` are folded into the stored `(j, i)` slot; a repeated pair
    /// overwrites the earlier value.
    pub fn from_entries(
        n: usize,
        name: impl Into<String>,
        entries: &[(usize, usize, f64)],
    ) -> Result<Self, QuboError> {
        let mut q = QuboProblem::zeros(n, name)?;
        for &(i, j, v) in entries {
            q.set(i, j, v)?;
        }
        Ok(q)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) -> Result<(), QuboError> {
        let n = self.n();
        if i >= n || j >= n {
            return Err(QuboError::IndexOutOfRange { index: i.max(j), n });
        }
        if !v.is_finite() {
            return Err(QuboError::NonFinite { i, j });
        }
        self.matrix.set(i, j, v);
        Ok(())
    }

    pub fn matrix(&self) -> &TriMatrix {
        &self.matrix
    }

    /// Number of stored coefficients, zero or not: always `n (n + 1) / 2`.
    pub fn coefficient_count(&self) -> usize {
        self.matrix.packed().len()
    }

    pub fn nonzero_count(&self) -> usize {
        self.matrix.packed().iter().filter(|v| **v != 0.0).count()
    }

    /// `sum_{i <= j} Q[i][j] x_i x_j`.
    pub fn energy(&self, x: &BitString) -> Result<f64, QuboError> {
        self.check_dim(x)?;
        Ok(self.matrix.energy_bits(x.as_slice()))
    }

    /// Energy change from flipping `x_i`, in O(n) and without copying `x`.
    /// `energy(x) + energy_delta(x, i)` equals the energy of the flipped
    /// assignment.
    pub fn energy_delta(&self, x: &BitString, i: usize) -> Result<f64, QuboError> {
        self.check_dim(x)?;
        if i >= self.n() {
            return Err(QuboError::IndexOutOfRange { index: i, n: self.n() });
        }
        Ok(self.matrix.flip_delta_bits(x.as_slice(), i))
    }

    pub(crate) fn check_dim(&self, x: &BitString) -> Result<(), QuboError> {
        if x.len() != self.n() {
            return Err(QuboError::DimensionMismatch {
                expected: self.n(),
                got: x.len(),
            });
        }
        Ok(())
    }
}
