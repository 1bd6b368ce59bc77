//! Sub-problems cut out of a parent QUBO.

use crate::qubo::{BitString, QuboError, QuboProblem, TriMatrix};
use serde::{Deserialize, Serialize};

/// A k-variable QUBO extracted from a parent problem: `indices` maps local
/// variable `a` to parent variable `indices[a]` (strictly increasing), and
/// the local matrix satisfies `get(a, b) == parent.get(indices[a],
/// indices[b])` for all `a <= b`. Serializes as `{indices, coeffs}` with the
/// packed upper-triangular coefficient list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SubQuboWire", into = "SubQuboWire")]
pub struct SubQubo {
    indices: Vec<usize>,
    matrix: TriMatrix,
}

#[derive(Serialize, Deserialize)]
struct SubQuboWire {
    indices: Vec<usize>,
    coeffs: Vec<f64>,
}

impl From<SubQubo> for SubQuboWire {
    fn from(s: SubQubo) -> Self {
        SubQuboWire {
            coeffs: s.matrix.packed().to_vec(),
            indices: s.indices,
        }
    }
}

impl TryFrom<SubQuboWire> for SubQubo {
    type Error = String;

    fn try_from(w: SubQuboWire) -> Result<Self, String> {
        let k = w.indices.len();
        let matrix = TriMatrix::from_packed(k, w.coeffs)
            .ok_or_else(|| format!("coeffs must hold k(k+1)/2 values for k={k}"))?;
        if k == 0 {
            return Err("a sub-problem needs at least one variable".into());
        }
        if w.indices.windows(2).any(|p| p[0] >= p[1]) {
            return Err("indices must be strictly increasing".into());
        }
        Ok(SubQubo {
            indices: w.indices,
            matrix,
        })
    }
}

impl SubQubo {
    /// Copies the coefficient block for `indices` out of `parent`. The index
    /// list must be non-empty, strictly increasing, and in range.
    pub fn extract(parent: &QuboProblem, indices: Vec<usize>) -> Result<Self, QuboError> {
        if indices.is_empty() {
            return Err(QuboError::InvalidInput(
                "a sub-problem needs at least one variable".into(),
            ));
        }
        if let Some(&last) = indices.last() {
            if last >= parent.n() {
                return Err(QuboError::IndexOutOfRange {
                    index: last,
                    n: parent.n(),
                });
            }
        }
        if indices.windows(2).any(|p| p[0] >= p[1]) {
            return Err(QuboError::InvalidInput(
                "sub-problem indices must be strictly increasing".into(),
            ));
        }
        let k = indices.len();
        let mut matrix = TriMatrix::zeros(k);
        for a in 0..k {
            for b in a..k {
                matrix.set(a, b, parent.get(indices[a], indices[b]));
            }
        }
        Ok(SubQubo { indices, matrix })
    }

    pub fn k(&self) -> usize {
        self.indices.len()
    }

    /// Parent-problem variable ids, one per local variable.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.matrix.get(a, b)
    }

    pub fn matrix(&self) -> &TriMatrix {
        &self.matrix
    }

    /// Energy of a local assignment (`x.len() == k`).
    pub fn energy(&self, x: &BitString) -> Result<f64, QuboError> {
        if x.len() != self.k() {
            return Err(QuboError::DimensionMismatch {
                expected: self.k(),
                got: x.len(),
            });
        }
        Ok(self.matrix.energy_bits(x.as_slice()))
    }
}
