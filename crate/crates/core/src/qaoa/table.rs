//! Precomputed cost values for every basis state of a sub-problem.
//!
//! The cost layer and the expectation both need `E(z)` for all `2^k`
//! assignments, so we tabulate once per sub-problem instead of re-deriving
//! the energies inside every optimizer evaluation.

use super::kernels::SUM_CHUNK;
use super::QaoaError;
use crate::qubo::TriMatrix;

/// Hard cap on tabulated problems; `2^26` values is half a gigabyte, which
/// is as far as a desk machine should be pushed.
pub const QAOA_MAX_QUBITS: usize = 26;

/// `E(z)` for every basis index `z`, in index order.
#[derive(Clone, Debug)]
pub struct EnergyTable {
    k: usize,
    values: Vec<f64>,
}

impl EnergyTable {
    /// Tabulate all energies of `m`.
    ///
    /// Each fixed-size chunk of indices is anchored with one full energy
    /// evaluation and then walked with single-bit-flip deltas (a binary
    /// increment only flips the trailing bits), so the build is `O(2^k * k)`
    /// instead of `O(2^k * k^2)`. Chunks are independent, which lets the
    /// parallel feature fill them concurrently with bit-identical results.
    pub fn build(m: &TriMatrix) -> Result<EnergyTable, QaoaError> {
        let k = m.n();
        if k > QAOA_MAX_QUBITS {
            return Err(QaoaError::TooManyQubits {
                k,
                max: QAOA_MAX_QUBITS,
            });
        }
        let len = 1usize << k;
        let chunk_starts = (0..len).step_by(SUM_CHUNK);

        #[cfg(feature = "parallel")]
        let values = if len >= super::kernels::PAR_MIN_LEN {
            use rayon::prelude::*;
            let chunks: Vec<Vec<f64>> = chunk_starts
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(|start| chunk_values(m, start, len.min(start + SUM_CHUNK)))
                .collect();
            chunks.concat()
        } else {
            build_seq(m, len)
        };
        #[cfg(not(feature = "parallel"))]
        let values = {
            let _ = chunk_starts;
            build_seq(m, len)
        };

        Ok(EnergyTable { k, values })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, z: usize) -> f64 {
        self.values[z]
    }

    /// Index of the smallest tabulated energy (first one on ties).
    pub fn argmin(&self) -> usize {
        let mut best = 0;
        for (z, &v) in self.values.iter().enumerate() {
            if v < self.values[best] {
                best = z;
            }
        }
        best
    }
}

fn build_seq(m: &TriMatrix, len: usize) -> Vec<f64> {
    let mut values = Vec::with_capacity(len);
    let mut start = 0;
    while start < len {
        let end = len.min(start + SUM_CHUNK);
        values.extend_from_slice(&chunk_values(m, start, end));
        start = end;
    }
    values
}

/// Energies for indices `start..end`, re-anchored at `start`.
fn chunk_values(m: &TriMatrix, start: usize, end: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(end - start);
    let mut mask = start as u64;
    let mut e = m.energy_mask(mask);
    out.push(e);
    for z in start..end - 1 {
        // Incrementing z flips its trailing ones and the zero above them;
        // apply those flips lowest bit first, updating the running energy.
        let mut changed = (z as u64) ^ (z as u64 + 1);
        while changed != 0 {
            let i = changed.trailing_zeros() as usize;
            e += m.flip_delta_mask(mask, i);
            mask ^= 1 << i;
            changed &= changed - 1;
        }
        out.push(e);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::generate_dense_qubo;

    #[test]
    fn table_matches_direct_evaluation() {
        let q = generate_dense_qubo(10, 7).unwrap();
        let table = EnergyTable::build(q.matrix()).unwrap();
        assert_eq!(table.len(), 1 << 10);
        for z in 0..table.len() {
            let direct = q.matrix().energy_mask(z as u64);
            assert!(
                (table.value(z) - direct).abs() <= 1e-9,
                "z={z}: {} vs {direct}",
                table.value(z)
            );
        }
    }

    #[test]
    fn chunk_anchors_are_exact() {
        // 2^13 spans two chunks; each anchor is a from-scratch evaluation.
        let q = generate_dense_qubo(13, 3).unwrap();
        let table = EnergyTable::build(q.matrix()).unwrap();
        for start in (0..table.len()).step_by(SUM_CHUNK) {
            assert_eq!(table.value(start), q.matrix().energy_mask(start as u64));
        }
    }

    #[test]
    fn oversized_problems_are_refused() {
        let m = TriMatrix::zeros(QAOA_MAX_QUBITS + 1);
        assert!(matches!(
            EnergyTable::build(&m),
            Err(QaoaError::TooManyQubits { k: 27, max: 26 })
        ));
    }

    #[test]
    fn argmin_finds_the_ground_state() {
        let q = generate_dense_qubo(8, 11).unwrap();
        let table = EnergyTable::build(q.matrix()).unwrap();
        let z = table.argmin();
        assert!(table.values().iter().all(|&v| v >= table.value(z)));
    }
}
