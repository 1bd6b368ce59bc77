//! Ising view of a QUBO via the substitution `x_i = (1 - z_i) / 2` with
//! spins `z_i` in {-1, +1} (so `x_i = 0` maps to `z_i = +1`).

use super::{QuboError, QuboProblem};

/// Ising cost data: local fields `h`, strictly-upper-triangular couplings
/// `J`, and a constant offset carrying the part of the QUBO energy that no
/// spin term can express. Energies match the source QUBO exactly:
/// `ising_energy(z(x)) == qubo_energy(x)` for every assignment.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingCost {
    h: Vec<f64>,
    j: Vec<f64>,
    offset: f64,
    n: usize,
}

impl IsingCost {
    pub fn from_qubo(q: &QuboProblem) -> Self {
        let n = q.n();
        let mut h = vec![0.0; n];
        let mut j = vec![0.0; n * n.saturating_sub(1) / 2];
        let mut offset = 0.0;
        for i in 0..n {
            let d = q.get(i, i);
            // Q_ii x_i = Q_ii (1 - z_i) / 2
            offset += d / 2.0;
            h[i] -= d / 2.0;
            for b in (i + 1)..n {
                let c = q.get(i, b);
                if c == 0.0 {
                    continue;
                }
                // Q_ij x_i x_j = Q_ij (1 - z_i)(1 - z_j) / 4
                offset += c / 4.0;
                h[i] -= c / 4.0;
                h[b] -= c / 4.0;
                j[strict_idx(n, i, b)] += c / 4.0;
            }
        }
        IsingCost { h, j, offset, n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        assert!(i != j && j < self.n);
        self.j[strict_idx(self.n, i, j)]
    }

    /// `offset + sum_i h_i z_i + sum_{i<j} J_ij z_i z_j`.
    pub fn energy(&self, z: &[i8]) -> Result<f64, QuboError> {
        if z.len() != self.n {
            return Err(QuboError::DimensionMismatch {
                expected: self.n,
                got: z.len(),
            });
        }
        let mut e = self.offset;
        for i in 0..self.n {
            e += self.h[i] * f64::from(z[i]);
            for b in (i + 1)..self.n {
                e += self.j[strict_idx(self.n, i, b)] * f64::from(z[i]) * f64::from(z[b]);
            }
        }
        Ok(e)
    }
}

/// Spin corresponding to a bit: 0 -> +1, 1 -> -1.
pub fn spin_of_bit(x: u8) -> i8 {
    1 - 2 * i8::try_from(x).expect("bit")
}

#[inline]
fn strict_idx(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}
