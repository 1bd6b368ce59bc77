//! Packed upper-triangular coefficient storage shared by full problems and
//! extracted sub-problems.

use serde::{Deserialize, Serialize};

/// Upper-triangular `n x n` matrix stored row-major as a flat `Vec<f64>` of
/// length `n * (n + 1) / 2`. Entry `(i, j)` with `i <= j` lives at
/// `i*n - i*(i-1)/2 + (j - i)`; the diagonal holds linear terms. Reads with
/// `i > j` are transparently mapped to the stored `(j, i)` entry, so the
/// matrix behaves like a symmetric coupling table with each pair counted
/// once.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriMatrix {
    n: usize,
    vals: Vec<f64>,
}

impl TriMatrix {
    pub fn zeros(n: usize) -> Self {
        TriMatrix {
            n,
            vals: vec![0.0; n * (n + 1) / 2],
        }
    }

    /// Rebuilds a matrix from its packed representation. `vals.len()` must be
    /// exactly `n * (n + 1) / 2`.
    pub fn from_packed(n: usize, vals: Vec<f64>) -> Option<Self> {
        (vals.len() == n * (n + 1) / 2).then_some(TriMatrix { n, vals })
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= j && j < self.n);
        i * self.n - i * (i.wrapping_sub(1)) / 2 + (j - i)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn packed(&self) -> &[f64] {
        &self.vals
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.vals[self.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let at = self.idx(i, j);
        self.vals[at] = v;
    }

    /// Largest absolute coefficient; 0 for an all-zero matrix.
    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Energy of an assignment: sum of `Q[i][j] * x_i * x_j` over `i <= j`.
    /// `is_set(i)` reports whether variable `i` is 1.
    pub fn energy_by(&self, is_set: impl Fn(usize) -> bool) -> f64 {
        let mut e = 0.0;
        for i in 0..self.n {
            if !is_set(i) {
                continue;
            }
            let row = self.idx(i, i);
            e += self.vals[row];
            for j in (i + 1)..self.n {
                if is_set(j) {
                    e += self.vals[row + (j - i)];
                }
            }
        }
        e
    }

    /// Energy change from flipping variable `i`, evaluated against the
    /// current assignment in O(n) without copying it.
    pub fn flip_delta_by(&self, is_set: impl Fn(usize) -> bool, i: usize) -> f64 {
        let mut s = self.vals[self.idx(i, i)];
        for j in 0..i {
            if is_set(j) {
                s += self.vals[self.idx(j, i)];
            }
        }
        for j in (i + 1)..self.n {
            if is_set(j) {
                s += self.vals[self.idx(i, j)];
            }
        }
        if is_set(i) {
            -s
        } else {
            s
        }
    }

    pub fn energy_bits(&self, bits: &[u8]) -> f64 {
        self.energy_by(|j| bits[j] == 1)
    }

    pub fn flip_delta_bits(&self, bits: &[u8], i: usize) -> f64 {
        self.flip_delta_by(|j| bits[j] == 1, i)
    }

    /// Variant over a bit mask, used by the exhaustive enumerations where the
    /// assignment is a basis-state index.
    pub fn energy_mask(&self, mask: u64) -> f64 {
        self.energy_by(|j| (mask >> j) & 1 == 1)
    }

    pub fn flip_delta_mask(&self, mask: u64, i: usize) -> f64 {
        self.flip_delta_by(|j| (mask >> j) & 1 == 1, i)
    }
}
