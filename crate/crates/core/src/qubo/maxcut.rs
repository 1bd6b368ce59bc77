//! Max-Cut instances and their QUBO encoding.

use super::{BitString, QuboError, QuboProblem};
use crate::seed::derive_seed;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

const EDGE_STREAM: u64 = 0x6d_7863_7574; // "mxcut"

/// An undirected weighted graph for Max-Cut. Edges are stored as
/// `(i, j, weight)` with `i < j`, no duplicates, no self-loops.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxCutInstance {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    name: String,
    seed: Option<u64>,
}

impl MaxCutInstance {
    pub fn new(
        n: usize,
        mut edges: Vec<(usize, usize, f64)>,
        name: impl Into<String>,
    ) -> Result<Self, QuboError> {
        if n < 2 {
            return Err(QuboError::InvalidInput(
                "a cut needs at least two vertices".into(),
            ));
        }
        for e in edges.iter_mut() {
            if e.0 == e.1 {
                return Err(QuboError::InvalidInput(format!("self-loop at vertex {}", e.0)));
            }
            if e.0 > e.1 {
                *e = (e.1, e.0, e.2);
            }
            if e.1 >= n {
                return Err(QuboError::IndexOutOfRange { index: e.1, n });
            }
            if !e.2.is_finite() {
                return Err(QuboError::NonFinite { i: e.0, j: e.1 });
            }
        }
        edges.sort_by_key(|e| (e.0, e.1));
        if edges.windows(2).any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(QuboError::InvalidInput("duplicate edge".into()));
        }
        Ok(MaxCutInstance {
            n,
            edges,
            name: name.into(),
            seed: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
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

    /// Total weight of edges crossing the partition encoded by `x`.
    pub fn cut_value(&self, x: &BitString) -> Result<f64, QuboError> {
        if x.len() != self.n {
            return Err(QuboError::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self
            .edges
            .iter()
            .filter(|(i, j, _)| x.get(*i) != x.get(*j))
            .map(|(_, _, w)| w)
            .sum())
    }

    /// QUBO whose energy is the negated cut: `Q[i][i] = -deg_w(i)`,
    /// `Q[i][j] = 2 w_ij` for each edge, so minimizing energy maximizes the
    /// cut and `energy(x) == -cut_value(x)` for every assignment.
    pub fn to_qubo(&self) -> QuboProblem {
        let mut q = QuboProblem::zeros(self.n, self.name.clone()).expect("n >= 2");
        for &(i, j, w) in &self.edges {
            q.set(i, i, q.get(i, i) - w).expect("in range");
            q.set(j, j, q.get(j, j) - w).expect("in range");
            q.set(i, j, 2.0 * w).expect("in range");
        }
        if let Some(s) = self.seed {
            q = q.with_seed(s);
        }
        q
    }
}

/// Random unweighted Max-Cut instance with `floor(n (n-1) / 8)` distinct
/// edges (a quarter of all pairs), all weight 1. The edge set is a uniform
/// sample without replacement, fully determined by `seed`.
pub fn generate_maxcut(n: usize, seed: u64) -> Result<MaxCutInstance, QuboError> {
    if n < 3 {
        return Err(QuboError::InvalidInput(
            "random Max-Cut needs at least 3 vertices".into(),
        ));
    }
    let total = (n as u64) * (n as u64 - 1) / 2;
    let m = (n as u64) * (n as u64 - 1) / 8;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, EDGE_STREAM]));

    // Floyd's sampling: m distinct pair indices in [0, total), uniform.
    let mut chosen: HashSet<u64> = HashSet::with_capacity(m as usize);
    for j in (total - m)..total {
        let t = rng.gen_range(0..=j);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    let mut picked: Vec<u64> = chosen.into_iter().collect();
    picked.sort_unstable();

    // Pair index L -> (i, j): row i starts at i(2n - i - 1)/2.
    let row_start =
        |i: u64| -> u64 { i * (2 * n as u64 - i - 1) / 2 };
    let edges = picked
        .into_iter()
        .map(|l| {
            let mut lo = 0u64;
            let mut hi = n as u64 - 1; // last row with any pairs is n-2
            while lo < hi {
                let mid = (lo + hi).div_ceil(2);
                if row_start(mid) <= l {
                    lo = mid;
                } else {
                    hi = mid - 1;
                }
            }
            let i = lo;
            let j = i + 1 + (l - row_start(i));
            (i as usize, j as usize, 1.0)
        })
        .collect();

    let mut inst = MaxCutInstance::new(n, edges, format!("maxcut-n{n}-s{seed}"))?;
    inst.seed = Some(seed);
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_cut_by_hand() {
        // K3 with unit weights: putting vertex 0 alone cuts edges (0,1) and
        // (0,2) but not (1,2).
        let k3 = MaxCutInstance::new(3, vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)], "k3").unwrap();
        let x = BitString::from_bits(vec![0, 1, 1]).unwrap();
        assert_eq!(k3.cut_value(&x).unwrap(), 2.0);
        assert_eq!(k3.to_qubo().energy(&x).unwrap(), -2.0);
        let all_same = BitString::zeros(3);
        assert_eq!(k3.cut_value(&all_same).unwrap(), 0.0);
        assert_eq!(k3.to_qubo().energy(&all_same).unwrap(), 0.0);
    }

    #[test]
    fn qubo_energy_is_negated_cut_exhaustively() {
        let inst = generate_maxcut(10, 5).unwrap();
        let q = inst.to_qubo();
        for idx in 0..(1u64 << 10) {
            let x = BitString::from_index(idx, 10);
            let cut = inst.cut_value(&x).unwrap();
            let e = q.energy(&x).unwrap();
            assert!((e + cut).abs() <= 1e-9, "state {idx}: cut {cut}, energy {e}");
        }
    }

    #[test]
    fn edge_count_matches_quarter_density() {
        let inst = generate_maxcut(100, 7).unwrap();
        assert_eq!(inst.edges().len(), 1237); // floor(100 * 99 / 8)
        // Distinct, ordered, in range, unit weight.
        let mut seen = HashSet::new();
        for &(i, j, w) in inst.edges() {
            assert!(i < j && j < 100);
            assert_eq!(w, 1.0);
            assert!(seen.insert((i, j)));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(generate_maxcut(40, 11).unwrap(), generate_maxcut(40, 11).unwrap());
        assert_ne!(
            generate_maxcut(40, 11).unwrap().edges(),
            generate_maxcut(40, 12).unwrap().edges()
        );
    }

    #[test]
    fn rejects_bad_graphs() {
        assert!(MaxCutInstance::new(3, vec![(1, 1, 1.0)], "loop").is_err());
        assert!(MaxCutInstance::new(3, vec![(0, 1, 1.0), (1, 0, 2.0)], "dup").is_err());
        assert!(MaxCutInstance::new(2, vec![(0, 3, 1.0)], "range").is_err());
    }
}
