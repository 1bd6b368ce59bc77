//! Per-variable impact scores.

use crate::qubo::{BitString, QuboError, QuboProblem};

/// Variables ranked by how much flipping them would move the energy of the
/// current assignment. `scores[i]` is `|energy_delta(x, i)|`; `order` lists
/// variable indices by descending score, ties broken by ascending index.
#[derive(Clone, Debug, PartialEq)]
pub struct ImpactRanking {
    order: Vec<usize>,
    scores: Vec<f64>,
}

impl ImpactRanking {
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn score(&self, i: usize) -> f64 {
        self.scores[i]
    }
}

/// Scores every variable against the current assignment. Each score is one
/// O(n) flip delta, so the whole ranking costs O(n^2).
pub fn impact_analysis(q: &QuboProblem, x: &BitString) -> Result<ImpactRanking, QuboError> {
    q.check_dim(x)?;
    let m = q.matrix();
    let scores: Vec<f64> = (0..q.n())
        .map(|i| m.flip_delta_bits(x.as_slice(), i).abs())
        .collect();
    let mut order: Vec<usize> = (0..q.n()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("impact scores are finite")
            .then(a.cmp(&b))
    });
    Ok(ImpactRanking { order, scores })
}
