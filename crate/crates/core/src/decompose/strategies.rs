//! The four ways of choosing sub-problem index sets.

use super::impact::{impact_analysis, ImpactRanking};
use super::subqubo::SubQubo;
use super::{DecompositionConfig, DecomposeError, Strategy};
use crate::qubo::{BitString, QuboProblem};
use crate::seed::derive_seed;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

const RANDOM_STREAM: u64 = 0x7261_6e64; // "rand"

/// Runs the strategy named in `cfg`. All strategies return exactly
/// `cfg.num_sub` sub-problems of size `cfg.sub_size`, each with a sorted
/// index set; they differ only in how the sets are chosen.
pub fn decompose(
    q: &QuboProblem,
    x: &BitString,
    cfg: &DecompositionConfig,
) -> Result<Vec<SubQubo>, DecomposeError> {
    match cfg.strategy {
        Strategy::Random => decompose_random(q, x, cfg),
        Strategy::Ifd => decompose_ifd(q, x, cfg),
        Strategy::Bfs => decompose_bfs(q, x, cfg),
        Strategy::Pfs => decompose_pfs(q, x, cfg),
    }
}

/// Uniformly random index sets, independent across sub-problems. The
/// baseline every directed strategy is judged against.
pub fn decompose_random(
    q: &QuboProblem,
    x: &BitString,
    cfg: &DecompositionConfig,
) -> Result<Vec<SubQubo>, DecomposeError> {
    cfg.validate_for(q.n())?;
    q.check_dim(x)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[cfg.seed, RANDOM_STREAM]));
    (0..cfg.num_sub)
        .map(|_| {
            let indices = floyd_sample(q.n(), cfg.sub_size, &mut rng);
            Ok(SubQubo::extract(q, indices)?)
        })
        .collect()
}

/// Impact-factor-directed windows: rank all variables by impact against the
/// current assignment, then slide a size-k window down the ranking. With the
/// default stride of 1 the i-th sub-problem takes ranking positions
/// `[i, i+k)`, so consecutive windows overlap in k-1 variables and the union
/// of all windows is exactly the top `num_sub + sub_size - 1` variables.
pub fn decompose_ifd(
    q: &QuboProblem,
    x: &BitString,
    cfg: &DecompositionConfig,
) -> Result<Vec<SubQubo>, DecomposeError> {
    cfg.validate_for(q.n())?;
    let ranking = impact_analysis(q, x)?;
    let (m, k, stride) = (cfg.num_sub, cfg.sub_size, cfg.stride);
    (0..m)
        .map(|i| {
            let start = i * stride;
            let mut window: Vec<usize> = ranking.order()[start..start + k].to_vec();
            window.sort_unstable();
            Ok(SubQubo::extract(q, window)?)
        })
        .collect()
}

/// Breadth-first traversal of the significance graph. Sub-problem t starts
/// from the t-th highest-impact variable and grows by visiting each frontier
/// node's significant neighbors in descending coupling strength; if the
/// component runs out before k variables are collected, the remaining slots
/// are filled with the highest-impact unselected variables.
pub fn decompose_bfs(
    q: &QuboProblem,
    x: &BitString,
    cfg: &DecompositionConfig,
) -> Result<Vec<SubQubo>, DecomposeError> {
    cfg.validate_for(q.n())?;
    let ranking = impact_analysis(q, x)?;
    let graph = SignificanceGraph::build(q, cfg.resolve_edge_threshold(q));
    (0..cfg.num_sub)
        .map(|t| {
            let seed_var = ranking.order()[t];
            let mut selected = vec![false; q.n()];
            let mut picked = Vec::with_capacity(cfg.sub_size);
            selected[seed_var] = true;
            picked.push(seed_var);
            let mut queue = std::collections::VecDeque::from([seed_var]);
            'grow: while let Some(u) = queue.pop_front() {
                for &(v, _) in graph.neighbors(u) {
                    if selected[v] {
                        continue;
                    }
                    if picked.len() == cfg.sub_size {
                        break 'grow;
                    }
                    selected[v] = true;
                    picked.push(v);
                    queue.push_back(v);
                }
            }
            fill_by_ranking(&mut picked, &mut selected, &ranking, cfg.sub_size);
            picked.sort_unstable();
            Ok(SubQubo::extract(q, picked)?)
        })
        .collect()
}

/// Priority-first traversal: like [`decompose_bfs`] it grows from the t-th
/// highest-impact seed along significant edges, but each step adds the
/// neighbor of the selected set with the highest impact score (ties to the
/// lower index) rather than expanding in breadth order — so it chases
/// influential variables instead of near ones.
pub fn decompose_pfs(
    q: &QuboProblem,
    x: &BitString,
    cfg: &DecompositionConfig,
) -> Result<Vec<SubQubo>, DecomposeError> {
    cfg.validate_for(q.n())?;
    let ranking = impact_analysis(q, x)?;
    let graph = SignificanceGraph::build(q, cfg.resolve_edge_threshold(q));
    (0..cfg.num_sub)
        .map(|t| {
            let seed_var = ranking.order()[t];
            let mut selected = vec![false; q.n()];
            let mut frontier = vec![false; q.n()];
            let mut picked = Vec::with_capacity(cfg.sub_size);
            selected[seed_var] = true;
            picked.push(seed_var);
            for &(v, _) in graph.neighbors(seed_var) {
                frontier[v] = true;
            }
            while picked.len() < cfg.sub_size {
                let mut best: Option<usize> = None;
                for v in 0..q.n() {
                    if !frontier[v] || selected[v] {
                        continue;
                    }
                    best = match best {
                        Some(b) if ranking.score(v) <= ranking.score(b) => Some(b),
                        _ => Some(v),
                    };
                }
                let Some(v) = best else { break };
                frontier[v] = false;
                selected[v] = true;
                picked.push(v);
                for &(w, _) in graph.neighbors(v) {
                    if !selected[w] {
                        frontier[w] = true;
                    }
                }
            }
            fill_by_ranking(&mut picked, &mut selected, &ranking, cfg.sub_size);
            picked.sort_unstable();
            Ok(SubQubo::extract(q, picked)?)
        })
        .collect()
}

/// Tops `picked` up to `k` variables with the highest-impact unselected
/// ones, in ranking order.
fn fill_by_ranking(
    picked: &mut Vec<usize>,
    selected: &mut [bool],
    ranking: &ImpactRanking,
    k: usize,
) {
    if picked.len() >= k {
        return;
    }
    for &v in ranking.order() {
        if !selected[v] {
            selected[v] = true;
            picked.push(v);
            if picked.len() == k {
                break;
            }
        }
    }
}

/// Uniform sample of `k` distinct values from `0..n` (Floyd's algorithm),
/// returned sorted.
fn floyd_sample(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    debug_assert!(k <= n);
    let mut chosen: HashSet<usize> = HashSet::with_capacity(k);
    for j in (n - k)..n {
        let t = rng.gen_range(0..=j);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    let mut out: Vec<usize> = chosen.into_iter().collect();
    out.sort_unstable();
    out
}

/// Adjacency view of the couplings whose magnitude clears the significance
/// threshold. Neighbor lists are sorted by descending `|Q[i][j]|`, ties by
/// ascending index, so traversal order is fully determined.
struct SignificanceGraph {
    adj: Vec<Vec<(usize, f64)>>,
}

impl SignificanceGraph {
    fn build(q: &QuboProblem, threshold: f64) -> Self {
        let n = q.n();
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                let c = q.get(i, j).abs();
                if c > threshold {
                    adj[i].push((j, c));
                    adj[j].push((i, c));
                }
            }
        }
        for list in &mut adj {
            list.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite").then(a.0.cmp(&b.0)));
        }
        SignificanceGraph { adj }
    }

    fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adj[v]
    }
}
