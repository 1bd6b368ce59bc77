//! Decomposition of a QUBO into sub-problems and re-aggregation of their
//! solutions.
//!
//! A decomposition cycle turns the current global assignment into `num_sub`
//! index sets of size `sub_size` (per the configured [`Strategy`]), extracts
//! the corresponding [`SubQubo`] blocks, and later folds the sub-solutions
//! back with [`aggregate`], accepting only strict energy improvements.

mod aggregate;
mod impact;
mod strategies;
mod subqubo;

pub use aggregate::{aggregate, aggregate_in_place, AggregateOutcome};
pub use impact::{impact_analysis, ImpactRanking};
pub use strategies::{decompose, decompose_bfs, decompose_ifd, decompose_pfs, decompose_random};
pub use subqubo::SubQubo;

use crate::qubo::{QuboError, QuboProblem};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DecomposeError {
    #[error("num_sub and sub_size must both be at least 1")]
    EmptyPlan,
    #[error("sub_size {sub_size} exceeds the problem dimension {n}")]
    SubSizeTooLarge { sub_size: usize, n: usize },
    #[error(
        "{strategy} needs (num_sub - 1) * stride + sub_size <= n: \
         ({num_sub} - 1) * {stride} + {sub_size} > {n}"
    )]
    WindowsOutOfRange {
        strategy: Strategy,
        num_sub: usize,
        sub_size: usize,
        stride: usize,
        n: usize,
    },
    #[error("stride must be at least 1")]
    ZeroStride,
    #[error("edge_threshold must be finite and non-negative")]
    BadEdgeThreshold,
    #[error("{subs} sub-problems but {solutions} solutions")]
    SolutionCountMismatch { subs: usize, solutions: usize },
    #[error("sub-solution has {got} bits, sub-problem has {expected}")]
    SolutionSizeMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Qubo(#[from] QuboError),
}

/// Which index-selection rule to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Uniform random index sets (the control arm).
    Random,
    /// Impact-factor-directed ranking windows.
    Ifd,
    /// Breadth-first traversal of the significance graph.
    Bfs,
    /// Priority-first traversal of the significance graph.
    Pfs,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Random, Strategy::Ifd, Strategy::Bfs, Strategy::Pfs];

    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::Ifd => "ifd",
            Strategy::Bfs => "bfs",
            Strategy::Pfs => "pfs",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(Strategy::Random),
            "ifd" => Ok(Strategy::Ifd),
            "bfs" => Ok(Strategy::Bfs),
            "pfs" => Ok(Strategy::Pfs),
            other => Err(format!(
                "unknown strategy {other:?} (expected random, ifd, bfs, or pfs)"
            )),
        }
    }
}

/// Decomposition parameters. `edge_threshold` only affects the graph
/// strategies; `stride` only the window placement of IFD; `seed` only the
/// random strategy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionConfig {
    pub strategy: Strategy,
    /// Number of sub-problems per cycle (m).
    pub num_sub: usize,
    /// Variables per sub-problem (k).
    pub sub_size: usize,
    /// Couplings with `|Q[i][j]|` above this count as significant edges.
    /// `None` means "median of the nonzero off-diagonal magnitudes",
    /// resolved against the problem at decomposition time.
    #[serde(default)]
    pub edge_threshold: Option<f64>,
    /// Ranking-window step for IFD; 1 (the default) slides one position per
    /// sub-problem, `sub_size` makes windows disjoint.
    #[serde(default = "default_stride")]
    pub stride: usize,
    /// Seed for the random strategy's index draws.
    #[serde(default)]
    pub seed: u64,
}

fn default_stride() -> usize {
    1
}

impl Default for DecompositionConfig {
    fn default() -> Self {
        DecompositionConfig {
            strategy: Strategy::Ifd,
            num_sub: 1,
            sub_size: 1,
            edge_threshold: None,
            stride: 1,
            seed: 0,
        }
    }
}

impl DecompositionConfig {
    pub fn validate_for(&self, n: usize) -> Result<(), DecomposeError> {
        if self.num_sub == 0 || self.sub_size == 0 {
            return Err(DecomposeError::EmptyPlan);
        }
        if self.stride == 0 {
            return Err(DecomposeError::ZeroStride);
        }
        if self.sub_size > n {
            return Err(DecomposeError::SubSizeTooLarge {
                sub_size: self.sub_size,
                n,
            });
        }
        if let Some(t) = self.edge_threshold {
            if !(t.is_finite() && t >= 0.0) {
                return Err(DecomposeError::BadEdgeThreshold);
            }
        }
        match self.strategy {
            Strategy::Random => Ok(()),
            Strategy::Ifd => self.check_window_span(n, self.stride),
            // The traversal strategies need num_sub distinct seeds plus room
            // for a full window; same bound as stride-1 IFD.
            Strategy::Bfs | Strategy::Pfs => self.check_window_span(n, 1),
        }
    }

    fn check_window_span(&self, n: usize, stride: usize) -> Result<(), DecomposeError> {
        if (self.num_sub - 1) * stride + self.sub_size > n {
            return Err(DecomposeError::WindowsOutOfRange {
                strategy: self.strategy,
                num_sub: self.num_sub,
                sub_size: self.sub_size,
                stride,
                n,
            });
        }
        Ok(())
    }

    /// The significance threshold actually used for `q`: the configured
    /// value, or the median of the nonzero `|Q[i][j]|` (i < j). An even
    /// count takes the mean of the two middle values; a problem with no
    /// off-diagonal couplings resolves to 0.
    pub fn resolve_edge_threshold(&self, q: &QuboProblem) -> f64 {
        if let Some(t) = self.edge_threshold {
            return t;
        }
        let mut mags: Vec<f64> = Vec::new();
        for i in 0..q.n() {
            for j in (i + 1)..q.n() {
                let c = q.get(i, j).abs();
                if c > 0.0 {
                    mags.push(c);
                }
            }
        }
        if mags.is_empty() {
            return 0.0;
        }
        mags.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let mid = mags.len() / 2;
        if mags.len() % 2 == 1 {
            mags[mid]
        } else {
            (mags[mid - 1] + mags[mid]) / 2.0
        }
    }
}

/// A record of what a decomposition produced, for inspection and replay.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionPlan {
    pub strategy: Strategy,
    pub config: DecompositionConfig,
    pub index_sets: Vec<Vec<usize>>,
}

impl DecompositionPlan {
    pub fn new(config: DecompositionConfig, subs: &[SubQubo]) -> Self {
        DecompositionPlan {
            strategy: config.strategy,
            index_sets: subs.iter().map(|s| s.indices().to_vec()).collect(),
            config,
        }
    }
}
