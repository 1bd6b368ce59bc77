//! Building blocks for distributed QAOA on QUBO problems.
//!
//! The crate is organized around the data flow of one optimization cycle:
//!
//! * [`qubo`] — the QUBO model itself: upper-triangular coefficient storage,
//!   energy evaluation, single-flip deltas, the Ising view, instance
//!   generators, classical reference solvers, and a plain-text file format.
//! * [`decompose`] — splitting a large QUBO into overlapping sub-QUBOs
//!   (random, impact-directed windows, BFS/PFS graph traversal) and merging
//!   sub-solutions back into the global state under a lower-energy-only
//!   acceptance rule.
//! * [`qaoa`] — a depth-p statevector simulator for sub-QUBOs with a
//!   gradient-free parameter search and measurement sampling.
//!
//! With the default `parallel` feature the hot statevector kernels and the
//! annealing restarts run on rayon; without it everything falls back to the
//! sequential drivers. Both drivers share the same per-chunk arithmetic, so
//! results are bit-identical regardless of the feature or thread count.

pub mod decompose;
pub mod duration_secs;
pub mod qaoa;
pub mod qubo;
pub mod seed;
