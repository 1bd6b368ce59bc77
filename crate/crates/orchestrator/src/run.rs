//! The full solve loop: decompose the problem, farm the pieces out to the
//! pool, fold the answers back into the working assignment, and repeat
//! until the approximation ratio stops moving.

use crate::pool::{PoolError, WorkerPool};
use crate::protocol::TaskEnvelope;
use dqaoa_core::decompose::{decompose, DecomposeError, DecompositionConfig};
use dqaoa_core::qaoa::QaoaConfig;
use dqaoa_core::qubo::{
    brute_force_solve, simulated_annealing_solve, BitString, QuboProblem, SaConfig,
    BRUTE_FORCE_MAX_N,
};
use dqaoa_core::seed::derive_seed;
use serde::{Deserialize, Serialize};
use std::time::{Duration, Instant};
use thiserror::Error;

/// Seed-stream tags, so every random decision in a run draws from its own
/// independent stream of one master seed.
const TASK_STREAM: u64 = 0x7461_736b; // "task"
const INIT_STREAM: u64 = 0x696e_6974; // "init"
const DECOMP_STREAM: u64 = 0x6465_636f; // "deco"
const REFERENCE_STREAM: u64 = 0x7265_6665; // "refe"

/// Largest problem we will compute a reference energy for.
pub const REFERENCE_MAX_VARS: usize = 2000;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error("run aborted after {} complete cycle(s): {source}", reports.len())]
    Aborted {
        reports: Vec<CycleReport>,
        source: PoolError,
    },
    #[error("reference energy {0} is not below zero after the offset; approximation ratios would be meaningless")]
    BadReference(f64),
}

/// Everything that shapes one solve, apart from the problem itself and the
/// worker pool.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DqaoaConfig {
    pub decomposition: DecompositionConfig,
    #[serde(default)]
    pub qaoa: QaoaConfig,
    /// Hard cap on outer cycles.
    #[serde(default = "default_max_cycles")]
    pub max_cycles: usize,
    /// Convergence: stop once every step across the last `ar_window`
    /// transitions moves the approximation ratio by at most this many
    /// percentage points.
    #[serde(default = "default_ar_tolerance")]
    pub ar_tolerance: f64,
    #[serde(default = "default_ar_window")]
    pub ar_window: usize,
    /// Root of every seed stream in the run.
    #[serde(default)]
    pub master_seed: u64,
    /// Separate seed for the initial assignment, so sweeps can hold the
    /// starting point fixed while varying everything else. Defaults to the
    /// master seed.
    #[serde(default)]
    pub init_seed: Option<u64>,
    /// Constant added to both the cycle energy and the reference before
    /// forming their ratio, for problems whose raw minimum is not negative.
    #[serde(default)]
    pub energy_offset: f64,
}

fn default_max_cycles() -> usize {
    50
}

fn default_ar_tolerance() -> f64 {
    0.1
}

fn default_ar_window() -> usize {
    5
}

impl Default for DqaoaConfig {
    fn default() -> Self {
        DqaoaConfig {
            decomposition: DecompositionConfig::default(),
            qaoa: QaoaConfig::default(),
            max_cycles: default_max_cycles(),
            ar_tolerance: default_ar_tolerance(),
            ar_window: default_ar_window(),
            master_seed: 0,
            init_seed: None,
            energy_offset: 0.0,
        }
    }
}

impl DqaoaConfig {
    pub fn validate_for(&self, n: usize) -> Result<(), RunError> {
        self.decomposition.validate_for(n)?;
        self.qaoa
            .validate()
            .map_err(|e| RunError::BadConfig(e.to_string()))?;
        if self.max_cycles == 0 {
            return Err(RunError::BadConfig("max_cycles must be at least 1".into()));
        }
        if self.ar_window == 0 {
            return Err(RunError::BadConfig("ar_window must be at least 1".into()));
        }
        if !self.ar_tolerance.is_finite() || self.ar_tolerance < 0.0 {
            return Err(RunError::BadConfig(
                "ar_tolerance must be finite and non-negative".into(),
            ));
        }
        if !self.energy_offset.is_finite() {
            return Err(RunError::BadConfig("energy_offset must be finite".into()));
        }
        Ok(())
    }
}

/// What one outer cycle did, for the CSV trace and convergence check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CycleReport {
    /// 1-based.
    pub cycle: usize,
    /// Energy of the working assignment after aggregation.
    pub energy: f64,
    /// Percent of the reference energy reached, offset applied.
    pub approx_ratio_pct: f64,
    #[serde(with = "dqaoa_core::duration_secs")]
    pub t_decompose: Duration,
    #[serde(with = "dqaoa_core::duration_secs")]
    pub t_solve: Duration,
    #[serde(with = "dqaoa_core::duration_secs")]
    pub t_aggregate: Duration,
    /// How many sub-solutions lowered the energy and were kept.
    pub accepted_updates: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunOutcome {
    pub best_bits: BitString,
    pub best_energy: f64,
    pub reports: Vec<CycleReport>,
    /// True when the ratio plateaued before `max_cycles`.
    pub converged: bool,
    #[serde(with = "dqaoa_core::duration_secs")]
    pub elapsed: Duration,
    pub reference_energy: f64,
}

/// How the reference energy was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceKind {
    /// Exhaustive search: the true optimum.
    Exact,
    /// Simulated annealing: a strong incumbent, not a certificate.
    Annealed,
}

/// Deterministic per-task seed: one stream per (master, cycle, task).
pub fn task_seed(master_seed: u64, cycle: usize, task_id: u64) -> u64 {
    derive_seed(&[master_seed, TASK_STREAM, cycle as u64, task_id])
}

/// The assignment a run starts from. Exposed so tools can reproduce the
/// exact starting point of a run without running it.
pub fn initial_assignment(n: usize, init_seed: u64) -> BitString {
    BitString::random(n, derive_seed(&[init_seed, INIT_STREAM]))
}

/// The decomposition configuration a given 1-based cycle actually uses:
/// the base config with a per-cycle derived seed, so strategies with
/// random choices make fresh ones every cycle.
pub fn cycle_decomposition_config(
    base: &DecompositionConfig,
    cycle: usize,
) -> DecompositionConfig {
    let mut cfg = base.clone();
    cfg.seed = derive_seed(&[base.seed, cycle as u64, DECOMP_STREAM]);
    cfg
}

/// Percentage of the reference energy attained, after shifting both by
/// `offset`. The shifted reference must be negative, so that lower energy
/// maps to a higher ratio and 100% means "matched the reference".
pub fn approx_ratio_pct(energy: f64, reference: f64, offset: f64) -> Result<f64, RunError> {
    let shifted_ref = reference + offset;
    if !shifted_ref.is_finite() || shifted_ref >= 0.0 {
        return Err(RunError::BadReference(shifted_ref));
    }
    Ok(100.0 * (energy + offset) / shifted_ref)
}

/// True once the last `window` consecutive ratio changes all stayed within
/// `tol` percentage points. Needs `window + 1` reports to have an opinion.
pub fn check_convergence(reports: &[CycleReport], window: usize, tol: f64) -> bool {
    if reports.len() < window + 1 {
        return false;
    }
    let tail = &reports[reports.len() - (window + 1)..];
    tail.windows(2)
        .all(|pair| (pair[1].approx_ratio_pct - pair[0].approx_ratio_pct).abs() <= tol)
}

/// Best known energy for `q`, for scoring runs against: exhaustive search
/// when the problem is small enough to enumerate, simulated annealing
/// otherwise. Refuses problems too large to anneal credibly.
pub fn resolve_reference(
    q: &QuboProblem,
    sa: &SaConfig,
    seed: u64,
) -> Result<(f64, ReferenceKind), RunError> {
    if q.n() <= BRUTE_FORCE_MAX_N {
        let (_, energy) = brute_force_solve(q).map_err(|e| RunError::BadConfig(e.to_string()))?;
        return Ok((energy, ReferenceKind::Exact));
    }
    if q.n() > REFERENCE_MAX_VARS {
        return Err(RunError::BadConfig(format!(
            "no reference available for n = {} (> {REFERENCE_MAX_VARS}); pass one explicitly",
            q.n()
        )));
    }
    let (_, energy) = simulated_annealing_solve(q, sa, derive_seed(&[seed, REFERENCE_STREAM]))
        .map_err(|e| RunError::BadConfig(e.to_string()))?;
    Ok((energy, ReferenceKind::Annealed))
}

/// Run the decompose → solve → aggregate loop on `q` until the ratio
/// plateaus or `max_cycles` is hit.
///
/// `reference_energy` is the yardstick for the approximation ratio; obtain
/// it from [`resolve_reference`] or supply a known value. The pool is
/// borrowed, not owned, so several runs can share warm workers.
pub fn run_dqaoa(
    q: &QuboProblem,
    cfg: &DqaoaConfig,
    reference_energy: f64,
    pool: &mut WorkerPool,
) -> Result<RunOutcome, RunError> {
    cfg.validate_for(q.n())?;
    // Fail fast if the reference can never yield a ratio.
    approx_ratio_pct(reference_energy, reference_energy, cfg.energy_offset)?;

    let t_run = Instant::now();
    let init_seed = cfg.init_seed.unwrap_or(cfg.master_seed);
    let mut x = initial_assignment(q.n(), init_seed);
    let mut energy = q.energy(&x).map_err(|e| RunError::BadConfig(e.to_string()))?;
    let mut reports: Vec<CycleReport> = Vec::new();
    let mut converged = false;

    for cycle in 1..=cfg.max_cycles {
        let decomp_cfg = cycle_decomposition_config(&cfg.decomposition, cycle);

        let t0 = Instant::now();
        let subs = decompose(q, &x, &decomp_cfg)?;
        let t_decompose = t0.elapsed();

        let num_sub = subs.len();
        let first_id = ((cycle - 1) * num_sub) as u64;
        let tasks: Vec<TaskEnvelope> = subs
            .iter()
            .enumerate()
            .map(|(i, sub)| {
                let task_id = first_id + i as u64;
                TaskEnvelope {
                    task_id,
                    seed: task_seed(cfg.master_seed, cycle, task_id),
                    sub: sub.clone(),
                    qaoa: cfg.qaoa.clone(),
                }
            })
            .collect();

        let t1 = Instant::now();
        let results = match pool.dispatch_cycle(tasks) {
            Ok(r) => r,
            Err(source) => return Err(RunError::Aborted { reports, source }),
        };
        let t_solve = t1.elapsed();

        // dispatch_cycle sorts by task id, so results line up with subs.
        let solutions: Vec<BitString> = results.into_iter().map(|r| r.result.best_bits).collect();
        let t2 = Instant::now();
        let pass =
            dqaoa_core::decompose::aggregate_in_place(q, &mut x, energy, &subs, &solutions)?;
        let t_aggregate = t2.elapsed();
        energy = pass.energy;
        let accepted_updates = pass.accepted;

        let approx = approx_ratio_pct(energy, reference_energy, cfg.energy_offset)?;
        log::debug!(
            "cycle {cycle}: energy {energy:.6}, ratio {approx:.2}%, {accepted_updates}/{num_sub} updates kept"
        );
        reports.push(CycleReport {
            cycle,
            energy,
            approx_ratio_pct: approx,
            t_decompose,
            t_solve,
            t_aggregate,
            accepted_updates,
        });

        if check_convergence(&reports, cfg.ar_window, cfg.ar_tolerance) {
            converged = true;
            break;
        }
    }

    Ok(RunOutcome {
        best_bits: x,
        best_energy: energy,
        reports,
        converged,
        elapsed: t_run.elapsed(),
        reference_energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use dqaoa_core::decompose::Strategy;
    use dqaoa_core::qubo::generate_dense_qubo;

    fn report_with_ratio(cycle: usize, ar: f64) -> CycleReport {
        CycleReport {
            cycle,
            energy: 0.0,
            approx_ratio_pct: ar,
            t_decompose: Duration::ZERO,
            t_solve: Duration::ZERO,
            t_aggregate: Duration::ZERO,
            accepted_updates: 0,
        }
    }

    fn trace(ars: &[f64]) -> Vec<CycleReport> {
        ars.iter()
            .enumerate()
            .map(|(i, &ar)| report_with_ratio(i + 1, ar))
            .collect()
    }

    #[test]
    fn convergence_needs_a_full_window_of_small_steps() {
        let reports = trace(&[95.00, 95.05, 94.98, 95.02, 95.01, 95.03]);
        // Largest step in the last five transitions is 0.07.
        assert!(check_convergence(&reports, 5, 0.1));
        assert!(!check_convergence(&reports, 5, 0.05));
        // Not enough history for a window of 6.
        assert!(!check_convergence(&reports, 6, 10.0));
        // A shorter window only looks at recent steps.
        assert!(check_convergence(&reports, 2, 0.05));
    }

    #[test]
    fn one_big_jump_inside_the_window_blocks_convergence() {
        let reports = trace(&[60.0, 90.0, 90.01, 90.02, 90.01]);
        assert!(!check_convergence(&reports, 4, 0.1));
        assert!(check_convergence(&reports, 3, 0.1));
    }

    #[test]
    fn ratio_is_energy_over_reference_in_percent() {
        assert_eq!(approx_ratio_pct(-90.0, -100.0, 0.0).unwrap(), 90.0);
        // Overshooting an annealed reference can read above 100.
        assert_eq!(approx_ratio_pct(-110.0, -100.0, 0.0).unwrap(), 110.0);
        // The offset shifts both sides.
        assert_eq!(approx_ratio_pct(5.0, -10.0, -20.0).unwrap(), 50.0);
        assert!(matches!(
            approx_ratio_pct(-90.0, 100.0, 0.0),
            Err(RunError::BadReference(_))
        ));
        assert!(matches!(
            approx_ratio_pct(-90.0, 0.0, 0.0),
            Err(RunError::BadReference(_))
        ));
    }

    #[test]
    fn task_seeds_are_distinct_across_cycles_and_tasks() {
        let mut seen = std::collections::HashSet::new();
        for cycle in 1..=4 {
            for id in 0..8u64 {
                assert!(seen.insert(task_seed(7, cycle, id)));
            }
        }
        assert_eq!(task_seed(7, 1, 0), task_seed(7, 1, 0));
        assert_ne!(task_seed(7, 1, 0), task_seed(8, 1, 0));
    }

    #[test]
    fn reference_is_exact_for_small_problems() {
        let q = generate_dense_qubo(10, 3).unwrap();
        let (reference, kind) = resolve_reference(&q, &SaConfig::quick(), 1).unwrap();
        let (_, brute) = brute_force_solve(&q).unwrap();
        assert_eq!(kind, ReferenceKind::Exact);
        assert_eq!(reference, brute);
    }

    #[test]
    fn reference_falls_back_to_annealing_beyond_enumeration() {
        let q = generate_dense_qubo(40, 3).unwrap();
        let (reference, kind) = resolve_reference(&q, &SaConfig::quick(), 1).unwrap();
        assert_eq!(kind, ReferenceKind::Annealed);
        assert!(reference < 0.0);
        // Same seed, same answer.
        let (again, _) = resolve_reference(&q, &SaConfig::quick(), 1).unwrap();
        assert_eq!(reference, again);
    }

    #[test]
    fn oversized_problems_are_refused_a_reference() {
        let q = QuboProblem::zeros(REFERENCE_MAX_VARS + 1, "too-big").unwrap();
        assert!(matches!(
            resolve_reference(&q, &SaConfig::quick(), 1),
            Err(RunError::BadConfig(_))
        ));
    }

    #[test]
    fn covering_decomposition_in_one_cycle_matches_exhaustive_search() {
        // One sub-problem spanning every variable, solved with a generous
        // budget: the aggregate must land on the true optimum.
        let q = generate_dense_qubo(8, 11).unwrap();
        let cfg = DqaoaConfig {
            decomposition: DecompositionConfig {
                strategy: Strategy::Ifd,
                num_sub: 1,
                sub_size: 8,
                ..DecompositionConfig::default()
            },
            qaoa: QaoaConfig {
                shots: 2048,
                max_evals: 150,
                ..QaoaConfig::default()
            },
            max_cycles: 6,
            master_seed: 3,
            ..DqaoaConfig::default()
        };
        let (reference, _) = resolve_reference(&q, &SaConfig::default(), 0).unwrap();
        let mut pool = WorkerPool::in_process(1);
        let outcome = run_dqaoa(&q, &cfg, reference, &mut pool).unwrap();
        let (brute_bits, brute_energy) = brute_force_solve(&q).unwrap();
        assert_eq!(outcome.best_energy, brute_energy);
        assert_eq!(outcome.best_bits, brute_bits);
        assert_eq!(q.energy(&outcome.best_bits).unwrap(), outcome.best_energy);
    }

    #[test]
    fn energies_never_rise_across_cycles_and_runs_are_reproducible() {
        let q = generate_dense_qubo(14, 21).unwrap();
        let cfg = DqaoaConfig {
            decomposition: DecompositionConfig {
                strategy: Strategy::Bfs,
                num_sub: 3,
                sub_size: 5,
                ..DecompositionConfig::default()
            },
            qaoa: QaoaConfig {
                shots: 128,
                max_evals: 40,
                ..QaoaConfig::default()
            },
            max_cycles: 5,
            ar_window: 2,
            ar_tolerance: 0.0,
            master_seed: 11,
            ..DqaoaConfig::default()
        };
        let (reference, _) = resolve_reference(&q, &SaConfig::quick(), 0).unwrap();
        let run = || {
            let mut pool = WorkerPool::in_process(2);
            run_dqaoa(&q, &cfg, reference, &mut pool).unwrap()
        };
        let a = run();
        let b = run();
        for pair in a.reports.windows(2) {
            assert!(pair[1].energy <= pair[0].energy);
        }
        assert_eq!(q.energy(&a.best_bits).unwrap(), a.best_energy);
        assert_eq!(a.best_bits, b.best_bits);
        assert_eq!(a.best_energy.to_bits(), b.best_energy.to_bits());
        assert_eq!(a.reports.len(), b.reports.len());
        for (ra, rb) in a.reports.iter().zip(&b.reports) {
            assert_eq!(ra.energy.to_bits(), rb.energy.to_bits());
            assert_eq!(ra.accepted_updates, rb.accepted_updates);
        }
    }

    #[test]
    fn init_seed_controls_the_starting_point_alone() {
        let q = generate_dense_qubo(12, 5).unwrap();
        let base = DqaoaConfig {
            decomposition: DecompositionConfig {
                strategy: Strategy::Random,
                num_sub: 2,
                sub_size: 4,
                ..DecompositionConfig::default()
            },
            qaoa: QaoaConfig {
                shots: 64,
                max_evals: 10,
                ..QaoaConfig::default()
            },
            max_cycles: 1,
            master_seed: 5,
            ..DqaoaConfig::default()
        };
        let run = |cfg: &DqaoaConfig| {
            let mut pool = WorkerPool::in_process(1);
            run_dqaoa(&q, cfg, -1.0, &mut pool).unwrap()
        };
        let implicit = run(&base);
        let explicit = run(&DqaoaConfig {
            init_seed: Some(5),
            ..base.clone()
        });
        // init_seed defaulting to the master seed is observable.
        assert_eq!(implicit.best_bits, explicit.best_bits);
        let different = run(&DqaoaConfig {
            init_seed: Some(6),
            ..base.clone()
        });
        // A different start may or may not end elsewhere, but the first
        // cycle's starting energy differs unless the strings collide.
        let xa = BitString::random(q.n(), derive_seed(&[5, INIT_STREAM]));
        let xb = BitString::random(q.n(), derive_seed(&[6, INIT_STREAM]));
        assert_ne!(xa, xb);
        let _ = different;
    }

    #[test]
    fn bad_configs_are_rejected_before_any_work() {
        let q = generate_dense_qubo(10, 1).unwrap();
        let mut pool = WorkerPool::in_process(1);
        let mut cfg = DqaoaConfig::default();
        cfg.decomposition.sub_size = 11; // larger than the problem
        assert!(matches!(
            run_dqaoa(&q, &cfg, -1.0, &mut pool),
            Err(RunError::Decompose(_))
        ));
        let mut cfg = DqaoaConfig {
            max_cycles: 0,
            ..DqaoaConfig::default()
        };
        cfg.decomposition.sub_size = 4;
        assert!(matches!(
            run_dqaoa(&q, &cfg, -1.0, &mut pool),
            Err(RunError::BadConfig(_))
        ));
        let mut cfg = DqaoaConfig::default();
        cfg.decomposition.sub_size = 4;
        assert!(matches!(
            run_dqaoa(&q, &cfg, 5.0, &mut pool),
            Err(RunError::BadReference(_))
        ));
    }

    #[test]
    fn pool_failures_carry_the_finished_reports_out() {
        let q = generate_dense_qubo(10, 9).unwrap();
        let mut cfg = DqaoaConfig {
            max_cycles: 3,
            master_seed: 2,
            ..DqaoaConfig::default()
        };
        cfg.decomposition.num_sub = 2;
        cfg.decomposition.sub_size = 4;
        cfg.qaoa.shots = 32;
        cfg.qaoa.max_evals = 5;
        let mut pool = WorkerPool::in_process(1);
        pool.shutdown();
        match run_dqaoa(&q, &cfg, -1.0, &mut pool) {
            Err(RunError::Aborted { reports, source }) => {
                assert!(reports.is_empty());
                assert!(matches!(source, PoolError::Exhausted));
            }
            other => panic!("expected Aborted, got {other:?}"),
        }
    }
}
