//! The experiment engine behind the subcommands, kept as library code so
//! integration tests can drive campaigns without shelling out.

use crate::spec::{generate_instance, ProblemKind};
use crate::CliError;
use dqaoa_core::qubo::{QuboProblem, SaConfig};
use dqaoa_orchestrator::{
    resolve_reference, run_dqaoa, DqaoaConfig, ReferenceKind, RunError, RunOutcome, Transport,
    WorkerPool,
};
use std::time::Duration;

/// One independent trial of one configuration.
#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub trial: usize,
    pub master_seed: u64,
    pub outcome: RunOutcome,
}

/// Run `trials` independent runs of `base` on `q`.
///
/// Trial `t` uses master seed `base_seed + t` for everything random in the
/// solve — decomposition choices, angle starts, measurement draws — while
/// every trial starts from the identical initial assignment derived from
/// `base_seed` alone, so trials differ in search path, not in starting
/// point.
pub fn run_trials(
    q: &QuboProblem,
    base: &DqaoaConfig,
    trials: usize,
    base_seed: u64,
    reference_energy: f64,
    pool: &mut WorkerPool,
) -> Result<Vec<TrialOutcome>, RunError> {
    let mut out = Vec::with_capacity(trials);
    for t in 0..trials {
        let master_seed = base_seed + t as u64;
        let mut cfg = base.clone();
        cfg.master_seed = master_seed;
        cfg.decomposition.seed = master_seed;
        cfg.init_seed = Some(base_seed);
        let outcome = run_dqaoa(q, &cfg, reference_energy, pool)?;
        log::info!(
            "trial {t}: {} cycle(s), energy {:.6}, ratio {:.2}%{}",
            outcome.reports.len(),
            outcome.best_energy,
            final_ar(&outcome),
            if outcome.converged { "" } else { " (hit the cycle cap)" }
        );
        out.push(TrialOutcome {
            trial: t,
            master_seed,
            outcome,
        });
    }
    Ok(out)
}

/// The reference energy to score against: the explicit value when one was
/// given, otherwise exact or annealed per problem size.
pub fn resolve_reference_with(
    q: &QuboProblem,
    explicit: Option<f64>,
    sa: &SaConfig,
    seed: u64,
) -> Result<(f64, &'static str), RunError> {
    match explicit {
        Some(r) => Ok((r, "provided")),
        None => {
            let (energy, kind) = resolve_reference(q, sa, seed).map_err(|e| match e {
                RunError::BadConfig(msg) => RunError::BadConfig(format!(
                    "{msg}; pass --reference to supply one"
                )),
                other => other,
            })?;
            Ok((
                energy,
                match kind {
                    ReferenceKind::Exact => "exact",
                    ReferenceKind::Annealed => "annealed",
                },
            ))
        }
    }
}

/// An offset that makes the shifted reference negative, so approximation
/// ratios are well defined. Keeps the requested offset when it already
/// works; otherwise centers the shifted reference at `-max(1, |ref|)`.
pub fn effective_offset(reference: f64, requested: f64) -> f64 {
    if reference + requested < 0.0 {
        requested
    } else {
        -reference - reference.abs().max(1.0)
    }
}

pub fn final_ar(outcome: &RunOutcome) -> f64 {
    outcome
        .reports
        .last()
        .map(|r| r.approx_ratio_pct)
        .unwrap_or(f64::NAN)
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation (divide by n, not n−1).
pub fn stddev_pop(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

pub fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Per-phase timing means over every cycle of every trial, in
/// milliseconds, plus the mean cycle count per trial.
#[derive(Clone, Copy, Debug, Default)]
pub struct PhaseMeans {
    pub decompose_ms: f64,
    pub solve_ms: f64,
    pub aggregate_ms: f64,
    pub cycles: f64,
}

pub fn phase_means(trials: &[TrialOutcome]) -> PhaseMeans {
    let mut td = Vec::new();
    let mut ts = Vec::new();
    let mut ta = Vec::new();
    for trial in trials {
        for r in &trial.outcome.reports {
            td.push(ms(r.t_decompose));
            ts.push(ms(r.t_solve));
            ta.push(ms(r.t_aggregate));
        }
    }
    let cycles: Vec<f64> = trials
        .iter()
        .map(|t| t.outcome.reports.len() as f64)
        .collect();
    PhaseMeans {
        decompose_ms: mean(&td),
        solve_ms: mean(&ts),
        aggregate_ms: mean(&ta),
        cycles: mean(&cycles),
    }
}

/// One row of the profile command: phase-timing means at one problem size.
#[derive(Clone, Debug)]
pub struct ProfileRow {
    pub n: usize,
    pub strategy: String,
    pub sub_size: usize,
    pub num_sub: usize,
    pub trials: usize,
    pub means: PhaseMeans,
}

/// Run `trials` runs of `base` at each problem size and average the phase
/// timings. References come from the quick annealing schedule — profile
/// rows report timings, not solution quality, so a cheap baseline is the
/// right trade.
pub fn run_profile(
    kind: ProblemKind,
    sizes: &[usize],
    base: &DqaoaConfig,
    trials: usize,
    base_seed: u64,
    workers: usize,
    transport: Transport,
) -> Result<Vec<ProfileRow>, CliError> {
    if sizes.is_empty() {
        return Err(CliError::config("profile needs at least one size"));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let q = generate_instance(kind, n, 0).map_err(CliError::config)?;
        base.validate_for(q.n()).map_err(CliError::from_run)?;
        let (reference, _) = resolve_reference_with(&q, None, &SaConfig::quick(), base_seed)
            .map_err(CliError::from_run)?;
        let mut pool = WorkerPool::new(workers, transport).map_err(CliError::runtime)?;
        let outcomes = run_trials(&q, base, trials, base_seed, reference, &mut pool)
            .map_err(CliError::from_run)?;
        pool.shutdown();
        rows.push(ProfileRow {
            n,
            strategy: base.decomposition.strategy.to_string(),
            sub_size: base.decomposition.sub_size,
            num_sub: base.decomposition.num_sub,
            trials,
            means: phase_means(&outcomes),
        });
        log::info!(
            "profiled n={n}: decompose {:.3} ms, solve {:.3} ms, aggregate {:.3} ms per cycle",
            rows.last().unwrap().means.decompose_ms,
            rows.last().unwrap().means.solve_ms,
            rows.last().unwrap().means.aggregate_ms,
        );
    }
    Ok(rows)
}
