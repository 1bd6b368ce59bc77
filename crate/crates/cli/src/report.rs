//! CSV and JSON emission. Floats are written with Rust's shortest
//! round-trip formatting, so parsing a column back recovers the exact
//! value and summary statistics can be recomputed from the rows.

use crate::experiment::{final_ar, mean, ms, phase_means, stddev_pop, TrialOutcome};
use crate::experiment::{PhaseMeans, ProfileRow};
use serde_json::json;
use std::io::{self, Write};

/// Column order of the per-cycle CSV written by the solve command.
pub const CYCLE_CSV_HEADER: &str =
    "trial,cycle,energy,ar_pct,t_decompose_ms,t_solve_ms,t_aggregate_ms,accepted";

/// Column order of the sweep CSV: one row per cell per trial. `tts_ms` is
/// the wall-clock time of the whole run; `censored` marks runs that hit
/// the cycle cap instead of converging, whose time-to-solution is
/// therefore only a lower bound.
pub const SWEEP_CSV_HEADER: &str =
    "strategy,sub_size,num_sub,workers,trial,cycles,final_energy,final_ar_pct,tts_ms,censored";

/// Column order of the profile CSV: one row per problem size.
pub const PROFILE_CSV_HEADER: &str =
    "n,strategy,sub_size,num_sub,trials,cycles,mean_t_decompose_ms,mean_t_solve_ms,mean_t_aggregate_ms";

pub fn write_cycle_csv<W: Write>(mut w: W, trials: &[TrialOutcome]) -> io::Result<()> {
    writeln!(w, "{CYCLE_CSV_HEADER}")?;
    for trial in trials {
        for r in &trial.outcome.reports {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                trial.trial,
                r.cycle,
                r.energy,
                r.approx_ratio_pct,
                ms(r.t_decompose),
                ms(r.t_solve),
                ms(r.t_aggregate),
                r.accepted_updates,
            )?;
        }
    }
    Ok(())
}

/// One sweep cell annotated with the settings that produced it.
pub struct SweepRecord<'a> {
    pub strategy: &'a str,
    pub sub_size: usize,
    pub num_sub: usize,
    pub workers: usize,
    pub trial: &'a TrialOutcome,
}

pub fn write_sweep_header<W: Write>(mut w: W) -> io::Result<()> {
    writeln!(w, "{SWEEP_CSV_HEADER}")
}

pub fn write_sweep_row<W: Write>(mut w: W, rec: &SweepRecord<'_>) -> io::Result<()> {
    let outcome = &rec.trial.outcome;
    writeln!(
        w,
        "{},{},{},{},{},{},{},{},{},{}",
        rec.strategy,
        rec.sub_size,
        rec.num_sub,
        rec.workers,
        rec.trial.trial,
        outcome.reports.len(),
        outcome.best_energy,
        final_ar(outcome),
        ms(outcome.elapsed),
        !outcome.converged,
    )
}

pub fn write_profile_csv<W: Write>(mut w: W, rows: &[ProfileRow]) -> io::Result<()> {
    writeln!(w, "{PROFILE_CSV_HEADER}")?;
    for row in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            row.n,
            row.strategy,
            row.sub_size,
            row.num_sub,
            row.trials,
            row.means.cycles,
            row.means.decompose_ms,
            row.means.solve_ms,
            row.means.aggregate_ms,
        )?;
    }
    Ok(())
}

/// Instance facts echoed into the summary.
pub struct ProblemFacts<'a> {
    pub source: &'a str,
    pub name: &'a str,
    pub n: usize,
    pub nonzeros: usize,
    pub density_pct: f64,
}

/// Run settings echoed into the summary.
pub struct RunFacts<'a> {
    pub strategy: &'a str,
    pub sub_size: usize,
    pub num_sub: usize,
    pub workers: usize,
    pub transport: &'a str,
    pub trials: usize,
    pub seed: u64,
    pub reference_energy: f64,
    pub reference_kind: &'a str,
    pub energy_offset: f64,
}

/// The solve summary. Every mean/stddev here is recomputable from the
/// per-cycle CSV rows; wall-clock entries are measurements, tied to the
/// run that produced them.
pub fn solve_summary(
    problem: &ProblemFacts<'_>,
    run: &RunFacts<'_>,
    trials: &[TrialOutcome],
) -> serde_json::Value {
    let finals: Vec<f64> = trials.iter().map(|t| final_ar(&t.outcome)).collect();
    let PhaseMeans {
        decompose_ms,
        solve_ms,
        aggregate_ms,
        cycles,
    } = phase_means(trials);
    let detail: Vec<serde_json::Value> = trials
        .iter()
        .map(|t| {
            json!({
                "trial": t.trial,
                "master_seed": t.master_seed,
                "cycles": t.outcome.reports.len(),
                "final_energy": t.outcome.best_energy,
                "final_ar_pct": final_ar(&t.outcome),
                "converged": t.outcome.converged,
                "tts_ms": ms(t.outcome.elapsed),
                "censored": !t.outcome.converged,
            })
        })
        .collect();
    json!({
        "problem": {
            "source": problem.source,
            "name": problem.name,
            "n": problem.n,
            "nonzeros": problem.nonzeros,
            "density_pct": problem.density_pct,
        },
        "strategy": run.strategy,
        "sub_size": run.sub_size,
        "num_sub": run.num_sub,
        "workers": run.workers,
        "transport": run.transport,
        "trials": run.trials,
        "seed": run.seed,
        "reference_energy": run.reference_energy,
        "reference_kind": run.reference_kind,
        "energy_offset": run.energy_offset,
        "converged_trials": trials.iter().filter(|t| t.outcome.converged).count(),
        "mean_final_ar_pct": mean(&finals),
        "stddev_final_ar_pct": stddev_pop(&finals),
        "mean_cycles": cycles,
        "mean_t_decompose_ms": decompose_ms,
        "mean_t_solve_ms": solve_ms,
        "mean_t_aggregate_ms": aggregate_ms,
        "trial_detail": detail,
    })
}

/// Percent of the packed upper triangle (diagonal included) that is
/// nonzero.
pub fn density_pct(n: usize, nonzeros: usize) -> f64 {
    let slots = n * (n + 1) / 2;
    if slots == 0 {
        return 0.0;
    }
    100.0 * nonzeros as f64 / slots as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use dqaoa_core::qubo::BitString;
    use dqaoa_orchestrator::{CycleReport, RunOutcome};
    use std::time::Duration;

    fn fake_trial(trial: usize, ars: &[f64]) -> TrialOutcome {
        let reports = ars
            .iter()
            .enumerate()
            .map(|(i, &ar)| CycleReport {
                cycle: i + 1,
                energy: -(ar),
                approx_ratio_pct: ar,
                t_decompose: Duration::from_micros(120),
                t_solve: Duration::from_micros(3400),
                t_aggregate: Duration::from_micros(560),
                accepted_updates: 1,
            })
            .collect::<Vec<_>>();
        TrialOutcome {
            trial,
            master_seed: trial as u64,
            outcome: RunOutcome {
                best_bits: BitString::zeros(4),
                best_energy: -ars.last().unwrap(),
                reports,
                converged: true,
                elapsed: Duration::from_millis(12),
                reference_energy: -100.0,
            },
        }
    }

    #[test]
    fn cycle_csv_has_the_documented_header_and_one_row_per_cycle() {
        let trials = vec![fake_trial(0, &[80.0, 90.0]), fake_trial(1, &[85.0])];
        let mut buf = Vec::new();
        write_cycle_csv(&mut buf, &trials).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CYCLE_CSV_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,1,"));
        assert!(lines[3].starts_with("1,1,"));
        for line in &lines[1..] {
            assert_eq!(line.split(',').count(), 8);
        }
    }

    #[test]
    fn csv_floats_round_trip_exactly() {
        let awkward = 90.0 + 1.0 / 3.0;
        let trials = vec![fake_trial(0, &[awkward])];
        let mut buf = Vec::new();
        write_cycle_csv(&mut buf, &trials).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row = text.lines().nth(1).unwrap();
        let ar: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
        assert_eq!(ar.to_bits(), awkward.to_bits());
    }

    #[test]
    fn summary_statistics_match_the_rows() {
        let trials = vec![fake_trial(0, &[80.0, 90.0]), fake_trial(1, &[86.0])];
        let problem = ProblemFacts {
            source: "dense:4:0",
            name: "d",
            n: 4,
            nonzeros: 10,
            density_pct: 100.0,
        };
        let run = RunFacts {
            strategy: "ifd",
            sub_size: 2,
            num_sub: 1,
            workers: 1,
            transport: "in-process",
            trials: 2,
            seed: 0,
            reference_energy: -100.0,
            reference_kind: "exact",
            energy_offset: 0.0,
        };
        let summary = solve_summary(&problem, &run, &trials);
        assert_eq!(summary["mean_final_ar_pct"].as_f64().unwrap(), 88.0);
        assert_eq!(summary["stddev_final_ar_pct"].as_f64().unwrap(), 2.0);
        assert_eq!(summary["converged_trials"].as_u64().unwrap(), 2);
        assert_eq!(summary["mean_cycles"].as_f64().unwrap(), 1.5);
        assert_eq!(summary["trial_detail"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn sweep_rows_mark_censored_runs() {
        let mut trial = fake_trial(0, &[70.0]);
        trial.outcome.converged = false;
        let mut buf = Vec::new();
        write_sweep_header(&mut buf).unwrap();
        write_sweep_row(
            &mut buf,
            &SweepRecord {
                strategy: "random",
                sub_size: 4,
                num_sub: 2,
                workers: 1,
                trial: &trial,
            },
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SWEEP_CSV_HEADER);
        assert!(lines[1].starts_with("random,4,2,1,0,1,"));
        assert!(lines[1].ends_with(",true"));
    }

    #[test]
    fn density_is_a_percentage_of_stored_slots() {
        assert_eq!(density_pct(4, 10), 100.0);
        assert_eq!(density_pct(4, 5), 50.0);
        assert_eq!(density_pct(0, 0), 0.0);
    }
}
