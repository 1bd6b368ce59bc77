//! The four subcommands. Each returns `Ok(())` or a [`CliError`] whose
//! flavor decides the process exit code.

use crate::args::{GenerateArgs, ProfileArgs, SolveArgs, SweepArgs};
use crate::experiment::{
    effective_offset, final_ar, mean, resolve_reference_with, run_profile, run_trials, stddev_pop,
};
use crate::report::{
    density_pct, solve_summary, write_cycle_csv, write_profile_csv, write_sweep_header,
    write_sweep_row, ProblemFacts, RunFacts, SweepRecord,
};
use crate::spec::{ProblemKind, RunPlan};
use crate::CliError;
use dqaoa_core::decompose::{decompose, DecompositionPlan, Strategy};
use dqaoa_core::qubo::{
    generate_dense_qubo, generate_maxcut, write_maxcut_file, write_qubo_file, QuboProblem,
    SaConfig,
};
use dqaoa_orchestrator::{cycle_decomposition_config, initial_assignment, WorkerPool};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub fn cmd_generate(args: &GenerateArgs) -> Result<(), CliError> {
    let kind: ProblemKind = args.kind.parse().map_err(CliError::config)?;
    let q = match kind {
        ProblemKind::Dense => {
            let q = generate_dense_qubo(args.n, args.seed).map_err(CliError::config)?;
            write_qubo_file(&q, &args.out).map_err(|e| {
                CliError::runtime(format!("cannot write {}: {e}", args.out.display()))
            })?;
            q
        }
        ProblemKind::MaxCut => {
            let inst = generate_maxcut(args.n, args.seed).map_err(CliError::config)?;
            write_maxcut_file(&inst, &args.out).map_err(|e| {
                CliError::runtime(format!("cannot write {}: {e}", args.out.display()))
            })?;
            println!("{} edges on {} vertices", inst.edges().len(), inst.n());
            inst.to_qubo()
        }
    };
    println!(
        "wrote {} (n={}, {} nonzeros, density {:.1}%) to {}",
        q.name(),
        q.n(),
        q.nonzero_count(),
        density_pct(q.n(), q.nonzero_count()),
        args.out.display()
    );
    Ok(())
}

/// The reference baseline for scored runs: full annealing quality, since
/// ratios are the product here.
fn scored_reference(
    plan: &RunPlan,
    q: &QuboProblem,
) -> Result<(f64, &'static str, f64), CliError> {
    let (reference, kind) =
        resolve_reference_with(q, plan.reference, &SaConfig::default(), plan.seed)
            .map_err(CliError::from_run)?;
    let offset = effective_offset(reference, plan.dqaoa.energy_offset);
    if offset != plan.dqaoa.energy_offset {
        log::warn!(
            "reference {reference} is not negative; shifting energies by {offset} for ratios"
        );
    }
    log::info!("reference energy {reference} ({kind})");
    Ok((reference, kind, offset))
}

fn out_stem(plan: &RunPlan, default: &str) -> PathBuf {
    plan.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut path = stem.to_path_buf();
    let new_ext = match path.extension() {
        // Respect an explicit extension on --out for the primary CSV.
        Some(e) if ext == "csv" => e.to_string_lossy().into_owned(),
        _ => ext.to_string(),
    };
    path.set_extension(new_ext);
    path
}

fn create_output(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))
}

pub fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    let mut plan = RunPlan::assemble(&args.common, Strategy::Ifd)?;
    plan.require_shape()?;
    let source = plan.require_problem()?.clone();
    let q = source.load()?;
    plan.dqaoa.validate_for(q.n()).map_err(CliError::from_run)?;

    let (reference, ref_kind, offset) = scored_reference(&plan, &q)?;
    plan.dqaoa.energy_offset = offset;

    if let Some(path) = &args.dump_plan {
        dump_first_cycle_plan(&plan, &q, path)?;
    }

    let mut pool = WorkerPool::new(plan.workers, plan.transport).map_err(CliError::runtime)?;
    let trials = run_trials(
        &q,
        &plan.dqaoa,
        plan.trials,
        plan.seed,
        reference,
        &mut pool,
    )
    .map_err(CliError::from_run)?;
    pool.shutdown();

    let stem = out_stem(&plan, "dqaoa_solve");
    let csv_path = with_ext(&stem, "csv");
    write_cycle_csv(create_output(&csv_path)?, &trials)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", csv_path.display())))?;

    let source_desc = source.describe();
    let problem_facts = ProblemFacts {
        source: &source_desc,
        name: q.name(),
        n: q.n(),
        nonzeros: q.nonzero_count(),
        density_pct: density_pct(q.n(), q.nonzero_count()),
    };
    let transport = plan.transport.to_string();
    let run_facts = RunFacts {
        strategy: plan.dqaoa.decomposition.strategy.as_str(),
        sub_size: plan.dqaoa.decomposition.sub_size,
        num_sub: plan.dqaoa.decomposition.num_sub,
        workers: plan.workers,
        transport: &transport,
        trials: plan.trials,
        seed: plan.seed,
        reference_energy: reference,
        reference_kind: ref_kind,
        energy_offset: offset,
    };
    let summary = solve_summary(&problem_facts, &run_facts, &trials);
    let json_path = with_ext(&stem, "json");
    let mut w = create_output(&json_path)?;
    serde_json::to_writer_pretty(&mut w, &summary)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", json_path.display())))?;
    writeln!(w).map_err(CliError::runtime)?;

    let finals: Vec<f64> = trials.iter().map(|t| final_ar(&t.outcome)).collect();
    println!(
        "{} | {} trial(s), strategy {}, k={}, m={}",
        source.describe(),
        plan.trials,
        plan.dqaoa.decomposition.strategy,
        plan.dqaoa.decomposition.sub_size,
        plan.dqaoa.decomposition.num_sub,
    );
    println!("reference energy {reference} ({ref_kind})");
    println!(
        "final A.R. {:.2}% ± {:.2} p.p., {} of {} trial(s) converged",
        mean(&finals),
        stddev_pop(&finals),
        trials.iter().filter(|t| t.outcome.converged).count(),
        plan.trials,
    );
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

/// What the first cycle of trial 0 will decompose into, written as JSON.
fn dump_first_cycle_plan(plan: &RunPlan, q: &QuboProblem, path: &Path) -> Result<(), CliError> {
    let x0 = initial_assignment(q.n(), plan.seed);
    let mut base = plan.dqaoa.decomposition.clone();
    base.seed = plan.seed;
    let cfg = cycle_decomposition_config(&base, 1);
    let subs = decompose(q, &x0, &cfg).map_err(|e| CliError::config(e.to_string()))?;
    let dump = DecompositionPlan::new(cfg, &subs);
    let mut w = create_output(path)?;
    serde_json::to_writer_pretty(&mut w, &dump)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
    writeln!(w).map_err(CliError::runtime)?;
    println!("wrote decomposition plan to {}", path.display());
    Ok(())
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let mut plan = RunPlan::assemble(&args.common, Strategy::Ifd)?;
    let source = plan.require_problem()?.clone();

    // Flag lists override file lists; a missing dimension degenerates to
    // the scalar setting.
    let pick = |from_args: &[usize], from_file: &[usize]| -> Vec<usize> {
        if !from_args.is_empty() {
            from_args.to_vec()
        } else {
            from_file.to_vec()
        }
    };
    let sub_sizes = pick(&args.sub_sizes, &plan.sweep.sub_size);
    let num_subs = pick(&args.num_subs, &plan.sweep.num_sub);
    let workers_list = pick(&args.workers_list, &plan.sweep.workers);
    let strategies = if !args.strategies.is_empty() {
        args.strategies.clone()
    } else {
        plan.sweep.strategy.clone()
    };
    if sub_sizes.is_empty() && num_subs.is_empty() && workers_list.is_empty() && strategies.is_empty()
    {
        return Err(CliError::config(
            "sweep needs at least one list: --sub-sizes, --num-subs, --workers-list, or --strategies",
        ));
    }
    let sub_sizes = if sub_sizes.is_empty() {
        plan.require_shape()?;
        vec![plan.dqaoa.decomposition.sub_size]
    } else {
        sub_sizes
    };
    let num_subs = if num_subs.is_empty() {
        vec![plan.dqaoa.decomposition.num_sub]
    } else {
        num_subs
    };
    let workers_list = if workers_list.is_empty() {
        vec![plan.workers]
    } else {
        workers_list
    };
    let strategies = if strategies.is_empty() {
        vec![plan.dqaoa.decomposition.strategy]
    } else {
        strategies
    };

    let q = source.load()?;
    let (reference, _, offset) = scored_reference(&plan, &q)?;
    plan.dqaoa.energy_offset = offset;

    let stem = out_stem(&plan, "dqaoa_sweep");
    let csv_path = with_ext(&stem, "csv");
    let mut w = create_output(&csv_path)?;
    write_sweep_header(&mut w).map_err(CliError::runtime)?;

    let mut cells = 0usize;
    let mut skipped = 0usize;
    for &workers in &workers_list {
        let mut pool = WorkerPool::new(workers, plan.transport).map_err(CliError::runtime)?;
        for &strategy in &strategies {
            for &sub_size in &sub_sizes {
                for &num_sub in &num_subs {
                    let mut cfg = plan.dqaoa.clone();
                    cfg.decomposition.strategy = strategy;
                    cfg.decomposition.sub_size = sub_size;
                    cfg.decomposition.num_sub = num_sub;
                    if let Err(e) = cfg.validate_for(q.n()) {
                        log::warn!(
                            "skipping cell strategy={strategy} k={sub_size} m={num_sub}: {e}"
                        );
                        skipped += 1;
                        continue;
                    }
                    let trials =
                        run_trials(&q, &cfg, plan.trials, plan.seed, reference, &mut pool)
                            .map_err(CliError::from_run)?;
                    for trial in &trials {
                        write_sweep_row(
                            &mut w,
                            &SweepRecord {
                                strategy: strategy.as_str(),
                                sub_size,
                                num_sub,
                                workers,
                                trial,
                            },
                        )
                        .map_err(CliError::runtime)?;
                    }
                    cells += 1;
                }
            }
        }
        pool.shutdown();
    }
    w.flush().map_err(CliError::runtime)?;

    println!(
        "swept {cells} cell(s) ({skipped} skipped), {} trial(s) each; wrote {}",
        plan.trials,
        csv_path.display()
    );
    Ok(())
}

pub fn cmd_profile(args: &ProfileArgs) -> Result<(), CliError> {
    let plan = RunPlan::assemble(&args.common, Strategy::Random)?;
    plan.require_shape()?;
    if args.common.problem.is_some() {
        log::warn!("profile generates its own instances; --problem is ignored");
    }
    let sizes = if !args.sizes.is_empty() {
        args.sizes.clone()
    } else {
        plan.sizes.clone()
    };
    if sizes.is_empty() {
        return Err(CliError::config(
            "profile needs problem sizes; pass --sizes or set sizes in the config file",
        ));
    }
    let kind = match &args.kind {
        Some(s) => s.parse::<ProblemKind>().map_err(CliError::config)?,
        None => plan.kind,
    };

    let rows = run_profile(
        kind,
        &sizes,
        &plan.dqaoa,
        plan.trials,
        plan.seed,
        plan.workers,
        plan.transport,
    )?;

    let stem = out_stem(&plan, "dqaoa_profile");
    let csv_path = with_ext(&stem, "csv");
    write_profile_csv(create_output(&csv_path)?, &rows)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", csv_path.display())))?;

    println!("n      decompose_ms  solve_ms      aggregate_ms");
    for row in &rows {
        println!(
            "{:<6} {:<13.3} {:<13.3} {:<13.3}",
            row.n, row.means.decompose_ms, row.means.solve_ms, row.means.aggregate_ms
        );
    }
    println!("wrote {}", csv_path.display());
    Ok(())
}
