//! End-to-end tests of the `dqaoa` binary: flag handling, exit codes,
//! file outputs, and the CSV/JSON contracts.

use std::path::Path;
use std::process::{Command, Output};

fn dqaoa(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dqaoa"))
        .args(args)
        .current_dir(dir)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

/// Tiny-but-real solve arguments: brute-force reference, a couple of
/// cycles, small budgets.
fn quick_solve_args(out: &str) -> Vec<&str> {
    vec![
        "solve",
        "--problem",
        "dense:12:3",
        "--strategy",
        "random",
        "--sub-size",
        "4",
        "--num-sub",
        "2",
        "--trials",
        "2",
        "--seed",
        "7",
        "--max-cycles",
        "2",
        "--ar-window",
        "1",
        "--ar-tol",
        "0",
        "--shots",
        "64",
        "--budget",
        "8",
        "--workers",
        "1",
        "--out",
        out,
    ]
}

#[test]
fn generate_writes_reproducible_files_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "generate", "--kind", "dense", "--n", "12", "--seed", "5", "--out", "a.qubo",
    ];
    let first = dqaoa(&args, dir.path());
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    assert!(stdout(&first).contains("n=12"), "{}", stdout(&first));
    assert!(stdout(&first).contains("density"), "{}", stdout(&first));

    let again = dqaoa(
        &["generate", "--kind", "dense", "--n", "12", "--seed", "5", "--out", "b.qubo"],
        dir.path(),
    );
    assert_eq!(code(&again), 0);
    assert_eq!(
        std::fs::read(dir.path().join("a.qubo")).unwrap(),
        std::fs::read(dir.path().join("b.qubo")).unwrap(),
        "same arguments must produce byte-identical files"
    );

    let cut = dqaoa(
        &["generate", "--kind", "maxcut", "--n", "16", "--seed", "1", "--out", "c.mc"],
        dir.path(),
    );
    assert_eq!(code(&cut), 0, "{}", stderr(&cut));
    assert!(stdout(&cut).contains("edges"), "{}", stdout(&cut));
    assert!(read(&dir.path().join("c.mc")).contains("MAXCUT"));
}

#[test]
fn solve_emits_the_documented_csv_and_a_recomputable_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dqaoa(&quick_solve_args("run"), dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let csv = read(&dir.path().join("run.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "trial,cycle,energy,ar_pct,t_decompose_ms,t_solve_ms,t_aggregate_ms,accepted"
    );
    assert!(lines.len() > 1);
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 8, "bad row: {line}");
    }

    // Recompute the summary statistics from the rows.
    let mut finals: std::collections::BTreeMap<u64, f64> = Default::default();
    let mut cycles: std::collections::BTreeMap<u64, u64> = Default::default();
    let (mut td, mut ts, mut ta) = (Vec::new(), Vec::new(), Vec::new());
    for line in &lines[1..] {
        let cells: Vec<&str> = line.split(',').collect();
        let trial: u64 = cells[0].parse().unwrap();
        finals.insert(trial, cells[3].parse().unwrap());
        *cycles.entry(trial).or_default() += 1;
        td.push(cells[4].parse::<f64>().unwrap());
        ts.push(cells[5].parse::<f64>().unwrap());
        ta.push(cells[6].parse::<f64>().unwrap());
    }
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let finals: Vec<f64> = finals.into_values().collect();
    let mean_ar = mean(&finals);
    let std_ar = (finals.iter().map(|x| (x - mean_ar).powi(2)).sum::<f64>()
        / finals.len() as f64)
        .sqrt();

    let summary: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("run.json"))).unwrap();
    let close = |field: &str, want: f64| {
        let got = summary[field].as_f64().unwrap_or_else(|| panic!("{field} missing"));
        assert!(
            (got - want).abs() <= 1e-9,
            "{field}: summary {got} vs recomputed {want}"
        );
    };
    close("mean_final_ar_pct", mean_ar);
    close("stddev_final_ar_pct", std_ar);
    close("mean_t_decompose_ms", mean(&td));
    close("mean_t_solve_ms", mean(&ts));
    close("mean_t_aggregate_ms", mean(&ta));
    close(
        "mean_cycles",
        cycles.values().map(|&c| c as f64).sum::<f64>() / cycles.len() as f64,
    );
    assert_eq!(summary["trials"].as_u64().unwrap(), 2);
    assert_eq!(summary["reference_kind"].as_str().unwrap(), "exact");
    assert_eq!(summary["problem"]["n"].as_u64().unwrap(), 12);
    assert_eq!(summary["trial_detail"].as_array().unwrap().len(), 2);
}

#[test]
fn single_trial_single_cycle_yields_exactly_one_data_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dqaoa(
        &[
            "solve", "--problem", "dense:10", "--sub-size", "4", "--num-sub", "1",
            "--trials", "1", "--max-cycles", "1", "--shots", "32", "--budget", "4",
            "--workers", "1", "--out", "one",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = read(&dir.path().join("one.csv"));
    assert_eq!(csv.lines().count(), 2, "{csv}");
}

#[test]
fn identical_invocations_differ_only_in_timing_columns() {
    let dir = tempfile::tempdir().unwrap();
    let a = dqaoa(&quick_solve_args("a"), dir.path());
    let b = dqaoa(&quick_solve_args("b"), dir.path());
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(code(&b), 0, "{}", stderr(&b));
    let strip_timings = |text: &str| -> Vec<String> {
        text.lines()
            .map(|line| {
                line.split(',')
                    .enumerate()
                    .filter(|(i, _)| !(4..=6).contains(i))
                    .map(|(_, c)| c.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect()
    };
    assert_eq!(
        strip_timings(&read(&dir.path().join("a.csv"))),
        strip_timings(&read(&dir.path().join("b.csv")))
    );
}

#[test]
fn exit_codes_separate_usage_config_and_runtime_failures() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&dqaoa(&["--help"], dir.path())), 0);
    assert_eq!(code(&dqaoa(&["--version"], dir.path())), 0);
    assert_eq!(code(&dqaoa(&["solve", "--no-such-flag"], dir.path())), 1);
    assert_eq!(code(&dqaoa(&["frobnicate"], dir.path())), 1);

    // Statically fine, semantically bad: missing shape.
    let missing = dqaoa(&["solve", "--problem", "dense:10"], dir.path());
    assert_eq!(code(&missing), 1);
    assert!(stderr(&missing).contains("configuration error"), "{}", stderr(&missing));

    // Unreadable problem file.
    let gone = dqaoa(
        &["solve", "--problem", "no/such/file.qubo", "--sub-size", "4"],
        dir.path(),
    );
    assert_eq!(code(&gone), 1);

    // Config file with a typo'd key.
    std::fs::write(dir.path().join("bad.json"), r#"{"sub_sizes": 4}"#).unwrap();
    let bad = dqaoa(
        &["solve", "--problem", "dense:10", "--config", "bad.json"],
        dir.path(),
    );
    assert_eq!(code(&bad), 1);
    assert!(stderr(&bad).contains("sub_sizes"), "{}", stderr(&bad));

    // A reference that makes ratios impossible is caught up front.
    let badref = dqaoa(
        &[
            "solve", "--problem", "dense:10", "--sub-size", "4", "--num-sub", "1",
            "--trials", "1", "--max-cycles", "1", "--reference", "5.0", "--out", "r",
        ],
        dir.path(),
    );
    // The offset machinery shifts it instead of failing; success is fine,
    // but it must not crash.
    assert_eq!(code(&badref), 0, "{}", stderr(&badref));
}

#[test]
fn dump_plan_reflects_flag_overrides_of_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"problem": "dense:14:2", "sub_size": 4, "num_sub": 2, "trials": 1,
            "max_cycles": 1, "shots": 32, "budget": 4, "strategy": "ifd"}"#,
    )
    .unwrap();
    let out = dqaoa(
        &[
            "solve", "--config", "cfg.json", "--sub-size", "3",
            "--dump-plan", "plan.json", "--out", "run",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let plan: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("plan.json"))).unwrap();
    assert_eq!(plan["strategy"].as_str().unwrap(), "ifd");
    let sets = plan["index_sets"].as_array().unwrap();
    assert_eq!(sets.len(), 2, "num_sub comes from the file");
    for set in sets {
        let indices: Vec<u64> = set
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_u64().unwrap())
            .collect();
        assert_eq!(indices.len(), 3, "sub_size comes from the flag");
        assert!(indices.windows(2).all(|w| w[0] < w[1]));
        assert!(indices.iter().all(|&i| i < 14));
    }
}

#[test]
fn sweep_skips_invalid_cells_and_keeps_going() {
    let dir = tempfile::tempdir().unwrap();
    let out = dqaoa(
        &[
            "sweep", "--problem", "dense:10:1", "--sub-sizes", "4,11", "--num-subs", "1",
            "--workers-list", "1", "--strategies", "random", "--trials", "2",
            "--max-cycles", "1", "--shots", "32", "--budget", "4", "--out", "sweep",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("skipping"), "{}", stderr(&out));
    assert!(stdout(&out).contains("1 skipped"), "{}", stdout(&out));

    let csv = read(&dir.path().join("sweep.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "strategy,sub_size,num_sub,workers,trial,cycles,final_energy,final_ar_pct,tts_ms,censored"
    );
    // One valid cell × two trials.
    assert_eq!(lines.len(), 3, "{csv}");
    for line in &lines[1..] {
        assert!(line.starts_with("random,4,1,1,"), "{line}");
        assert_eq!(line.split(',').count(), 10);
    }
}

#[test]
fn profile_writes_one_row_per_size() {
    let dir = tempfile::tempdir().unwrap();
    let out = dqaoa(
        &[
            "profile", "--sizes", "10,14", "--kind", "dense", "--sub-size", "4",
            "--num-sub", "2", "--trials", "1", "--max-cycles", "2", "--shots", "32",
            "--budget", "4", "--workers", "1", "--out", "prof",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = read(&dir.path().join("prof.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "n,strategy,sub_size,num_sub,trials,cycles,mean_t_decompose_ms,mean_t_solve_ms,mean_t_aggregate_ms"
    );
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("10,random,4,2,1,"));
    assert!(lines[2].starts_with("14,random,4,2,1,"));
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 9);
    }
}

#[test]
fn solved_problem_files_round_trip_through_generate() {
    let dir = tempfile::tempdir().unwrap();
    let gen = dqaoa(
        &["generate", "--kind", "maxcut", "--n", "14", "--seed", "9", "--out", "g.mc"],
        dir.path(),
    );
    assert_eq!(code(&gen), 0, "{}", stderr(&gen));
    let solved = dqaoa(
        &[
            "solve", "--problem", "g.mc", "--sub-size", "4", "--num-sub", "2",
            "--trials", "1", "--max-cycles", "2", "--shots", "32", "--budget", "6",
            "--workers", "1", "--out", "g",
        ],
        dir.path(),
    );
    assert_eq!(code(&solved), 0, "{}", stderr(&solved));
    let summary: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("g.json"))).unwrap();
    assert_eq!(summary["problem"]["n"].as_u64().unwrap(), 14);
    // A cut problem's optimum is negative in this encoding, so no shift.
    assert_eq!(summary["energy_offset"].as_f64().unwrap(), 0.0);
}
