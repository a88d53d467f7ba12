use std::path::Path;
use std::process::{Command, Output};

use ffs_bench::files::{parse_trace_csv, ResultFile};
use ffs_core::Instance;

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffs-bench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("an error line");
    serde_json::from_str(line).expect("error line is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = bench(&["generate", "--jobs", "12", "--stages", "3", "--seed", "5", "--out", path(p)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let inst = Instance::from_json_str(&text).unwrap();
    assert_eq!((inst.num_jobs(), inst.num_stages()), (12, 3));
    assert_eq!(inst.to_json_string(), text);
}

#[test]
fn zero_jobs_is_an_invalid_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = bench(&["generate", "--jobs", "0", "--out", path(&dir.path().join("x.json"))]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "invalid-instance");
}

#[test]
fn malformed_instance_file_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, r#"{"num_jobs":1,"num_stages":2,"machines_per_stage":[2,2],"proc_time":[[[1,1],[1,1]]],"release":[0],"weight":1}"#).unwrap();
    let out = bench(&["solve", "--instance", path(&p), "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "parse");
    assert!(err["message"].as_str().unwrap().contains("due"), "{err}");
}

#[test]
fn usage_errors_exit_with_two() {
    let out = bench(&["solve", "--population", "many"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "usage");
    let dir = tempfile::tempdir().unwrap();
    let out = bench(&["compare", "--runs", "1", "--out", path(&dir.path().join("c.csv"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(bench(&["--help"]).status.success());
}

#[test]
fn odd_dual_population_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = bench(&["solve", "--jobs", "5", "--population", "66", "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "config");
}

#[test]
fn solve_files_are_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let out = bench(&[
        "solve", "--jobs", "15", "--population", "64", "--generations", "120", "--gap", "30",
        "--out", path(dir.path()),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let result = ResultFile::read(&dir.path().join("result.json")).unwrap();
    let trace = parse_trace_csv(&std::fs::read_to_string(dir.path().join("trace.csv")).unwrap()).unwrap();

    assert_eq!(trace.len(), 120);
    assert!(trace.iter().enumerate().all(|(i, r)| r.generation == i as u64 + 1));
    assert_eq!(trace.last().unwrap().best_objective, result.best_objective);
    assert_eq!(result.policy_checks, 3);
    assert_eq!(result.timings, None);
    for w in trace.windows(2) {
        assert!(w[1].best_objective <= w[0].best_objective);
    }
    let flagged: Vec<u64> = trace.iter().filter(|r| r.migrated).map(|r| r.generation).collect();
    let logged: Vec<u64> = result.migrations.iter().map(|m| m.generation).collect();
    assert_eq!(flagged, logged);
    for m in &result.migrations {
        assert!(m.generation % 30 == 0 && m.migrants > 0);
    }
    assert_eq!(result.best_fitness, (result.emax - result.best_objective).max(0.0));
    assert_eq!(result.best_chromosome.len(), 15 * 4);
}

#[test]
fn single_island_traces_leave_the_other_column_empty() {
    let dir = tempfile::tempdir().unwrap();
    let out = bench(&[
        "solve", "--jobs", "8", "--population", "32", "--generations", "10", "--mode", "pseudo-only",
        "--out", path(dir.path()),
    ]);
    assert!(out.status.success());
    let trace = parse_trace_csv(&std::fs::read_to_string(dir.path().join("trace.csv")).unwrap()).unwrap();
    assert!(trace.iter().all(|r| r.island_a.is_none() && r.island_b.is_some() && !r.migrated));
}

#[test]
fn timings_flag_adds_timings() {
    let dir = tempfile::tempdir().unwrap();
    let out = bench(&[
        "solve", "--jobs", "8", "--population", "32", "--generations", "10", "--timings",
        "--out", path(dir.path()),
    ]);
    assert!(out.status.success());
    let result = ResultFile::read(&dir.path().join("result.json")).unwrap();
    assert!(result.timings.unwrap().total > 0.0);
}

#[test]
fn experiment_commands_write_their_tables() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = dir.path().join("sweep.csv");
    let out = bench(&[
        "sweep-gap", "--jobs", "8", "--population", "32", "--generations", "40", "--runs", "2",
        "--gaps", "10,20", "--out", path(&sweep),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&sweep).unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout), text);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "gap,mean_objective,std_objective,runs");
    assert!(lines[1].starts_with("10,") && lines[2].starts_with("20,") && lines.len() == 3);

    let cmp = dir.path().join("compare.csv");
    let out = bench(&[
        "compare", "--jobs", "8", "--population", "32", "--generations", "40", "--runs", "2",
        "--seed-policy", "varied-instance", "--out", path(&cmp),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&cmp).unwrap();
    let labels: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(labels, ["Heterogeneous", "Cellular", "Pseudo"]);

    let time = dir.path().join("time.csv");
    let out = bench(&[
        "bench-time", "--jobs", "8", "--populations", "32,64", "--generations", "20", "--out", path(&time),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&time).unwrap();
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 6);
        assert_eq!(cols[4], cols[5]);
    }
}
