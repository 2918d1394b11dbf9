use std::path::Path;
use std::process::{Command, Output};

use cellsim::cli::output::{JsonComparison, JsonReport};
use cellsim::{build_topology, TopologyConfig};

fn cellsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cellsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_lb_prints_handover_block() {
    let out = cellsim(&["run", "lb", "--calls", "900"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    for line in [
        "system have 7 cell per BSC",
        "channel free BSC1 = 313",
        "BSC1 overloaded",
        "Number of Handover calls = 587",
        "channel free BSC2 = 346",
        "channel free BSC3 = 382",
        "BSC2 Handeled = 294",
        "BSC3 Handeled = 293",
    ] {
        assert!(text.lines().any(|l| l == line), "missing {line:?}:\n{text}");
    }
}

#[test]
fn run_normal_empty_writes_zero_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("ns.json");
    let out = cellsim(&[
        "run",
        "normal",
        "--calls",
        "0",
        "--output",
        path_str(&report),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc: JsonReport = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc.counts.accepted_home, 0);
    assert_eq!(doc.counts.handed_over, 0);
    assert_eq!(doc.counts.blocked, 0);
    assert_eq!(doc.empirical_blocking, 0.0);
    assert!(doc.records.is_none());
}

#[test]
fn single_bsc_is_a_config_error() {
    let out = cellsim(&["run", "lb", "--bsc-channels", "313"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bsc_channels"), "{}", stderr(&out));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "cells_per_bsc = 7\nbsc_channels = [313]\n").unwrap();
    let out = cellsim(&["run", "lb", "--config", path_str(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(
        err.contains("bsc_channels") && err.contains("line 2"),
        "{err}"
    );
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("typo.conf");
    std::fs::write(&cfg, "n_cals = 5\n").unwrap();
    assert_eq!(
        cellsim(&["run", "normal", "--config", path_str(&cfg)])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cellsim(&["run", "normal", "--config", "/nonexistent/x.conf"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cellsim(&["run", "normal", "--waiting-ms", "-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(cellsim(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(
        &cfg,
        "bsc_channels = [10, 5, 5]\ncells_per_bsc = 3\narea_km = 1.0\nn_calls = 12\nformat = \"json\"\n",
    )
    .unwrap();
    let report = dir.path().join("r.json");
    let out = cellsim(&[
        "run",
        "lb",
        "--config",
        path_str(&cfg),
        "--calls",
        "30",
        "--output",
        path_str(&report),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("system have 3 cell per BSC"));
    let doc: JsonReport = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc.params.n_calls, 30);
    assert_eq!(doc.params.bsc_channels, vec![10, 5, 5]);
    assert_eq!(doc.counts.handed_over, 10);
    assert_eq!(doc.counts.blocked, 10);
}

#[test]
fn compare_reference_deltas() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cmp.json");
    let out = cellsim(&[
        "compare",
        "--calls",
        "900",
        "--output",
        path_str(&path),
        "--full",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let cmp: JsonComparison =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(cmp.deltas.blocking_reduction_pp > 0.0);
    assert!(cmp.deltas.execution_time_reduction_ms > 0.0);
    assert!(cmp.load_balanced.empirical_blocking < cmp.normal.empirical_blocking);

    let topo = build_topology(&TopologyConfig::default()).unwrap();
    for doc in [&cmp.normal, &cmp.load_balanced] {
        doc.to_simulation_report()
            .unwrap()
            .check_invariants(&topo)
            .unwrap();
    }
}

#[test]
fn compare_below_capacity_has_zero_deltas() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cmp.json");
    let out = cellsim(&["compare", "--calls", "313", "--output", path_str(&path)]);
    assert_eq!(out.status.code(), Some(0));
    let cmp: JsonComparison =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(cmp.deltas.blocking_reduction_pp, 0.0);
    assert_eq!(cmp.deltas.execution_time_reduction_ms, 0.0);
    assert!(cmp.deltas.handovers_per_bsc.values().all(|&h| h == 0));
}

#[test]
fn compare_zero_capacity_neighbors() {
    let out = cellsim(&["compare", "--bsc-channels", "313,0,0", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\nblocked,587,587,0\n"), "{text}");
    assert!(text.contains("\nhanded_over,0,0,0\n"), "{text}");
    assert!(text.contains("Blocking reduction = 0.0000 percentage points"));
}

#[test]
fn sweep_reference_range() {
    let out = cellsim(&["sweep", "0:1200:100"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n_calls,ns_blocking,lb_blocking"));
    let rows: Vec<(u32, f64, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f[1].split('.').nth(1).unwrap().len(), 6);
            (
                f[0].parse().unwrap(),
                f[1].parse().unwrap(),
                f[2].parse().unwrap(),
            )
        })
        .collect();
    assert_eq!(rows.len(), 13);
    assert!(rows.iter().all(|&(_, ns, lb)| lb <= ns));
    assert_eq!(rows[12], (1200, 0.739167, 0.1325));
}

#[test]
fn sweep_edge_ranges() {
    let out = cellsim(&["sweep", "0:0:1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "n_calls,ns_blocking,lb_blocking\n0,0.000000,0.000000\n"
    );
    let out = cellsim(&["sweep", "100:50:10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("descending"));
    assert_eq!(cellsim(&["sweep", "1:2"]).status.code(), Some(2));
}

#[test]
fn erlang_calculator() {
    let run = |args: &[&str]| {
        let out = cellsim(args);
        (out.status.code(), stdout(&out).trim().to_string())
    };
    assert_eq!(
        run(&["erlang", "--a", "2", "--n", "2"]),
        (Some(0), "0.400000".into())
    );
    assert_eq!(
        run(&["erlang", "--a", "0", "--n", "5"]),
        (Some(0), "0.000000".into())
    );
    assert_eq!(
        run(&["erlang", "--lambda", "4", "--mu", "2", "--n", "2"]),
        (Some(0), "0.400000".into())
    );
    assert_eq!(run(&["erlang", "--a", "-1", "--n", "2"]).0, Some(2));
    assert_eq!(
        run(&["erlang", "--lambda", "-4", "--mu", "2", "--n", "2"]).0,
        Some(2)
    );
    assert_eq!(run(&["erlang", "--a", "1", "--n", "-3"]).0, Some(2));
    assert_eq!(run(&["erlang", "--n", "3"]).0, Some(2));
}

#[test]
fn gen_then_replay_matches_generated_run() {
    let dir = tempfile::tempdir().unwrap();
    let wl = dir.path().join("calls.csv");
    let out = cellsim(&[
        "gen",
        "--calls",
        "900",
        "--seed",
        "7",
        "--output",
        path_str(&wl),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(&wl).unwrap();
    assert!(text.starts_with("id,arrival_ms,x_km,y_km,demand_ms\n"));
    assert_eq!(text.lines().count(), 901);

    let generated = dir.path().join("a.json");
    let replayed = dir.path().join("b.json");
    let a = cellsim(&[
        "run",
        "lb",
        "--calls",
        "900",
        "--seed",
        "7",
        "--full",
        "--output",
        path_str(&generated),
    ]);
    let b = cellsim(&[
        "run",
        "lb",
        "--workload",
        path_str(&wl),
        "--full",
        "--output",
        path_str(&replayed),
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0), "{}", stderr(&b));
    assert_eq!(stdout(&a), stdout(&b));
    let ra: JsonReport =
        serde_json::from_str(&std::fs::read_to_string(&generated).unwrap()).unwrap();
    let rb: JsonReport =
        serde_json::from_str(&std::fs::read_to_string(&replayed).unwrap()).unwrap();
    assert_eq!(ra.to_simulation_report(), rb.to_simulation_report());
    assert_eq!(rb.params.seed, None);
}

#[test]
fn csv_run_report() {
    let out = cellsim(&["run", "normal", "--calls", "400", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let header = text
        .lines()
        .position(|l| l == "call_id,disposition,serving_bsc,execution_time_ms,slices_used")
        .expect("csv header");
    let rows: Vec<&str> = text.lines().skip(header + 1).collect();
    assert_eq!(rows.len(), 400);
    assert_eq!(rows.iter().filter(|r| r.contains(",blocked,")).count(), 87);
}

#[test]
fn bad_workload_file_is_user_error() {
    let dir = tempfile::tempdir().unwrap();
    let wl = dir.path().join("bad.csv");
    std::fs::write(&wl, "id,arrival_ms,x_km,y_km,demand_ms\n0,5,0,0,-1\n").unwrap();
    let out = cellsim(&["run", "lb", "--workload", path_str(&wl)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_is_internal_error() {
    let out = cellsim(&["run", "normal", "--output", "/nonexistent-dir/x.json"]);
    assert_eq!(out.status.code(), Some(1));
}
