use std::process::Command;

use snrpa_bench::{
    aggregate, bench, emit_csv, geometric_schedule, load_csv, read_csv, run_once, write_csv,
    BenchConfig, BenchError, Column, LoadedProblem, ProblemKind, ProblemSpec, SolutionFile,
    Table, Variant,
};
use snrpa_core::domains::maximum::Maximum;
use snrpa_core::{replay_score, solve, Algorithm, Problem, SearchConfig};

fn tiny_config(variants: Vec<Variant>, checkpoints: Vec<f64>) -> BenchConfig {
    BenchConfig {
        variants,
        runs: 3,
        checkpoints,
        level: 2,
        iterations: 10,
        alpha: 1.0,
        seed_base: 7,
        jobs: 1,
    }
}

#[test]
fn aggregate_single_trace_gives_its_final_score() {
    let p = Maximum::new(9).unwrap();
    let out = solve(&p, Algorithm::Nrpa, SearchConfig {
        level: 2,
        iterations: 10,
        ..SearchConfig::default()
    })
    .unwrap();
    let last = out.trace.events.last().unwrap().elapsed;
    let means = aggregate(std::slice::from_ref(&out.trace), &[last + 1.0], 0.0).unwrap();
    assert_eq!(means, vec![out.best.score]);
}

#[test]
fn aggregate_averages_constant_traces() {
    // Level 0 on a one-atom budget: one event with score 1 at time ~0.
    let p = Maximum::new(1).unwrap();
    let run = |seed| {
        solve(&p, Algorithm::Nrpa, SearchConfig {
            level: 0,
            seed,
            ..SearchConfig::default()
        })
        .unwrap()
        .trace
    };
    let a = run(1);
    let mut b = run(2);
    for e in &mut b.events {
        e.score = 5.0;
    }
    let start = a.events[0].elapsed.max(b.events[0].elapsed);
    let checkpoints = geometric_schedule(start.max(1e-6), 2.0, 1.0);
    let means = aggregate(&[a, b], &checkpoints, 0.0).unwrap();
    assert!(means.iter().all(|&m| m == 3.0));
}

#[test]
fn aggregate_uses_sentinel_before_first_event() {
    let p = Maximum::new(3).unwrap();
    let trace = solve(&p, Algorithm::Nrpa, SearchConfig {
        level: 1,
        iterations: 3,
        ..SearchConfig::default()
    })
    .unwrap()
    .trace;
    let first = trace.events[0].elapsed;
    let before = if first > 0.0 { -1.0 } else { -f64::MIN_POSITIVE };
    assert_eq!(aggregate(&[trace], &[before], -42.0).unwrap(), vec![-42.0]);
}

#[test]
fn aggregate_rejects_empty_input() {
    assert!(matches!(aggregate(&[], &[1.0], 0.0), Err(BenchError::EmptyTraces)));
}

#[test]
fn aggregated_means_are_monotone() {
    let p = Maximum::new(15).unwrap();
    let cfg = tiny_config(
        vec![Variant::NRPA, Variant::snrpa(2)],
        geometric_schedule(0.001, 2.0, 0.064),
    );
    let report = bench(&p, &cfg).unwrap();
    for col in &report.table.columns {
        assert!(col.values.windows(2).all(|w| w[0] <= w[1]), "{col:?}");
    }
}

#[test]
fn full_schedule_gives_fifteen_rows() {
    let checkpoints = geometric_schedule(0.01, 2.0, 163.84);
    let table = Table {
        checkpoints: checkpoints.clone(),
        columns: vec![
            Column { name: "nrpa".into(), values: vec![1.5; 15] },
            Column { name: "snrpa4".into(), values: vec![-3336604131000000.0; 15] },
        ],
    };
    let mut buf = Vec::new();
    write_csv(&table, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 16);
    assert_eq!(text.lines().next().unwrap(), "time,nrpa,snrpa4");
    assert!(text.contains("163.84,1.5,-3336604131000000\n"));
    assert_eq!(read_csv(text.as_bytes()).unwrap(), table);
}

#[test]
fn empty_variant_list_writes_header_only() {
    let table = Table {
        checkpoints: geometric_schedule(0.01, 2.0, 0.32),
        columns: vec![],
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    emit_csv(&table, &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "time\n");
}

#[test]
fn emitted_file_round_trips() {
    let p = Maximum::new(11).unwrap();
    let cfg = tiny_config(
        vec![Variant::snrpa(3), Variant::NRPA],
        geometric_schedule(0.001, 2.0, 0.016),
    );
    let report = bench(&p, &cfg).unwrap();
    let names: Vec<&str> = report.table.columns.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["nrpa", "snrpa3"]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    emit_csv(&report.table, &path).unwrap();
    assert_eq!(load_csv(&path).unwrap(), report.table);
}

#[test]
fn unwritable_path_is_an_error() {
    let table = Table::default();
    let err = emit_csv(&table, std::path::Path::new("/nonexistent/dir/r.csv")).unwrap_err();
    assert!(matches!(err, BenchError::Io { .. }));
}

#[test]
fn zero_deadline_keeps_only_the_first_playout() {
    let p = Maximum::new(20).unwrap();
    let cfg = tiny_config(vec![Variant::NRPA], vec![0.0]);
    let out = run_once(&p, Variant::NRPA, &cfg, 3).unwrap();
    assert_eq!(out.stats.playouts, 1);
    assert_eq!(out.trace.events.len(), 1);
}

#[test]
fn run_once_is_deterministic() {
    let p = Maximum::new(13).unwrap();
    let mut cfg = tiny_config(vec![], vec![60.0]);
    cfg.level = 3;
    cfg.iterations = 5;
    for v in [Variant::NRPA, Variant::snrpa(3)] {
        let a = run_once(&p, v, &cfg, 11).unwrap();
        let b = run_once(&p, v, &cfg, 11).unwrap();
        assert_eq!(a.best, b.best);
        assert_eq!(a.stats, b.stats);
        assert_eq!(a.trace.improvements(), b.trace.improvements());
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let p = Maximum::new(13).unwrap();
    let mut cfg = tiny_config(vec![Variant::NRPA, Variant::snrpa(2)], vec![60.0]);
    cfg.iterations = 6;
    let serial = snrpa_bench::run_variant(&p, Variant::snrpa(2), &cfg).unwrap();
    cfg.jobs = 3;
    let parallel = snrpa_bench::run_variant(&p, Variant::snrpa(2), &cfg).unwrap();
    for (a, b) in serial.iter().zip(&parallel) {
        assert_eq!(a.best, b.best);
        assert_eq!(a.stats, b.stats);
    }
}

#[test]
fn seed_subsets_reproduce() {
    let p = Maximum::new(13).unwrap();
    let mut cfg = tiny_config(vec![Variant::NRPA], vec![60.0]);
    cfg.runs = 4;
    let all = snrpa_bench::run_variant(&p, Variant::NRPA, &cfg).unwrap();
    cfg.seed_base += 2;
    cfg.runs = 1;
    let third = snrpa_bench::run_variant(&p, Variant::NRPA, &cfg).unwrap();
    assert_eq!(all[2].best, third[0].best);
}

#[test]
fn stabilized_search_spends_p_playouts_per_adapt() {
    let p = Maximum::new(40).unwrap();
    let cfg = tiny_config(vec![], vec![0.5]);
    let mut cfg = BenchConfig { level: 4, iterations: 100, ..cfg };
    cfg.seed_base = 0;
    let nrpa = run_once(&p, Variant::NRPA, &cfg, 0).unwrap().stats;
    let snrpa = run_once(&p, Variant::snrpa(4), &cfg, 0).unwrap().stats;
    let per = |s: snrpa_core::SearchStats| s.playouts as f64 / s.adapts as f64;
    let ratio = per(snrpa) / per(nrpa);
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn solution_files_verify_and_detect_tampering() {
    let spec = ProblemSpec::maximum(10);
    let (loaded, id) = LoadedProblem::load(&spec).unwrap();
    let LoadedProblem::Maximum(p) = &loaded else { unreachable!() };
    let out = solve(p, Algorithm::Snrpa, SearchConfig {
        level: 2,
        iterations: 20,
        eval_playouts: 2,
        ..SearchConfig::default()
    })
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("best.json");
    SolutionFile::new(ProblemKind::Maximum, &id, "snrpa2", 0, &out.best)
        .save(&path)
        .unwrap();
    let loaded_file = SolutionFile::load(&path).unwrap();
    assert_eq!(loaded_file.verify(ProblemKind::Maximum, &loaded, &id).unwrap(), out.best.score);
    assert_eq!(replay_score(p, &loaded_file.moves).unwrap(), out.best.score);

    let mut bad = loaded_file.clone();
    bad.score += 1.0;
    assert!(bad.verify(ProblemKind::Maximum, &loaded, &id).is_err());
    let (_, other_id) = LoadedProblem::load(&ProblemSpec::maximum(11)).unwrap();
    assert!(loaded_file.verify(ProblemKind::Maximum, &loaded, &other_id).is_err());
    assert!(p.worst_score() <= out.best.score);
}

#[test]
fn cli_solve_bench_verify() {
    let exe = env!("CARGO_BIN_EXE_snrpa");
    let dir = tempfile::tempdir().unwrap();
    let board = dir.path().join("board.txt");
    std::fs::write(&board, "1122\n1212\n2211\n1221\n").unwrap();
    let sol = dir.path().join("sol.json");
    let csv = dir.path().join("r.csv");

    let status = Command::new(exe)
        .args(["solve", "--problem", "samegame", "--level", "2", "--N", "10", "--time-limit", "5"])
        .arg("--instance").arg(&board)
        .arg("--out").arg(&sol)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    assert!(String::from_utf8_lossy(&status.stdout).contains("score: "));

    let verify = Command::new(exe)
        .args(["verify", "--problem", "samegame"])
        .arg("--instance").arg(&board)
        .arg("--solution").arg(&sol)
        .output()
        .unwrap();
    assert!(verify.status.success(), "{}", String::from_utf8_lossy(&verify.stderr));

    let run = Command::new(exe)
        .args(["bench", "--problem", "maximum", "--budget", "9", "--runs", "2", "--level", "2",
               "--N", "5", "--time-limit", "0.04", "--P", "4,2"])
        .arg("--out").arg(&csv)
        .output()
        .unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let table = load_csv(&csv).unwrap();
    assert_eq!(table.checkpoints.len(), 3);
    let names: Vec<&str> = table.columns.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["nrpa", "snrpa2", "snrpa4"]);

    let missing = Command::new(exe)
        .args(["solve", "--problem", "tsptw", "--instance", "/nonexistent.txt"])
        .output()
        .unwrap();
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/nonexistent.txt"));

    let bad = Command::new(exe)
        .args(["bench", "--problem", "maximum", "--budget", "5", "--runs", "0"])
        .output()
        .unwrap();
    assert!(!bad.status.success());
}

#[test]
fn loading_reports_missing_arguments() {
    let spec = ProblemSpec {
        kind: ProblemKind::Maximum,
        instance: None,
        budget: None,
        tabu: false,
        allow_pairs: false,
    };
    assert!(matches!(LoadedProblem::load(&spec), Err(BenchError::Config(_))));
    let spec = ProblemSpec::from_file(ProblemKind::Samegame, "/nonexistent/board.txt");
    assert!(matches!(LoadedProblem::load(&spec), Err(BenchError::Io { .. })));
}
