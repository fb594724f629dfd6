use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_schedtune"));
    c.env_remove("CFS_AUTOTUNE_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn body(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

const SMALL: &[&str] = &["--groups", "1", "--fanout", "3", "--msgs", "2"];

#[test]
fn simulate_prints_turnaround() {
    let out = run(&[
        "simulate",
        "--latency",
        "20000000",
        "--min-gran",
        "100000",
        "--wakeup-gran",
        "0",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("turnaround_jiffies = "));
    assert!(text.contains("messages_delivered = 2000"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["simulate", "--latency", "1.5"][..],
        &["simulate", "--latency", "50"],
        &["simulate", "--nonsense", "1"],
        &["frobnicate"],
        &["golden", "--algo", "3"],
        &["validate", "--msgs-list", "10,10"],
        &["simulate", "--config", "/nonexistent/config"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn timeout_is_reported_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let out = run(&[
        "simulate",
        "--max-jiffies",
        "5",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("completed = false"));
    let row = &body(&path)[1];
    assert!(row.starts_with("5,5000000,"), "{row}");
    assert!(row.ends_with(",false"));
}

#[test]
fn pso_csv_schema_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let mut args = vec![
            "pso",
            "--w",
            "0.4365",
            "--phi-p",
            "3.020",
            "--phi-g",
            "3.020",
            "--seed",
            "7",
            "--particles",
            "4",
            "--iters",
            "3",
            "--output",
            p.to_str().unwrap(),
        ];
        args.extend_from_slice(SMALL);
        assert_eq!(run(&args).status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let text = std::fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("# schedtune "));
    assert!(text.contains("# master_seed = 7\n"));
    let rows = body(&a);
    assert_eq!(
        rows[0],
        "iter,particle,x1_ns,x2_ns,x3_ns,response_jiffies,global_best"
    );
    assert_eq!(rows.len(), 1 + 4 * 4);
}

#[test]
fn golden_rows_add_one_evaluation_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let mut args = vec![
        "golden",
        "--algo",
        "1",
        "--a0",
        "2e7",
        "--b0",
        "2.01e11",
        "--output",
        path.to_str().unwrap(),
    ];
    args.extend_from_slice(SMALL);
    assert_eq!(run(&args).status.code(), Some(0));
    let rows = body(&path);
    assert_eq!(
        rows[0],
        "eval,P_ns,latency_ns,min_gran_ns,wakeup_ns,response_jiffies,a_ns,b_ns"
    );
    let brackets: Vec<(f64, f64)> = rows[1..]
        .iter()
        .map(|r| {
            let f: Vec<&str> = r.split(',').collect();
            (f[6].parse().unwrap(), f[7].parse().unwrap())
        })
        .collect();
    // The first two rows share the initial bracket; every later row has a
    // strictly narrower one.
    assert_eq!(brackets[0], brackets[1]);
    for w in brackets[1..].windows(2) {
        assert!(w[1].1 - w[1].0 < w[0].1 - w[0].0);
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.conf");
    std::fs::write(&cfg, "# experiment\nseed = 11\nworkload.groups = 2\nworkload.fanout = 2\npso.iters = 2\npso.particles = 3\n").unwrap();
    let path = dir.path().join("o.csv");
    let out = run(&[
        "pso",
        "--config",
        cfg.to_str().unwrap(),
        "--groups",
        "1",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("# master_seed = 11\n"));
    assert!(text.contains("# workload.groups = 1\n"));
    assert!(text.contains("# workload.fanout = 2\n"));
    assert_eq!(body(&path).len(), 1 + 3 * 3);

    std::fs::write(&cfg, "golden.algo = 1\n").unwrap();
    assert_eq!(
        run(&["pso", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    std::fs::write(&cfg, "workload.groups 5\n").unwrap();
    assert_eq!(
        run(&["pso", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn env_seed_is_a_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("o.csv");
    let p = path.to_str().unwrap();
    let mut args = vec!["pso", "--particles", "2", "--iters", "1", "--output", p];
    args.extend_from_slice(SMALL);
    let out = bin()
        .args(&args)
        .env("CFS_AUTOTUNE_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(&path)
        .unwrap()
        .contains("# master_seed = 42\n"));
    args.extend_from_slice(&["--seed", "3"]);
    bin()
        .args(&args)
        .env("CFS_AUTOTUNE_SEED", "42")
        .output()
        .unwrap();
    assert!(std::fs::read_to_string(&path)
        .unwrap()
        .contains("# master_seed = 3\n"));
}

#[test]
fn rsm_from_responses_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    let mut text = String::from("# synthetic\nrun,w,phi_p,phi_g,r_star,i_star,rsum\n");
    let levels = [
        (-1, -1, 0),
        (1, -1, 0),
        (-1, 1, 0),
        (1, 1, 0),
        (-1, 0, -1),
        (1, 0, -1),
        (-1, 0, 1),
        (1, 0, 1),
        (0, -1, -1),
        (0, 1, -1),
        (0, -1, 1),
        (0, 1, 1),
        (0, 0, 0),
        (0, 0, 0),
    ];
    for (i, (a, _b, c)) in levels.iter().enumerate() {
        let (a, c) = (f64::from(*a), f64::from(*c));
        let y = 100.0
            + 3.0 * a
            + 4.0 * (c - 0.4) * (c - 0.4)
            + [0.1, -0.2, 0.05, 0.0, 0.15, -0.1, 0.2][i % 7];
        text.push_str(&format!("{},0,0,0,,,{y}\n", i + 1));
    }
    std::fs::write(&input, text).unwrap();
    let out_path = dir.path().join("out.csv");
    let coef = dir.path().join("coef.csv");
    let out = run(&[
        "rsm",
        "--responses",
        input.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
        "--coef-output",
        coef.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = body(&out_path);
    assert_eq!(rows[0], "run,w,phi_p,phi_g,r_star,i_star,rsum");
    assert_eq!(rows.len(), 15);
    assert!(rows[1].starts_with("1,0,0,2,,,"));
    assert!(body(&coef)[0].starts_with("model,term,estimate"));
    let summary = String::from_utf8(out.stdout).unwrap();
    assert!(summary.contains("recommended w = "));
}

#[test]
fn plot_data_written() {
    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("plot.csv");
    let out = run(&[
        "validate",
        "--msgs-list",
        "1,2,3",
        "--groups",
        "1",
        "--fanout",
        "2",
        "--emit-plot-data",
        plot.to_str().unwrap(),
        "--output",
        dir.path().join("v.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = body(&plot);
    assert_eq!(rows[0], "series,x,y");
    assert_eq!(rows.len(), 4);
}
