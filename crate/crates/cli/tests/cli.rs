use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn dscim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dscim"))
        .args(args)
        .output()
        .expect("run dscim")
}

fn dscim_ok(args: &[&str]) -> Output {
    let out = dscim(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read_i64_matrix(path: &Path) -> Vec<Vec<i64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split(',').map(|v| v.trim().parse().unwrap()).collect())
        .collect()
}

/// Data records of a CSV output, skipping the config line and header.
fn records(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let first = lines.next().unwrap();
    assert!(first.starts_with("# config={"), "{first}");
    lines
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn zero_activations_exact_mode_give_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    dscim_ok(&[
        "simulate",
        "--config",
        p(&fixture("exact_g1.json")),
        "--activations",
        p(&fixture("zeros_1x128.csv")),
        "--weights",
        p(&fixture("weights_128x4.csv")),
        "--out",
        p(&out),
    ]);
    let rows = records(&out);
    assert_eq!(rows.len(), 4);
    for r in rows {
        assert_eq!(r[2], "0", "psum_est");
        assert_eq!(r[3], "0", "psum_exact");
    }
}

#[test]
fn simulate_is_deterministic_and_exact_column_matches_dot_product() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_dscim"))
            .env("DSCIM_THREADS", threads)
            .args([
                "simulate",
                "--activations",
                p(&fixture("activations_2x128.csv")),
                "--weights",
                p(&fixture("weights_128x4.csv")),
                "--out",
                p(&out),
            ])
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "3");
    assert_eq!(a, b);

    let acts = read_i64_matrix(&fixture("activations_2x128.csv"));
    let weights = read_i64_matrix(&fixture("weights_128x4.csv"));
    let rows = records(&dir.path().join("a.csv"));
    assert_eq!(rows.len(), 8);
    for r in rows {
        let (v, c): (usize, usize) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        let dot: i64 = (0..128).map(|i| acts[v][i] * weights[i][c]).sum();
        assert_eq!(r[3].parse::<i64>().unwrap(), dot);
        assert_eq!(r[6], "256", "direct accumulator fires every cycle");
    }
}

#[test]
fn simulate_batches_beyond_cmr_and_macro_width() {
    let dir = tempfile::tempdir().unwrap();
    let acts = dir.path().join("a.csv");
    let weights = dir.path().join("w.csv");
    let line = |n: usize, f: &dyn Fn(usize) -> i64| {
        (0..n)
            .map(|i| f(i).to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    let a: Vec<String> = (0..70)
        .map(|v| line(128, &|i| ((v * 31 + i * 7) % 256) as i64 - 128))
        .collect();
    let w: Vec<String> = (0..128)
        .map(|r| line(40, &|c| ((r * 13 + c * 5) % 256) as i64 - 128))
        .collect();
    std::fs::write(&acts, a.join("\n")).unwrap();
    std::fs::write(&weights, w.join("\n")).unwrap();
    let out = dir.path().join("r.json");
    dscim_ok(&[
        "simulate",
        "--mode",
        "dscim2",
        "--format",
        "json",
        "--activations",
        p(&acts),
        "--weights",
        p(&weights),
        "--out",
        p(&out),
    ]);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["config"]["group_size"], 64);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 70 * 40);
    assert_eq!(rows[0]["accumulator_activations"], 64);
    assert_eq!(rows.last().unwrap()["vector"], 69);
    assert_eq!(rows.last().unwrap()["column"], 39);
}

#[test]
fn sweeps_have_one_row_per_point_and_repeat_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let len = dir.path().join("len.csv");
    let sp = dir.path().join("sp.csv");
    let sp2 = dir.path().join("sp2.csv");
    dscim_ok(&[
        "sweep",
        "--kind",
        "length",
        "--trials",
        "50",
        "--out",
        p(&len),
    ]);
    let rows = records(&len);
    assert_eq!(rows.len(), 3);
    assert_eq!(
        rows.iter().map(|r| r[1].as_str()).collect::<Vec<_>>(),
        ["64.0", "128.0", "256.0"]
    );
    for out in [&sp, &sp2] {
        dscim_ok(&[
            "sweep",
            "--kind",
            "sparsity",
            "--trials",
            "30",
            "--seed",
            "9",
            "--out",
            p(out),
        ]);
    }
    assert_eq!(records(&sp).len(), 6);
    assert_eq!(std::fs::read(&sp).unwrap(), std::fs::read(&sp2).unwrap());
    dscim_ok(&[
        "sweep",
        "--kind",
        "sparsity",
        "--baseline",
        "--trials",
        "30",
        "--out",
        p(&sp2),
    ]);
    assert_eq!(records(&sp2).len(), 12);
}

#[test]
fn seedsearch_budget_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    dscim_ok(&[
        "seedsearch",
        "--budget",
        "1",
        "--trials",
        "4",
        "--out",
        p(&out),
    ]);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["result"]["evaluated"], 1);
    assert_eq!(v["space_size"], 8192);
    let best = &v["result"]["best_config"];
    assert_eq!(best["prng_a"]["taps_hex"], "1d");
    assert_eq!(best["prng_a"]["seed_hex"], "01");
    assert_eq!(best["prng_w"]["seed_hex"], "01");
    assert!(v["config"].is_object());
}

#[test]
fn saturation_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sat.csv");
    dscim_ok(&[
        "saturation",
        "--n",
        "1,4",
        "--p",
        "0.25,0.5",
        "--trials",
        "50",
        "--out",
        p(&out),
    ]);
    let rows = records(&out);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][2], "0.0");
    assert_eq!(rows[1][2], "0.0");
    assert_eq!(rows[3][2], "0.53125");
    assert!(rows.iter().all(|r| r[5] == "true"));
}

#[test]
fn perf_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.json");
    dscim_ok(&[
        "perf",
        "--workload",
        p(&fixture("workload.json")),
        "--out",
        p(&out),
    ]);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["report"]["cycles"], 64 * 256);
    assert_eq!(v["report"]["baseline_cycles"], 4096 * 256);
    assert_eq!(v["report"]["relative_compute_density"], 32.0);
    assert_eq!(v["config"]["cmr"], 64);
}

#[test]
fn errmodel_writes_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.csv");
    dscim_ok(&["errmodel", "--trials", "40", "--out", p(&out)]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 41);
    let side: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("e.csv.json")).unwrap()).unwrap();
    assert_eq!(side["trials"], 40);
    assert_eq!(side["config"]["group_size"], 16);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let bad_value = dir.path().join("bad.csv");
    std::fs::write(&bad_value, format!("{}200\n", "1,".repeat(127))).unwrap();
    let r = dscim(&[
        "simulate",
        "--activations",
        p(&bad_value),
        "--weights",
        p(&fixture("weights_128x4.csv")),
        "--out",
        p(&out),
    ]);
    assert_eq!(r.status.code(), Some(2));
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains(":1:128:") && err.contains("200"), "{err}");

    let short = dir.path().join("short.csv");
    std::fs::write(&short, "1,2\n").unwrap();
    let r = dscim(&[
        "simulate",
        "--activations",
        p(&fixture("activations_2x128.csv")),
        "--weights",
        p(&short),
        "--out",
        p(&out),
    ]);
    assert_eq!(r.status.code(), Some(2));

    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"mode":"custom","overrides":{"group_size":8}}"#).unwrap();
    let r = dscim(&[
        "sweep",
        "--kind",
        "length",
        "--config",
        p(&cfg),
        "--out",
        p(&out),
    ]);
    assert_eq!(r.status.code(), Some(3));

    let r = dscim(&[
        "sweep",
        "--kind",
        "length",
        "--trials",
        "0",
        "--out",
        p(&out),
    ]);
    assert_eq!(r.status.code(), Some(3));
}
