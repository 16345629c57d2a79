//! End-to-end runs of the `jamlab` binary.

use std::path::Path;
use std::process::{Command, Output};

use jamlab::meanfield::jamming_fraction;
use jamlab::special::alpha_d;
use jamlab::Params;

fn jamlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jamlab"))
        .args(args)
        .env_remove("JAMLAB_SEED")
        .output()
        .unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = jamlab(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Header plus rows of a CSV document.
fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    (
        header,
        lines.map(|l| l.split(',').map(str::to_owned).collect()).collect(),
    )
}

/// Value of `key` in a one-row CSV record.
fn field(text: &str, key: &str) -> f64 {
    let (header, rows) = csv(text);
    let i = header.iter().position(|h| h == key).unwrap();
    rows[0][i].parse().unwrap()
}

#[test]
fn alpha_table_rows() {
    let (header, rows) = csv(&stdout(&["alpha", "--dmax", "1"]));
    assert_eq!(header, ["d", "alpha_d"]);
    assert_eq!(rows, [["1", "0.75"]]);
    let out = jamlab(&["alpha", "--dmax", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let json: serde_json::Value = serde_json::from_str(&stdout(&["alpha", "--dmax", "3", "--format", "json"])).unwrap();
    assert_eq!(json[2]["alpha_d"].as_f64().unwrap(), 0.46875);
}

#[test]
fn jam_values() {
    let text = stdout(&["jam", "--c", "10", "--dim", "2", "--var", "--asymptotic"]);
    let want = jamming_fraction(&Params::mean_field(10.0, alpha_d(2).unwrap()).unwrap(), 1e-10).unwrap();
    assert!((field(&text, "jstar") - want).abs() < 1e-9);
    assert!((field(&text, "vstar") - 0.0178).abs() < 5e-5);
    assert!((field(&text, "jstar_large_c") - 1.0 / (1.0 + 10.0 * alpha_d(2).unwrap())).abs() < 1e-9);
    assert_eq!(field(&text, "tol"), 1e-10);
    assert_eq!(field(&stdout(&["jam", "--c", "0", "--alpha", "0.5"]), "jstar"), 1.0);
    let er = field(&stdout(&["jam", "--c", "5", "--alpha", "0"]), "jstar");
    assert!((er - 6f64.ln() / 5.0).abs() < 1e-9);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["jam", "--c", "5"][..],
        &["jam", "--c", "-1", "--alpha", "0.5"],
        &["jam", "--c", "1", "--alpha", "1.5"],
        &["simulate", "--model", "rgg", "--n", "100", "--c", "5", "--alpha", "0.5"],
        &["simulate", "--model", "crg", "--n", "2", "--c", "10", "--alpha", "0"],
        &[
            "sweep", "--model", "explore", "--n", "100", "--alpha", "0.5", "--steps", "0",
        ],
    ] {
        assert_eq!(jamlab(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn inconsistent_alpha_and_dim_warns() {
    let out = jamlab(&["jam", "--c", "10", "--alpha", "0.5", "--dim", "2"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let out = jamlab(&["jam", "--c", "10", "--alpha", "0.586503", "--dim", "2"]);
    assert!(String::from_utf8_lossy(&out.stderr).is_empty());
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn simulate_writes_summary_and_replications() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("rgg.json");
    let args = [
        "simulate", "--model", "rgg", "--n", "1000", "--c", "10", "--dim", "2", "--reps", "150", "--seed", "1",
    ];
    let mut with_out = args.to_vec();
    with_out.extend(["--format", "json", "--output", json_path.to_str().unwrap()]);
    stdout(&with_out);
    let summary: serde_json::Value = serde_json::from_str(&read(&json_path)).unwrap();
    let mut keys: Vec<&str> = summary.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(keys, ["bins", "counts", "mean", "reps", "scaled_var", "stderr", "var"]);
    assert!((summary["mean"].as_f64().unwrap() - 0.1623).abs() < 0.01);
    let (header, rows) = csv(&read(&dir.path().join("rgg_reps.csv")));
    assert_eq!(header, ["rep_index", "jam_count", "jam_fraction"]);
    assert_eq!(rows.len(), 150);
    assert_eq!(rows[7][0], "7");

    // The CSV summary carries the same numbers.
    let csv_path = dir.path().join("rgg.csv");
    let mut with_csv = args.to_vec();
    with_csv.extend(["--output", csv_path.to_str().unwrap()]);
    stdout(&with_csv);
    let (header, rows) = csv(&read(&csv_path));
    assert_eq!(header, ["section", "index", "value"]);
    for row in rows {
        let v: f64 = row[2].parse().unwrap();
        let i: usize = row[1].parse().unwrap();
        let j = match row[0].as_str() {
            "bins" | "counts" => summary[&row[0]][i].as_f64().unwrap(),
            key => summary[key].as_f64().unwrap(),
        };
        assert_eq!(v, j, "{row:?}");
    }
}

#[test]
fn reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for (k, jobs) in ["1", "4", "1"].iter().enumerate() {
        let path = dir.path().join(format!("run{k}.json"));
        stdout(&[
            "simulate",
            "--model",
            "crg",
            "--n",
            "500",
            "--c",
            "8",
            "--alpha",
            "0.4",
            "--reps",
            "64",
            "--seed",
            "99",
            "--jobs",
            jobs,
            "--format",
            "json",
            "--output",
            path.to_str().unwrap(),
        ]);
        texts.push((read(&path), read(&dir.path().join(format!("run{k}_reps.csv")))));
    }
    assert_eq!(texts[0], texts[1]);
    assert_eq!(texts[0], texts[2]);
}

#[test]
fn seed_from_environment() {
    let args = [
        "simulate", "--model", "explore", "--n", "300", "--c", "5", "--alpha", "0.5", "--reps", "20",
    ];
    let env_run = Command::new(env!("CARGO_BIN_EXE_jamlab"))
        .args(args)
        .env("JAMLAB_SEED", "31")
        .output()
        .unwrap();
    let mut flagged = args.to_vec();
    flagged.extend(["--seed", "31"]);
    assert_eq!(String::from_utf8(env_run.stdout).unwrap(), stdout(&flagged));
    assert_ne!(stdout(&args), stdout(&flagged));
}

#[test]
fn sweep_rows() {
    let text = stdout(&[
        "sweep", "--model", "explore", "--n", "200", "--dim", "2", "--cmin", "0", "--cmax", "30", "--steps", "31",
        "--reps", "10",
    ]);
    let (header, rows) = csv(&text);
    assert_eq!(header, ["c", "jstar", "sim_mean", "sim_stderr"]);
    assert_eq!(rows.len(), 31);
    let js: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(js.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(rows[0][2], "1");
    let single = stdout(&[
        "sweep", "--model", "rgg", "--n", "200", "--dim", "3", "--steps", "1", "--cmin", "4", "--reps", "5",
    ]);
    assert_eq!(csv(&single).1.len(), 1);
    assert!(!text.contains('\r'));
}

#[test]
fn graph_and_trace_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("g");
    stdout(&[
        "graph",
        "--model",
        "rgg",
        "--n",
        "200",
        "--c",
        "6",
        "--dim",
        "2",
        "--seed",
        "3",
        "--output",
        prefix.to_str().unwrap(),
    ]);
    let edges = read(&dir.path().join("g.edges"));
    assert!(edges.lines().all(|l| {
        let (u, v) = l.split_once(' ').unwrap();
        u.parse::<u32>().unwrap() < v.parse::<u32>().unwrap()
    }));
    let (header, rows) = csv(&read(&dir.path().join("g_positions.csv")));
    assert_eq!((header.len(), rows.len()), (2, 200));

    let prefix = dir.path().join("h");
    stdout(&[
        "graph",
        "--model",
        "crg",
        "--n",
        "200",
        "--c",
        "6",
        "--alpha",
        "0.5",
        "--output",
        prefix.to_str().unwrap(),
    ]);
    let (header, rows) = csv(&read(&dir.path().join("h_households.csv")));
    assert_eq!(header, ["vertex", "household"]);
    assert_eq!(rows.len(), 200);

    let (header, rows) = csv(&stdout(&[
        "trace", "--n", "1000", "--c", "10", "--dim", "2", "--seed", "4",
    ]));
    assert_eq!(header, ["t", "x", "y"]);
    assert_eq!(rows[0], ["0", "1000", "1000"]);
    assert_eq!(rows.last().unwrap()[1], "0");
}

/// `--model crg` and `--model explore` at n = 5, c = 3, alpha = 0.5, each
/// against its exact mean jam count: 2.080090 for the graph recipe and
/// 2.095534 for the exploration chain (see the core crate's small-n tests).
#[test]
fn small_clustered_runs_match_exact_means() {
    for (model, exact) in [("crg", 2.080090270311529), ("explore", 2.095534363853309)] {
        let text = stdout(&[
            "simulate", "--model", model, "--n", "5", "--c", "3", "--alpha", "0.5", "--reps", "100000", "--seed", "12",
            "--format", "json",
        ]);
        let s: serde_json::Value = serde_json::from_str(&text).unwrap();
        let (mean, se) = (s["mean"].as_f64().unwrap(), s["stderr"].as_f64().unwrap());
        assert!(
            (mean - exact / 5.0).abs() < 3.0 * se,
            "{model}: {mean} vs {}",
            exact / 5.0
        );
    }
}

#[test]
fn clt_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.json");
    stdout(&[
        "simulate",
        "--model",
        "explore",
        "--n",
        "1000",
        "--c",
        "20",
        "--dim",
        "2",
        "--reps",
        "2000",
        "--clt",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    let report: serde_json::Value = serde_json::from_str(&read(&dir.path().join("e_clt.json"))).unwrap();
    let ratio = report["variance_ratio"].as_f64().unwrap();
    assert!((0.8..=1.2).contains(&ratio), "{ratio}");
    assert_eq!(report["zero_variance"], false);
}
