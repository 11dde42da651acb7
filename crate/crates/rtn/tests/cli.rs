use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rtn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rtn"))
        .args(args)
        .env_remove("RTN_BUDGET_MB")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows as header-keyed maps, comment lines skipped.
fn rows(text: &str) -> Vec<std::collections::HashMap<String, String>> {
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let mut rd = csv::Reader::from_reader(body.as_bytes());
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    rd.records()
        .map(|r| header.iter().cloned().zip(r.unwrap().iter().map(String::from)).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn ipr_exact_is_reproducible_and_k1_is_one() {
    let args = ["ipr-exact", "--grid-N", "4..8", "--grid-chi", "1,2,4", "--grid-k", "1,2,3", "--boundary", "obc,pbc"];
    let a = rtn(&args);
    let b = rtn(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let rs = rows(&stdout(&a));
    assert_eq!(rs.len(), 5 * 3 * 3 * 2);
    for r in rs.iter().filter(|r| r["k"] == "1") {
        assert!((num(&r["value"]) - 1.0).abs() < 1e-12, "{r:?}");
    }
}

#[test]
fn domain_errors_become_rows_and_exit_3() {
    let o = rtn(&["ipr-exact", "--grid-N", "3", "--grid-chi", "2,8", "--grid-k", "2"]);
    assert_eq!(o.status.code(), Some(3));
    let rs = rows(&stdout(&o));
    assert_eq!(rs.len(), 2);
    assert!(rs[0]["error"].is_empty());
    assert!(!rs[1]["error"].is_empty());
    assert!(rs[1]["value"].is_empty());
}

#[test]
fn subcommands_agree_on_one_point() {
    let exact = rows(&stdout(&rtn(&["ipr-exact", "--grid-N", "6", "--grid-chi", "2", "--grid-k", "2"])));
    let contracted = rows(&stdout(&rtn(&[
        "contract", "--quantity", "ipr", "--geometry", "chain", "--grid-N", "6", "--grid-chi", "2", "--grid-k", "2",
    ])));
    let sampled = rows(&stdout(&rtn(&[
        "sample", "--quantity", "ipr", "--geometry", "chain", "--grid-N", "6", "--grid-chi", "2", "--grid-k", "2",
        "--samples", "20000", "--seed", "7",
    ])));
    let e = num(&exact[0]["value"]);
    let c = num(&contracted[0]["value"]);
    assert!((e - c).abs() < 1e-10 * e);
    let (m, s) = (num(&sampled[0]["mean"]), num(&sampled[0]["stderr"]));
    assert!((m - e).abs() < 4.0 * s, "mc {m} +- {s} vs {e}");
}

#[test]
fn json_lines_carry_meta_rows_and_trailer() {
    let o = rtn(&[
        "sample", "--quantity", "ipr", "--geometry", "chain", "--grid-N", "6", "--grid-chi", "2", "--grid-k", "1,2",
        "--samples", "500", "--seed", "3", "--format", "json-lines",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<serde_json::Value> =
        stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0]["meta"]["seed"], "3");
    assert_eq!(lines[1]["k"], 1);
    assert!(lines[3]["trailer"]["wall_time_s"].is_string());
}

#[test]
fn sample_writes_histogram_and_raw_dump() {
    let dir = tempfile::tempdir().unwrap();
    let hist = dir.path().join("h.csv");
    let raw = dir.path().join("raw.txt");
    let o = rtn(&[
        "sample", "--quantity", "ipr", "--geometry", "chain", "--grid-N", "6", "--grid-chi", "2",
        "--samples", "1000", "--seed", "1", "--bins", "10",
        "--hist-out", hist.to_str().unwrap(), "--raw-out", raw.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let h = rows(&fs::read_to_string(&hist).unwrap());
    assert_eq!(h.len(), 12);
    let total: u64 = h.iter().map(|r| r["count"].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 1000);

    let ks = dir.path().join("ks.csv");
    let o = rtn(&[
        "dist", "--family", "pt,scaling", "--grid-gamma", "1", "--points", "2",
        "--ks-samples", raw.to_str().unwrap(), "--ks-out", ks.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let k = rows(&fs::read_to_string(&ks).unwrap());
    assert_eq!(k.len(), 2);
    assert!(k.iter().all(|r| r["samples"] == "1000" && (0.0..=1.0).contains(&num(&r["ks"]))));
}

#[test]
fn same_seed_same_estimates() {
    let args = [
        "sample", "--quantity", "fp", "--geometry", "chain", "--grid-N", "6", "--grid-chi", "2",
        "--samples", "300", "--seed", "11",
    ];
    let strip = |o: Output| -> String {
        stdout(&o).lines().filter(|l| !l.starts_with("# wall_time")).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(strip(rtn(&args)), strip(rtn(&args)));
}

#[test]
fn budget_rejection_lists_points_and_exits_2() {
    let o = rtn(&[
        "contract", "--quantity", "ipr", "--geometry", "square", "--grid-L", "3,9", "--grid-chi", "4", "--grid-k", "3",
        "--budget-mem-mb", "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("size=9"), "{err}");
    assert!(!err.contains("size=3"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn sample_budget_abort_keeps_earlier_rows() {
    let o = Command::new(env!("CARGO_BIN_EXE_rtn"))
        .args([
            "sample", "--quantity", "ipr", "--geometry", "chain", "--grid-N", "6,200", "--grid-chi", "2,64",
            "--samples", "200", "--seed", "1", "--grid-k", "2",
        ])
        .env("RTN_BUDGET_MB", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("# schema="));

    let o = Command::new(env!("CARGO_BIN_EXE_rtn"))
        .args([
            "sample", "--quantity", "ipr", "--geometry", "chain", "--grid-N", "6", "--grid-chi", "2,4096",
            "--samples", "200", "--seed", "1", "--grid-k", "2", "--budget-mem-mb", "1",
        ])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(rows(&stdout(&o)).len(), 1);
}

#[test]
fn large_fp_needs_opt_in() {
    let base = ["contract", "--quantity", "fp", "--geometry", "chain", "--grid-N", "6", "--grid-chi", "4", "--grid-k", "5"];
    assert_eq!(rtn(&base).status.code(), Some(2));
    let mut opted = base.to_vec();
    opted.push("--allow-large-fp");
    let o = rtn(&opted);
    assert_eq!(o.status.code(), Some(0));
    assert!(num(&rows(&stdout(&o))[0]["delta_vs_haar"]) > 0.0);
}

#[test]
fn config_errors_exit_1() {
    for args in [
        vec!["ipr-exact", "--grid-N", "8..4", "--grid-chi", "2"],
        vec!["ipr-exact", "--grid-N", "8", "--grid-chi", "0"],
        vec!["contract", "--quantity", "fp", "--geometry", "square", "--grid-L", "3", "--grid-chi", "2"],
        vec!["contract", "--quantity", "ipr", "--geometry", "chain", "--grid-L", "3", "--grid-chi", "2"],
        vec!["sample", "--quantity", "ipr", "--geometry", "chain", "--grid-N", "6", "--grid-chi", "2", "--samples", "10", "--seed", "1"],
        vec!["dist", "--moments", "3"],
        vec!["matrix", "--kind", "gram", "--k", "2"],
        vec!["no-such-command"],
    ] {
        assert_eq!(rtn(&args).status.code(), Some(1), "{args:?}");
    }
    assert_eq!(rtn(&["--help"]).status.code(), Some(0));
}

#[test]
fn fp_fit_reports_constant() {
    let dir = tempfile::tempdir().unwrap();
    let fit = dir.path().join("fit.json");
    let o = rtn(&[
        "contract", "--quantity", "fp", "--geometry", "chain", "--grid-N", "8,12", "--grid-chi", "4,8", "--grid-k", "2,3",
        "--fit-a", "--fit-out", fit.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("# fit_a="));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&fit).unwrap()).unwrap();
    assert!(v["a"].as_f64().unwrap() > 0.0);
    assert_eq!(v["points_used"], 8);
}

#[test]
fn replica_matrix_csv_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let o = rtn(&["matrix", "--kind", "gram", "--k", "3", "--q", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(Path::new(&out)).unwrap();
    let rs = rows(&text);
    assert_eq!(rs.len(), 6);
    // identity row: q^{#cycles(σ)} is 64 on the diagonal
    assert_eq!(num(&rs[0]["(1)(2)(3)"]), 64.0);
    let t = rtn(&["matrix", "--kind", "transfer", "--k", "2", "--chi", "2"]);
    assert_eq!(rows(&stdout(&t)).len(), 2);
}

#[test]
fn dist_moments_within_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.csv");
    let o = rtn(&[
        "dist", "--family", "pt,scaling,rps-exact,rps-lognormal", "--grid-gamma", "0.5,2", "--grid-N", "5",
        "--points", "5", "--moments", "4", "--moments-out", m.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rs = rows(&fs::read_to_string(&m).unwrap());
    assert_eq!(rs.len(), 5 * 5);
    assert!(rs.iter().all(|r| r["within"] == "true"), "{rs:?}");
    assert_eq!(rows(&stdout(&o)).len(), 5 * 5);
}
