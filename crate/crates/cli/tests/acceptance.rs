//! CLI acceptance: byte-identical reports for identical configs and
//! seeds, plus the exit-code contract.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matchbound"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn acceptance_9_reports_are_byte_identical() {
    for format in ["json", "csv", "text"] {
        let args = [
            "compare", "--group", "cyclic:6", "--seed", "7", "--budget-ms", "50", "--format",
            format,
        ];
        let first = run(&args);
        let second = run(&args);
        assert!(first.status.success(), "{format}");
        assert_eq!(first.stdout, second.stdout, "{format} stdout differs between runs");
        assert!(!first.stdout.is_empty());
    }
    // a config-file run matches the equivalent flag run byte for byte
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"command":"compare","group":"quaternion","seed":3,"budget_ms":50,"format":"json"}"#,
    )
    .unwrap();
    let via_file = run(&["compare", "--config", cfg.to_str().unwrap()]);
    let via_flags = run(&[
        "compare", "--group", "quaternion", "--seed", "3", "--budget-ms", "50", "--format",
        "json",
    ]);
    assert!(via_file.status.success());
    assert_eq!(via_file.stdout, via_flags.stdout);
    println!("acceptance 9 (byte-identical compare reports): PASS");
}

#[test]
fn exit_code_contract() {
    // 0: success
    let ok = run(&["bound", "--group", "cyclic:2", "--p", "2"]);
    assert_eq!(ok.status.code(), Some(0));

    // 1: configuration errors
    let bad_prime = run(&["bound", "--group", "psl2:4"]);
    assert_eq!(bad_prime.status.code(), Some(1));
    let trivial = run(&["compare", "--group", "cyclic:1"]);
    assert_eq!(trivial.status.code(), Some(1));
    let wrong_p = run(&["bound", "--group", "cyclic:3", "--p", "2"]);
    assert_eq!(wrong_p.status.code(), Some(1), "sum element needs p | |G|");
    let unknown_flag = run(&["bound", "--no-such-flag"]);
    assert_eq!(unknown_flag.status.code(), Some(1));

    // 2: verification failure (a filtration file whose step is the full
    // algebra past breakpoint 1/3 violates the vanishing condition)
    let dir = tempfile::tempdir().unwrap();
    let filtration = dir.path().join("full.json");
    std::fs::write(
        &filtration,
        r#"{"steps":[
            {"alpha":"1/2","basis":[[1,0],[0,1]]},
            {"alpha":"1","basis":[[1,0],[0,1]]}
        ]}"#,
    )
    .unwrap();
    let violated = run(&[
        "verify", "--group", "cyclic:2", "--p", "2", "--filtration",
        filtration.to_str().unwrap(),
    ]);
    assert_eq!(violated.status.code(), Some(2));
    let report = String::from_utf8_lossy(&violated.stdout);
    assert!(report.contains("(1, 1, 1)"), "violating triple named: {report}");
}

#[test]
fn bound_reports_expected_density() {
    let out = run(&[
        "bound", "--group", "cyclic:2", "--p", "2", "--filtration", "sum-element", "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let delta = v["per_factor_density"].as_f64().unwrap();
    assert!((delta - 0.944941).abs() < 1e-6);
    let bound = v["bound"].as_f64().unwrap();
    assert!((bound - 1.889882).abs() < 1e-6);
}

#[test]
fn psl2_command_reports_tower() {
    let out = run(&["psl2", "--p", "5", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["dims"]["quotient_by_j1"], 10);
    assert_eq!(v["dims"]["j1_mod_j2"], 25);
    assert_eq!(v["dims"]["j2_mod_j3"], 15);
    assert_eq!(v["dims"]["j3"], 10);
    assert_eq!(v["gl2_side_verified"], true);
    let delta = v["delta"].as_f64().unwrap();
    assert!(delta < 1.0 && delta > 0.9);
    let reference = v["square_zero_reference"].as_f64().unwrap();
    assert!(delta < reference, "tower improves on the square-zero density");
}

#[test]
fn search_emits_witness() {
    let out = run(&["search", "--group", "cyclic:3", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["cardinality"], 2);
    assert_eq!(v["exact"], true);
    assert_eq!(v["s"].as_array().unwrap().len(), 2);
    assert!(v["labels"].as_array().is_some());
}

#[test]
fn compare_emits_all_bound_columns() {
    let out = run(&["compare", "--group", "cyclic:6", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(
        header,
        "group,order,m_star,exact,p,filtration,delta_soft,delta_main2,delta_filtration,bound_soft,bound_main2,bound_filtration"
    );
    assert_eq!(lines.count(), 2, "one row per prime divisor of 6");
}

#[test]
fn group_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("klein.json");
    std::fs::write(
        &path,
        r#"{"name":"K4","order":4,"mul":[[0,1,2,3],[1,0,3,2],[2,3,0,1],[3,2,1,0]]}"#,
    )
    .unwrap();
    let out = run(&["search", "--group", path.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["group"], "K4");

    // a broken table is rejected with a diagnostic naming the axiom
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"name":"bad","order":2,"mul":[[0,1],[1,7]]}"#).unwrap();
    let out = run(&["search", "--group", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("closure"));
}

#[test]
fn tower_bound_through_the_cli() {
    let out = run(&[
        "bound", "--group", "psl2:5", "--filtration", "psl2-tower", "--format", "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["tower_dims"]["quotient_by_j1"], 10);
    assert_eq!(v["tower_dims"]["j1_mod_j2"], 25);
    assert_eq!(v["tower_dims"]["j2_mod_j3"], 15);
    assert_eq!(v["tower_dims"]["j3"], 10);
    let delta = v["per_factor_density"].as_f64().unwrap();
    assert!((delta - 0.9448648489779111).abs() < 1e-9);
    assert_eq!(v["hypotheses"]["aut_invariance"], "verified");
}

#[test]
fn compare_covers_the_tower_row() {
    // budget-limited search against every bound, tower row included
    let out = run(&[
        "compare", "--group", "psl2:5", "--budget-ms", "100", "--format", "json",
    ]);
    assert!(out.status.success(), "dominance must hold");
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4, "primes 2, 3, 5 plus the tower row");
    assert!(rows.iter().any(|r| r["filtration"] == "psl2-tower"));
    let m = v["m_star"].as_u64().unwrap() as f64;
    for r in rows {
        assert!(m <= r["bound_filtration"].as_f64().unwrap() + 1e-9);
    }
}

#[test]
fn thread_cap_does_not_change_reports() {
    let args = ["psl2", "--p", "5", "--format", "json"];
    let parallel = run(&args);
    let single = Command::new(env!("CARGO_BIN_EXE_matchbound"))
        .args(args)
        .env("MATCHBOUND_THREADS", "1")
        .output()
        .expect("binary runs");
    assert!(parallel.status.success() && single.status.success());
    assert_eq!(parallel.stdout, single.stdout);
}

#[test]
fn verify_reports_a_clean_filtration() {
    let out = run(&["verify", "--group", "cyclic:6", "--p", "3", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["ok"], true);
    assert_eq!(v["vanishing"], "verified");
    let steps = v["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 2);
    assert!(steps.iter().all(|s| s["two_sided"] == true && s["inner_invariant"] == true));
}

#[test]
fn unamplified_audit_flag() {
    let with = run(&[
        "bound", "--group", "cyclic:2", "--p", "2", "--unamplified",
    ]);
    assert!(with.status.success());
    let text = String::from_utf8_lossy(&with.stdout);
    assert!(text.contains("unamplified count:  3"), "{text}");
    let without = run(&["bound", "--group", "cyclic:2", "--p", "2"]);
    assert!(!String::from_utf8_lossy(&without.stdout).contains("unamplified"));
    // the JSON report always carries the value for n = 1
    let json = run(&["bound", "--group", "cyclic:2", "--p", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["pre_amplification"], 3.0);
}

#[test]
fn out_flag_writes_the_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&[
        "bound", "--group", "cyclic:2", "--p", "2", "--format", "json", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["group"], "Z2");
}

#[test]
fn bound_csv_has_one_row() {
    let out = run(&["bound", "--group", "cyclic:2", "--p", "2", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("group,order,p,n,ambient_order,filtration"));
    assert!(lines[1].starts_with("Z2,2,2,1,2,sum-element"));
}

#[test]
fn config_command_mismatch_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("other.json");
    std::fs::write(&cfg, r#"{"command":"search","group":"cyclic:2"}"#).unwrap();
    let out = run(&["bound", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
