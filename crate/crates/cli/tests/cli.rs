use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn slicelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slicelab"))
        .args(args)
        .env_remove("GSL_SEED")
        .output()
        .expect("binary runs")
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn dense_model_sweep_decreases() {
    let out = slicelab(&["dense-model", "--sweep", "8,12,16", "--k", "2", "--order", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 3);
    let values: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(values[0] > values[1] && values[1] > values[2]);
    assert_eq!(rows[0][..3], ["8", "2", "2"]);
    assert_eq!(rows[0][4], "exact");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("2n,k,s,value,mode,samples,seed"));
    assert!(text.starts_with(&format!("# slicelab {}", slicelab::VERSION)));
}

#[test]
fn planted_linear_passes_exactly() {
    let out = slicelab(&["test-linearity", "--n", "6", "--synthetic", "linear:S=0x5", "--mode", "exact"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["result"]["outcome"]["pass_rate"], 1.0);
    assert_eq!(report["result"]["outcome"]["ci_radius"], 0.0);
    assert_eq!(report["result"]["decoding"]["subset"], 5);
    assert_eq!(report["result"]["decoding"]["agreement"], 1.0);
    assert_eq!(report["config"]["command"]["subcommand"], "test-linearity");
    assert_eq!(report["version"], slicelab::VERSION);
}

#[test]
fn fourier_top_is_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.tbl", "dim=3\n0.5 -1 0 1\n0.25 0 0 1\n");
    let out = slicelab(&["fourier", "--input", &f, "--top", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 3);
    let mags: Vec<f64> = rows.iter().map(|r| r[1].parse::<f64>().unwrap().abs()).collect();
    assert!(mags.windows(2).all(|w| w[0] >= w[1]));
    assert!(rows.iter().all(|r| r[0].starts_with("0x")));
}

#[test]
fn fourier_level_weight_of_parity() {
    let dir = tempfile::tempdir().unwrap();
    // the character of {1, 2}
    let f = write(dir.path(), "p.tbl", "dim=2\n1 -1 -1 1\n");
    let low = slicelab(&["fourier", "--input", &f, "--level-weight", "1"]);
    let all = slicelab(&["fourier", "--input", &f, "--level-weight", "2", "--format", "json"]);
    assert_eq!(csv_rows(&low)[0][1], "0");
    assert_eq!(json(&all)["result"]["weight"], 1.0);
}

#[test]
fn bits_tables_feed_the_testers() {
    let dir = tempfile::tempdir().unwrap();
    // x1 ⊕ x2 on {0,1}^4; index bit i is coordinate i + 1
    let bits: String = (0..16u32).map(|x| if (x & 3).count_ones() % 2 == 1 { '1' } else { '0' }).collect();
    let f = write(dir.path(), "f.bits", &format!("bits=4\n{bits}\n"));
    let out = slicelab(&["test-gowers", "--input", &f, "--d", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["outcome"]["pass_rate"], 1.0);
    let lin = slicelab(&["test-linearity", "--input", &f]);
    assert_eq!(json(&lin)["result"]["decoding"]["subset"], 3);
}

#[test]
fn gowers_modes() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "one.tbl", "dim=4\n1 1 1 1 1 1 1 1 1 1 1 1 1 1 1 1\n");
    let exact = json(&slicelab(&["gowers", "--input", &f, "--order", "3"]));
    assert_eq!(exact["result"]["value_pow"], 1.0);
    assert_eq!(exact["result"]["mode"], "exact");
    let mc = json(&slicelab(&["gowers", "--input", &f, "--order", "3", "--mode", "mc", "--samples", "50", "--seed", "4"]));
    assert_eq!(mc["result"]["mode"], "monte-carlo");
    assert_eq!(mc["result"]["seed"], 4);
    assert_eq!(mc["result"]["value_pow"], 1.0);
    assert_eq!(mc["result"]["ci_radius"], 0.0);
}

#[test]
fn seed_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_slicelab"))
        .args(["test-linearity", "--n", "3", "--synthetic", "random", "--mode", "mc", "--trials", "100"])
        .env("GSL_SEED", "17")
        .output()
        .unwrap();
    assert_eq!(json(&out)["result"]["outcome"]["seed"], 17);
}

#[test]
fn biased_rank_outside_regime_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    // x1 / 2 has zero bias on the slice
    let values: Vec<&str> = (0..16).map(|x| if x & 1 == 1 { "0.5" } else { "0" }).collect();
    let p = write(dir.path(), "p.tbl", &format!("dim=4\n{}\n", values.join(" ")));
    let out = slicelab(&["nonclassical", "--input", &p, "--biased-rank", "1,0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["result"]["status"], "regime-not-met");
    assert!(String::from_utf8(out.stderr).unwrap().contains("regime not met"));
}

#[test]
fn biased_rank_finds_the_cancelling_residue() {
    let out = slicelab(&["nonclassical", "--n", "4", "--weight-poly", "1,2,0", "--verify-degree", "2", "--biased-rank", "2,0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["result"]["biased_rank"]["j"], 3);
    assert_eq!(r["result"]["biased_rank"]["residue_bias"], 1.0);
    assert_eq!(r["result"]["verify_degree"]["holds"], true);
    assert_eq!(r["result"]["polynomial"]["degree"], 2);
}

#[test]
fn correlate_on_each_domain() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.bits", "bits=4\n0000000000000000\n");
    let p = write(dir.path(), "p.tbl", "dim=4\n0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0\n");
    for domain in ["slice", "cube", "residue:2"] {
        let out = slicelab(&["nonclassical", "--correlate", &f, &p, "--domain", domain]);
        assert_eq!(out.status.code(), Some(0), "{domain}");
        assert_eq!(json(&out)["result"]["correlation"]["re"], 1.0);
    }
}

#[test]
fn usage_errors_exit_1() {
    for args in [
        vec!["gowers", "--input", "/nonexistent/table"],
        vec!["no-such-command"],
        vec!["test-linearity", "--n", "3", "--synthetic", "quadratic:S=1"],
        vec!["dense-model", "--sweep", "7"],
        vec!["nonclassical", "--n", "3", "--weight-poly", "1,1,0", "--format", "csv"],
    ] {
        let out = slicelab(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(!err.trim().is_empty(), "{args:?}");
    }
}

#[test]
fn malformed_table_is_a_one_line_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.tbl", "dim=2\n1 2 3\n");
    let out = slicelab(&["fourier", "--input", &f]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(String::from_utf8(out.stderr).unwrap().trim().lines().count(), 1);
}

#[test]
fn budget_overflow_suggests_mc() {
    let dir = tempfile::tempdir().unwrap();
    let values = vec!["1"; 1 << 16].join(" ");
    let f = write(dir.path(), "big.tbl", &format!("dim=16\n{values}\n"));
    let out = slicelab(&["gowers", "--input", &f, "--order", "4", "--mode", "exact"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("--mode mc"));
    let auto = slicelab(&["gowers", "--input", &f, "--order", "4", "--samples", "20"]);
    assert_eq!(json(&auto)["result"]["mode"], "monte-carlo");
}

#[test]
fn selftest_passes() {
    let out = slicelab(&["selftest", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let checks = json(&out)["result"].as_array().unwrap().clone();
    assert!(checks.len() > 10);
    assert!(checks.iter().all(|c| c["passed"] == true));
}
