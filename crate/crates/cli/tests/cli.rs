use std::process::{Command, Output};

use serde_json::Value;

fn bandlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bandlab")).args(args).output().expect("spawn bandlab")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("json line"))
        .collect()
}

#[test]
fn scan_counts_sum_to_irreducible_count() {
    let out = bandlab(&["scan", "--q", "3", "--band", "0,1", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    assert_eq!(recs.len(), 3);
    let total: u64 = recs.iter().map(|r| r["count"].as_u64().unwrap()).sum();
    assert_eq!(total, 8);
    for r in &recs {
        assert_eq!(r["config"]["field"]["p"], 3);
        assert_eq!(r["config"]["params"]["n"], 3);
        assert_eq!(r["config"]["budget"], 100_000_000);
    }
}

#[test]
fn scan_gamma_filter() {
    let out = bandlab(&["scan", "--n", "3", "--gamma", "0"]);
    let recs = records(&out);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0]["gamma"], "0");
}

#[test]
fn rank_reproduces_the_low_rank_example() {
    let out = bandlab(&["rank", "--g", "t^4-1", "--N", "6", "--band", "0,1", "--q", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &records(&out)[0];
    assert_eq!(r["rank"], 2);
    assert_eq!(r["delta"], 5);
}

#[test]
fn incidence_agrees() {
    let out = bandlab(&["incidence", "--d", "2", "--N", "3"]);
    let r = &records(&out)[0];
    assert_eq!(r["agree"], true);
    assert_eq!(r["by_symbol"], r["by_multiplier"]);
}

#[test]
fn sigma_table_and_witness() {
    let out = bandlab(&["sigma", "--n", "5", "--u", "1", "--v", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    let terms = recs.iter().filter(|r| r["kind"] == "sigma1_term").count();
    assert_eq!(terms, 5);
    let s2 = recs.iter().find(|r| r["kind"] == "sigma2").unwrap();
    assert!(s2["i"].as_u64().unwrap() >= 3);
    assert_eq!(s2["exceptional_within_tau"], true);
}

#[test]
fn invalid_cutoffs_exit_1() {
    assert_eq!(bandlab(&["sigma", "--n", "5", "--u", "2", "--v", "3"]).status.code(), Some(1));
}

#[test]
fn budget_refusal_exits_2() {
    let out = bandlab(&["scan", "--n", "12", "--budget", "1000"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn config_errors_exit_1() {
    assert_eq!(bandlab(&["scan", "--n", "3", "--q", "4"]).status.code(), Some(1));
    assert_eq!(bandlab(&["scan", "--n", "3", "--band", "1,0"]).status.code(), Some(1));
    assert_eq!(bandlab(&["scan"]).status.code(), Some(1));
    assert_eq!(bandlab(&["--nope"]).status.code(), Some(1));
    assert_eq!(bandlab(&["verify", "nope"]).status.code(), Some(1));
}

#[test]
fn verify_suites() {
    for suite in ["appendix-A", "exponents"] {
        assert_eq!(bandlab(&["verify", suite]).status.code(), Some(0), "{suite}");
    }
    let out = bandlab(&["verify", "gap", "--q", "3", "--max-deg", "2", "--max-N", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(records(&out).iter().all(|r| r["ok"] == true));
}

#[test]
fn output_is_deterministic_across_job_counts() {
    let a = bandlab(&["sigma", "--n", "5", "--u", "1", "--v", "3", "--jobs", "1"]);
    let b = bandlab(&["sigma", "--n", "5", "--u", "1", "--v", "3", "--jobs", "4"]);
    assert_eq!(a.stdout, b.stdout);
    let c = bandlab(&["verify", "gauss", "--seed", "7", "--samples", "20", "--jobs", "3"]);
    let d = bandlab(&["verify", "gauss", "--seed", "7", "--samples", "20"]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out_path = dir.path().join("out.jsonl");
    std::fs::write(&cfg, r#"{"q": 5, "band": "1,2", "n": 2, "budget": 50000}"#).unwrap();
    let out = bandlab(&["scan", "--config", cfg.to_str().unwrap(), "--n", "3", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let recs: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 5);
    assert_eq!(recs[0]["config"]["params"]["n"], 3);
    assert_eq!(recs[0]["config"]["field"]["p"], 5);
    assert_eq!(recs[0]["config"]["budget"], 50000);
    // |P(3)| over F_5 is 40
    assert_eq!(recs.iter().map(|r| r["count"].as_u64().unwrap()).sum::<u64>(), 40);
}

#[test]
fn csv_output() {
    let out = bandlab(&["scan", "--n", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    assert!(headers.iter().any(|h| h == "gamma"));
    assert!(headers.iter().any(|h| h == "config"));
    assert_eq!(rdr.records().count(), 3);
}

#[test]
fn extension_field_band() {
    let out = bandlab(&["scan", "--q", "9", "--band", "(0,1),1", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    assert_eq!(recs.len(), 9);
    // |P(2)| over F_9 is (81 - 9)/2
    assert_eq!(recs.iter().map(|r| r["count"].as_u64().unwrap()).sum::<u64>(), 36);
}

#[test]
fn reciprocal_and_vonmangoldt() {
    let r = &records(&bandlab(&["reciprocal", "--b", "t^2"]))[0];
    assert_eq!(r["solutions"], serde_json::json!(["t^2"]));
    assert_eq!(r["tau"], 3);
    let v = &records(&bandlab(&["charsum", "--n", "4", "--weight", "von-mangoldt", "--scale", "0"]))[0];
    assert_eq!(v["weight_total"], 81);
    assert_eq!(v["decomposition_exact"], true);
}
