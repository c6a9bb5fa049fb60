use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use vcut_cli::{BenchRecord, Summary};

fn vcut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vcut"))
        .args(args)
        .env_remove("VCUT_MAX_ROUNDS")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn gen_file(dir: &TempDir, name: &str, args: &[&str]) -> String {
    let p = dir.path().join(name).to_str().unwrap().to_string();
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &p]);
    let o = vcut(&full);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    p
}

fn edges(n: usize, list: &[(usize, usize)]) -> String {
    let mut s = format!("{n} {}\n", list.len());
    for (u, v) in list {
        s += &format!("{u} {v}\n");
    }
    s
}

#[test]
fn gen_cycle_header() {
    let dir = TempDir::new().unwrap();
    let p = gen_file(&dir, "c8.el", &["--family", "cycle", "--n", "8"]);
    let text = fs::read_to_string(p).unwrap();
    assert_eq!(text.lines().next(), Some("8 8"));
    let o = vcut(&["gen", "--family", "cycle", "--n", "8"]);
    assert_eq!(o.stdout, text.as_bytes());
}

#[test]
fn gen_planted_reports_connectivity() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("p.el");
    let o = vcut(&[
        "gen",
        "--family",
        "planted",
        "--a",
        "6",
        "--k",
        "2",
        "--b",
        "6",
        "--seed",
        "1",
        "--exact",
        "--out",
        p.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let stats = stdout_json(&o);
    assert_eq!(stats["connectivity"], 2);
    assert_eq!(stats["planted_cut"].as_array().unwrap().len(), 2);
    assert!(o.stderr.is_empty());
}

#[test]
fn gen_rejects_bad_params() {
    let o = vcut(&["gen", "--family", "clique", "--n", "0"]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
    assert_eq!(code(&vcut(&["gen", "--family", "gnp", "--n", "5"])), 2);
}

#[test]
fn oracle_examples() {
    let dir = TempDir::new().unwrap();
    let c10 = gen_file(&dir, "c10.el", &["--family", "cycle", "--n", "10"]);
    let o = vcut(&["oracle", &c10, "--kappa", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["verdict"], "none");

    let star = write(
        &dir,
        "star.el",
        &edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]),
    );
    let v = stdout_json(&vcut(&["oracle", &star, "--kappa", "1"]));
    assert_eq!(v["verdict"], "cut");
    assert_eq!(v["cut"], serde_json::json!([0]));

    let pet = gen_file(&dir, "pet.el", &["--family", "petersen"]);
    let v = stdout_json(&vcut(&["oracle", &pet, "--kappa", "3"]));
    assert_eq!(v["verdict"], "cut");
    assert_eq!(v["cut"].as_array().unwrap().len(), 3);
    assert_eq!(
        stdout_json(&vcut(&["oracle", &pet, "--kappa", "2"]))["verdict"],
        "none"
    );
}

#[test]
fn input_errors() {
    let dir = TempDir::new().unwrap();
    let split = write(&dir, "split.el", &edges(4, &[(0, 1), (2, 3)]));
    let o = vcut(&["oracle", &split, "--kappa", "1"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("disconnected"));
    assert_eq!(code(&vcut(&["simulate", &split, "--kappa", "1"])), 3);

    assert_eq!(
        code(&vcut(&["oracle", "/nonexistent/g.el", "--kappa", "1"])),
        2
    );
    let junk = write(&dir, "junk.el", "3 1\n0 7\n");
    assert_eq!(code(&vcut(&["oracle", &junk, "--kappa", "1"])), 2);
    let c5 = gen_file(&dir, "c5.el", &["--family", "cycle", "--n", "5"]);
    assert_eq!(code(&vcut(&["oracle", &c5, "--kappa", "4"])), 2);
    assert_eq!(code(&vcut(&["bench", "--corpus", &junk])), 2);
}

#[test]
fn simulate_examples() {
    let dir = TempDir::new().unwrap();
    let c10 = gen_file(&dir, "c10.el", &["--family", "cycle", "--n", "10"]);
    let o = vcut(&[
        "simulate", &c10, "--kappa", "2", "--seed", "7", "--algo", "main",
    ]);
    assert_eq!(code(&o), 0);
    let r: BenchRecord = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r.cut_verified, Some(true));
    assert!(r.matches && r.cut_size <= 2);
    assert!(o.stderr.is_empty());

    let k6 = gen_file(&dir, "k6.el", &["--family", "clique", "--n", "6"]);
    let o = vcut(&["simulate", &k6, "--kappa", "4", "--algo", "baseline"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["verdict"], "none");

    let o = vcut(&["simulate", &c10, "--kappa", "2", "--max-rounds", "1"]);
    assert_eq!(code(&o), 5);
    assert_eq!(stdout_json(&o)["verdict"], "timeout");

    let o = Command::new(env!("CARGO_BIN_EXE_vcut"))
        .args(["simulate", &c10, "--kappa", "2"])
        .env("VCUT_MAX_ROUNDS", "3")
        .output()
        .unwrap();
    assert_eq!(code(&o), 5);
}

#[test]
fn simulate_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let g = gen_file(
        &dir,
        "g.el",
        &[
            "--family",
            "gnp",
            "--n",
            "40",
            "--p",
            "0.15",
            "--connected",
            "--seed",
            "3",
        ],
    );
    let a = vcut(&["simulate", &g, "--kappa", "2", "--seed", "9"]);
    let b = vcut(&["simulate", &g, "--kappa", "2", "--seed", "9"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(code(&a), 0);
}

fn bench(dir: &TempDir, corpus: &str, seeds: &str) -> (Output, Vec<BenchRecord>, Summary) {
    let c = write(dir, "corpus.json", corpus);
    let out = dir.path().join("report.json");
    let o = vcut(&[
        "bench",
        "--corpus",
        &c,
        "--seeds",
        seeds,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let (last, recs) = lines.split_last().unwrap();
    let records: Vec<BenchRecord> = recs
        .iter()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let summary: Value = serde_json::from_str(last).unwrap();
    let summary: Summary = serde_json::from_value(summary["summary"].clone()).unwrap();
    let doc: Value = serde_json::from_str(&fs::read_to_string(Path::new(&out)).unwrap()).unwrap();
    let from_file: Vec<BenchRecord> = serde_json::from_value(doc["records"].clone()).unwrap();
    assert_eq!(from_file, records);
    (o, records, summary)
}

#[test]
fn bench_empty_corpus() {
    let dir = TempDir::new().unwrap();
    let (o, records, summary) = bench(&dir, r#"{"instances": []}"#, "3");
    assert!(records.is_empty());
    assert_eq!(summary, Summary::default());
    assert!(o.stderr.is_empty());
}

#[test]
fn bench_cliques_have_no_small_cut() {
    let dir = TempDir::new().unwrap();
    let corpus = r#"{"instances": [
        {"family": "clique", "n": 5, "kappas": [1, 2, 3]},
        {"family": "clique", "n": 8, "kappas": [1, 2, 3, 4, 6], "algos": ["main", "baseline"]}
    ]}"#;
    let (_, records, summary) = bench(&dir, corpus, "2");
    assert_eq!(records.len(), (3 + 5 * 2) * 2);
    assert!(records
        .iter()
        .all(|r| r.verdict == vcut_cli::VerdictTag::None && r.matches));
    assert_eq!(summary.mismatches, 0);
    let seeds: Vec<u64> = records.iter().take(2).map(|r| r.seed).collect();
    assert_eq!(seeds, vec![0, 1]);
}

#[test]
fn bench_records_round_trip_and_summary_recomputes() {
    let dir = TempDir::new().unwrap();
    let corpus = r#"{"instances": [
        {"family": "cycle", "n": 12, "kappas": [1, 2]},
        {"family": "planted_separator", "a": 8, "k": 2, "b": 9, "density": 0.4, "exact": true, "seed": 4, "kappas": [1, 2], "algos": ["main", "baseline"]},
        {"family": "tree", "n": 20, "kappas": [1], "algos": ["kappa1"]}
    ]}"#;
    let (o, records, summary) = bench(&dir, corpus, "2");
    assert_eq!(Summary::from_records(&records), summary);
    assert_eq!(summary.records, records.len());

    // parse → emit → parse is stable line by line
    let text = String::from_utf8(o.stdout).unwrap();
    for (line, r) in text.lines().zip(&records) {
        assert_eq!(serde_json::to_string(r).unwrap(), line);
        let v: Value = serde_json::from_str(line).unwrap();
        for key in [
            "graph",
            "n",
            "m",
            "diameter",
            "max_degree",
            "kappa",
            "seed",
            "verdict",
            "cut_size",
            "oracle",
            "match",
            "rounds_used",
            "envelope_ratio",
            "trace_hash",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }
    assert!(records.iter().all(|r| r.envelope_ratio > 0.0));
}

#[test]
fn envelope_ratio_by_hand() {
    let dir = TempDir::new().unwrap();
    let (_, records, _) = bench(
        &dir,
        r#"{"instances": [{"family": "cycle", "n": 16, "kappas": [2]}]}"#,
        "1",
    );
    let r = &records[0];
    // C16: D = 8, √16 = 4, log₂16 = 4, κ = 2 → 8 · 12 · 64 = 6144
    assert_eq!((r.info.n, r.info.diameter, r.kappa), (16, 8, 2));
    let want = r.rounds_used as f64 / 6144.0;
    assert!((r.envelope_ratio - want).abs() < 1e-12);
}
