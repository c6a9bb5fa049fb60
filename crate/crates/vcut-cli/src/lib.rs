//! Benchmark records, corpus specs and the per-instance runner shared by the
//! `vcut` binary and the acceptance suite.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use vcut_core::distributed::{
    baseline_round_bound, default_max_rounds, envelope, find_cut_baseline_gather, find_vertex_cut,
    kappa_one_cut, CutRun, DistError, Outcome,
};
use vcut_core::generate::{generate, GenSpec};
use vcut_core::graph::stats;
use vcut_core::oracle::{verify_cut, vertex_connectivity};
use vcut_core::sim::SimConfig;
use vcut_core::{CutVerdict, Graph};

/// Environment variable that overrides the default round limit.
pub const MAX_ROUNDS_ENV: &str = "VCUT_MAX_ROUNDS";

#[derive(
    Debug,
    Clone,
    Copy,
    PartialEq,
    Eq,
    PartialOrd,
    Ord,
    Hash,
    Serialize,
    Deserialize,
    clap::ValueEnum,
)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Main,
    Baseline,
    Kappa1,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Main => "main",
            Algo::Baseline => "baseline",
            Algo::Kappa1 => "kappa1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictTag {
    Cut,
    None,
    Timeout,
    Error,
}

/// Graph-level facts shared by every run on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphInfo {
    pub graph: String,
    pub family: String,
    pub n: usize,
    pub m: usize,
    pub diameter: u64,
    pub max_degree: usize,
}

impl GraphInfo {
    pub fn new(g: &Graph, graph: String, family: String) -> Self {
        let st = stats(g);
        Self {
            graph,
            family,
            n: st.n,
            m: st.m,
            diameter: st.diameter.unwrap_or(0) as u64,
            max_degree: st.max_degree,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    #[serde(flatten)]
    pub info: GraphInfo,
    pub kappa: usize,
    pub seed: u64,
    pub algo: Algo,
    pub verdict: VerdictTag,
    pub cut: Vec<usize>,
    pub cut_size: usize,
    /// Whether a returned cut disconnects the graph; absent without a cut.
    pub cut_verified: Option<bool>,
    pub oracle: VerdictTag,
    #[serde(rename = "match")]
    pub matches: bool,
    pub rounds_used: u64,
    pub total_messages: u64,
    pub envelope_ratio: f64,
    pub trace_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl BenchRecord {
    /// A cut that is too large or fails to disconnect.
    pub fn unsound(&self) -> bool {
        self.cut_verified == Some(false)
    }
}

/// `rounds / (κ³·(D+√n)·⌈log₂n⌉³)`.
pub fn envelope_ratio(rounds: u64, n: usize, d: u64, kappa: usize) -> f64 {
    rounds as f64 / envelope(n, d, kappa)
}

/// Round limit: explicit value, then the environment override, then the
/// envelope-derived default (raised for the baseline to cover its O(m + D)).
pub fn resolve_max_rounds(
    explicit: Option<u64>,
    info: &GraphInfo,
    kappa: usize,
    algo: Algo,
) -> u64 {
    if let Some(r) = explicit {
        return r;
    }
    if let Some(r) = std::env::var(MAX_ROUNDS_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
    {
        return r;
    }
    let d = info.diameter.max(1);
    let default = default_max_rounds(info.n, d, kappa);
    match algo {
        Algo::Baseline => default.max(2 * baseline_round_bound(d, info.m, kappa)),
        _ => default,
    }
}

/// Runs one algorithm on one instance and compares it with the oracle's
/// verdict.
pub fn run_instance(
    g: &Graph,
    info: &GraphInfo,
    kappa: usize,
    seed: u64,
    algo: Algo,
    oracle_cut: bool,
    max_rounds: u64,
) -> Result<BenchRecord, DistError> {
    let cfg = SimConfig::new(g.n())
        .with_seed(seed)
        .with_max_rounds(max_rounds);
    let run: CutRun = match algo {
        Algo::Main => find_vertex_cut(g, kappa, &cfg)?,
        Algo::Baseline => find_cut_baseline_gather(g, kappa, &cfg)?,
        Algo::Kappa1 => kappa_one_cut(g, &cfg)?,
    };
    let (verdict, cut) = match run.outcome {
        Outcome::Verdict(CutVerdict::Cut(s)) => (VerdictTag::Cut, s),
        Outcome::Verdict(CutVerdict::NoCutWithin(_)) => (VerdictTag::None, Vec::new()),
        Outcome::Timeout => (VerdictTag::Timeout, Vec::new()),
    };
    let cut_verified = (verdict == VerdictTag::Cut)
        .then(|| cut.len() <= kappa && verify_cut(g, &cut).unwrap_or(false));
    let oracle = if oracle_cut {
        VerdictTag::Cut
    } else {
        VerdictTag::None
    };
    Ok(BenchRecord {
        info: info.clone(),
        kappa,
        seed,
        algo,
        verdict,
        cut_size: cut.len(),
        cut,
        cut_verified,
        oracle,
        matches: verdict == oracle,
        rounds_used: run.metrics.rounds_used,
        total_messages: run.metrics.total_messages,
        envelope_ratio: envelope_ratio(
            run.metrics.rounds_used,
            info.n,
            info.diameter.max(1),
            kappa,
        ),
        trace_hash: format!("{:016x}", run.metrics.trace_hash),
        error: None,
    })
}

/// Exit status of a single simulated run.
pub fn exit_code(r: &BenchRecord) -> i32 {
    match r.verdict {
        VerdictTag::Timeout => 5,
        VerdictTag::Error => 2,
        _ if !r.matches || r.unsound() => 4,
        _ => 0,
    }
}

/// One corpus line: a generated graph and the κ values and algorithms to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    #[serde(flatten)]
    pub spec: GenSpec,
    pub kappas: Vec<usize>,
    #[serde(default = "default_algos")]
    pub algos: Vec<Algo>,
}

fn default_algos() -> Vec<Algo> {
    vec![Algo::Main]
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub instances: Vec<CorpusEntry>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary {
    pub records: usize,
    pub mismatches: usize,
    pub mismatch_rate: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub records: usize,
    pub mismatches: usize,
    pub mismatch_rate: f64,
    /// Over runs of the distributed algorithm; the baseline is excluded.
    pub max_envelope_ratio: f64,
    pub timeouts: usize,
    pub errors: usize,
    pub unsound_cuts: usize,
    pub per_family: BTreeMap<String, FamilySummary>,
}

fn rate(bad: usize, all: usize) -> f64 {
    if all == 0 {
        0.0
    } else {
        bad as f64 / all as f64
    }
}

impl Summary {
    pub fn from_records(records: &[BenchRecord]) -> Self {
        let mut s = Summary {
            records: records.len(),
            ..Default::default()
        };
        for r in records {
            let bad = !r.matches;
            s.mismatches += bad as usize;
            s.timeouts += (r.verdict == VerdictTag::Timeout) as usize;
            s.errors += (r.verdict == VerdictTag::Error) as usize;
            s.unsound_cuts += r.unsound() as usize;
            if r.algo != Algo::Baseline && r.verdict != VerdictTag::Error {
                s.max_envelope_ratio = s.max_envelope_ratio.max(r.envelope_ratio);
            }
            let f = s.per_family.entry(r.info.family.clone()).or_default();
            f.records += 1;
            f.mismatches += bad as usize;
        }
        s.mismatch_rate = rate(s.mismatches, s.records);
        for f in s.per_family.values_mut() {
            f.mismatch_rate = rate(f.mismatches, f.records);
        }
        s
    }
}

/// Connectivity of `g` capped at `cap`; `cap + 1` stands for "more".
pub fn capped_connectivity(g: &Graph, cap: usize) -> usize {
    let r = vertex_connectivity(g, Some(cap)).expect("corpus graphs have n >= 2");
    r.connectivity
}

fn error_record(info: GraphInfo, kappa: usize, seed: u64, algo: Algo, msg: String) -> BenchRecord {
    BenchRecord {
        info,
        kappa,
        seed,
        algo,
        verdict: VerdictTag::Error,
        cut: Vec::new(),
        cut_size: 0,
        cut_verified: None,
        oracle: VerdictTag::Error,
        matches: false,
        rounds_used: 0,
        total_messages: 0,
        envelope_ratio: 0.0,
        trace_hash: String::new(),
        error: Some(msg),
    }
}

/// Runs `seeds` seeds (`base_seed + i`) of every entry, handing each record
/// to `sink` as soon as it is produced. Failures become error records.
pub fn run_corpus(
    corpus: &CorpusSpec,
    seeds: u64,
    base_seed: u64,
    max_rounds: Option<u64>,
    mut sink: impl FnMut(&BenchRecord),
) -> Vec<BenchRecord> {
    let mut records = Vec::new();
    let mut push = |r: BenchRecord| {
        sink(&r);
        records.push(r);
    };
    for entry in &corpus.instances {
        let descriptor = entry.spec.describe();
        let family = entry.spec.family_name().to_string();
        let g = match generate(&entry.spec) {
            Ok(g) => g,
            Err(e) => {
                let info = GraphInfo {
                    graph: descriptor,
                    family,
                    n: 0,
                    m: 0,
                    diameter: 0,
                    max_degree: 0,
                };
                for &k in &entry.kappas {
                    for &algo in &entry.algos {
                        push(error_record(
                            info.clone(),
                            k,
                            base_seed,
                            algo,
                            e.to_string(),
                        ));
                    }
                }
                continue;
            }
        };
        let info = GraphInfo::new(&g, descriptor, family);
        let cap = entry.kappas.iter().copied().max().unwrap_or(1).max(1);
        let conn = (g.n() >= 2).then(|| capped_connectivity(&g, cap));
        for &k in &entry.kappas {
            for &algo in &entry.algos {
                let k = if algo == Algo::Kappa1 { 1 } else { k };
                for i in 0..seeds {
                    let seed = base_seed + i;
                    let limit = resolve_max_rounds(max_rounds, &info, k, algo);
                    let oracle_cut = conn.is_some_and(|c| c <= k);
                    let rec = run_instance(&g, &info, k, seed, algo, oracle_cut, limit)
                        .unwrap_or_else(|e| {
                            error_record(info.clone(), k, seed, algo, e.to_string())
                        });
                    push(rec);
                }
            }
        }
    }
    records
}
