//! JSON-in, JSON-out bindings used by the static demo page in `www/`.

use serde::Serialize;
use serde_json::json;
use vcut_core::distributed::{envelope, find_cut_baseline_gather, find_vertex_cut, Outcome};
use vcut_core::generate::{generate_with_witness, GenSpec};
use vcut_core::graph::{parse_edge_list, stats};
use vcut_core::oracle::{has_cut_at_most, verify_cut};
use vcut_core::sim::SimConfig;
use vcut_core::{CutVerdict, Graph};
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct GraphJson {
    n: usize,
    edges: Vec<(usize, usize)>,
    planted: Option<Vec<usize>>,
}

fn graph_json(g: &Graph, planted: Option<Vec<usize>>) -> GraphJson {
    GraphJson {
        n: g.n(),
        edges: g.edges().collect(),
        planted,
    }
}

/// `spec` is a generator spec such as `{"family":"cycle","n":12,"seed":0}`.
pub fn generate_graph(spec: &str) -> Result<String, String> {
    let spec: GenSpec = serde_json::from_str(spec).map_err(|e| e.to_string())?;
    let gen = generate_with_witness(&spec).map_err(|e| e.to_string())?;
    serde_json::to_string(&graph_json(&gen.graph, gen.planted)).map_err(|e| e.to_string())
}

fn parse(edge_list: &str) -> Result<Graph, String> {
    parse_edge_list(edge_list).map_err(|e| e.to_string())
}

/// Runs `algo` ("main" or "baseline") on an edge list.
pub fn run_algorithm(
    edge_list: &str,
    kappa: usize,
    seed: u64,
    algo: &str,
) -> Result<String, String> {
    let g = parse(edge_list)?;
    let cfg = SimConfig::new(g.n()).with_seed(seed);
    let run = match algo {
        "main" => find_vertex_cut(&g, kappa, &cfg),
        "baseline" => find_cut_baseline_gather(&g, kappa, &cfg),
        other => return Err(format!("unknown algorithm {other:?}")),
    }
    .map_err(|e| e.to_string())?;
    let (verdict, cut) = match &run.outcome {
        Outcome::Verdict(CutVerdict::Cut(s)) => ("cut", s.clone()),
        Outcome::Verdict(CutVerdict::NoCutWithin(_)) => ("none", Vec::new()),
        Outcome::Timeout => ("timeout", Vec::new()),
    };
    let verified = (!cut.is_empty()).then(|| verify_cut(&g, &cut).unwrap_or(false));
    let d = stats(&g).diameter.unwrap_or(0).max(1) as u64;
    let phases: Vec<_> = run
        .phases
        .iter()
        .map(|p| json!({ "phase": p.kind.name(), "rounds": p.rounds() }))
        .collect();
    Ok(json!({
        "verdict": verdict,
        "cut": cut,
        "verified": verified,
        "rounds": run.metrics.rounds_used,
        "messages": run.metrics.total_messages,
        "bits": run.metrics.total_bits,
        "envelope_ratio": run.metrics.rounds_used as f64 / envelope(g.n(), d, kappa),
        "trace_hash": format!("{:016x}", run.metrics.trace_hash),
        "phases": phases,
    })
    .to_string())
}

/// The exact sequential answer for comparison.
pub fn oracle_answer(edge_list: &str, kappa: usize) -> Result<String, String> {
    let g = parse(edge_list)?;
    let v = has_cut_at_most(&g, kappa).map_err(|e| e.to_string())?;
    Ok(match v {
        CutVerdict::Cut(s) => json!({ "verdict": "cut", "cut": s }),
        CutVerdict::NoCutWithin(_) => json!({ "verdict": "none", "cut": [] }),
    }
    .to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn generate(spec: &str) -> Result<String, JsError> {
    js(generate_graph(spec))
}

#[wasm_bindgen]
pub fn run(edge_list: &str, kappa: usize, seed: u64, algo: &str) -> Result<String, JsError> {
    js(run_algorithm(edge_list, kappa, seed, algo))
}

#[wasm_bindgen]
pub fn oracle(edge_list: &str, kappa: usize) -> Result<String, JsError> {
    js(oracle_answer(edge_list, kappa))
}
