//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! `VCUT_ACCEPTANCE_SEEDS` lowers the number of seeds per corpus instance
//! (default 40) for quick local runs; the envelope and completeness numbers
//! are only meaningful at the default.

use std::collections::{BTreeMap, VecDeque};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vcut_cli::{run_corpus, Algo, BenchRecord, CorpusSpec, Summary};
use vcut_core::distributed::{kappa_one_cut, log2_ceil, Outcome};
use vcut_core::generate::{clique, cycle, generate, path, petersen, Family, GenSpec};
use vcut_core::oracle::{brute_force_min_cut, has_cut_at_most, verify_cut, vertex_connectivity};
use vcut_core::primitives::{
    AggOp, AggregateProgram, BfsLabel, BfsProgram, ComponentLabelProgram, Fields, LeaderProgram,
};
use vcut_core::sim::{
    id_bits, run_sync, Message, NodeFault, NodeProgram, NodeView, Outbox, SimConfig, SimError,
    Status,
};
use vcut_core::{CutVerdict, Graph};

const DEFAULT_SEEDS: u64 = 40;
/// Envelope constant: rounds ≤ C·κ³·(D+√n)·⌈log₂n⌉³.
const ENVELOPE_C: f64 = 64.0;
/// Allowed growth of the max envelope ratio from n=256 to n=4096.
const ENVELOPE_GROWTH: f64 = 1.5;
const MISMATCH_TOLERANCE: f64 = 0.05;
/// κ=1 path: rounds ≤ C'·D·⌈log₂n⌉².
const KAPPA_ONE_C: f64 = 8.0;

struct Outcomes {
    failed: usize,
}

impl Outcomes {
    fn report(&mut self, name: &str, pass: bool, detail: String, started: Instant) {
        if !pass {
            self.failed += 1;
        }
        let tag = if pass { "PASS" } else { "FAIL" };
        println!(
            "{tag} {name}: {detail} ({:.1}s)",
            started.elapsed().as_secs_f64()
        );
    }
}

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn load_corpus(name: &str) -> CorpusSpec {
    let p = corpus_dir().join(name);
    let text = std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

// Sequential references, written independently of the library.

fn bfs(g: &Graph, s: usize, blocked: &[bool]) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n()];
    dist[s] = Some(0);
    let mut q = VecDeque::from([s]);
    while let Some(v) = q.pop_front() {
        let d = dist[v].unwrap();
        for &u in g.neighbors(v) {
            if !blocked[u] && dist[u].is_none() {
                dist[u] = Some(d + 1);
                q.push_back(u);
            }
        }
    }
    dist
}

fn diameter(g: &Graph) -> usize {
    let free = vec![false; g.n()];
    (0..g.n())
        .map(|s| {
            bfs(g, s, &free)
                .into_iter()
                .map(|d| d.unwrap())
                .max()
                .unwrap()
        })
        .max()
        .unwrap()
}

fn has_articulation(g: &Graph) -> bool {
    let n = g.n();
    (0..n).any(|v| {
        let mut blocked = vec![false; n];
        blocked[v] = true;
        let s = (v + 1) % n;
        bfs(g, s, &blocked).iter().filter(|d| d.is_some()).count() < n - 1
    })
}

/// Minimum cut size by subset enumeration (n ≤ 12); n − 1 when complete.
fn subset_connectivity(g: &Graph) -> usize {
    let n = g.n();
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0, |m, &u| m | 1 << u))
        .collect();
    let full = (1u32 << n) - 1;
    let splits = |blocked: u32| {
        let rest = full & !blocked;
        let mut seen = rest & rest.wrapping_neg();
        let mut frontier = seen;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = adj[v] & rest & !seen;
            seen |= new;
            frontier |= new;
        }
        seen != rest
    };
    (0..1u32 << n)
        .filter(|s| s.count_ones() as usize + 2 <= n && splits(*s))
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap_or(n - 1)
}

fn graph_from_bits(n: usize, bits: u64) -> Graph {
    let mut g = Graph::new(n);
    let mut k = 0;
    for u in 0..n {
        for v in u + 1..n {
            if bits >> k & 1 == 1 {
                g.add_edge(u, v);
            }
            k += 1;
        }
    }
    g
}

fn oracles_agree(g: &Graph) -> Result<usize, String> {
    let fast = vertex_connectivity(g, None).map_err(|e| e.to_string())?;
    let brute = brute_force_min_cut(g).map_err(|e| e.to_string())?;
    if fast.connectivity != brute.connectivity {
        return Err(format!(
            "flow {} vs brute {}",
            fast.connectivity, brute.connectivity
        ));
    }
    if !g.is_complete() {
        for w in [&fast.witness_cut, &brute.witness_cut] {
            if w.len() != fast.connectivity || !verify_cut(g, w).unwrap_or(false) {
                return Err(format!("bad witness {w:?}"));
            }
        }
    }
    Ok(fast.connectivity)
}

fn oracle_self_consistency() -> Result<String, String> {
    let mut checked = 0usize;
    for n in 2..=7 {
        let pairs = n * (n - 1) / 2;
        for bits in 0..1u64 << pairs {
            let g = graph_from_bits(n, bits);
            if g.is_connected() {
                oracles_agree(&g).map_err(|e| format!("n={n} bits={bits:b}: {e}"))?;
                checked += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    let mut random = 0;
    while random < 500 {
        let n = rng.gen_range(3..=12);
        let p = rng.gen_range(0.15..0.9);
        let g = generate(&GenSpec::new(
            Family::Gnp {
                n,
                p,
                connected: false,
            },
            rng.gen(),
        ))
        .unwrap();
        if !g.is_connected() {
            continue;
        }
        let k = oracles_agree(&g).map_err(|e| format!("random n={n}: {e}"))?;
        if k != subset_connectivity(&g) {
            return Err(format!("random n={n}: oracle {k} vs subset enumeration"));
        }
        random += 1;
    }
    Ok(format!(
        "{checked} labeled connected graphs with n ≤ 7, {random} random with n ≤ 12"
    ))
}

fn known_values() -> Result<String, String> {
    let mut cases: Vec<(String, Graph, usize)> = Vec::new();
    for n in 2..=10 {
        cases.push((format!("K{n}"), clique(n), n - 1));
    }
    for n in 4..=12 {
        cases.push((format!("C{n}"), cycle(n), 2));
        cases.push((format!("P{n}"), path(n), 1));
    }
    cases.push(("Petersen".into(), petersen(), 3));
    for (name, g, want) in &cases {
        let got = vertex_connectivity(g, None)
            .map_err(|e| e.to_string())?
            .connectivity;
        let brute = subset_connectivity(g);
        if got != *want || brute != *want {
            return Err(format!(
                "{name}: flow {got}, enumeration {brute}, expected {want}"
            ));
        }
    }
    Ok(format!("{} graphs", cases.len()))
}

fn soundness(records: &[BenchRecord], summary: &Summary) -> (bool, String) {
    let cuts = records.iter().filter(|r| r.cut_verified.is_some()).count();
    (
        summary.unsound_cuts == 0 && summary.errors == 0,
        format!(
            "{} runs, {cuts} cuts returned, {} unsound, {} errors",
            records.len(),
            summary.unsound_cuts,
            summary.errors
        ),
    )
}

fn completeness(records: &[BenchRecord], summary: &Summary) -> (bool, String) {
    let baseline: Vec<_> = records
        .iter()
        .filter(|r| r.algo == Algo::Baseline)
        .collect();
    let baseline_bad = baseline.iter().filter(|r| !r.matches).count();
    let main: Vec<BenchRecord> = records
        .iter()
        .filter(|r| r.algo != Algo::Baseline)
        .cloned()
        .collect();
    let s = Summary::from_records(&main);
    let worst = s
        .per_family
        .iter()
        .map(|(f, x)| (f.clone(), x.mismatch_rate))
        .fold(("-".to_string(), 0.0), |a, b| if b.1 > a.1 { b } else { a });
    let pass = s.mismatch_rate <= MISMATCH_TOLERANCE
        && s.per_family
            .values()
            .all(|f| f.mismatch_rate <= MISMATCH_TOLERANCE)
        && baseline_bad == 0
        && !baseline.is_empty();
    let per_family: Vec<String> = s
        .per_family
        .iter()
        .map(|(f, x)| format!("{f} {}/{}", x.mismatches, x.records))
        .collect();
    (
        pass,
        format!(
            "mismatch rate {:.4} ({} of {}; {}), worst family {} at {:.4}, baseline {baseline_bad}/{} (all records incl. baseline: {:.4}, timeouts {})",
            s.mismatch_rate,
            s.mismatches,
            s.records,
            per_family.join(", "),
            worst.0,
            worst.1,
            baseline.len(),
            summary.mismatch_rate,
            summary.timeouts,
        ),
    )
}

fn envelope(records: &[BenchRecord], doubling: &CorpusSpec) -> (bool, String) {
    let max_ratio = records
        .iter()
        .filter(|r| r.algo != Algo::Baseline)
        .map(|r| r.envelope_ratio)
        .fold(0.0, f64::max);
    let mut by_n: BTreeMap<usize, f64> = BTreeMap::new();
    for e in &doubling.instances {
        let name = e.spec.describe();
        for r in records
            .iter()
            .filter(|r| r.info.graph == name && r.algo != Algo::Baseline)
        {
            let m = by_n.entry(r.info.n).or_default();
            *m = m.max(r.envelope_ratio);
        }
    }
    let (lo, hi) = match (by_n.first_key_value(), by_n.last_key_value()) {
        (Some(a), Some(b)) if a.0 != b.0 => (*a.1, *b.1),
        _ => return (false, "doubling corpus produced no records".into()),
    };
    let growth = hi / lo;
    let sizes: Vec<String> = by_n.iter().map(|(n, r)| format!("n={n}: {r:.4}")).collect();
    (
        max_ratio <= ENVELOPE_C && growth <= ENVELOPE_GROWTH,
        format!(
            "max ratio {max_ratio:.4} ≤ C={ENVELOPE_C}; doubling max ratios [{}], growth {growth:.3} ≤ {ENVELOPE_GROWTH}",
            sizes.join(", ")
        ),
    )
}

fn kappa_one_graph(rng: &mut ChaCha8Rng) -> Graph {
    let n = rng.gen_range(3..=512);
    let seed = rng.gen();
    let family = match rng.gen_range(0..5) {
        0 => Family::Tree { n },
        1 => Family::Cycle { n },
        2 | 3 => {
            let a = rng.gen_range(1..=(n - 2).max(2) / 2);
            let k = rng.gen_range(1..=2);
            let b = n.saturating_sub(a + k).max(1);
            let density = rng.gen_range(2.0..8.0) / (a + b) as f64;
            Family::PlantedSeparator {
                a,
                k,
                b,
                density: density.min(1.0),
                exact: false,
            }
        }
        _ => {
            let c = rng.gen_range(1.2..3.0);
            let p = (c * (n as f64).ln() / n as f64).min(1.0);
            Family::Gnp {
                n,
                p,
                connected: true,
            }
        }
    };
    generate(&GenSpec::new(family, seed)).unwrap()
}

fn kappa_one() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1c);
    let (mut positives, mut worst) = (0, 0.0f64);
    for i in 0..200 {
        let g = kappa_one_graph(&mut rng);
        let n = g.n();
        let want = has_articulation(&g);
        let oracle = has_cut_at_most(&g, 1).map_err(|e| e.to_string())?;
        if oracle.is_cut() != want {
            return Err(format!(
                "graph {i}: oracle disagrees with vertex-deletion check"
            ));
        }
        let run = kappa_one_cut(&g, &SimConfig::new(n).with_seed(rng.gen()))
            .map_err(|e| format!("graph {i}: {e}"))?;
        let got = match &run.outcome {
            Outcome::Verdict(CutVerdict::Cut(s)) => {
                if s.len() != 1 || !verify_cut(&g, s).unwrap_or(false) {
                    return Err(format!("graph {i}: unsound cut {s:?}"));
                }
                true
            }
            Outcome::Verdict(CutVerdict::NoCutWithin(_)) => false,
            Outcome::Timeout => return Err(format!("graph {i} (n={n}): timeout")),
        };
        if got != want {
            return Err(format!("graph {i} (n={n}): verdict {got}, expected {want}"));
        }
        positives += want as usize;
        let d = diameter(&g).max(1) as f64;
        let l = log2_ceil(n).max(1) as f64;
        worst = worst.max(run.metrics.rounds_used as f64 / (d * l * l));
    }
    if worst > KAPPA_ONE_C {
        return Err(format!(
            "rounds/(D·⌈log₂n⌉²) reached {worst:.3} > C'={KAPPA_ONE_C}"
        ));
    }
    Ok(format!(
        "200 graphs ({positives} with an articulation vertex), all verdicts exact, max rounds/(D·⌈log₂n⌉²) {worst:.3} ≤ C'={KAPPA_ONE_C}"
    ))
}

// Simulator test programs.

fn word(v: u64, width: usize) -> Message {
    let mut m = Message::new();
    m.push_bits(v, width).unwrap();
    m
}

/// Floods the minimum of random values over randomly chosen ports.
struct Gossip {
    rng: ChaCha8Rng,
    best: u64,
    rounds: u64,
}

impl NodeProgram for Gossip {
    fn step(
        &mut self,
        round: u64,
        inbox: &[Option<Message>],
        out: &mut Outbox,
    ) -> Result<Status, NodeFault> {
        for m in inbox.iter().flatten() {
            self.best = self.best.min(m.read(0, 16)?);
        }
        if round >= self.rounds {
            return Ok(Status::Halted(word(self.best, 16)));
        }
        for p in 0..out.degree() {
            if self.rng.gen_bool(0.5) {
                out.send(p, word(self.best, 16));
            }
        }
        Ok(Status::Running)
    }
}

fn gossip(rounds: u64) -> impl FnMut(&NodeView) -> Gossip {
    move |v| {
        let mut rng = ChaCha8Rng::seed_from_u64(v.rng_seed);
        let best = rng.gen_range(0..1 << 16);
        Gossip { rng, best, rounds }
    }
}

#[derive(Debug)]
struct Oversize(usize);

impl NodeProgram for Oversize {
    fn step(
        &mut self,
        round: u64,
        _: &[Option<Message>],
        out: &mut Outbox,
    ) -> Result<Status, NodeFault> {
        // a legal round first, then one message over the limit
        let bits = if round == 1 { 1 } else { self.0 };
        let mut m = Message::new();
        m.push_bits(0, bits).unwrap();
        out.send(out.degree() - 1, m);
        Ok(Status::Running)
    }
}

/// Stamps every message with its send round and faults unless it arrives
/// exactly one round later.
struct DelayProbe {
    last: u64,
    seen: u64,
}

impl NodeProgram for DelayProbe {
    fn step(
        &mut self,
        round: u64,
        inbox: &[Option<Message>],
        out: &mut Outbox,
    ) -> Result<Status, NodeFault> {
        for m in inbox {
            match m {
                Some(m) if m.read(0, 16)? + 1 != round => {
                    return Err(NodeFault(format!(
                        "message from round {} seen in {round}",
                        m.read(0, 16)?
                    )))
                }
                Some(_) => self.seen += 1,
                None if round > 1 && round <= self.last + 1 => {
                    return Err(NodeFault(format!("missing message in round {round}")))
                }
                None => {}
            }
        }
        if round > self.last {
            return Ok(Status::Halted(word(self.seen, 16)));
        }
        out.send_all(&word(round, 16));
        Ok(Status::Running)
    }
}

fn simulator_properties() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51);
    let gnp = |rng: &mut ChaCha8Rng, n| {
        let p = rng.gen_range(0.3..0.7);
        generate(&GenSpec::new(
            Family::Gnp {
                n,
                p,
                connected: true,
            },
            rng.gen(),
        ))
        .unwrap()
    };
    for i in 0..100 {
        let n = rng.gen_range(3..60);
        let g = gnp(&mut rng, n);
        let cfg = SimConfig::new(n)
            .with_seed(rng.gen())
            .with_bandwidth(16 + rng.gen_range(0..16))
            .with_max_rounds(rng.gen_range(2..40));
        let rounds = rng.gen_range(1..30);
        let a = run_sync(&g, gossip(rounds), &cfg).map_err(|e| e.to_string())?;
        let b = run_sync(&g, gossip(rounds), &cfg).map_err(|e| e.to_string())?;
        if a.metrics != b.metrics || a.outputs != b.outputs {
            return Err(format!("config {i}: repeated runs differ"));
        }
    }
    for i in 0..100 {
        let n = rng.gen_range(3..60);
        let g = gnp(&mut rng, n);
        let bw = SimConfig::default_bandwidth(n) + rng.gen_range(0..32);
        let over = bw + rng.gen_range(1..64);
        match run_sync(
            &g,
            |_| Oversize(over),
            &SimConfig::new(n).with_bandwidth(bw),
        ) {
            Err(SimError::Bandwidth { round: 2, .. }) => {}
            other => {
                return Err(format!(
                    "violator {i}: expected a bandwidth fault, got {other:?}"
                ))
            }
        }
    }
    for i in 0..50 {
        let n = rng.gen_range(3..60);
        let g = gnp(&mut rng, n);
        let last = rng.gen_range(1..10);
        let cfg = SimConfig::new(n).with_bandwidth(SimConfig::default_bandwidth(n).max(16));
        let r = run_sync(&g, |_| DelayProbe { last, seen: 0 }, &cfg)
            .map_err(|e| format!("probe {i}: {e}"))?;
        for v in 0..n {
            let seen = r.outputs[v].as_ref().unwrap().read(0, 16).unwrap();
            if seen != last * g.degree(v) as u64 || r.metrics.rounds_used != last + 1 {
                return Err(format!("probe {i}: node {v} saw {seen} messages"));
            }
        }
    }
    Ok("100 repeated configs identical, 100/100 violators faulted, 50 delay probes saw 1-round latency".into())
}

fn check_primitives(g: &Graph, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = g.n();
    let w = id_bits(n);
    let free = vec![false; n];
    let root = rng.gen_range(0..n);
    let dist = bfs(g, root, &free);
    let res = run_sync(g, |v| BfsProgram::new(v, root as u64), &SimConfig::new(n))
        .map_err(|e| e.to_string())?;
    for (v, (o, want)) in res.outputs.iter().zip(&dist).enumerate() {
        let l =
            BfsLabel::decode(o.as_ref().ok_or("bfs: no output")?, w).map_err(|e| e.to_string())?;
        if Some(l.depth as usize) != *want {
            return Err(format!("bfs: node {v} depth {} vs {want:?}", l.depth));
        }
    }

    let res = run_sync(g, LeaderProgram::new, &SimConfig::new(n)).map_err(|e| e.to_string())?;
    let dist0 = bfs(g, 0, &free);
    for (v, o) in res.outputs.iter().enumerate() {
        let leader = o
            .as_ref()
            .ok_or("leader: no output")?
            .read(0, w)
            .map_err(|e| e.to_string())?;
        let depth = res.programs[v].tree.as_ref().map(|t| t.depth as usize);
        if leader != 0 || depth != dist0[v] {
            return Err(format!(
                "leader: node {v} elected {leader} at depth {depth:?}"
            ));
        }
    }

    let ops = [
        (AggOp::Min, 10),
        (AggOp::Max, 10),
        (AggOp::Sum, 24),
        (AggOp::Count, 13),
    ];
    let inputs: Vec<[u64; 4]> = (0..n)
        .map(|_| {
            [
                rng.gen_range(0..1024),
                rng.gen_range(0..1024),
                rng.gen_range(0..1024),
                rng.gen_range(0..3),
            ]
        })
        .collect();
    let want = [
        inputs.iter().map(|x| x[0]).min().unwrap(),
        inputs.iter().map(|x| x[1]).max().unwrap(),
        inputs.iter().map(|x| x[2]).sum(),
        inputs.iter().filter(|x| x[3] != 0).count() as u64,
    ];
    let res = run_sync(
        g,
        |v| AggregateProgram::new(v, Fields::new(ops, inputs[v.my_id as usize])),
        &SimConfig::new(n).with_bandwidth(64),
    )
    .map_err(|e| e.to_string())?;
    for (v, o) in res.outputs.iter().enumerate() {
        let mut r = o.as_ref().ok_or("aggregate: no output")?.reader();
        let got: Vec<u64> = ops
            .iter()
            .map(|&(_, width)| r.bits(width).unwrap())
            .collect();
        if got != want {
            return Err(format!("aggregate: node {v} got {got:?}, want {want:?}"));
        }
    }

    let mut excluded: Vec<usize> = (0..rng.gen_range(0..=3.min(n - 1)))
        .map(|_| rng.gen_range(0..n))
        .collect();
    excluded.sort_unstable();
    excluded.dedup();
    let ids: Vec<u64> = excluded.iter().map(|&v| v as u64).collect();
    let res = run_sync(
        g,
        |v| ComponentLabelProgram::new(v, &ids),
        &SimConfig::new(n),
    )
    .map_err(|e| e.to_string())?;
    let mut blocked = vec![false; n];
    for &v in &excluded {
        blocked[v] = true;
    }
    let mut want = vec![None; n];
    for s in 0..n {
        if blocked[s] || want[s].is_some() {
            continue;
        }
        // s is the smallest vertex of its component
        for (v, d) in bfs(g, s, &blocked).into_iter().enumerate() {
            if d.is_some() {
                want[v] = Some(s as u64);
            }
        }
    }
    for (v, o) in res.outputs.iter().enumerate() {
        let got = ComponentLabelProgram::decode(o.as_ref().ok_or("labels: no output")?, w)
            .map_err(|e| e.to_string())?;
        if got != want[v] {
            return Err(format!("labels: node {v} got {got:?}, want {:?}", want[v]));
        }
    }
    Ok(())
}

fn primitives(corpus: &CorpusSpec) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e);
    let mut count = 0;
    for e in &corpus.instances {
        let g = generate(&e.spec).map_err(|err| err.to_string())?;
        check_primitives(&g, &mut rng).map_err(|err| format!("{}: {err}", e.spec.describe()))?;
        count += 1;
    }
    Ok(format!(
        "BFS, leader, aggregates and component labels exact on {count} corpus graphs"
    ))
}

fn main() -> ExitCode {
    let seeds = std::env::var("VCUT_ACCEPTANCE_SEEDS")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEEDS);
    let mut out = Outcomes { failed: 0 };
    let from = |r: Result<String, String>| match r {
        Ok(s) => (true, s),
        Err(s) => (false, s),
    };

    let t = Instant::now();
    let (ok, d) = from(oracle_self_consistency());
    out.report("oracle self-consistency", ok, d, t);
    let t = Instant::now();
    let (ok, d) = from(known_values());
    out.report("known values", ok, d, t);

    let corpus = load_corpus("acceptance.json");
    let doubling = load_corpus("doubling.json");
    let t = Instant::now();
    let records = run_corpus(&corpus, seeds, 0, None, |_| {});
    let summary = Summary::from_records(&records);
    let report = serde_json::json!({ "records": records, "summary": summary });
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance-report.json");
    std::fs::write(&path, serde_json::to_string(&report).unwrap()).unwrap();
    println!(
        "corpus: {} instances x {seeds} seeds, {} records in {:.1}s, report at {}",
        corpus.instances.len(),
        records.len(),
        t.elapsed().as_secs_f64(),
        path.display()
    );
    let (ok, d) = soundness(&records, &summary);
    out.report("distributed soundness", ok, d, t);
    let (ok, d) = completeness(&records, &summary);
    out.report("distributed completeness", ok, d, t);
    let (ok, d) = envelope(&records, &doubling);
    out.report("round envelope", ok, d, t);

    let t = Instant::now();
    let (ok, d) = from(kappa_one());
    out.report("kappa=1 fast path", ok, d, t);
    let t = Instant::now();
    let (ok, d) = from(simulator_properties());
    out.report("simulator properties", ok, d, t);
    let t = Instant::now();
    let (ok, d) = from(primitives(&corpus));
    out.report("primitive correctness", ok, d, t);

    if out.failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", out.failed);
        ExitCode::FAILURE
    }
}
