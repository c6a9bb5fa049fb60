use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use vcut_cli::{
    exit_code, resolve_max_rounds, run_corpus, run_instance, Algo, CorpusSpec, GraphInfo, Summary,
};
use vcut_core::generate::{generate_with_witness, Family, GenSpec};
use vcut_core::graph::{emit_edge_list, parse_edge_list, stats};
use vcut_core::oracle::{has_cut_at_most, vertex_connectivity};
use vcut_core::{CutVerdict, Graph};

/// Connectivity reported by `gen` is exact up to this value.
const GEN_CONNECTIVITY_CAP: usize = 8;

#[derive(Parser)]
#[command(
    name = "vcut",
    version,
    about = "Small vertex cuts in a simulated CONGEST network"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Cycle,
    Path,
    Clique,
    Tree,
    Gnp,
    Planted,
    Petersen,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a graph; writes the edge list to --out (stats JSON on stdout)
    /// or to stdout.
    Gen {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        /// Redraw G(n, p) until connected.
        #[arg(long)]
        connected: bool,
        #[arg(long)]
        a: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        b: Option<usize>,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        /// Redraw the planted instance until its connectivity is exactly k.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact answer for "is there a cut of at most k vertices?".
    Oracle {
        file: PathBuf,
        #[arg(long)]
        kappa: usize,
    },
    /// Run one algorithm on one graph and check it against the oracle.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        kappa: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Algo::Main)]
        algo: Algo,
        #[arg(long)]
        max_rounds: Option<u64>,
    },
    /// Run a corpus; one JSON record per line, then a summary line.
    Bench {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        base_seed: u64,
        #[arg(long)]
        max_rounds: Option<u64>,
        /// Also write the full report (records and summary) as one JSON document.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// An error with its exit status.
struct Fail(u8, String);

impl Fail {
    fn input(msg: impl Into<String>) -> Self {
        Fail(2, msg.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Gen {
            family,
            n,
            p,
            connected,
            a,
            k,
            b,
            density,
            exact,
            seed,
            out,
        } => {
            let need = |v: Option<usize>, name: &str| {
                v.ok_or_else(|| Fail::input(format!("--{name} is required for this family")))
            };
            (|| {
                let family = match family {
                    FamilyArg::Cycle => Family::Cycle { n: need(n, "n")? },
                    FamilyArg::Path => Family::Path { n: need(n, "n")? },
                    FamilyArg::Clique => Family::Clique { n: need(n, "n")? },
                    FamilyArg::Tree => Family::Tree { n: need(n, "n")? },
                    FamilyArg::Gnp => Family::Gnp {
                        n: need(n, "n")?,
                        p: p.ok_or_else(|| Fail::input("--p is required for gnp"))?,
                        connected,
                    },
                    FamilyArg::Planted => Family::PlantedSeparator {
                        a: need(a, "a")?,
                        k: need(k, "k")?,
                        b: need(b, "b")?,
                        density,
                        exact,
                    },
                    FamilyArg::Petersen => Family::Petersen,
                };
                cmd_gen(&GenSpec::new(family, seed), out.as_deref())
            })()
        }
        Cmd::Oracle { file, kappa } => cmd_oracle(&file, kappa),
        Cmd::Simulate {
            file,
            kappa,
            seed,
            algo,
            max_rounds,
        } => cmd_simulate(&file, kappa, seed, algo, max_rounds),
        Cmd::Bench {
            corpus,
            seeds,
            base_seed,
            max_rounds,
            out,
        } => cmd_bench(&corpus, seeds, base_seed, max_rounds, out.as_deref()),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn print_json(v: &impl serde::Serialize) -> Result<(), Fail> {
    let line = serde_json::to_string(v).map_err(|e| Fail(1, e.to_string()))?;
    writeln!(io::stdout(), "{line}").map_err(|e| Fail(1, e.to_string()))
}

fn read_graph(path: &Path) -> Result<Graph, Fail> {
    let text =
        fs::read_to_string(path).map_err(|e| Fail::input(format!("{}: {e}", path.display())))?;
    parse_edge_list(&text).map_err(|e| Fail::input(format!("{}: {e}", path.display())))
}

fn require_connected(g: &Graph) -> Result<(), Fail> {
    if g.is_connected() {
        Ok(())
    } else {
        Err(Fail(
            3,
            "graph is disconnected; the problem is defined on connected networks".into(),
        ))
    }
}

fn check_kappa(g: &Graph, kappa: usize) -> Result<(), Fail> {
    if g.n() < 3 || kappa < 1 || kappa > g.n() - 2 {
        return Err(Fail::input(format!(
            "kappa must lie in 1..=n-2 (n = {})",
            g.n()
        )));
    }
    Ok(())
}

fn cmd_gen(spec: &GenSpec, out: Option<&Path>) -> Result<u8, Fail> {
    let gen = generate_with_witness(spec).map_err(|e| Fail::input(e.to_string()))?;
    let g = &gen.graph;
    let text = emit_edge_list(g);
    let Some(out) = out else {
        io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Fail(1, e.to_string()))?;
        return Ok(0);
    };
    fs::write(out, text).map_err(|e| Fail(1, format!("{}: {e}", out.display())))?;
    let st = stats(g);
    let conn = (g.n() >= 2).then(|| vertex_connectivity(g, Some(GEN_CONNECTIVITY_CAP)).unwrap());
    print_json(&json!({
        "graph": spec.describe(),
        "n": st.n,
        "m": st.m,
        "diameter": st.diameter,
        "max_degree": st.max_degree,
        "connected": st.is_connected,
        "connectivity": conn.as_ref().map(|c| c.connectivity),
        "connectivity_capped": conn.as_ref().is_some_and(|c| c.capped),
        "planted_cut": gen.planted,
    }))?;
    Ok(0)
}

fn cmd_oracle(path: &Path, kappa: usize) -> Result<u8, Fail> {
    let g = read_graph(path)?;
    require_connected(&g)?;
    check_kappa(&g, kappa)?;
    let v = has_cut_at_most(&g, kappa).map_err(|e| Fail::input(e.to_string()))?;
    let out = match v {
        CutVerdict::Cut(s) => json!({
            "verdict": "cut",
            "kappa": kappa,
            "connectivity_leq": s.len(),
            "cut": s,
        }),
        CutVerdict::NoCutWithin(_) => json!({ "verdict": "none", "kappa": kappa }),
    };
    print_json(&out)?;
    Ok(0)
}

fn cmd_simulate(
    path: &Path,
    kappa: usize,
    seed: u64,
    algo: Algo,
    max_rounds: Option<u64>,
) -> Result<u8, Fail> {
    let g = read_graph(path)?;
    require_connected(&g)?;
    let kappa = if algo == Algo::Kappa1 { 1 } else { kappa };
    check_kappa(&g, kappa)?;
    let info = GraphInfo::new(&g, path.display().to_string(), "file".into());
    let oracle = has_cut_at_most(&g, kappa).map_err(|e| Fail::input(e.to_string()))?;
    let limit = resolve_max_rounds(max_rounds, &info, kappa, algo);
    if limit == 0 {
        return Err(Fail::input("--max-rounds must be at least 1"));
    }
    let rec = run_instance(&g, &info, kappa, seed, algo, oracle.is_cut(), limit)
        .map_err(|e| Fail(1, e.to_string()))?;
    print_json(&rec)?;
    Ok(exit_code(&rec) as u8)
}

fn cmd_bench(
    corpus: &Path,
    seeds: u64,
    base_seed: u64,
    max_rounds: Option<u64>,
    out: Option<&Path>,
) -> Result<u8, Fail> {
    let text = fs::read_to_string(corpus)
        .map_err(|e| Fail::input(format!("{}: {e}", corpus.display())))?;
    let spec: CorpusSpec = serde_json::from_str(&text)
        .map_err(|e| Fail::input(format!("{}: {e}", corpus.display())))?;
    let mut stdout = io::stdout().lock();
    let mut write_err = None;
    let records = run_corpus(&spec, seeds, base_seed, max_rounds, |r| {
        if write_err.is_none() {
            let line = serde_json::to_string(r).expect("records serialize");
            if let Err(e) = writeln!(stdout, "{line}").and_then(|_| stdout.flush()) {
                write_err = Some(e);
            }
        }
    });
    if let Some(e) = write_err {
        return Err(Fail(1, e.to_string()));
    }
    let summary = Summary::from_records(&records);
    let line = serde_json::to_string(&json!({ "summary": summary })).unwrap();
    writeln!(stdout, "{line}").map_err(|e| Fail(1, e.to_string()))?;
    if let Some(out) = out {
        let doc = json!({ "records": records, "summary": summary });
        fs::write(out, serde_json::to_string_pretty(&doc).unwrap())
            .map_err(|e| Fail(1, format!("{}: {e}", out.display())))?;
    }
    Ok(0)
}
