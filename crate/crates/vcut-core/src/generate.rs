//! Seeded graph families.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::oracle::has_cut_at_most;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Cycle {
        n: usize,
    },
    Path {
        n: usize,
    },
    Clique {
        n: usize,
    },
    /// Uniform labeled tree.
    Tree {
        n: usize,
    },
    Gnp {
        n: usize,
        p: f64,
        /// Redraw until connected.
        #[serde(default)]
        connected: bool,
    },
    /// Sides A and B joined only through the separator S.
    PlantedSeparator {
        a: usize,
        k: usize,
        b: usize,
        /// Edge probability inside A∪S and inside B∪S on top of the backbone.
        #[serde(default)]
        density: f64,
        /// Redraw until the vertex connectivity is exactly `k`.
        #[serde(default)]
        exact: bool,
    },
    Petersen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub seed: u64,
}

impl GenSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        Self { family, seed }
    }

    /// The family tag used in specs and reports.
    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::Cycle { .. } => "cycle",
            Family::Path { .. } => "path",
            Family::Clique { .. } => "clique",
            Family::Tree { .. } => "tree",
            Family::Gnp { .. } => "gnp",
            Family::PlantedSeparator { .. } => "planted_separator",
            Family::Petersen => "petersen",
        }
    }

    /// Short human-readable descriptor, e.g. `planted_separator(a=6,k=2,b=6)`.
    pub fn describe(&self) -> String {
        match &self.family {
            Family::Cycle { n } => format!("cycle(n={n})"),
            Family::Path { n } => format!("path(n={n})"),
            Family::Clique { n } => format!("clique(n={n})"),
            Family::Tree { n } => format!("tree(n={n})"),
            Family::Gnp { n, p, connected } => {
                format!(
                    "gnp(n={n},p={p}{})",
                    if *connected { ",connected" } else { "" }
                )
            }
            Family::PlantedSeparator {
                a, k, b, density, ..
            } => format!("planted_separator(a={a},k={k},b={b},density={density})"),
            Family::Petersen => "petersen".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("no acceptable graph after {0} attempts")]
    RetriesExhausted(usize),
}

pub const GNP_CONNECTED_RETRIES: usize = 200;
pub const PLANTED_EXACT_RETRIES: usize = 32;

/// A graph generated from `spec`, plus the planted separator when there is one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub graph: Graph,
    pub planted: Option<Vec<usize>>,
}

fn invalid(msg: impl Into<String>) -> GenError {
    GenError::Invalid(msg.into())
}

fn check_p(p: f64, name: &str) -> Result<(), GenError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie in [0, 1], got {p}")))
    }
}

pub fn generate(spec: &GenSpec) -> Result<Graph, GenError> {
    generate_with_witness(spec).map(|g| g.graph)
}

pub fn generate_with_witness(spec: &GenSpec) -> Result<Generated, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let plain = |graph| {
        Ok(Generated {
            graph,
            planted: None,
        })
    };
    match spec.family {
        Family::Cycle { n } => {
            if n < 3 {
                return Err(invalid(format!("cycle needs n >= 3, got {n}")));
            }
            plain(cycle(n))
        }
        Family::Path { n } => {
            if n < 1 {
                return Err(invalid("path needs n >= 1"));
            }
            plain(path(n))
        }
        Family::Clique { n } => {
            if n < 1 {
                return Err(invalid("clique needs n >= 1"));
            }
            plain(clique(n))
        }
        Family::Tree { n } => {
            if n < 1 {
                return Err(invalid("tree needs n >= 1"));
            }
            plain(random_tree(n, &mut rng))
        }
        Family::Gnp { n, p, connected } => {
            if n < 1 {
                return Err(invalid("gnp needs n >= 1"));
            }
            check_p(p, "p")?;
            if !connected {
                return plain(gnp(n, p, &mut rng));
            }
            for _ in 0..GNP_CONNECTED_RETRIES {
                let g = gnp(n, p, &mut rng);
                if g.is_connected() {
                    return plain(g);
                }
            }
            Err(GenError::RetriesExhausted(GNP_CONNECTED_RETRIES))
        }
        Family::PlantedSeparator {
            a,
            k,
            b,
            density,
            exact,
        } => {
            if a < 1 || b < 1 || k < 1 {
                return Err(invalid("planted_separator needs a, k, b >= 1"));
            }
            check_p(density, "density")?;
            let attempts = if exact { PLANTED_EXACT_RETRIES } else { 1 };
            for _ in 0..attempts {
                let (graph, s) = planted(a, k, b, density, &mut rng);
                if !exact
                    || k == 1
                    || matches!(
                        has_cut_at_most(&graph, k - 1),
                        Ok(crate::verdict::CutVerdict::NoCutWithin(_))
                    )
                {
                    return Ok(Generated {
                        graph,
                        planted: Some(s),
                    });
                }
            }
            Err(GenError::RetriesExhausted(PLANTED_EXACT_RETRIES))
        }
        Family::Petersen => plain(petersen()),
    }
}

pub fn cycle(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid cycle")
}

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("valid path")
}

pub fn clique(n: usize) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            g.add_edge(u, v);
        }
    }
    g
}

/// Outer 5-cycle, spokes, inner pentagram.
pub fn petersen() -> Graph {
    let mut g = Graph::new(10);
    for i in 0..5 {
        g.add_edge(i, (i + 1) % 5);
        g.add_edge(i, i + 5);
        g.add_edge(i + 5, 5 + (i + 2) % 5);
    }
    g
}

/// Decodes a uniformly random Prüfer sequence.
pub fn random_tree<R: Rng>(n: usize, rng: &mut R) -> Graph {
    let mut g = Graph::new(n);
    if n < 2 {
        return g;
    }
    if n == 2 {
        g.add_edge(0, 1);
        return g;
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &x in &seq {
        degree[x] += 1;
    }
    let mut leaves: std::collections::BTreeSet<usize> =
        (0..n).filter(|&v| degree[v] == 1).collect();
    for &x in &seq {
        let leaf = leaves.pop_first().expect("a leaf always exists");
        g.add_edge(leaf, x);
        degree[x] -= 1;
        if degree[x] == 1 {
            leaves.insert(x);
        }
    }
    let rest: Vec<usize> = leaves.into_iter().collect();
    g.add_edge(rest[0], rest[1]);
    g
}

pub fn gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Adds `rounds` random Hamiltonian cycles (an edge for two vertices) on `side`.
fn backbone<R: Rng>(g: &mut Graph, side: &[usize], rounds: usize, rng: &mut R) {
    let mut order = side.to_vec();
    for _ in 0..rounds {
        order.shuffle(rng);
        match order.len() {
            0 | 1 => {}
            2 => {
                g.add_edge(order[0], order[1]);
            }
            len => {
                for i in 0..len {
                    g.add_edge(order[i], order[(i + 1) % len]);
                }
            }
        }
    }
}

fn sprinkle<R: Rng>(g: &mut Graph, side: &[usize], p: f64, rng: &mut R) {
    if p == 0.0 {
        return;
    }
    for (i, &u) in side.iter().enumerate() {
        for &v in &side[i + 1..] {
            if rng.gen_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
}

fn planted<R: Rng>(a: usize, k: usize, b: usize, density: f64, rng: &mut R) -> (Graph, Vec<usize>) {
    let n = a + k + b;
    let mut label: Vec<usize> = (0..n).collect();
    label.shuffle(rng);
    let part_a = &label[..a];
    let part_s = &label[a..a + k];
    let part_b = &label[a + k..];
    let left: Vec<usize> = part_a.iter().chain(part_s).copied().collect();
    let right: Vec<usize> = part_b.iter().chain(part_s).copied().collect();
    let mut g = Graph::new(n);
    let rounds = (k + 2) / 2;
    for side in [&left, &right] {
        backbone(&mut g, side, rounds, rng);
        sprinkle(&mut g, side, density, rng);
    }
    for &s in part_s {
        for part in [part_a, part_b] {
            if !g.neighbors(s).iter().any(|w| part.contains(w)) {
                g.add_edge(s, part[rng.gen_range(0..part.len())]);
            }
        }
    }
    let mut sep = part_s.to_vec();
    sep.sort_unstable();
    (g, sep)
}
