//! Distributed small vertex cuts, run on the CONGEST simulator.

mod articulation;
mod balls;
mod baseline;
mod flow;
mod plan;
mod program;

use serde::Serialize;
use thiserror::Error;

pub use articulation::{gf2_rank, Articulation};
pub use balls::{BallFound, BallTrial};
pub use baseline::{baseline_round_bound, BaselineProgram};
pub use flow::{FlowInstance, FlowOutcome, Role};
pub use plan::{
    default_max_rounds, envelope, log2_ceil, sqrt_ceil, BudgetViolation, PhaseKind, PhasePlan,
    PhaseSpan, PlannedPhase, Schedule,
};
pub use program::VcutProgram;

use crate::oracle::{has_cut_at_most, verify_cut};
use crate::sim::{RunMetrics, SimConfig, SimError, Simulation};
use crate::{CutVerdict, Graph};

/// Failure-probability parameter used when none is given.
pub const DEFAULT_C: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Verdict(CutVerdict),
    /// The round limit was reached before all nodes halted.
    Timeout,
}

impl Outcome {
    pub fn verdict(&self) -> Option<&CutVerdict> {
        match self {
            Outcome::Verdict(v) => Some(v),
            Outcome::Timeout => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CutRun {
    pub outcome: Outcome,
    pub metrics: RunMetrics,
    /// Phase boundaries; empty for the baseline.
    pub phases: Vec<PhaseSpan>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("nodes disagree on the verdict")]
    Disagreement,
    #[error("undecodable output: {0}")]
    Output(String),
    #[error(transparent)]
    Budget(#[from] BudgetViolation),
}

fn check_input(g: &Graph, kappa: usize) -> Result<(), DistError> {
    let n = g.n();
    if n < 3 {
        return Err(DistError::Precondition(format!("n = {n} < 3")));
    }
    if !g.is_connected() {
        return Err(DistError::Precondition("graph is disconnected".into()));
    }
    if kappa < 1 || kappa > n - 2 {
        return Err(DistError::Precondition(format!(
            "kappa = {kappa} outside 1..={}",
            n - 2
        )));
    }
    if kappa > u16::MAX as usize {
        return Err(DistError::Precondition("kappa exceeds 16 bits".into()));
    }
    Ok(())
}

/// Checks that every node output the same message and decodes it.
fn collect_verdict(
    outputs: &[Option<crate::sim::Message>],
    halted_all: bool,
    id_bits: usize,
) -> Result<Outcome, DistError> {
    if !halted_all {
        return Ok(Outcome::Timeout);
    }
    let first = outputs[0].as_ref().ok_or(DistError::Disagreement)?;
    if outputs.iter().any(|o| o.as_ref() != Some(first)) {
        return Err(DistError::Disagreement);
    }
    let (v, _) =
        CutVerdict::decode(first, id_bits).map_err(|e| DistError::Output(e.to_string()))?;
    Ok(Outcome::Verdict(v))
}

/// Options beyond the simulator configuration.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub c: u32,
    /// Budgets to enforce per phase; built from the graph when `None`.
    pub plan: Option<PhasePlan>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            c: DEFAULT_C,
            plan: None,
        }
    }
}

/// Plan for `g` under `cfg`; computes the diameter.
pub fn plan_for(g: &Graph, kappa: usize, cfg: &SimConfig, c: u32) -> PhasePlan {
    let st = crate::graph::stats(g);
    let d = st.diameter.unwrap_or(g.n()) as u64;
    PhasePlan::new(g.n(), d, st.max_degree, cfg.bandwidth_bits, kappa, c)
}

/// Runs the distributed search for a separator of at most `kappa` vertices.
/// Every node must agree, and each phase must stay within its budget.
pub fn find_vertex_cut(g: &Graph, kappa: usize, cfg: &SimConfig) -> Result<CutRun, DistError> {
    find_vertex_cut_with(g, kappa, cfg, &RunOptions::default())
}

pub fn find_vertex_cut_with(
    g: &Graph,
    kappa: usize,
    cfg: &SimConfig,
    opts: &RunOptions,
) -> Result<CutRun, DistError> {
    check_input(g, kappa)?;
    let res = Simulation::new(g, cfg.clone()).run(|v| VcutProgram::new(v, kappa, opts.c))?;
    let id_bits = crate::sim::id_bits(g.n());
    let outcome = collect_verdict(&res.outputs, res.metrics.halted_all, id_bits)?;
    let phases = res.programs[0].log.clone();
    if outcome != Outcome::Timeout {
        let owned;
        let plan = match &opts.plan {
            Some(p) => p,
            None => {
                owned = plan_for(g, kappa, cfg, opts.c);
                &owned
            }
        };
        plan.check(&phases)?;
    }
    Ok(CutRun {
        outcome,
        metrics: res.metrics,
        phases,
    })
}

/// Cut-vertex detection alone: `Cut({v})` for an articulation vertex or
/// `NoCutWithin(1)`.
pub fn kappa_one_cut(g: &Graph, cfg: &SimConfig) -> Result<CutRun, DistError> {
    find_vertex_cut(g, 1, cfg)
}

/// The exact gather-to-leader baseline.
pub fn find_cut_baseline_gather(
    g: &Graph,
    kappa: usize,
    cfg: &SimConfig,
) -> Result<CutRun, DistError> {
    check_input(g, kappa)?;
    let res = Simulation::new(g, cfg.clone()).run(|v| BaselineProgram::new(v, kappa))?;
    let outcome = collect_verdict(
        &res.outputs,
        res.metrics.halted_all,
        crate::sim::id_bits(g.n()),
    )?;
    Ok(CutRun {
        outcome,
        metrics: res.metrics,
        phases: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mismatch {
    /// Reported no cut although one exists.
    FalseNegative,
    /// Reported a cut although none exists (impossible for verified cuts).
    FalsePositive,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeedRun {
    pub seed: u64,
    pub outcome: Outcome,
    /// Whether a reported cut passed verification.
    pub verified: Option<bool>,
    pub mismatch: Option<Mismatch>,
    pub rounds: u64,
    pub messages: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundStats {
    pub min: u64,
    pub max: u64,
    pub mean: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifiedReport {
    pub kappa: usize,
    pub oracle: CutVerdict,
    pub runs: Vec<SeedRun>,
    pub false_negatives: usize,
    pub false_positives: usize,
    pub timeouts: usize,
    pub all_cuts_verified: bool,
    pub rounds: RoundStats,
}

/// Runs one seed per entry of `seeds` and compares each verdict with the
/// oracle's. Mismatches are recorded, not raised.
pub fn run_with_verification(
    g: &Graph,
    kappa: usize,
    seeds: &[u64],
    cfg: &SimConfig,
) -> Result<VerifiedReport, DistError> {
    if seeds.is_empty() {
        return Err(DistError::Precondition("no seeds".into()));
    }
    check_input(g, kappa)?;
    let oracle = has_cut_at_most(g, kappa).map_err(|e| DistError::Precondition(e.to_string()))?;
    let opts = RunOptions {
        c: DEFAULT_C,
        plan: Some(plan_for(g, kappa, cfg, DEFAULT_C)),
    };
    let mut runs = Vec::new();
    for &seed in seeds {
        let run = find_vertex_cut_with(g, kappa, &cfg.clone().with_seed(seed), &opts)?;
        let verified = match &run.outcome {
            Outcome::Verdict(CutVerdict::Cut(s)) => {
                Some(s.len() <= kappa && verify_cut(g, s).unwrap_or(false))
            }
            _ => None,
        };
        let mismatch = match (&run.outcome, &oracle) {
            (Outcome::Verdict(CutVerdict::NoCutWithin(_)), CutVerdict::Cut(_)) => {
                Some(Mismatch::FalseNegative)
            }
            (Outcome::Verdict(CutVerdict::Cut(_)), CutVerdict::NoCutWithin(_)) => {
                Some(Mismatch::FalsePositive)
            }
            _ => None,
        };
        runs.push(SeedRun {
            seed,
            outcome: run.outcome,
            verified,
            mismatch,
            rounds: run.metrics.rounds_used,
            messages: run.metrics.total_messages,
        });
    }
    let rounds: Vec<u64> = runs.iter().map(|r| r.rounds).collect();
    Ok(VerifiedReport {
        kappa,
        oracle,
        false_negatives: runs
            .iter()
            .filter(|r| r.mismatch == Some(Mismatch::FalseNegative))
            .count(),
        false_positives: runs
            .iter()
            .filter(|r| r.mismatch == Some(Mismatch::FalsePositive))
            .count(),
        timeouts: runs
            .iter()
            .filter(|r| r.outcome == Outcome::Timeout)
            .count(),
        all_cuts_verified: runs.iter().all(|r| r.verified != Some(false)),
        rounds: RoundStats {
            min: *rounds.iter().min().unwrap(),
            max: *rounds.iter().max().unwrap(),
            mean: rounds.iter().sum::<u64>() as f64 / rounds.len() as f64,
        },
        runs,
    })
}
