//! Phase plan: the fixed sequence of phases with their round budgets.

use serde::Serialize;

use super::articulation::Articulation;
use super::balls::BallTrial;
use super::flow::FlowInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseKind {
    Elect,
    Articulation,
    Neighborhood,
    PairTrials,
    BallTrials,
    Verdict,
}

impl PhaseKind {
    pub const ALL: [PhaseKind; 6] = [
        PhaseKind::Elect,
        PhaseKind::Articulation,
        PhaseKind::Neighborhood,
        PhaseKind::PairTrials,
        PhaseKind::BallTrials,
        PhaseKind::Verdict,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PhaseKind::Elect => "elect",
            PhaseKind::Articulation => "articulation",
            PhaseKind::Neighborhood => "neighborhood",
            PhaseKind::PairTrials => "pair-trials",
            PhaseKind::BallTrials => "ball-trials",
            PhaseKind::Verdict => "verdict",
        }
    }

    /// Node state the phase reads and writes.
    pub fn state(self) -> &'static str {
        match self {
            PhaseKind::Elect => "writes leader, parent port, child ports, depth, tree height",
            PhaseKind::Articulation => {
                "reads tree; writes per-port cycle-space labels, cut-vertex flag"
            }
            PhaseKind::Neighborhood => "reads tree, degree; writes low-degree vertex id",
            PhaseKind::PairTrials => {
                "reads tree; writes pair priority, pred/succ ports, reach flags, flow value"
            }
            PhaseKind::BallTrials => {
                "reads tree, degree; writes ball center, ball parent, ball ports, flow state"
            }
            PhaseKind::Verdict => "reads separator membership; writes verdict",
        }
    }
}

/// Rounds `start..=end` spent in one phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PhaseSpan {
    pub kind: PhaseKind,
    pub start: u64,
    pub end: u64,
}

impl PhaseSpan {
    pub fn open(kind: PhaseKind, start: u64) -> Self {
        Self {
            kind,
            start,
            end: start,
        }
    }

    pub fn rounds(&self) -> u64 {
        self.end + 1 - self.start
    }
}

/// Repetition counts and radii, fixed by `n`, the tree height `e` and the
/// failure parameter `c`. None of them depends on κ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Schedule {
    pub pair_trials: u64,
    pub ball_reps: u64,
    pub radii: Vec<u64>,
    pub ball_window_cap: u64,
    pub pair_window_cap: u64,
    pub label_slack: usize,
}

pub fn log2_ceil(n: usize) -> u64 {
    (n.max(2) as f64).log2().ceil() as u64
}

pub fn sqrt_ceil(n: usize) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r < n as u64 {
        r += 1;
    }
    r
}

impl Schedule {
    pub fn new(n: usize, e: u64, c: u32) -> Self {
        let c1 = c as f64 + 1.0;
        let e = e.max(1);
        let pair_trials = (4.0 * c1 * (n.max(2) as f64).ln()).ceil() as u64;
        let ball_reps = (c1 * log2_ceil(n) as f64).ceil() as u64;
        let s = sqrt_ceil(n);
        let radii = (0..)
            .map(|j| 1u64 << j)
            .take_while(|&p| p <= s && p < 2 * e)
            .map(|p| p + 1)
            .collect();
        let path_cap = 2 * (2 * e + s) * log2_ceil(n);
        let w = FlowInstance::window_len(e);
        Self {
            pair_trials,
            ball_reps,
            radii,
            ball_window_cap: 2,
            pair_window_cap: path_cap.div_ceil(w - 1) + 1,
            label_slack: 64 * c as usize,
        }
    }

    /// Ball centers at radius index `j` have degree at most this.
    pub fn candidate_degree(j: usize) -> usize {
        (1usize << (j + 1)) + 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlannedPhase {
    pub kind: PhaseKind,
    pub name: &'static str,
    pub budget: u64,
    pub state: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhasePlan {
    pub phases: Vec<PlannedPhase>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("phase {phase} used {used} rounds, budget {budget}")]
pub struct BudgetViolation {
    pub phase: &'static str,
    pub used: u64,
    pub budget: u64,
}

impl PhasePlan {
    /// Budgets for a graph with `n` vertices, diameter `d`, maximum degree
    /// `max_deg`, and links of `bandwidth` bits. The diameter bounds the
    /// height of the BFS tree from any root.
    pub fn new(n: usize, d: u64, max_deg: usize, bandwidth: usize, kappa: usize, c: u32) -> Self {
        let d = d.max(1);
        let sched = Schedule::new(n, d, c);
        let k = kappa as u64;
        let pair_flow = FlowInstance::max_rounds(d, kappa, sched.pair_window_cap);
        let ball: u64 = sched
            .radii
            .iter()
            .map(|&rho| sched.ball_reps * BallTrial::rounds(rho, kappa, sched.ball_window_cap, d))
            .sum();
        let budgets = [
            (PhaseKind::Elect, 4 * d + 8),
            (
                PhaseKind::Articulation,
                Articulation::rounds(d, max_deg, sched.label_slack, bandwidth),
            ),
            (PhaseKind::Neighborhood, 2 * d + 1),
            (
                PhaseKind::PairTrials,
                sched.pair_trials * (2 * d + 1 + pair_flow),
            ),
            (PhaseKind::BallTrials, ball),
            (PhaseKind::Verdict, 2 * (d + k + 2) + 1),
        ];
        Self {
            phases: budgets
                .into_iter()
                .map(|(kind, budget)| PlannedPhase {
                    kind,
                    name: kind.name(),
                    budget,
                    state: kind.state(),
                })
                .collect(),
        }
    }

    pub fn total(&self) -> u64 {
        self.phases.iter().map(|p| p.budget).sum()
    }

    pub fn budget(&self, kind: PhaseKind) -> u64 {
        self.phases
            .iter()
            .find(|p| p.kind == kind)
            .map_or(0, |p| p.budget)
    }

    /// Checks the rounds a run spent in each phase against its budget.
    pub fn check(&self, log: &[PhaseSpan]) -> Result<(), BudgetViolation> {
        for kind in PhaseKind::ALL {
            let used: u64 = log
                .iter()
                .filter(|s| s.kind == kind)
                .map(|s| s.rounds())
                .sum();
            let budget = self.budget(kind);
            if used > budget {
                return Err(BudgetViolation {
                    phase: kind.name(),
                    used,
                    budget,
                });
            }
        }
        Ok(())
    }
}

/// `κ³ · (D + √n) · ⌈log₂ n⌉³`, the shape of the round bound.
pub fn envelope(n: usize, d: u64, kappa: usize) -> f64 {
    let k = kappa as f64;
    let l = log2_ceil(n) as f64;
    k.powi(3) * (d as f64 + (n as f64).sqrt()) * l.powi(3)
}

/// Default round limit: 64 times the envelope.
pub fn default_max_rounds(n: usize, d: u64, kappa: usize) -> u64 {
    (64.0 * envelope(n, d, kappa)).ceil() as u64
}
