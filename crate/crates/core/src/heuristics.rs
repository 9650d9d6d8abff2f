//! Plan-selection heuristics over the task decomposition graph, and flaw
//! selection strategies.

use std::fmt;
use std::str::FromStr;

use crate::model::{GroundProblem, PropId, TaskId, TaskKind};
use crate::plan::{Flaw, PartialPlan, TaskSym};
use crate::refine::{resolvers_for, Resolver};
use crate::scalar::Scalar;

/// A non-negative integer estimate, possibly infinite.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cost(u64);

impl Cost {
    pub const ZERO: Cost = Cost(0);
    pub const INFINITY: Cost = Cost(u64::MAX);

    pub fn new(value: u64) -> Cost {
        Cost(value.min(u64::MAX - 1))
    }

    pub fn is_infinite(self) -> bool {
        self == Cost::INFINITY
    }

    pub fn value(self) -> Option<u64> {
        (!self.is_infinite()).then_some(self.0)
    }

    pub fn scale(self, k: u64) -> Cost {
        if self.is_infinite() {
            return self;
        }
        if k == 0 {
            return Cost::ZERO;
        }
        self.0.checked_mul(k).map_or(Cost::INFINITY, Cost::new)
    }
}

impl std::ops::Add for Cost {
    type Output = Cost;

    fn add(self, rhs: Cost) -> Cost {
        if self.is_infinite() || rhs.is_infinite() {
            return Cost::INFINITY;
        }
        self.0.checked_add(rhs.0).map_or(Cost::INFINITY, Cost::new)
    }
}

impl std::iter::Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{v}"),
            None => f.write_str("inf"),
        }
    }
}

/// Per-task estimates computed once from the ground problem.
#[derive(Clone, Debug)]
pub struct Tdg {
    tc: Vec<Cost>,
    modifications: Vec<Cost>,
    may_add: Vec<Bits>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Bits {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    /// `self |= other`; returns whether anything changed.
    fn absorb(&mut self, other: &Bits) -> bool {
        let mut changed = false;
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            let next = *a | b;
            changed |= next != *a;
            *a = next;
        }
        changed
    }
}

/// Least fixpoint of `value(task) = leaf(task)` for primitive tasks and
/// `base + min over methods of Σ value(subtask)` for abstract ones.
fn min_sum_fixpoint<T: Scalar>(
    problem: &GroundProblem<T>,
    leaf: impl Fn(TaskId) -> Cost,
    base: Cost,
) -> Vec<Cost> {
    let mut value: Vec<Cost> = problem
        .task_ids()
        .map(|t| match problem.kind(t) {
            TaskKind::Abstract => Cost::INFINITY,
            _ => leaf(t),
        })
        .collect();
    loop {
        let mut changed = false;
        for t in problem.task_ids() {
            if problem.kind(t) != TaskKind::Abstract {
                continue;
            }
            let best = problem
                .methods_for(t)
                .iter()
                .map(|&m| problem.method(m).subtasks().iter().map(|u| value[u.index()]).sum::<Cost>())
                .min()
                .unwrap_or(Cost::INFINITY);
            let next = if best.is_infinite() { best } else { base + best };
            if next < value[t.index()] {
                value[t.index()] = next;
                changed = true;
            }
        }
        if !changed {
            return value;
        }
    }
}

impl Tdg {
    pub fn build<T: Scalar>(problem: &GroundProblem<T>) -> Tdg {
        let tc = min_sum_fixpoint(
            problem,
            |t| match problem.kind(t) {
                TaskKind::Snap(_) => Cost::new(1),
                _ => Cost::new(2),
            },
            Cost::ZERO,
        );
        let modifications = min_sum_fixpoint(
            problem,
            |t| match problem.kind(t) {
                TaskKind::Snap(s) => Cost::new(problem.snap(s).pre.len() as u64),
                TaskKind::Durative(d) => {
                    let a = problem.durative(d);
                    let start = problem.snap(a.start).pre.union(&a.invariants).len();
                    let end = problem.snap(a.end).pre.difference(&a.invariants).len();
                    Cost::new(1 + start as u64 + end as u64)
                }
                TaskKind::Abstract => unreachable!(),
            },
            Cost::new(1),
        );

        let props = problem.prop_count();
        let mut may_add: Vec<Bits> = problem
            .task_ids()
            .map(|t| {
                let mut bits = Bits::new(props);
                let mut mark = |s: crate::model::SnapId| {
                    for p in problem.snap(s).add.iter() {
                        bits.set(p.index());
                    }
                };
                match problem.kind(t) {
                    TaskKind::Snap(s) => mark(s),
                    TaskKind::Durative(d) => {
                        let a = problem.durative(d);
                        mark(a.start);
                        mark(a.end);
                    }
                    TaskKind::Abstract => {}
                }
                bits
            })
            .collect();
        loop {
            let mut changed = false;
            for m in problem.methods() {
                let mut acc = may_add[m.task.index()].clone();
                for u in m.subtasks() {
                    acc.absorb(&may_add[u.index()]);
                }
                changed |= may_add[m.task.index()].absorb(&acc);
            }
            if !changed {
                break;
            }
        }
        Tdg { tc, modifications, may_add }
    }

    /// Number of snap tasks a task expands into at best.
    pub fn tc(&self, task: TaskId) -> Cost {
        self.tc[task.index()]
    }

    /// Refinement steps (method applications, compilations, one link per
    /// precondition) needed to fully refine a task at best.
    pub fn modifications(&self, task: TaskId) -> Cost {
        self.modifications[task.index()]
    }

    /// Can some refinement of `task` contain a snap action adding `prop`?
    pub fn may_add(&self, task: TaskId, prop: PropId) -> bool {
        self.may_add[task.index()].get(prop.index())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum HeuristicKind {
    Tdgm,
    FTc,
    Fape,
}

impl HeuristicKind {
    pub const ALL: [HeuristicKind; 3] = [HeuristicKind::Tdgm, HeuristicKind::FTc, HeuristicKind::Fape];

    pub fn name(self) -> &'static str {
        match self {
            HeuristicKind::Tdgm => "tdgm",
            HeuristicKind::FTc => "f_tc",
            HeuristicKind::Fape => "fape",
        }
    }
}

impl fmt::Display for HeuristicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HeuristicKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        HeuristicKind::ALL
            .into_iter()
            .find(|h| h.name() == s)
            .ok_or_else(|| format!("unknown heuristic `{s}` (expected tdgm, f_tc or fape)"))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum FlawStrategy {
    Lcfr,
    Fape,
}

impl FlawStrategy {
    pub fn name(self) -> &'static str {
        match self {
            FlawStrategy::Lcfr => "lcfr",
            FlawStrategy::Fape => "fape",
        }
    }
}

impl fmt::Display for FlawStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FlawStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lcfr" => Ok(FlawStrategy::Lcfr),
            "fape" => Ok(FlawStrategy::Fape),
            _ => Err(format!("unknown flaw strategy `{s}` (expected lcfr or fape)")),
        }
    }
}

/// Weights of the FAPE-style estimate.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct FapeWeights {
    pub unrefined: u64,
    pub open: u64,
    pub threat: u64,
}

impl Default for FapeWeights {
    fn default() -> Self {
        FapeWeights { unrefined: 3, open: 1, threat: 1 }
    }
}

/// `|flaws| + Σ tc` over the tasks that are not snap tasks.
pub fn h_f_tc<T: Scalar>(problem: &GroundProblem<T>, plan: &PartialPlan<T>, flaws: &[Flaw], tdg: &Tdg) -> Cost {
    let tc: Cost = plan
        .tasks()
        .filter(|(_, t)| !problem.is_snap(t.name))
        .map(|(_, t)| tdg.tc(t.name))
        .sum();
    Cost::new(flaws.len() as u64) + tc
}

/// Estimated number of remaining modifications: the refinement cost of every
/// unrefined task plus one link per precondition not linked yet.
pub fn h_tdgm<T: Scalar>(problem: &GroundProblem<T>, plan: &PartialPlan<T>, flaws: &[Flaw], tdg: &Tdg) -> Cost {
    let refinements: Cost = plan
        .tasks()
        .filter(|(_, t)| !problem.is_snap(t.name))
        .map(|(_, t)| tdg.modifications(t.name))
        .sum();
    let open = flaws.iter().filter(|f| matches!(f, Flaw::OpenPrecondition { .. })).count();
    refinements + Cost::new(open as u64)
}

pub fn h_fape(flaws: &[Flaw], weights: &FapeWeights) -> Cost {
    let (mut unrefined, mut open, mut threats) = (0u64, 0u64, 0u64);
    for f in flaws {
        match f {
            Flaw::Durative { .. } | Flaw::Decomposition { .. } => unrefined += 1,
            Flaw::OpenPrecondition { .. } => open += 1,
            Flaw::CausalThreat { .. } => threats += 1,
        }
    }
    Cost::new(unrefined).scale(weights.unrefined)
        + Cost::new(open).scale(weights.open)
        + Cost::new(threats).scale(weights.threat)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Heuristic {
    pub kind: HeuristicKind,
    pub weights: FapeWeights,
}

impl Heuristic {
    pub fn new(kind: HeuristicKind) -> Heuristic {
        Heuristic { kind, weights: FapeWeights::default() }
    }

    pub fn evaluate<T: Scalar>(
        &self,
        problem: &GroundProblem<T>,
        plan: &PartialPlan<T>,
        flaws: &[Flaw],
        tdg: &Tdg,
    ) -> Cost {
        match self.kind {
            HeuristicKind::Tdgm => h_tdgm(problem, plan, flaws, tdg),
            HeuristicKind::FTc => h_f_tc(problem, plan, flaws, tdg),
            HeuristicKind::Fape => h_fape(flaws, &self.weights),
        }
    }
}

/// Rank of a plan in the open list: heuristic value, then creation order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanRank {
    pub h: Cost,
    pub index: u64,
}

/// An open precondition can only be resolved by links from tasks already in
/// the plan. While an unrefined task might still introduce a producer, the
/// flaw's resolver set is incomplete and it is not offered for selection.
fn is_ripe<T: Scalar>(
    plan: &PartialPlan<T>,
    flaw: &Flaw,
    pending: &[TaskSym],
    tdg: &Tdg,
) -> bool {
    let Flaw::OpenPrecondition { prop, .. } = *flaw else { return true };
    !pending.iter().any(|&s| tdg.may_add(plan.task(s).expect("live task").name, prop))
}

fn tier(flaw: &Flaw) -> u8 {
    match flaw {
        Flaw::Durative { .. } | Flaw::Decomposition { .. } => 0,
        Flaw::OpenPrecondition { .. } => 1,
        Flaw::CausalThreat { .. } => 2,
    }
}

/// Picks the flaw to resolve next and returns it with its resolvers.
///
/// LCFR takes the flaw with the fewest resolvers; FAPE first restricts to
/// the earliest non-empty tier (unrefined tasks, open preconditions,
/// threats). Ties go to the kind order of [`Flaw`], then to the oldest task.
pub fn select_flaw<T: Scalar>(
    problem: &GroundProblem<T>,
    plan: &PartialPlan<T>,
    flaws: &[Flaw],
    strategy: FlawStrategy,
    tdg: &Tdg,
) -> (Flaw, Vec<Resolver>) {
    assert!(!flaws.is_empty(), "select_flaw on a flaw-free plan");
    let pending: Vec<TaskSym> = flaws
        .iter()
        .filter_map(|f| match *f {
            Flaw::Durative { task } | Flaw::Decomposition { task } => Some(task),
            _ => None,
        })
        .collect();
    let mut candidates: Vec<&Flaw> = flaws.iter().filter(|f| is_ripe(plan, f, &pending, tdg)).collect();
    if strategy == FlawStrategy::Fape {
        let best = candidates.iter().map(|f| tier(f)).min().expect("a ripe flaw exists");
        candidates.retain(|f| tier(f) == best);
    }
    let mut best: Option<(usize, Flaw, Vec<Resolver>)> = None;
    for &f in &candidates {
        let resolvers = resolvers_for(problem, plan, f);
        let better = match &best {
            None => true,
            Some((n, bf, _)) => (resolvers.len(), f) < (*n, bf),
        };
        if better {
            let n = resolvers.len();
            best = Some((n, *f, resolvers));
            if n == 0 {
                break;
            }
        }
    }
    let (_, flaw, resolvers) = best.expect("a ripe flaw exists");
    (flaw, resolvers)
}
