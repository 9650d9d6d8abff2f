//! Best-first plan-space search.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use log::{debug, info};

use crate::heuristics::{select_flaw, FapeWeights, FlawStrategy, Heuristic, HeuristicKind, PlanRank, Tdg};
use crate::model::{GroundProblem, Relation, SnapAction};
use crate::plan::{detect_flaws, initial_plan, PartialPlan, PlanTask};
use crate::refine::apply_resolver;
use crate::scalar::Scalar;
use crate::tpn::{Schedule, TemporalConstraint};

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig<T> {
    pub heuristic: HeuristicKind,
    pub weights: FapeWeights,
    pub flaw_strategy: FlawStrategy,
    /// Minimal separation of strictly ordered time points.
    pub epsilon: T,
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    /// Resident set size limit in bytes (checked on Linux only).
    pub memory_limit: Option<u64>,
    /// Solve the metric network of every generated child, not only of
    /// flaw-free plans.
    pub eager_metric: bool,
    /// Unused: the search is deterministic.
    pub seed: u64,
}

impl<T: Scalar> Default for SearchConfig<T> {
    fn default() -> Self {
        SearchConfig {
            heuristic: HeuristicKind::Tdgm,
            weights: FapeWeights::default(),
            flaw_strategy: FlawStrategy::Lcfr,
            epsilon: T::from_ratio(1, 1000),
            node_limit: None,
            time_limit: Some(Duration::from_secs(64)),
            memory_limit: Some(2 << 30),
            eager_metric: false,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub expanded: u64,
    pub generated: u64,
    pub dead_ends_qualitative: u64,
    pub dead_ends_metric: u64,
    pub peak_open: u64,
    pub wall_time: Duration,
}

impl SearchStats {
    /// `key = value` lines. Wall time is left out unless asked for, so that
    /// the block is reproducible.
    pub fn to_kv(&self, with_wall_time: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "expanded = {}", self.expanded);
        let _ = writeln!(out, "generated = {}", self.generated);
        let _ = writeln!(out, "dead_ends_qualitative = {}", self.dead_ends_qualitative);
        let _ = writeln!(out, "dead_ends_metric = {}", self.dead_ends_metric);
        let _ = writeln!(out, "peak_open = {}", self.peak_open);
        if with_wall_time {
            let _ = writeln!(out, "wall_time = {:.6}", self.wall_time.as_secs_f64());
        }
        out
    }
}

#[derive(Clone, Debug)]
pub enum Outcome<T: Clone> {
    Solved { plan: PartialPlan<T>, schedule: Schedule<T> },
    Unsolvable,
    NodeLimit,
    Timeout,
    Memory,
}

impl<T: Clone> Outcome<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Solved { .. } => "solved",
            Outcome::Unsolvable => "unsolvable",
            Outcome::NodeLimit => "node-limit",
            Outcome::Timeout => "timeout",
            Outcome::Memory => "memory",
        }
    }

    pub fn is_solved(&self) -> bool {
        matches!(self, Outcome::Solved { .. })
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult<T: Clone> {
    pub outcome: Outcome<T>,
    pub stats: SearchStats,
}

struct Entry<T: Clone> {
    rank: PlanRank,
    plan: PartialPlan<T>,
}

impl<T: Clone> PartialEq for Entry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank
    }
}

impl<T: Clone> Eq for Entry<T> {}

impl<T: Clone> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Clone> Ord for Entry<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank.cmp(&other.rank)
    }
}

fn resident_bytes() -> Option<u64> {
    let statm = std::fs::read_to_string("/proc/self/statm").ok()?;
    let pages: u64 = statm.split_whitespace().nth(1)?.parse().ok()?;
    Some(pages * 4096)
}

/// Two snap actions interfere if one deletes a precondition or an add
/// effect of the other; they may then not happen at the same time.
pub fn interferes(a: &SnapAction, a_extra: &PlanTask, b: &SnapAction, b_extra: &PlanTask) -> bool {
    let hits = |x: &SnapAction, y: &SnapAction, y_task: &PlanTask| {
        x.del.intersects(&y.pre) || x.del.intersects(&y_task.extra_pre) || x.del.intersects(&y.add)
    };
    hits(a, b, b_extra) || hits(b, a, a_extra)
}

/// Adds `≠` between every pair of interfering snap tasks.
pub fn separate_interfering<T: Scalar>(problem: &GroundProblem<T>, plan: &PartialPlan<T>) -> Option<PartialPlan<T>> {
    let snaps: Vec<_> = plan.snap_tasks(problem).map(|(_, t, a)| (t.clone(), a)).collect();
    let mut out = plan.clone();
    for (i, (ta, a)) in snaps.iter().enumerate() {
        for (tb, b) in &snaps[i + 1..] {
            if interferes(a, ta, b, tb) && !out.constrain(TemporalConstraint::new(ta.point(), Relation::Ne, tb.point())) {
                return None;
            }
        }
    }
    Some(out)
}

/// Separates interfering snap tasks and solves the metric network of a
/// flaw-free plan. The returned plan carries the separations.
pub fn schedule_plan<T: Scalar>(
    problem: &GroundProblem<T>,
    plan: &PartialPlan<T>,
    epsilon: T,
) -> Option<(PartialPlan<T>, Schedule<T>)> {
    let plan = separate_interfering(problem, plan)?;
    let schedule = plan.network().solve_metric(epsilon)?;
    Some((plan, schedule))
}

/// HTEP: best-first search over partial plans.
pub fn htep<T: Scalar>(problem: &GroundProblem<T>, config: &SearchConfig<T>) -> SearchResult<T> {
    let started = Instant::now();
    let tdg = Tdg::build(problem);
    let heuristic = Heuristic { kind: config.heuristic, weights: config.weights };
    let mut stats = SearchStats::default();
    let mut open: BinaryHeap<Reverse<Entry<T>>> = BinaryHeap::new();
    let mut created = 0u64;

    let root = initial_plan(problem);
    let outcome = 'search: {
        if !root.network().is_consistent() {
            break 'search Outcome::Unsolvable;
        }
        let flaws = detect_flaws(problem, &root);
        let h = heuristic.evaluate(problem, &root, &flaws, &tdg);
        open.push(Reverse(Entry { rank: PlanRank { h, index: created }, plan: root }));
        created += 1;
        stats.generated = 1;
        stats.peak_open = 1;

        while let Some(Reverse(Entry { rank, plan })) = open.pop() {
            if let Some(limit) = config.time_limit {
                if started.elapsed() > limit {
                    break 'search Outcome::Timeout;
                }
            }
            if let Some(limit) = config.memory_limit {
                if stats.expanded % 256 == 0 && resident_bytes().is_some_and(|b| b > limit) {
                    break 'search Outcome::Memory;
                }
            }
            if config.node_limit.is_some_and(|n| stats.expanded >= n) {
                break 'search Outcome::NodeLimit;
            }
            stats.expanded += 1;
            let flaws = detect_flaws(problem, &plan);
            if flaws.is_empty() {
                match schedule_plan(problem, &plan, config.epsilon) {
                    Some((plan, schedule)) => {
                        info!("solution after {} expansions, h = {}", stats.expanded, rank.h);
                        break 'search Outcome::Solved { plan, schedule };
                    }
                    None => {
                        stats.dead_ends_metric += 1;
                        continue;
                    }
                }
            }
            let (flaw, resolvers) = select_flaw(problem, &plan, &flaws, config.flaw_strategy, &tdg);
            debug!("expand #{} h={} flaw={:?} resolvers={}", rank.index, rank.h, flaw, resolvers.len());
            if resolvers.is_empty() {
                stats.dead_ends_qualitative += 1;
            }
            for r in &resolvers {
                let Some(child) = apply_resolver(problem, &plan, r) else {
                    stats.dead_ends_qualitative += 1;
                    continue;
                };
                if config.eager_metric && child.network().solve_metric(config.epsilon).is_none() {
                    stats.dead_ends_metric += 1;
                    continue;
                }
                let child_flaws = detect_flaws(problem, &child);
                let h = heuristic.evaluate(problem, &child, &child_flaws, &tdg);
                if h.is_infinite() {
                    stats.dead_ends_qualitative += 1;
                    continue;
                }
                open.push(Reverse(Entry { rank: PlanRank { h, index: created }, plan: child }));
                created += 1;
                stats.generated += 1;
            }
            stats.peak_open = stats.peak_open.max(open.len() as u64);
        }
        Outcome::Unsolvable
    };
    stats.wall_time = started.elapsed();
    SearchResult { outcome, stats }
}
