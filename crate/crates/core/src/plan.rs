//! Partial temporal plans and flaw detection.
//!
//! A [`PartialPlan`] is a persistent value: tasks, links and the constraint
//! network are structurally shared between a plan and the children derived
//! from it, and refining a child never touches its parent.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::model::{GroundProblem, PropId, PropSet, Relation, TaskId, TaskKind};
use crate::scalar::Scalar;
use crate::tpn::{PointNetwork, TemporalConstraint, TimePoint};

/// A task occurrence in a plan.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TaskSym(pub u32);

impl std::fmt::Display for TaskSym {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "t{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanTask {
    pub name: TaskId,
    pub start: TimePoint,
    /// Equal to `start` for snap tasks.
    pub end: TimePoint,
    /// Preconditions added to this occurrence on top of those of its snap
    /// action (the invariants of a compiled durative action).
    pub extra_pre: PropSet,
}

impl PlanTask {
    /// The time point of a snap task.
    pub fn point(&self) -> TimePoint {
        self.start
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinkKind {
    /// The producer adds the proposition, the consumer requires it.
    Support,
    /// Protects an invariant between the two snaps of a compiled durative
    /// action.
    Protect,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CausalLink {
    pub producer: TaskSym,
    pub consumer: TaskSym,
    pub prop: PropId,
    pub kind: LinkKind,
}

/// Variant order is the tie-break order used by flaw selection.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flaw {
    Durative { task: TaskSym },
    Decomposition { task: TaskSym },
    CausalThreat { threat: TaskSym, link: CausalLink },
    OpenPrecondition { task: TaskSym, prop: PropId },
}

impl Flaw {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Flaw::Durative { .. } => "durative",
            Flaw::Decomposition { .. } => "decomposition",
            Flaw::CausalThreat { .. } => "threat",
            Flaw::OpenPrecondition { .. } => "open-precondition",
        }
    }

    pub fn is_unrefined_task(&self) -> bool {
        matches!(self, Flaw::Durative { .. } | Flaw::Decomposition { .. })
    }
}

#[derive(Clone, Debug)]
pub struct PartialPlan<T: Clone> {
    tasks: im::OrdMap<TaskSym, PlanTask>,
    links: im::Vector<CausalLink>,
    network: PointNetwork<T>,
    next_sym: u32,
    init: TaskSym,
    goal: TaskSym,
}

impl<T: Scalar> PartialEq for PartialPlan<T> {
    fn eq(&self, other: &Self) -> bool {
        self.tasks == other.tasks
            && self.links == other.links
            && self.next_sym == other.next_sym
            && self.network.len() == other.network.len()
            && self.network.constraints().eq(other.network.constraints())
    }
}

impl<T: Scalar> PartialPlan<T> {
    pub fn tasks(&self) -> impl Iterator<Item = (TaskSym, &PlanTask)> {
        self.tasks.iter().map(|(s, t)| (*s, t))
    }

    pub fn task(&self, sym: TaskSym) -> Option<&PlanTask> {
        self.tasks.get(&sym)
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    pub fn links(&self) -> impl Iterator<Item = &CausalLink> {
        self.links.iter()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn network(&self) -> &PointNetwork<T> {
        &self.network
    }

    pub fn init_task(&self) -> TaskSym {
        self.init
    }

    pub fn goal_task(&self) -> TaskSym {
        self.goal
    }

    /// Snap tasks with their snap actions.
    pub fn snap_tasks<'a>(
        &'a self,
        problem: &'a GroundProblem<T>,
    ) -> impl Iterator<Item = (TaskSym, &'a PlanTask, &'a crate::model::SnapAction)> + 'a {
        self.tasks()
            .filter_map(move |(s, t)| problem.snap_of(t.name).map(|a| (s, t, a)))
    }

    /// All preconditions of a snap task occurrence.
    pub fn preconditions(&self, problem: &GroundProblem<T>, sym: TaskSym) -> PropSet {
        let task = &self.tasks[&sym];
        match problem.snap_of(task.name) {
            Some(a) => a.pre.union(&task.extra_pre),
            None => PropSet::empty(),
        }
    }

    pub(crate) fn add_task(&mut self, problem: &GroundProblem<T>, name: TaskId) -> TaskSym {
        let start = self.network.add_point();
        let end = if problem.is_snap(name) { start } else { self.network.add_point() };
        self.add_task_at(name, start, end, PropSet::empty())
    }

    pub(crate) fn add_task_at(
        &mut self,
        name: TaskId,
        start: TimePoint,
        end: TimePoint,
        extra_pre: PropSet,
    ) -> TaskSym {
        let sym = TaskSym(self.next_sym);
        self.next_sym += 1;
        self.tasks.insert(sym, PlanTask { name, start, end, extra_pre });
        sym
    }

    pub(crate) fn remove_task(&mut self, sym: TaskSym) -> PlanTask {
        self.tasks.remove(&sym).expect("task not in plan")
    }

    pub(crate) fn push_link(&mut self, link: CausalLink) {
        self.links.push_back(link);
    }

    /// Adds a constraint; returns false if the network became inconsistent.
    pub(crate) fn constrain(&mut self, c: TemporalConstraint<T>) -> bool {
        self.network.insert(c)
    }
}

/// The initial plan: the two sentinels, the problem's initial task network,
/// `init < goal`, and every other task between the sentinels.
pub fn initial_plan<T: Scalar>(problem: &GroundProblem<T>) -> PartialPlan<T> {
    let mut plan = PartialPlan {
        tasks: im::OrdMap::new(),
        links: im::Vector::new(),
        network: PointNetwork::new(),
        next_sym: 0,
        init: TaskSym(0),
        goal: TaskSym(1),
    };
    let init = plan.add_task(problem, problem.init_task());
    let goal = plan.add_task(problem, problem.goal_task());
    plan.init = init;
    plan.goal = goal;
    let origin = plan.tasks[&init].point();
    let horizon = plan.tasks[&goal].point();
    debug_assert_eq!(origin, plan.network.origin());
    plan.network.set_horizon(horizon);
    plan.constrain(TemporalConstraint::new(origin, Relation::Lt, horizon));

    let syms: Vec<TaskSym> = problem
        .network
        .subtasks
        .iter()
        .map(|&t| plan.add_task(problem, t))
        .collect();
    for c in &problem.network.constraints {
        let l = endpoint(&plan, syms[c.left.subtask], c.left.endpoint);
        let r = endpoint(&plan, syms[c.right.subtask], c.right.endpoint);
        plan.constrain(TemporalConstraint::new(l, c.relation, r));
    }
    for &s in &syms {
        let t = plan.tasks[&s].clone();
        plan.constrain(TemporalConstraint::new(origin, Relation::Le, t.start));
        plan.constrain(TemporalConstraint::new(t.end, Relation::Le, horizon));
    }
    plan
}

pub(crate) fn endpoint<T: Scalar>(
    plan: &PartialPlan<T>,
    sym: TaskSym,
    endpoint: crate::model::Endpoint,
) -> TimePoint {
    let t = &plan.tasks[&sym];
    match endpoint {
        crate::model::Endpoint::Start => t.start,
        crate::model::Endpoint::End => t.end,
    }
}

/// Does snap task `task` threaten `link`? It must delete the linked
/// proposition and be orderable both after the producer and before the
/// consumer.
pub fn threatens<T: Scalar>(
    problem: &GroundProblem<T>,
    plan: &PartialPlan<T>,
    task: TaskSym,
    link: &CausalLink,
) -> bool {
    if task == link.producer || task == link.consumer {
        return false;
    }
    let Some(t) = plan.task(task) else { return false };
    let Some(action) = problem.snap_of(t.name) else { return false };
    if !action.del.contains(link.prop) {
        return false;
    }
    let p = plan.tasks[&link.producer].point();
    let c = plan.tasks[&link.consumer].point();
    let k = t.point();
    let net = plan.network();
    net.allows(p, Relation::Lt, k) && net.allows(k, Relation::Lt, c)
}

/// All flaws of a plan, sorted.
pub fn detect_flaws<T: Scalar>(problem: &GroundProblem<T>, plan: &PartialPlan<T>) -> Vec<Flaw> {
    let mut flaws = Vec::new();
    let supported: HashSet<(TaskSym, PropId)> = plan.links().map(|l| (l.consumer, l.prop)).collect();
    for (sym, task) in plan.tasks() {
        match problem.kind(task.name) {
            TaskKind::Snap(s) => {
                let action = problem.snap(s);
                for prop in action.pre.union(&task.extra_pre).iter() {
                    if !supported.contains(&(sym, prop)) {
                        flaws.push(Flaw::OpenPrecondition { task: sym, prop });
                    }
                }
            }
            TaskKind::Durative(_) => flaws.push(Flaw::Durative { task: sym }),
            TaskKind::Abstract => flaws.push(Flaw::Decomposition { task: sym }),
        }
    }
    let deleters: Vec<(TaskSym, &PropSet)> = plan
        .snap_tasks(problem)
        .filter(|(_, _, a)| !a.del.is_empty())
        .map(|(s, _, a)| (s, &a.del))
        .collect();
    for link in plan.links() {
        for &(k, del) in &deleters {
            if del.contains(link.prop) && threatens(problem, plan, k, link) {
                flaws.push(Flaw::CausalThreat { threat: k, link: *link });
            }
        }
    }
    flaws.sort();
    flaws
}

/// Text rendering of a plan: tasks, constraints between time points and
/// causal links. The format is documented in `docs/plan-dump.md`.
pub fn dump<T: Scalar>(problem: &GroundProblem<T>, plan: &PartialPlan<T>) -> String {
    let mut out = String::new();
    let net = plan.network();
    let _ = writeln!(
        out,
        "plan tasks={} points={} constraints={} links={}",
        plan.task_count(),
        net.len(),
        net.constraint_count(),
        plan.link_count()
    );
    for (sym, task) in plan.tasks() {
        let name = problem.display_task(task.name);
        match problem.kind(task.name) {
            TaskKind::Snap(_) => {
                let _ = write!(out, "task {sym} snap {name} @{}", task.start);
                if !task.extra_pre.is_empty() {
                    let extra: Vec<String> = task.extra_pre.iter().map(|p| problem.display_prop(p)).collect();
                    let _ = write!(out, " +pre {}", extra.join(" "));
                }
                out.push('\n');
            }
            TaskKind::Durative(_) => {
                let _ = writeln!(out, "task {sym} durative {name} @{}..{}", task.start, task.end);
            }
            TaskKind::Abstract => {
                let _ = writeln!(out, "task {sym} abstract {name} @{}..{}", task.start, task.end);
            }
        }
    }
    for c in net.constraints() {
        let _ = writeln!(out, "constraint {c}");
    }
    for l in plan.links() {
        let kind = match l.kind {
            LinkKind::Support => "link",
            LinkKind::Protect => "protect",
        };
        let _ = writeln!(out, "{kind} {} -{}-> {}", l.producer, problem.display_prop(l.prop), l.consumer);
    }
    out
}
