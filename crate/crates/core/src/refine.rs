//! Flaw resolvers.
//!
//! Every resolver produces a new plan and leaves its input untouched. A
//! resolver whose result would have an inconsistent network yields `None`.

use crate::model::{GroundProblem, MethodId, PropId, Relation, TaskKind};
use crate::plan::{endpoint, CausalLink, Flaw, LinkKind, PartialPlan, TaskSym};
use crate::scalar::Scalar;
use crate::tpn::TemporalConstraint;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Resolver {
    AddLink { producer: TaskSym, consumer: TaskSym, prop: PropId },
    /// Orders the threat after the consumer of the link. For a protect link
    /// the threat may coincide with the consumer, since invariants only need
    /// to hold over the open interval.
    Promote { threat: TaskSym, link: CausalLink },
    /// Orders the threat before the producer of the link.
    Demote { threat: TaskSym, link: CausalLink },
    ApplyMethod { task: TaskSym, method: MethodId },
    CompileDurative { task: TaskSym },
}

/// Candidate resolvers for a flaw, in a fixed order. Candidates that are
/// immediately inconsistent are filtered out.
pub fn resolvers_for<T: Scalar>(
    problem: &GroundProblem<T>,
    plan: &PartialPlan<T>,
    flaw: &Flaw,
) -> Vec<Resolver> {
    let net = plan.network();
    match *flaw {
        Flaw::OpenPrecondition { task, prop } => {
            let consumer = plan.task(task).expect("flaw on unknown task").point();
            plan.snap_tasks(problem)
                .filter(|&(s, t, a)| s != task && a.add.contains(prop) && net.allows(t.point(), Relation::Lt, consumer))
                .map(|(s, _, _)| Resolver::AddLink { producer: s, consumer: task, prop })
                .collect()
        }
        Flaw::CausalThreat { threat, link } => {
            let k = plan.task(threat).expect("flaw on unknown task").point();
            let p = plan.task(link.producer).expect("dangling link").point();
            let c = plan.task(link.consumer).expect("dangling link").point();
            let mut out = Vec::with_capacity(2);
            if net.allows(c, promote_relation(&link), k) {
                out.push(Resolver::Promote { threat, link });
            }
            if net.allows(k, Relation::Lt, p) {
                out.push(Resolver::Demote { threat, link });
            }
            out
        }
        Flaw::Decomposition { task } => {
            let name = plan.task(task).expect("flaw on unknown task").name;
            problem
                .methods_for(name)
                .iter()
                .map(|&method| Resolver::ApplyMethod { task, method })
                .collect()
        }
        Flaw::Durative { task } => vec![Resolver::CompileDurative { task }],
    }
}

fn promote_relation(link: &CausalLink) -> Relation {
    match link.kind {
        LinkKind::Support => Relation::Lt,
        LinkKind::Protect => Relation::Le,
    }
}

pub fn apply_resolver<T: Scalar>(
    problem: &GroundProblem<T>,
    plan: &PartialPlan<T>,
    resolver: &Resolver,
) -> Option<PartialPlan<T>> {
    match *resolver {
        Resolver::AddLink { producer, consumer, prop } => add_link(plan, producer, consumer, prop),
        Resolver::Promote { threat, link } => order(plan, link.consumer, promote_relation(&link), threat),
        Resolver::Demote { threat, link } => order(plan, threat, Relation::Lt, link.producer),
        Resolver::ApplyMethod { task, method } => apply_method(problem, plan, task, method),
        Resolver::CompileDurative { task } => compile_durative(problem, plan, task),
    }
}

/// Adds `producer -p-> consumer` and orders the producer strictly first.
pub fn add_link<T: Scalar>(
    plan: &PartialPlan<T>,
    producer: TaskSym,
    consumer: TaskSym,
    prop: PropId,
) -> Option<PartialPlan<T>> {
    let mut child = order(plan, producer, Relation::Lt, consumer)?;
    child.push_link(CausalLink { producer, consumer, prop, kind: LinkKind::Support });
    Some(child)
}

/// Constrains the points of two snap tasks.
pub fn order<T: Scalar>(
    plan: &PartialPlan<T>,
    a: TaskSym,
    relation: Relation,
    b: TaskSym,
) -> Option<PartialPlan<T>> {
    let pa = plan.task(a)?.point();
    let pb = plan.task(b)?.point();
    let mut child = plan.clone();
    child.constrain(TemporalConstraint::new(pa, relation, pb)).then_some(child)
}

/// Replaces an abstract task by the subtasks of one of its methods. Each
/// subtask is contained in the task's interval and the method's constraints
/// are instantiated on fresh time points.
pub fn apply_method<T: Scalar>(
    problem: &GroundProblem<T>,
    plan: &PartialPlan<T>,
    task: TaskSym,
    method: MethodId,
) -> Option<PartialPlan<T>> {
    let m = problem.method(method);
    let t = plan.task(task)?.clone();
    assert_eq!(m.task, t.name, "method {} does not refine this task", m.name);
    let mut child = plan.clone();
    child.remove_task(task);
    let syms: Vec<TaskSym> = m.subtasks().iter().map(|&u| child.add_task(problem, u)).collect();
    let mut ok = child.constrain(TemporalConstraint::new(t.start, Relation::Le, t.end));
    for &s in &syms {
        let u = child.task(s)?.clone();
        ok &= child.constrain(TemporalConstraint::new(t.start, Relation::Le, u.start));
        ok &= child.constrain(TemporalConstraint::new(u.end, Relation::Le, t.end));
    }
    for c in m.constraints() {
        let l = endpoint(&child, syms[c.left.subtask], c.left.endpoint);
        let r = endpoint(&child, syms[c.right.subtask], c.right.endpoint);
        ok &= child.constrain(TemporalConstraint::new(l, c.relation, r));
    }
    ok.then_some(child)
}

/// Replaces a durative task by its start and end snaps, separated by the
/// action's duration. The invariants become extra preconditions of the start
/// snap and are protected by links up to the end snap.
pub fn compile_durative<T: Scalar>(
    problem: &GroundProblem<T>,
    plan: &PartialPlan<T>,
    task: TaskSym,
) -> Option<PartialPlan<T>> {
    let t = plan.task(task)?.clone();
    let TaskKind::Durative(d) = problem.kind(t.name) else {
        panic!("compile_durative on a non-durative task");
    };
    let action = problem.durative(d);
    let mut child = plan.clone();
    child.remove_task(task);
    let start_name = problem.snap(action.start).name;
    let end_name = problem.snap(action.end).name;
    let s = child.add_task_at(start_name, t.start, t.start, action.invariants.clone());
    let e = child.add_task_at(end_name, t.end, t.end, Default::default());
    let mut ok = child.constrain(TemporalConstraint::new(t.start, Relation::Lt, t.end));
    ok &= child.constrain(TemporalConstraint::duration(t.start, t.end, action.duration));
    for prop in action.invariants.iter() {
        child.push_link(CausalLink { producer: s, consumer: e, prop, kind: LinkKind::Protect });
    }
    ok.then_some(child)
}
