//! Instantiation of lifted schemas over typed objects.

use std::collections::{BTreeSet, HashMap};

use log::debug;

use super::ast::*;
use super::sexpr::Pos;
use super::HddlError;
use crate::model::{
    Atom, GroundProblem, MethodConstraint, ProblemBuilder, PropId, PropSet, SubtaskPoint, TaskNetwork,
};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundOptions {
    /// Upper bound on the number of schema instantiations tried.
    pub max_instances: usize,
    /// Drop actions that are unreachable from the initial state under the
    /// delete relaxation.
    pub prune_unreachable: bool,
}

impl Default for GroundOptions {
    fn default() -> Self {
        GroundOptions { max_instances: 1_000_000, prune_unreachable: false }
    }
}

type Effects = (PropSet, PropSet, PropSet);

struct SnapSpec {
    name: Atom,
    effects: Effects,
}

struct DurativeSpec<T> {
    name: Atom,
    start: Effects,
    end: Effects,
    invariants: PropSet,
    duration: T,
}

struct Grounder<'a, T> {
    domain: &'a DomainAst,
    objects: Vec<(&'a str, &'a str)>,
    builder: ProblemBuilder<T>,
    budget: usize,
    limit: usize,
}

type Binding<'a> = HashMap<&'a str, &'a str>;

impl<'a, T: Scalar> Grounder<'a, T> {
    fn candidates(&self, ty: &str) -> Vec<&'a str> {
        self.objects.iter().filter(|(_, t)| self.domain.is_subtype(t, ty)).map(|(o, _)| *o).collect()
    }

    /// Calls `f` for every type-correct binding of `params`, in declaration
    /// order of the objects.
    fn bindings(&mut self, params: &'a [TypedName]) -> Result<Vec<Binding<'a>>, HddlError> {
        let domains: Vec<Vec<&'a str>> = params.iter().map(|p| self.candidates(&p.ty)).collect();
        let total = domains.iter().try_fold(1usize, |acc, d| acc.checked_mul(d.len()));
        let total = total.unwrap_or(usize::MAX);
        if total > self.budget {
            return Err(HddlError::TooLarge(self.limit));
        }
        self.budget -= total;
        let mut out = Vec::with_capacity(total);
        let mut index = vec![0usize; params.len()];
        if total == 0 {
            return Ok(out);
        }
        loop {
            out.push(params.iter().zip(&index).enumerate().map(|(k, (p, &i))| (p.name.as_str(), domains[k][i])).collect());
            let mut k = params.len();
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                index[k] += 1;
                if index[k] < domains[k].len() {
                    break;
                }
                index[k] = 0;
            }
        }
    }

    fn ground_args(args: &[String], binding: &Binding<'_>) -> Vec<String> {
        args.iter()
            .map(|a| if a.starts_with('?') { binding[a.as_str()].to_string() } else { a.clone() })
            .collect()
    }

    fn atom(&mut self, a: &AtomAst, binding: &Binding<'_>) -> Atom {
        let args = Self::ground_args(&a.args, binding);
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        self.builder.atom(&a.head, &refs)
    }

    fn props(&mut self, atoms: &[AtomAst], binding: &Binding<'_>) -> PropSet {
        atoms.iter().map(|a| {
            let atom = self.atom(a, binding);
            self.builder.intern_prop(atom)
        }).collect()
    }

    fn name(&mut self, head: &str, params: &[TypedName], binding: &Binding<'_>) -> Atom {
        let args: Vec<&str> = params.iter().map(|p| binding[p.name.as_str()]).collect();
        self.builder.atom(head, &args)
    }
}

fn well_formed(e: &Effects) -> bool {
    !e.1.intersects(&e.2)
}

/// Props reachable from `init` ignoring deletes.
fn relaxed_reachable<T>(init: &BTreeSet<PropId>, snaps: &[SnapSpec], duratives: &[DurativeSpec<T>]) -> BTreeSet<PropId> {
    let mut reached = init.clone();
    loop {
        let before = reached.len();
        for s in snaps {
            if s.effects.0.iter().all(|p| reached.contains(&p)) {
                reached.extend(s.effects.1.iter());
            }
        }
        for d in duratives {
            if d.start.0.iter().chain(d.invariants.iter()).all(|p| reached.contains(&p)) {
                reached.extend(d.start.1.iter());
                if d.end.0.iter().all(|p| reached.contains(&p)) {
                    reached.extend(d.end.1.iter());
                }
            }
        }
        if reached.len() == before {
            return reached;
        }
    }
}

fn network<'a, T: Scalar>(
    g: &mut Grounder<'a, T>,
    net: &TaskNetworkAst,
    binding: &Binding<'_>,
) -> Option<TaskNetwork> {
    let mut subtasks = Vec::with_capacity(net.subtasks.len());
    for s in &net.subtasks {
        let atom = g.atom(&s.task, binding);
        subtasks.push(g.builder.lookup_task(&atom)?);
    }
    let index = |id: &str| net.subtasks.iter().position(|s| s.id == id).expect("checked by the parser");
    let mut constraints: Vec<MethodConstraint> = Vec::new();
    if net.ordered {
        constraints.extend((1..subtasks.len()).map(|i| MethodConstraint::before(i - 1, i)));
    }
    for o in &net.ordering {
        let point = |p: &PointRef| SubtaskPoint { subtask: index(&p.subtask), endpoint: p.endpoint };
        constraints.push(MethodConstraint::new(point(&o.left), o.relation, point(&o.right)));
    }
    Some(TaskNetwork { subtasks, constraints })
}

pub fn ground<T: Scalar>(
    domain: &DomainAst,
    problem: &ProblemAst,
    options: &GroundOptions,
) -> Result<GroundProblem<T>, HddlError> {
    let objects = domain
        .constants
        .iter()
        .chain(&problem.objects)
        .map(|o| (o.name.as_str(), o.ty.as_str()))
        .collect();
    let mut g = Grounder {
        domain,
        objects,
        builder: ProblemBuilder::new(),
        budget: options.max_instances,
        limit: options.max_instances,
    };

    let mut snaps = Vec::new();
    for a in &domain.actions {
        for b in g.bindings(&a.params)? {
            let name = g.name(&a.name, &a.params, &b);
            let effects = (g.props(&a.pre, &b), g.props(&a.effects.add, &b), g.props(&a.effects.del, &b));
            if well_formed(&effects) {
                snaps.push(SnapSpec { name, effects });
            } else {
                debug!("skipping {} with contradictory effects", a.name);
            }
        }
    }
    let mut duratives = Vec::new();
    for a in &domain.durative_actions {
        let duration = T::parse_literal(&a.duration)
            .ok_or_else(|| HddlError::invalid(Pos::default(), format!("duration `{}` of `{}` is not representable", a.duration, a.name)))?;
        for b in g.bindings(&a.params)? {
            let name = g.name(&a.name, &a.params, &b);
            let start = (g.props(&a.at_start, &b), g.props(&a.start_effects.add, &b), g.props(&a.start_effects.del, &b));
            let end = (g.props(&a.at_end, &b), g.props(&a.end_effects.add, &b), g.props(&a.end_effects.del, &b));
            let invariants = g.props(&a.over_all, &b);
            if well_formed(&start) && well_formed(&end) && !invariants.intersects(&start.2) {
                duratives.push(DurativeSpec { name, start, end, invariants, duration });
            } else {
                debug!("skipping {} with contradictory effects or a self-deleted invariant", a.name);
            }
        }
    }
    let no_binding = Binding::new();
    let init = g.props(&problem.init, &no_binding);
    let goal = g.props(&problem.goal, &no_binding);

    if options.prune_unreachable {
        let reached = relaxed_reachable(&init.iter().collect(), &snaps, &duratives);
        let holds = |s: &PropSet| s.iter().all(|p| reached.contains(&p));
        snaps.retain(|s| holds(&s.effects.0));
        duratives.retain(|d| holds(&d.start.0) && holds(&d.invariants) && holds(&d.end.0));
    }
    for s in snaps {
        g.builder.snap_action(s.name, s.effects.0, s.effects.1, s.effects.2)?;
    }
    for d in duratives {
        g.builder.durative_action(d.name, d.start, d.end, d.invariants, d.duration)?;
    }
    for t in &domain.tasks {
        for b in g.bindings(&t.params)? {
            let name = g.name(&t.name, &t.params, &b);
            g.builder.abstract_task(name)?;
        }
    }
    for m in &domain.methods {
        for b in g.bindings(&m.params)? {
            let task_atom = g.atom(&m.task, &b);
            let Some(task) = g.builder.lookup_task(&task_atom) else { continue };
            let Some(body) = network(&mut g, &m.network, &b) else { continue };
            let args: Vec<&str> = m.params.iter().map(|p| b[p.name.as_str()]).collect();
            let name = if args.is_empty() { m.name.clone() } else { format!("{} {}", m.name, args.join(" ")) };
            g.builder.method(&name, task, body)?;
        }
    }
    let Some(net) = network(&mut g, &problem.htn, &no_binding) else {
        let missing = problem
            .htn
            .subtasks
            .iter()
            .find(|s| {
                let atom = g.atom(&s.task, &no_binding);
                g.builder.lookup_task(&atom).is_none()
            })
            .map(|s| s.task.to_string())
            .unwrap_or_default();
        return Err(HddlError::invalid(Pos::default(), format!("initial task {missing} has no ground instance")));
    };
    g.builder.network(net);
    g.builder.init(init.iter());
    g.builder.goal(goal.iter());
    Ok(g.builder.build()?)
}
