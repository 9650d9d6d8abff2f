//! Lifted domain and problem syntax trees, and their printers.
//!
//! Printing and re-reading a tree yields an equal tree.

use std::fmt::{self, Display, Formatter};

use crate::model::{Endpoint, Relation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedName {
    pub name: String,
    pub ty: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub name: String,
    pub params: Vec<TypedName>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AtomAst {
    pub head: String,
    /// Variables (`?x`) or object names.
    pub args: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EffectsAst {
    pub add: Vec<AtomAst>,
    pub del: Vec<AtomAst>,
}

impl EffectsAst {
    pub fn is_empty(&self) -> bool {
        self.add.is_empty() && self.del.is_empty()
    }
}

/// `:action`: an instantaneous snap action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionAst {
    pub name: String,
    pub params: Vec<TypedName>,
    pub pre: Vec<AtomAst>,
    pub effects: EffectsAst,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DurativeActionAst {
    pub name: String,
    pub params: Vec<TypedName>,
    /// Literal duration as written, e.g. `2`, `2.5` or `5/2`.
    pub duration: String,
    pub at_start: Vec<AtomAst>,
    pub over_all: Vec<AtomAst>,
    pub at_end: Vec<AtomAst>,
    pub start_effects: EffectsAst,
    pub end_effects: EffectsAst,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtaskAst {
    pub id: String,
    pub task: AtomAst,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointRef {
    pub subtask: String,
    pub endpoint: Endpoint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderingAst {
    pub left: PointRef,
    pub relation: Relation,
    pub right: PointRef,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TaskNetworkAst {
    /// `:ordered-subtasks`: each subtask ends before the next starts.
    pub ordered: bool,
    pub subtasks: Vec<SubtaskAst>,
    pub ordering: Vec<OrderingAst>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MethodAst {
    pub name: String,
    pub params: Vec<TypedName>,
    pub task: AtomAst,
    pub network: TaskNetworkAst,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DomainAst {
    pub name: String,
    pub requirements: Vec<String>,
    /// Declared types with their parent (`object` when none is given).
    pub types: Vec<TypedName>,
    pub constants: Vec<TypedName>,
    pub predicates: Vec<Signature>,
    pub tasks: Vec<Signature>,
    pub actions: Vec<ActionAst>,
    pub durative_actions: Vec<DurativeActionAst>,
    pub methods: Vec<MethodAst>,
}

impl DomainAst {
    pub fn predicate(&self, name: &str) -> Option<&Signature> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn task(&self, name: &str) -> Option<&Signature> {
        self.tasks.iter().find(|p| p.name == name)
    }

    pub fn action(&self, name: &str) -> Option<&ActionAst> {
        self.actions.iter().find(|a| a.name == name)
    }

    pub fn durative_action(&self, name: &str) -> Option<&DurativeActionAst> {
        self.durative_actions.iter().find(|a| a.name == name)
    }

    /// Arity of anything that can appear as a subtask.
    pub fn task_arity(&self, name: &str) -> Option<usize> {
        self.task(name)
            .map(|t| t.params.len())
            .or_else(|| self.action(name).map(|a| a.params.len()))
            .or_else(|| self.durative_action(name).map(|a| a.params.len()))
    }

    /// Is `ty` equal to or a descendant of `ancestor`?
    pub fn is_subtype(&self, ty: &str, ancestor: &str) -> bool {
        let mut current = ty;
        for _ in 0..=self.types.len() {
            if current == ancestor {
                return true;
            }
            match self.types.iter().find(|t| t.name == current) {
                Some(t) if t.ty != t.name => current = &t.ty,
                _ => return false,
            }
        }
        false
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProblemAst {
    pub name: String,
    pub domain: String,
    pub objects: Vec<TypedName>,
    pub init: Vec<AtomAst>,
    pub goal: Vec<AtomAst>,
    pub htn: TaskNetworkAst,
}

impl Display for AtomAst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.head)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

impl Display for PointRef {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let which = match self.endpoint {
            Endpoint::Start => "start",
            Endpoint::End => "end",
        };
        write!(f, "({which} {})", self.subtask)
    }
}

impl Display for OrderingAst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "({} {} {})", self.relation.symbol(), self.left, self.right)
    }
}

fn typed_list(f: &mut Formatter<'_>, names: &[TypedName]) -> fmt::Result {
    for (i, n) in names.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{} - {}", n.name, n.ty)?;
    }
    Ok(())
}

fn conjunction<D: Display>(f: &mut Formatter<'_>, items: impl IntoIterator<Item = D>) -> fmt::Result {
    f.write_str("(and")?;
    for item in items {
        write!(f, " {item}")?;
    }
    f.write_str(")")
}

struct Negated<'a>(&'a AtomAst);

impl Display for Negated<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "(not {})", self.0)
    }
}

struct Timed<'a, D>(&'a str, D);

impl<D: Display> Display for Timed<'_, D> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "({} {})", self.0, self.1)
    }
}

fn effects(e: &EffectsAst) -> Vec<String> {
    e.add.iter().map(|a| a.to_string()).chain(e.del.iter().map(|a| Negated(a).to_string())).collect()
}

fn network(f: &mut Formatter<'_>, net: &TaskNetworkAst, indent: &str) -> fmt::Result {
    let key = if net.ordered { ":ordered-subtasks" } else { ":subtasks" };
    write!(f, "\n{indent}{key} ")?;
    conjunction(f, net.subtasks.iter().map(|s| format!("({} {})", s.id, s.task)))?;
    if !net.ordering.is_empty() {
        write!(f, "\n{indent}:ordering ")?;
        conjunction(f, &net.ordering)?;
    }
    Ok(())
}

impl Display for DomainAst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (domain {})", self.name)?;
        if !self.requirements.is_empty() {
            writeln!(f, "  (:requirements {})", self.requirements.join(" "))?;
        }
        if !self.types.is_empty() {
            f.write_str("  (:types ")?;
            typed_list(f, &self.types)?;
            f.write_str(")\n")?;
        }
        if !self.constants.is_empty() {
            f.write_str("  (:constants ")?;
            typed_list(f, &self.constants)?;
            f.write_str(")\n")?;
        }
        if !self.predicates.is_empty() {
            f.write_str("  (:predicates")?;
            for p in &self.predicates {
                write!(f, "\n    ({}", p.name)?;
                if !p.params.is_empty() {
                    f.write_str(" ")?;
                    typed_list(f, &p.params)?;
                }
                f.write_str(")")?;
            }
            f.write_str(")\n")?;
        }
        for t in &self.tasks {
            write!(f, "  (:task {} :parameters (", t.name)?;
            typed_list(f, &t.params)?;
            f.write_str("))\n")?;
        }
        for a in &self.actions {
            write!(f, "  (:action {}\n    :parameters (", a.name)?;
            typed_list(f, &a.params)?;
            f.write_str(")\n    :precondition ")?;
            conjunction(f, &a.pre)?;
            f.write_str("\n    :effect ")?;
            conjunction(f, effects(&a.effects))?;
            f.write_str(")\n")?;
        }
        for a in &self.durative_actions {
            write!(f, "  (:durative-action {}\n    :parameters (", a.name)?;
            typed_list(f, &a.params)?;
            write!(f, ")\n    :duration (= ?duration {})\n    :condition ", a.duration)?;
            let conditions = a
                .at_start
                .iter()
                .map(|c| Timed("at start", c).to_string())
                .chain(a.over_all.iter().map(|c| Timed("over all", c).to_string()))
                .chain(a.at_end.iter().map(|c| Timed("at end", c).to_string()));
            conjunction(f, conditions)?;
            f.write_str("\n    :effect ")?;
            let effs = effects(&a.start_effects)
                .into_iter()
                .map(|e| Timed("at start", e).to_string())
                .chain(effects(&a.end_effects).into_iter().map(|e| Timed("at end", e).to_string()));
            conjunction(f, effs)?;
            f.write_str(")\n")?;
        }
        for m in &self.methods {
            write!(f, "  (:method {}\n    :parameters (", m.name)?;
            typed_list(f, &m.params)?;
            write!(f, ")\n    :task {}", m.task)?;
            network(f, &m.network, "    ")?;
            f.write_str(")\n")?;
        }
        f.write_str(")\n")
    }
}

impl Display for ProblemAst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (problem {})", self.name)?;
        writeln!(f, "  (:domain {})", self.domain)?;
        f.write_str("  (:objects ")?;
        typed_list(f, &self.objects)?;
        f.write_str(")\n  (:htn :parameters ()")?;
        network(f, &self.htn, "    ")?;
        f.write_str(")\n  (:init")?;
        for a in &self.init {
            write!(f, " {a}")?;
        }
        f.write_str(")\n")?;
        if !self.goal.is_empty() {
            f.write_str("  (:goal ")?;
            conjunction(f, &self.goal)?;
            f.write_str(")\n")?;
        }
        f.write_str(")\n")
    }
}
