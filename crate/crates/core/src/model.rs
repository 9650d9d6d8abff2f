//! Ground data model: propositions, snap actions, durative actions, methods
//! and problems.
//!
//! Every name is interned. Propositions and task names are [`Atom`]s stored
//! once in the owning [`GroundProblem`] and referred to by small integer ids,
//! so equality and hashing are O(1).

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;
use crate::tpn::{PointNetwork, TemporalConstraint, TimePoint};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("snap action {0} adds and deletes the same proposition {1}")]
    ContradictoryEffects(String, String),
    #[error("durative action {0} deletes its invariant {1} at start")]
    InvariantDeletedAtStart(String, String),
    #[error("durative action {0} must have a strictly positive duration")]
    NonPositiveDuration(String),
    #[error("task {0} is declared twice")]
    DuplicateTask(String),
    #[error("method {0}: constraint refers to subtask #{1} which does not exist")]
    UnknownSubtask(String, usize),
    #[error("method {0}: ordering constraints are inconsistent")]
    InconsistentMethod(String),
    #[error("initial task network: ordering constraints are inconsistent")]
    InconsistentNetwork,
    #[error("task {0} in the initial task network cannot be refined")]
    Unrefinable(String),
    #[error("snap action {0} is not applicable in the given state")]
    NotApplicable(String),
}

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

id_type!(
    /// Interned symbol: predicate, object, task or action name.
    Sym
);
id_type!(PropId);
id_type!(TaskId);
id_type!(SnapId);
id_type!(DurativeId);
id_type!(MethodId);

#[derive(Clone, Debug, Default)]
pub struct SymbolTable {
    names: Vec<String>,
    ids: HashMap<String, Sym>,
}

impl SymbolTable {
    pub fn intern(&mut self, name: &str) -> Sym {
        if let Some(&s) = self.ids.get(name) {
            return s;
        }
        let s = Sym(self.names.len() as u32);
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), s);
        s
    }

    pub fn get(&self, name: &str) -> Option<Sym> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, sym: Sym) -> &str {
        &self.names[sym.index()]
    }
}

/// A ground name with arguments. Used both for propositions and task names.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub head: Sym,
    pub args: Box<[Sym]>,
}

pub type Proposition = Atom;
pub type TaskName = Atom;

/// Sorted set of propositions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PropSet(Box<[PropId]>);

impl PropSet {
    pub fn empty() -> Self {
        PropSet(Box::new([]))
    }

    pub fn contains(&self, p: PropId) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = PropId> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[PropId] {
        &self.0
    }

    pub fn intersects(&self, other: &PropSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn union(&self, other: &PropSet) -> PropSet {
        self.iter().chain(other.iter()).collect()
    }

    pub fn difference(&self, other: &PropSet) -> PropSet {
        self.iter().filter(|p| !other.contains(*p)).collect()
    }

    pub fn is_subset_of(&self, state: &State) -> bool {
        self.iter().all(|p| state.contains(&p))
    }
}

impl FromIterator<PropId> for PropSet {
    fn from_iter<I: IntoIterator<Item = PropId>>(iter: I) -> Self {
        let mut v: Vec<PropId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        PropSet(v.into_boxed_slice())
    }
}

/// A world state: the set of propositions that currently hold.
pub type State = BTreeSet<PropId>;

/// Instantaneous action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnapAction {
    pub name: TaskId,
    pub pre: PropSet,
    pub add: PropSet,
    pub del: PropSet,
}

impl SnapAction {
    pub fn applicable(&self, state: &State) -> bool {
        self.pre.is_subset_of(state)
    }

    /// `(state \ del) ∪ add`, or an error if a precondition is missing.
    pub fn apply(&self, state: &State) -> Result<State, ModelError> {
        if !self.applicable(state) {
            return Err(ModelError::NotApplicable(format!("{:?}", self.name)));
        }
        Ok(self.apply_unchecked(state))
    }

    pub fn apply_unchecked(&self, state: &State) -> State {
        let mut next: State = state.iter().copied().filter(|p| !self.del.contains(*p)).collect();
        next.extend(self.add.iter());
        next
    }

    pub fn is_well_formed(&self) -> bool {
        !self.add.intersects(&self.del)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DurativeAction<T> {
    pub name: TaskId,
    pub start: SnapId,
    pub end: SnapId,
    pub invariants: PropSet,
    pub duration: T,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    Start,
    End,
}

/// Relations of the point algebra.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl Relation {
    pub const ALL: [Relation; 6] = [
        Relation::Lt,
        Relation::Le,
        Relation::Gt,
        Relation::Ge,
        Relation::Eq,
        Relation::Ne,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
            Relation::Eq => "=",
            Relation::Ne => "!=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Relation> {
        Some(match s {
            "<" => Relation::Lt,
            "<=" => Relation::Le,
            ">" => Relation::Gt,
            ">=" => Relation::Ge,
            "=" => Relation::Eq,
            "!=" => Relation::Ne,
            _ => return None,
        })
    }

    /// The relation with its operands swapped: `a R b` iff `b R' a`.
    pub fn converse(self) -> Relation {
        match self {
            Relation::Lt => Relation::Gt,
            Relation::Le => Relation::Ge,
            Relation::Gt => Relation::Lt,
            Relation::Ge => Relation::Le,
            r => r,
        }
    }

    pub fn holds<T: PartialOrd>(self, a: &T, b: &T) -> bool {
        match self {
            Relation::Lt => a < b,
            Relation::Le => a <= b,
            Relation::Gt => a > b,
            Relation::Ge => a >= b,
            Relation::Eq => a == b,
            Relation::Ne => a != b,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// The start or end time point of the i-th subtask of a method.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubtaskPoint {
    pub subtask: usize,
    pub endpoint: Endpoint,
}

impl SubtaskPoint {
    pub fn start(subtask: usize) -> Self {
        SubtaskPoint { subtask, endpoint: Endpoint::Start }
    }

    pub fn end(subtask: usize) -> Self {
        SubtaskPoint { subtask, endpoint: Endpoint::End }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct MethodConstraint {
    pub left: SubtaskPoint,
    pub relation: Relation,
    pub right: SubtaskPoint,
}

impl MethodConstraint {
    pub fn new(left: SubtaskPoint, relation: Relation, right: SubtaskPoint) -> Self {
        MethodConstraint { left, relation, right }
    }

    /// `end(a) < start(b)`.
    pub fn before(a: usize, b: usize) -> Self {
        MethodConstraint::new(SubtaskPoint::end(a), Relation::Lt, SubtaskPoint::start(b))
    }
}

/// A set of subtasks with ordering constraints: the body of a method, or the
/// initial task network of a problem.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TaskNetwork {
    pub subtasks: Vec<TaskId>,
    pub constraints: Vec<MethodConstraint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Method {
    pub name: String,
    pub task: TaskId,
    pub body: TaskNetwork,
}

impl Method {
    pub fn subtasks(&self) -> &[TaskId] {
        &self.body.subtasks
    }

    pub fn constraints(&self) -> &[MethodConstraint] {
        &self.body.constraints
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum TaskKind {
    Snap(SnapId),
    Durative(DurativeId),
    Abstract,
}

#[derive(Clone, Debug)]
pub struct TaskEntry {
    pub name: TaskName,
    pub kind: TaskKind,
}

/// A ground temporal HTN problem.
///
/// Built through [`ProblemBuilder`]; immutable afterwards. The two sentinel
/// snap actions are always present: `init_snap` (no preconditions, adds the
/// initial state) and `goal_snap` (requires the goal, no effects).
#[derive(Clone, Debug)]
pub struct GroundProblem<T> {
    pub symbols: SymbolTable,
    props: Vec<Proposition>,
    prop_index: HashMap<Proposition, PropId>,
    tasks: Vec<TaskEntry>,
    task_index: HashMap<TaskName, TaskId>,
    snaps: Vec<SnapAction>,
    duratives: Vec<DurativeAction<T>>,
    methods: Vec<Method>,
    methods_of: Vec<Vec<MethodId>>,
    pub init: PropSet,
    pub goal: PropSet,
    pub network: TaskNetwork,
    pub init_snap: SnapId,
    pub goal_snap: SnapId,
}

pub const INIT_TASK: &str = "__init";
pub const GOAL_TASK: &str = "__goal";

impl<T: Scalar> GroundProblem<T> {
    pub fn prop(&self, id: PropId) -> &Proposition {
        &self.props[id.index()]
    }

    pub fn prop_id(&self, atom: &Proposition) -> Option<PropId> {
        self.prop_index.get(atom).copied()
    }

    pub fn prop_count(&self) -> usize {
        self.props.len()
    }

    pub fn task(&self, id: TaskId) -> &TaskEntry {
        &self.tasks[id.index()]
    }

    pub fn task_id(&self, name: &TaskName) -> Option<TaskId> {
        self.task_index.get(name).copied()
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    pub fn task_ids(&self) -> impl Iterator<Item = TaskId> {
        (0..self.tasks.len() as u32).map(TaskId)
    }

    pub fn kind(&self, id: TaskId) -> TaskKind {
        self.tasks[id.index()].kind
    }

    pub fn is_snap(&self, id: TaskId) -> bool {
        matches!(self.kind(id), TaskKind::Snap(_))
    }

    pub fn snap(&self, id: SnapId) -> &SnapAction {
        &self.snaps[id.index()]
    }

    /// The snap action refining `task`, if it is a snap task.
    pub fn snap_of(&self, task: TaskId) -> Option<&SnapAction> {
        match self.kind(task) {
            TaskKind::Snap(s) => Some(self.snap(s)),
            _ => None,
        }
    }

    pub fn snaps(&self) -> &[SnapAction] {
        &self.snaps
    }

    pub fn durative(&self, id: DurativeId) -> &DurativeAction<T> {
        &self.duratives[id.index()]
    }

    pub fn duratives(&self) -> &[DurativeAction<T>] {
        &self.duratives
    }

    pub fn method(&self, id: MethodId) -> &Method {
        &self.methods[id.index()]
    }

    pub fn methods(&self) -> &[Method] {
        &self.methods
    }

    pub fn methods_for(&self, task: TaskId) -> &[MethodId] {
        &self.methods_of[task.index()]
    }

    pub fn init_task(&self) -> TaskId {
        self.snap(self.init_snap).name
    }

    pub fn goal_task(&self) -> TaskId {
        self.snap(self.goal_snap).name
    }

    /// The durative action whose start or end snap is `snap`, if any.
    pub fn durative_of_snap(&self, snap: SnapId) -> Option<(DurativeId, Endpoint)> {
        self.duratives.iter().enumerate().find_map(|(i, d)| {
            if d.start == snap {
                Some((DurativeId(i as u32), Endpoint::Start))
            } else if d.end == snap {
                Some((DurativeId(i as u32), Endpoint::End))
            } else {
                None
            }
        })
    }

    pub fn display_atom(&self, atom: &Atom) -> String {
        let mut s = format!("({}", self.symbols.name(atom.head));
        for a in atom.args.iter() {
            s.push(' ');
            s.push_str(self.symbols.name(*a));
        }
        s.push(')');
        s
    }

    pub fn display_prop(&self, id: PropId) -> String {
        self.display_atom(self.prop(id))
    }

    pub fn display_task(&self, id: TaskId) -> String {
        self.display_atom(&self.task(id).name)
    }

    /// Looks up a ground atom from its textual parts.
    pub fn lookup_atom(&self, head: &str, args: &[&str]) -> Option<Atom> {
        let head = self.symbols.get(head)?;
        let args = args
            .iter()
            .map(|a| self.symbols.get(a))
            .collect::<Option<Box<[Sym]>>>()?;
        Some(Atom { head, args })
    }
}

/// Incremental constructor for [`GroundProblem`].
#[derive(Clone, Debug)]
pub struct ProblemBuilder<T> {
    symbols: SymbolTable,
    props: Vec<Proposition>,
    prop_index: HashMap<Proposition, PropId>,
    tasks: Vec<TaskEntry>,
    task_index: HashMap<TaskName, TaskId>,
    snaps: Vec<SnapAction>,
    duratives: Vec<DurativeAction<T>>,
    methods: Vec<Method>,
    init: Vec<PropId>,
    goal: Vec<PropId>,
    network: TaskNetwork,
}

impl<T: Scalar> Default for ProblemBuilder<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> ProblemBuilder<T> {
    pub fn new() -> Self {
        ProblemBuilder {
            symbols: SymbolTable::default(),
            props: Vec::new(),
            prop_index: HashMap::new(),
            tasks: Vec::new(),
            task_index: HashMap::new(),
            snaps: Vec::new(),
            duratives: Vec::new(),
            methods: Vec::new(),
            init: Vec::new(),
            goal: Vec::new(),
            network: TaskNetwork::default(),
        }
    }

    pub fn atom(&mut self, head: &str, args: &[&str]) -> Atom {
        Atom {
            head: self.symbols.intern(head),
            args: args.iter().map(|a| self.symbols.intern(a)).collect(),
        }
    }

    pub fn intern_prop(&mut self, atom: Proposition) -> PropId {
        if let Some(&id) = self.prop_index.get(&atom) {
            return id;
        }
        let id = PropId(self.props.len() as u32);
        self.props.push(atom.clone());
        self.prop_index.insert(atom, id);
        id
    }

    /// Interns the proposition `(head args...)`.
    pub fn prop(&mut self, head: &str, args: &[&str]) -> PropId {
        let atom = self.atom(head, args);
        self.intern_prop(atom)
    }

    pub fn lookup_task(&self, name: &TaskName) -> Option<TaskId> {
        self.task_index.get(name).copied()
    }

    pub fn task_kind(&self, id: TaskId) -> TaskKind {
        self.tasks[id.index()].kind
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    fn new_task(&mut self, name: TaskName, kind: TaskKind) -> Result<TaskId, ModelError> {
        if self.task_index.contains_key(&name) {
            return Err(ModelError::DuplicateTask(self.display(&name)));
        }
        let id = TaskId(self.tasks.len() as u32);
        self.tasks.push(TaskEntry { name: name.clone(), kind });
        self.task_index.insert(name, id);
        Ok(id)
    }

    fn display(&self, atom: &Atom) -> String {
        let mut s = format!("({}", self.symbols.name(atom.head));
        for a in atom.args.iter() {
            s.push(' ');
            s.push_str(self.symbols.name(*a));
        }
        s.push(')');
        s
    }

    fn new_snap(
        &mut self,
        name: TaskName,
        pre: PropSet,
        add: PropSet,
        del: PropSet,
    ) -> Result<SnapId, ModelError> {
        if let Some(p) = add.iter().find(|p| del.contains(*p)) {
            return Err(ModelError::ContradictoryEffects(
                self.display(&name),
                self.display(&self.props[p.index()].clone()),
            ));
        }
        let sid = SnapId(self.snaps.len() as u32);
        let tid = self.new_task(name, TaskKind::Snap(sid))?;
        self.snaps.push(SnapAction { name: tid, pre, add, del });
        Ok(sid)
    }

    /// Adds an instantaneous action `(head args...)`.
    pub fn snap_action(
        &mut self,
        name: TaskName,
        pre: PropSet,
        add: PropSet,
        del: PropSet,
    ) -> Result<SnapId, ModelError> {
        self.new_snap(name, pre, add, del)
    }

    /// Adds a durative action together with its `head@start` and `head@end`
    /// snap actions.
    #[allow(clippy::too_many_arguments)]
    pub fn durative_action(
        &mut self,
        name: TaskName,
        start: (PropSet, PropSet, PropSet),
        end: (PropSet, PropSet, PropSet),
        invariants: PropSet,
        duration: T,
    ) -> Result<DurativeId, ModelError> {
        if duration <= T::zero() {
            return Err(ModelError::NonPositiveDuration(self.display(&name)));
        }
        if self.task_index.contains_key(&name) {
            return Err(ModelError::DuplicateTask(self.display(&name)));
        }
        if let Some(p) = invariants.iter().find(|p| start.2.contains(*p)) {
            return Err(ModelError::InvariantDeletedAtStart(
                self.display(&name),
                self.display(&self.props[p.index()].clone()),
            ));
        }
        let head = self.symbols.name(name.head).to_string();
        let start_name = Atom {
            head: self.symbols.intern(&format!("{head}@start")),
            args: name.args.clone(),
        };
        let end_name = Atom {
            head: self.symbols.intern(&format!("{head}@end")),
            args: name.args.clone(),
        };
        let start = self.new_snap(start_name, start.0, start.1, start.2)?;
        let end = self.new_snap(end_name, end.0, end.1, end.2)?;
        let did = DurativeId(self.duratives.len() as u32);
        let tid = self.new_task(name, TaskKind::Durative(did))?;
        self.duratives.push(DurativeAction { name: tid, start, end, invariants, duration });
        Ok(did)
    }

    pub fn abstract_task(&mut self, name: TaskName) -> Result<TaskId, ModelError> {
        self.new_task(name, TaskKind::Abstract)
    }

    pub fn method(
        &mut self,
        name: &str,
        task: TaskId,
        body: TaskNetwork,
    ) -> Result<MethodId, ModelError> {
        check_network::<T>(&body).map_err(|e| match e {
            NetworkIssue::UnknownSubtask(i) => ModelError::UnknownSubtask(name.to_string(), i),
            NetworkIssue::Inconsistent => ModelError::InconsistentMethod(name.to_string()),
        })?;
        let id = MethodId(self.methods.len() as u32);
        self.methods.push(Method { name: name.to_string(), task, body });
        Ok(id)
    }

    pub fn init(&mut self, props: impl IntoIterator<Item = PropId>) {
        self.init.extend(props);
    }

    pub fn goal(&mut self, props: impl IntoIterator<Item = PropId>) {
        self.goal.extend(props);
    }

    pub fn network(&mut self, network: TaskNetwork) {
        self.network = network;
    }

    /// Finalizes the problem.
    ///
    /// Methods mentioning a task that cannot be refined are dropped until a
    /// fixpoint; afterwards every task of the initial network must be
    /// refinable.
    pub fn build(mut self) -> Result<GroundProblem<T>, ModelError> {
        check_network::<T>(&self.network).map_err(|e| match e {
            NetworkIssue::UnknownSubtask(i) => ModelError::UnknownSubtask("initial network".into(), i),
            NetworkIssue::Inconsistent => ModelError::InconsistentNetwork,
        })?;
        let init: PropSet = self.init.iter().copied().collect();
        let goal: PropSet = self.goal.iter().copied().collect();
        let init_name = self.atom(INIT_TASK, &[]);
        let goal_name = self.atom(GOAL_TASK, &[]);
        let init_snap = self.new_snap(init_name, PropSet::empty(), init.clone(), PropSet::empty())?;
        let goal_snap = self.new_snap(goal_name, goal.clone(), PropSet::empty(), PropSet::empty())?;

        // Drop methods that can never be fully refined.
        let mut refinable: Vec<bool> = self
            .tasks
            .iter()
            .map(|t| !matches!(t.kind, TaskKind::Abstract))
            .collect();
        let mut live = vec![false; self.methods.len()];
        loop {
            let mut changed = false;
            for (i, m) in self.methods.iter().enumerate() {
                if !live[i] && m.subtasks().iter().all(|t| refinable[t.index()]) {
                    live[i] = true;
                    if !refinable[m.task.index()] {
                        refinable[m.task.index()] = true;
                    }
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for t in &self.network.subtasks {
            if !refinable[t.index()] {
                return Err(ModelError::Unrefinable(self.display(&self.tasks[t.index()].name)));
            }
        }
        let methods: Vec<Method> = self
            .methods
            .into_iter()
            .zip(live)
            .filter_map(|(m, keep)| keep.then_some(m))
            .collect();
        let mut methods_of = vec![Vec::new(); self.tasks.len()];
        for (i, m) in methods.iter().enumerate() {
            methods_of[m.task.index()].push(MethodId(i as u32));
        }
        Ok(GroundProblem {
            symbols: self.symbols,
            props: self.props,
            prop_index: self.prop_index,
            tasks: self.tasks,
            task_index: self.task_index,
            snaps: self.snaps,
            duratives: self.duratives,
            methods,
            methods_of,
            init,
            goal,
            network: self.network,
            init_snap,
            goal_snap,
        })
    }
}

enum NetworkIssue {
    UnknownSubtask(usize),
    Inconsistent,
}

/// Checks that a network's constraints mention only its subtasks and are
/// qualitatively consistent on their own.
fn check_network<T: Scalar>(net: &TaskNetwork) -> Result<(), NetworkIssue> {
    let n = net.subtasks.len();
    let mut pn = PointNetwork::<T>::new();
    let points: Vec<(TimePoint, TimePoint)> = (0..n).map(|_| (pn.add_point(), pn.add_point())).collect();
    for &(s, e) in &points {
        pn.insert(TemporalConstraint::new(s, Relation::Le, e));
    }
    for c in &net.constraints {
        for sp in [c.left, c.right] {
            if sp.subtask >= n {
                return Err(NetworkIssue::UnknownSubtask(sp.subtask));
            }
        }
        let pick = |sp: SubtaskPoint| match sp.endpoint {
            Endpoint::Start => points[sp.subtask].0,
            Endpoint::End => points[sp.subtask].1,
        };
        pn.insert(TemporalConstraint::new(pick(c.left), c.relation, pick(c.right)));
    }
    if pn.is_consistent() {
        Ok(())
    } else {
        Err(NetworkIssue::Inconsistent)
    }
}

/// Tasks reachable from the initial network through methods (and the
/// sentinels), in breadth-first order.
pub fn reachable_tasks<T: Scalar>(problem: &GroundProblem<T>) -> Vec<TaskId> {
    let mut seen = vec![false; problem.task_count()];
    let mut order = Vec::new();
    let mut queue: VecDeque<TaskId> = VecDeque::new();
    for t in [problem.init_task(), problem.goal_task()]
        .into_iter()
        .chain(problem.network.subtasks.iter().copied())
    {
        if !seen[t.index()] {
            seen[t.index()] = true;
            queue.push_back(t);
        }
    }
    while let Some(t) = queue.pop_front() {
        order.push(t);
        let children: Vec<TaskId> = match problem.kind(t) {
            TaskKind::Snap(_) => Vec::new(),
            TaskKind::Durative(d) => {
                let d = problem.durative(d);
                vec![problem.snap(d.start).name, problem.snap(d.end).name]
            }
            TaskKind::Abstract => problem
                .methods_for(t)
                .iter()
                .flat_map(|m| problem.method(*m).subtasks().to_vec())
                .collect(),
        };
        for c in children {
            if !seen[c.index()] {
                seen[c.index()] = true;
                queue.push_back(c);
            }
        }
    }
    order
}
