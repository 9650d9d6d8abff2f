//! Temporal point network.
//!
//! Qualitative constraints from the point algebra (`<`, `<=`, `=`, `!=`; `>`
//! and `>=` are stored with their operands swapped) plus metric difference
//! equalities `right - left = d`.
//!
//! Qualitative consistency is decided on the `<=`/`<` graph: the network is
//! inconsistent iff some strongly connected component contains a strict edge
//! or both ends of a `!=` constraint. The status is maintained incrementally
//! on every insertion; most insertions only need one reachability query.
//!
//! Metric solving builds the difference-constraint graph (strict edges become
//! `<= -epsilon`), computes the earliest-time schedule by shortest paths to
//! the origin, and branches on `!=` constraints the earliest schedule
//! violates.

use std::fmt;

use crate::model::Relation;
use crate::scalar::Scalar;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimePoint(pub u32);

impl TimePoint {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

/// `left relation right`, or `right - left = offset` when `offset` is set
/// (the relation is then always `=`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TemporalConstraint<T> {
    pub left: TimePoint,
    pub relation: Relation,
    pub right: TimePoint,
    pub offset: Option<T>,
}

impl<T: Scalar> TemporalConstraint<T> {
    pub fn new(left: TimePoint, relation: Relation, right: TimePoint) -> Self {
        TemporalConstraint { left, relation, right, offset: None }
    }

    /// `end - start = duration`.
    pub fn duration(start: TimePoint, end: TimePoint, duration: T) -> Self {
        TemporalConstraint { left: start, relation: Relation::Eq, right: end, offset: Some(duration) }
    }

    pub fn is_metric(&self) -> bool {
        self.offset.is_some()
    }

    /// Evaluates the constraint under an assignment.
    pub fn holds(&self, left: T, right: T) -> bool {
        match self.offset {
            Some(d) => right - left == d,
            None => self.relation.holds(&left, &right),
        }
    }
}

impl<T: Scalar> fmt::Display for TemporalConstraint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.offset {
            Some(d) => write!(f, "{} - {} = {}", self.right, self.left, d),
            None => write!(f, "{} {} {}", self.left, self.relation, self.right),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
struct Edge {
    to: u32,
    strict: bool,
}

#[derive(Clone, Debug)]
pub struct PointNetwork<T: Clone> {
    out: im::Vector<Vec<Edge>>,
    constraints: im::Vector<TemporalConstraint<T>>,
    ne: im::Vector<(TimePoint, TimePoint)>,
    consistent: bool,
    horizon: Option<TimePoint>,
}

impl<T: Scalar> Default for PointNetwork<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> PointNetwork<T> {
    pub fn new() -> Self {
        PointNetwork {
            out: im::Vector::new(),
            constraints: im::Vector::new(),
            ne: im::Vector::new(),
            consistent: true,
            horizon: None,
        }
    }

    pub fn add_point(&mut self) -> TimePoint {
        let p = TimePoint(self.out.len() as u32);
        self.out.push_back(Vec::new());
        p
    }

    pub fn len(&self) -> usize {
        self.out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = TimePoint> {
        (0..self.out.len() as u32).map(TimePoint)
    }

    /// The first point created. Schedules assign it time 0.
    pub fn origin(&self) -> TimePoint {
        TimePoint(0)
    }

    /// Marks a point that is excluded from the makespan.
    pub fn set_horizon(&mut self, p: TimePoint) {
        self.horizon = Some(p);
    }

    pub fn horizon(&self) -> Option<TimePoint> {
        self.horizon
    }

    pub fn constraints(&self) -> impl Iterator<Item = &TemporalConstraint<T>> {
        self.constraints.iter()
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    /// Cached qualitative consistency.
    pub fn is_consistent(&self) -> bool {
        self.consistent
    }

    fn check_point(&self, p: TimePoint) {
        assert!(p.index() < self.out.len(), "unknown time point {p}");
    }

    /// Is there a `<=`/`<` path from `from` to `to`?
    pub fn reaches(&self, from: TimePoint, to: TimePoint) -> bool {
        if from == to {
            return true;
        }
        let mut seen = vec![false; self.out.len()];
        let mut stack = vec![from.0];
        seen[from.index()] = true;
        while let Some(u) = stack.pop() {
            for e in &self.out[u as usize] {
                if e.to == to.0 {
                    return true;
                }
                if !seen[e.to as usize] {
                    seen[e.to as usize] = true;
                    stack.push(e.to);
                }
            }
        }
        false
    }

    /// Would the network stay consistent if `c` were added? Does not mutate.
    pub fn consistent_with(&self, c: &TemporalConstraint<T>) -> bool {
        self.check_point(c.left);
        self.check_point(c.right);
        if !self.consistent {
            return false;
        }
        if c.is_metric() {
            return true;
        }
        let (a, rel, b) = normalize(c.left, c.relation, c.right);
        match rel {
            Relation::Lt => a != b && !self.reaches(b, a),
            Relation::Le => a == b || !self.reaches(b, a) || self.merge_consistent(a, b),
            Relation::Eq => a == b || self.merge_consistent(a, b),
            Relation::Ne => a != b && !(self.reaches(a, b) && self.reaches(b, a)),
            Relation::Gt | Relation::Ge => unreachable!(),
        }
    }

    /// Would the (consistent) network stay consistent if `a` and `b` ended
    /// up in one component? Only that component can hold a strict edge or
    /// a `!=` pair, and it consists of the points reachable from `a` or `b`
    /// that also reach `a` or `b`.
    fn merge_consistent(&self, a: TimePoint, b: TimePoint) -> bool {
        let n = self.out.len();
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (u, edges) in self.out.iter().enumerate() {
            for e in edges {
                rev[e.to as usize].push(u as u32);
            }
        }
        let sweep = |next: &dyn Fn(u32, &mut Vec<u32>)| {
            let mut seen = vec![false; n];
            let mut stack = vec![a.0, b.0];
            seen[a.index()] = true;
            seen[b.index()] = true;
            let mut buf = Vec::new();
            while let Some(u) = stack.pop() {
                buf.clear();
                next(u, &mut buf);
                for &w in &buf {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        stack.push(w);
                    }
                }
            }
            seen
        };
        let fwd = sweep(&|u, buf| buf.extend(self.out[u as usize].iter().map(|e| e.to)));
        let bwd = sweep(&|u, buf| buf.extend_from_slice(&rev[u as usize]));
        let inside = |p: usize| fwd[p] && bwd[p];
        for (u, edges) in self.out.iter().enumerate() {
            if inside(u) && edges.iter().any(|e| e.strict && inside(e.to as usize)) {
                return false;
            }
        }
        self.ne.iter().all(|(x, y)| !(inside(x.index()) && inside(y.index())))
    }

    /// Shorthand for `consistent_with(left relation right)`.
    pub fn allows(&self, left: TimePoint, relation: Relation, right: TimePoint) -> bool {
        self.consistent_with(&TemporalConstraint::new(left, relation, right))
    }

    /// Adds a constraint and updates the consistency status, which is
    /// returned.
    pub fn insert(&mut self, c: TemporalConstraint<T>) -> bool {
        let ok = self.consistent_with(&c);
        self.add_unchecked(c);
        self.consistent = ok;
        ok
    }

    /// Adds a constraint, returning the network only if it stays consistent.
    pub fn with(&self, c: TemporalConstraint<T>) -> Option<Self> {
        if !self.consistent_with(&c) {
            return None;
        }
        let mut copy = self.clone();
        copy.add_unchecked(c);
        Some(copy)
    }

    fn push_edge(&mut self, from: TimePoint, to: TimePoint, strict: bool) {
        let edge = Edge { to: to.0, strict };
        let list = &mut self.out[from.index()];
        if let Some(existing) = list.iter_mut().find(|e| e.to == to.0) {
            existing.strict |= strict;
        } else {
            list.push(edge);
        }
    }

    fn add_unchecked(&mut self, c: TemporalConstraint<T>) {
        if !c.is_metric() {
            let (a, rel, b) = normalize(c.left, c.relation, c.right);
            match rel {
                Relation::Lt => self.push_edge(a, b, true),
                Relation::Le => self.push_edge(a, b, false),
                Relation::Eq => {
                    self.push_edge(a, b, false);
                    self.push_edge(b, a, false);
                }
                Relation::Ne => self.ne.push_back((a, b)),
                Relation::Gt | Relation::Ge => unreachable!(),
            }
        }
        self.constraints.push_back(c);
    }

    /// Strongly connected components of the `<=` graph (iterative Tarjan).
    /// Returns the component index of every point.
    pub fn components(&self) -> Vec<u32> {
        let n = self.out.len();
        const UNSEEN: u32 = u32::MAX;
        let mut index = vec![UNSEEN; n];
        let mut low = vec![0u32; n];
        let mut on_stack = vec![false; n];
        let mut comp = vec![UNSEEN; n];
        let mut stack: Vec<u32> = Vec::new();
        let mut next_index = 0u32;
        let mut next_comp = 0u32;
        // (node, position in its adjacency list)
        let mut call: Vec<(u32, usize)> = Vec::new();
        for root in 0..n as u32 {
            if index[root as usize] != UNSEEN {
                continue;
            }
            call.push((root, 0));
            index[root as usize] = next_index;
            low[root as usize] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root as usize] = true;
            while let Some(top) = call.last_mut() {
                let v = top.0;
                let adj = &self.out[v as usize];
                if top.1 < adj.len() {
                    let w = adj[top.1].to;
                    top.1 += 1;
                    if index[w as usize] == UNSEEN {
                        index[w as usize] = next_index;
                        low[w as usize] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w as usize] = true;
                        call.push((w, 0));
                    } else if on_stack[w as usize] {
                        low[v as usize] = low[v as usize].min(index[w as usize]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent as usize] = low[parent as usize].min(low[v as usize]);
                    }
                    if low[v as usize] == index[v as usize] {
                        loop {
                            let w = stack.pop().expect("tarjan stack");
                            on_stack[w as usize] = false;
                            comp[w as usize] = next_comp;
                            if w == v {
                                break;
                            }
                        }
                        next_comp += 1;
                    }
                }
            }
        }
        comp
    }

    /// Full consistency check, ignoring the cached status.
    pub fn check_from_scratch(&self) -> bool {
        let comp = self.components();
        for (u, edges) in self.out.iter().enumerate() {
            for e in edges {
                if e.strict && comp[u] == comp[e.to as usize] {
                    return false;
                }
            }
        }
        self.ne.iter().all(|(a, b)| comp[a.index()] != comp[b.index()])
    }

    /// Earliest-time metric schedule, or `None` if the constraints admit no
    /// rational solution. Strict edges are realized with separation
    /// `epsilon`; all points are kept at or after the origin.
    pub fn solve_metric(&self, epsilon: T) -> Option<Schedule<T>> {
        if self.out.is_empty() {
            return None;
        }
        let base = DifferenceGraph::build(self, epsilon);
        let mut search = NeSearch { best: None, budget: NE_BRANCH_LIMIT };
        search.explore(&base, self.horizon);
        search.best
    }
}

/// Upper bound on the number of difference graphs solved while branching on
/// `!=` constraints.
const NE_BRANCH_LIMIT: usize = 4096;

fn normalize(a: TimePoint, rel: Relation, b: TimePoint) -> (TimePoint, Relation, TimePoint) {
    match rel {
        Relation::Gt => (b, Relation::Lt, a),
        Relation::Ge => (b, Relation::Le, a),
        r => (a, r, b),
    }
}

/// `x[to] - x[from] <= weight` for every edge.
#[derive(Clone)]
struct DifferenceGraph<T> {
    n: usize,
    edges: Vec<(u32, u32, T)>,
    ne: Vec<(TimePoint, TimePoint)>,
    epsilon: T,
}

impl<T: Scalar> DifferenceGraph<T> {
    fn build(net: &PointNetwork<T>, epsilon: T) -> Self {
        let mut g = DifferenceGraph { n: net.len(), edges: Vec::new(), ne: Vec::new(), epsilon };
        for c in net.constraints.iter() {
            match c.offset {
                Some(d) => {
                    g.edges.push((c.left.0, c.right.0, d));
                    g.edges.push((c.right.0, c.left.0, -d));
                }
                None => {
                    let (a, rel, b) = normalize(c.left, c.relation, c.right);
                    match rel {
                        Relation::Lt => g.less(a, b, true),
                        Relation::Le => g.less(a, b, false),
                        Relation::Eq => {
                            g.less(a, b, false);
                            g.less(b, a, false);
                        }
                        Relation::Ne => g.ne.push((a, b)),
                        Relation::Gt | Relation::Ge => unreachable!(),
                    }
                }
            }
        }
        // every point at or after the origin
        for p in 1..g.n as u32 {
            g.edges.push((p, 0, T::zero()));
        }
        g
    }

    /// `a < b` (strict) or `a <= b`: `x[a] - x[b] <= -eps` / `<= 0`.
    fn less(&mut self, a: TimePoint, b: TimePoint, strict: bool) {
        let w = if strict { -self.epsilon } else { T::zero() };
        self.edges.push((b.0, a.0, w));
    }

    /// Earliest times: `x[p] = -dist(p, origin)`. `None` on a negative cycle.
    fn earliest(&self) -> Option<Vec<T>> {
        // dist[p] = shortest distance from p to the origin; relax edge
        // (i -> j, w) as dist[i] <= w + dist[j].
        let mut dist: Vec<Option<T>> = vec![None; self.n];
        dist[0] = Some(T::zero());
        for round in 0..=self.n {
            let mut changed = false;
            for &(i, j, w) in &self.edges {
                if let Some(dj) = dist[j as usize] {
                    let cand = w + dj;
                    let better = match dist[i as usize] {
                        None => true,
                        Some(di) => cand < di,
                    };
                    if better {
                        dist[i as usize] = Some(cand);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
            if round == self.n {
                return None;
            }
        }
        if dist[0] != Some(T::zero()) {
            return None;
        }
        Some(dist.into_iter().map(|d| -d.unwrap_or_else(T::zero)).collect())
    }
}

struct NeSearch<T> {
    best: Option<Schedule<T>>,
    budget: usize,
}

impl<T: Scalar> NeSearch<T> {
    fn explore(&mut self, g: &DifferenceGraph<T>, horizon: Option<TimePoint>) {
        if self.budget == 0 {
            return;
        }
        self.budget -= 1;
        let Some(times) = g.earliest() else { return };
        let schedule = Schedule::new(times, horizon);
        // earliest times only grow when constraints are added
        if let Some(best) = &self.best {
            if schedule.makespan >= best.makespan {
                return;
            }
        }
        let violated = g.ne.iter().find(|(a, b)| schedule.times[a.index()] == schedule.times[b.index()]);
        match violated {
            None => self.best = Some(schedule),
            Some(&(a, b)) => {
                for (x, y) in [(a, b), (b, a)] {
                    let mut child = g.clone();
                    child.less(x, y, true);
                    self.explore(&child, horizon);
                }
            }
        }
    }
}

/// Assignment of a time to every point of a network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule<T> {
    times: Vec<T>,
    horizon: Option<TimePoint>,
    makespan: T,
}

impl<T: Scalar> Schedule<T> {
    /// Builds a schedule; the makespan is the latest time of any point other
    /// than the horizon, relative to the origin.
    pub fn new(times: Vec<T>, horizon: Option<TimePoint>) -> Self {
        let origin = times.first().copied().unwrap_or_else(T::zero);
        let mut makespan = T::zero();
        for (i, t) in times.iter().enumerate() {
            if Some(TimePoint(i as u32)) == horizon {
                continue;
            }
            let rel = *t - origin;
            if rel > makespan {
                makespan = rel;
            }
        }
        Schedule { times, horizon, makespan }
    }

    pub fn time(&self, p: TimePoint) -> T {
        self.times[p.index()]
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn makespan(&self) -> T {
        self.makespan
    }
}
