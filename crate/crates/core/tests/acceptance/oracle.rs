//! Random tiny temporal HTN problems and an exhaustive solver for them.
//!
//! The solver enumerates every decomposition, then every sequence of
//! groups of simultaneous snap events, simulating the state as it goes. A
//! complete grouping is accepted if the goal holds and the induced simple
//! temporal network (group times, task intervals, durations, ordering) has
//! no negative cycle.

use htep::model::{Endpoint, MethodConstraint, ProblemBuilder, PropId, PropSet, Relation, SubtaskPoint, TaskNetwork};
use htep::{Problem, Rational};
use rand::rngs::StdRng;
use rand::Rng;

pub const PROPS: usize = 4;
/// Durative occurrences allowed in any decomposition.
pub const MAX_OCCURRENCES: usize = 4;
/// Times are scaled so that the separation 1/1000 becomes 1.
const SCALE: i64 = 1000;
const INF: i64 = i64::MAX / 4;

#[derive(Clone, Copy, Debug)]
pub struct Snap {
    pub pre: u32,
    pub add: u32,
    pub del: u32,
}

#[derive(Clone, Debug)]
pub struct Durative {
    pub start: Snap,
    pub end: Snap,
    pub inv: u32,
    pub duration: i64,
}

#[derive(Clone, Copy, Debug)]
pub enum Node {
    Durative(usize),
    Abstract(usize),
}

/// `(i, endpoint, strict, j, endpoint)`: `point_i < point_j` or `<=`.
type Order = (usize, Endpoint, bool, usize, Endpoint);

#[derive(Clone, Debug)]
pub struct Net {
    pub nodes: Vec<Node>,
    pub order: Vec<Order>,
}

#[derive(Clone, Debug)]
pub struct Tiny {
    pub duratives: Vec<Durative>,
    /// Methods of each abstract task. Task `k` only uses abstract tasks
    /// with a larger index.
    pub methods: Vec<Vec<Net>>,
    pub top: Net,
    pub init: u32,
    pub goal: u32,
}

fn subset(rng: &mut StdRng, p: f64) -> u32 {
    (0..PROPS).filter(|_| rng.gen_bool(p)).fold(0, |m, i| m | 1 << i)
}

fn snap(rng: &mut StdRng) -> Snap {
    let pre = subset(rng, 0.15);
    let add = subset(rng, 0.3);
    let del = subset(rng, 0.2) & !add;
    Snap { pre, add, del }
}

fn endpoint(rng: &mut StdRng) -> Endpoint {
    if rng.gen_bool(0.5) {
        Endpoint::Start
    } else {
        Endpoint::End
    }
}

fn net(rng: &mut StdRng, n_dur: usize, abstracts: std::ops::Range<usize>) -> Net {
    let len = rng.gen_range(1..=2);
    let nodes: Vec<Node> = (0..len)
        .map(|_| {
            if !abstracts.is_empty() && rng.gen_bool(0.5) {
                Node::Abstract(rng.gen_range(abstracts.clone()))
            } else {
                Node::Durative(rng.gen_range(0..n_dur))
            }
        })
        .collect();
    // only forward constraints, so every network is consistent
    let mut order = Vec::new();
    for i in 0..len {
        for j in i + 1..len {
            if rng.gen_bool(0.5) {
                order.push((i, endpoint(rng), rng.gen_bool(0.5), j, endpoint(rng)));
            }
        }
    }
    Net { nodes, order }
}

impl Tiny {
    pub fn random(rng: &mut StdRng) -> Tiny {
        loop {
            let n_dur = rng.gen_range(1..=6);
            let duratives = (0..n_dur)
                .map(|_| {
                    let start = snap(rng);
                    let end = snap(rng);
                    let inv = subset(rng, 0.15) & !start.del;
                    Durative { start, end, inv, duration: rng.gen_range(1..=3) }
                })
                .collect();
            let n_abs = rng.gen_range(0..=3);
            let methods = (0..n_abs)
                .map(|k| (0..rng.gen_range(1..=2)).map(|_| net(rng, n_dur, k + 1..n_abs)).collect())
                .collect();
            let top = net(rng, n_dur, 0..n_abs);
            let init = subset(rng, 0.5);
            let goal = subset(rng, 0.3);
            let t = Tiny { duratives, methods, top, init, goal };
            if t.max_occurrences(&t.top) <= MAX_OCCURRENCES {
                return t;
            }
        }
    }

    fn max_occurrences(&self, net: &Net) -> usize {
        net.nodes
            .iter()
            .map(|n| match *n {
                Node::Durative(_) => 1,
                Node::Abstract(k) => self.methods[k].iter().map(|m| self.max_occurrences(m)).max().unwrap_or(0),
            })
            .sum()
    }

    pub fn abstract_count(&self) -> usize {
        self.methods.len()
    }

    /// The same problem for the planner.
    pub fn to_problem(&self) -> Problem {
        let mut b = ProblemBuilder::<Rational>::new();
        let props: Vec<PropId> = (0..PROPS).map(|i| b.prop(&format!("p{i}"), &[])).collect();
        let set = |m: u32| -> PropSet { (0..PROPS).filter(|i| m >> i & 1 == 1).map(|i| props[i]).collect() };
        let mut dur_ids = Vec::new();
        for (i, d) in self.duratives.iter().enumerate() {
            let name = b.atom(&format!("d{i}"), &[]);
            b.durative_action(
                name.clone(),
                (set(d.start.pre), set(d.start.add), set(d.start.del)),
                (set(d.end.pre), set(d.end.add), set(d.end.del)),
                set(d.inv),
                Rational::from_integer(d.duration),
            )
            .unwrap();
            dur_ids.push(b.lookup_task(&name).unwrap());
        }
        let abs_ids: Vec<_> = (0..self.methods.len())
            .map(|k| {
                let name = b.atom(&format!("a{k}"), &[]);
                b.abstract_task(name).unwrap()
            })
            .collect();
        let network = |net: &Net| TaskNetwork {
            subtasks: net
                .nodes
                .iter()
                .map(|n| match *n {
                    Node::Durative(i) => dur_ids[i],
                    Node::Abstract(k) => abs_ids[k],
                })
                .collect(),
            constraints: net
                .order
                .iter()
                .map(|&(i, ei, strict, j, ej)| {
                    let rel = if strict { Relation::Lt } else { Relation::Le };
                    MethodConstraint::new(SubtaskPoint { subtask: i, endpoint: ei }, rel, SubtaskPoint { subtask: j, endpoint: ej })
                })
                .collect(),
        };
        for (k, methods) in self.methods.iter().enumerate() {
            for (i, m) in methods.iter().enumerate() {
                b.method(&format!("m{k}-{i}"), abs_ids[k], network(m)).unwrap();
            }
        }
        b.network(network(&self.top));
        b.init(set(self.init).iter());
        b.goal(set(self.goal).iter());
        b.build().unwrap()
    }
}

#[derive(Clone, Copy)]
struct Event {
    var: usize,
    pre: u32,
    add: u32,
    del: u32,
    /// Invariants of the occurrence, checked while it runs.
    inv: u32,
    /// For a start event, the index of its end event.
    end: Option<usize>,
}

/// One fully decomposed network: variable 0 is the origin, edges are
/// `x[v] - x[u] <= w`.
#[derive(Clone, Default)]
struct Decomposition {
    vars: usize,
    edges: Vec<(usize, usize, i64)>,
    events: Vec<Event>,
}

impl Decomposition {
    fn var(&mut self) -> usize {
        self.vars += 1;
        self.vars - 1
    }

    /// `x[b] - x[a] >= gap`
    fn ge(&mut self, a: usize, b: usize, gap: i64) {
        self.edges.push((b, a, -gap));
    }

    fn exactly(&mut self, a: usize, b: usize, d: i64) {
        self.edges.push((a, b, d));
        self.edges.push((b, a, -d));
    }
}

fn expand(t: &Tiny, net: &Net, parent: (usize, Option<usize>), d: &mut Decomposition, pending: &mut Vec<(usize, usize, usize)>) {
    let mut points = Vec::with_capacity(net.nodes.len());
    for node in &net.nodes {
        let s = d.var();
        let e = d.var();
        d.ge(parent.0, s, 0);
        if let Some(pe) = parent.1 {
            d.ge(e, pe, 0);
        }
        match *node {
            Node::Durative(i) => {
                let a = &t.duratives[i];
                d.ge(s, e, 1);
                d.exactly(s, e, a.duration * SCALE);
                let k = d.events.len();
                d.events.push(Event { var: s, pre: a.start.pre | a.inv, add: a.start.add, del: a.start.del, inv: a.inv, end: Some(k + 1) });
                d.events.push(Event { var: e, pre: a.end.pre, add: a.end.add, del: a.end.del, inv: 0, end: None });
            }
            Node::Abstract(k) => {
                d.ge(s, e, 0);
                pending.push((k, s, e));
            }
        }
        points.push((s, e));
    }
    let point = |i: usize, ep: Endpoint| match ep {
        Endpoint::Start => points[i].0,
        Endpoint::End => points[i].1,
    };
    for &(i, ei, strict, j, ej) in &net.order {
        d.ge(point(i, ei), point(j, ej), strict as i64);
    }
}

fn decompositions(t: &Tiny) -> Vec<Decomposition> {
    fn walk(t: &Tiny, d: Decomposition, mut pending: Vec<(usize, usize, usize)>, out: &mut Vec<Decomposition>) {
        let Some((k, s, e)) = pending.pop() else {
            out.push(d);
            return;
        };
        for m in &t.methods[k] {
            let mut d = d.clone();
            let mut pending = pending.clone();
            expand(t, m, (s, Some(e)), &mut d, &mut pending);
            walk(t, d, pending, out);
        }
    }
    let mut d = Decomposition::default();
    d.var();
    let mut pending = Vec::new();
    expand(t, &t.top, (0, None), &mut d, &mut pending);
    let mut out = Vec::new();
    walk(t, d, pending, &mut out);
    out
}

/// All-pairs shortest paths, or `None` on a negative cycle.
fn floyd_warshall(n: usize, edges: &[(usize, usize, i64)]) -> Option<Vec<Vec<i64>>> {
    let mut dist = vec![vec![INF; n]; n];
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(u, v, w) in edges {
        dist[u][v] = dist[u][v].min(w);
    }
    for k in 0..n {
        for i in 0..n {
            if dist[i][k] == INF {
                continue;
            }
            for j in 0..n {
                if dist[k][j] != INF && dist[i][k] + dist[k][j] < dist[i][j] {
                    dist[i][j] = dist[i][k] + dist[k][j];
                }
            }
        }
    }
    (0..n).all(|i| dist[i][i] >= 0).then_some(dist)
}

fn interfere(a: &Event, b: &Event) -> bool {
    a.del & (b.pre | b.add) != 0 || b.del & (a.pre | a.add) != 0
}

struct Grouping<'a> {
    d: &'a Decomposition,
    goal: u32,
    /// Events that must be in an earlier group.
    strictly_after: Vec<u32>,
    /// Events that must be in an earlier or the same group.
    after: Vec<u32>,
    group: Vec<usize>,
    pub leaves: u64,
}

impl Grouping<'_> {
    fn all(&self) -> u32 {
        (1u32 << self.d.events.len()) - 1
    }

    /// Can `set` form the next group after `placed`, starting from `state`?
    /// Returns the state after the group.
    fn try_group(&self, placed: u32, set: u32, state: u32, extra: Option<&Event>) -> Option<u32> {
        let members: Vec<&Event> = (0..self.d.events.len()).filter(|i| set >> i & 1 == 1).map(|i| &self.d.events[i]).collect();
        for i in (0..self.d.events.len()).filter(|i| set >> i & 1 == 1) {
            if self.strictly_after[i] & !placed != 0 || self.after[i] & !(placed | set) != 0 {
                return None;
            }
        }
        let all: Vec<&Event> = members.iter().copied().chain(extra).collect();
        for (i, a) in all.iter().enumerate() {
            if a.pre & !state != 0 {
                return None;
            }
            if all[i + 1..].iter().any(|b| interfere(a, b)) {
                return None;
            }
        }
        let del = all.iter().fold(0, |m, e| m | e.del);
        let add = all.iter().fold(0, |m, e| m | e.add);
        let next = (state & !del) | add;
        // invariants of every occurrence that started and has not ended
        let done = placed | set;
        for (i, e) in self.d.events.iter().enumerate() {
            if let Some(end) = e.end {
                if done >> i & 1 == 1 && done >> end & 1 == 0 && e.inv & !next != 0 {
                    return None;
                }
            }
        }
        Some(next)
    }

    fn search(&mut self, placed: u32, state: u32, groups: usize) -> bool {
        if placed == self.all() {
            self.leaves += 1;
            return self.goal & !state == 0 && self.schedulable(groups);
        }
        let remaining = self.all() & !placed;
        let reachable = self.d.events.iter().enumerate().filter(|(i, _)| remaining >> i & 1 == 1).fold(state, |m, (_, e)| m | e.add);
        if self.goal & !reachable != 0 {
            return false;
        }
        let mut set = remaining;
        while set != 0 {
            if let Some(next) = self.try_group(placed, set, state, None) {
                for i in (0..self.d.events.len()).filter(|i| set >> i & 1 == 1) {
                    self.group[i] = groups;
                }
                if self.search(placed | set, next, groups + 1) {
                    return true;
                }
            }
            set = (set - 1) & remaining;
        }
        false
    }

    /// Group `g` is at time `x[group var g]`, group 0 at the origin, and
    /// consecutive groups are separated by at least one unit.
    fn schedulable(&self, groups: usize) -> bool {
        let mut edges = self.d.edges.clone();
        let base = self.d.vars;
        let var = |g: usize| if g == 0 { 0 } else { base + g - 1 };
        for g in 1..groups {
            edges.push((var(g), var(g - 1), -1));
        }
        for (i, e) in self.d.events.iter().enumerate() {
            edges.push((e.var, var(self.group[i]), 0));
            edges.push((var(self.group[i]), e.var, 0));
        }
        floyd_warshall(base + groups.saturating_sub(1), &edges).is_some()
    }
}

#[derive(Default, Debug)]
pub struct Verdict {
    pub solvable: bool,
    pub decompositions: usize,
    pub leaves: u64,
}

pub fn solve(t: &Tiny) -> Verdict {
    let init = Event { var: 0, pre: 0, add: t.init, del: 0, inv: 0, end: None };
    let mut verdict = Verdict::default();
    for d in decompositions(t) {
        verdict.decompositions += 1;
        let Some(dist) = floyd_warshall(d.vars, &d.edges) else { continue };
        let n = d.events.len();
        let mut strictly_after = vec![0u32; n];
        let mut after = vec![0u32; n];
        for (b, eb) in d.events.iter().enumerate() {
            for (a, ea) in d.events.iter().enumerate() {
                // x[b] - x[a] >= -dist[b][a]
                let lower = -dist[eb.var][ea.var];
                if a != b && lower > 0 {
                    strictly_after[b] |= 1 << a;
                } else if a != b && lower == 0 {
                    after[b] |= 1 << a;
                }
            }
        }
        let mut g = Grouping { d: &d, goal: t.goal, strictly_after, after, group: vec![0; n], leaves: 0 };
        // group 0 holds the initial state and any events at time 0
        let all = g.all();
        let mut first = all;
        let found = loop {
            if let Some(state) = g.try_group(0, first, 0, Some(&init)) {
                for i in (0..n).filter(|i| first >> i & 1 == 1) {
                    g.group[i] = 0;
                }
                if g.search(first, state, 1) {
                    break true;
                }
            }
            if first == 0 {
                break false;
            }
            first = (first - 1) & all;
        };
        verdict.leaves += g.leaves;
        if found {
            verdict.solvable = true;
            return verdict;
        }
    }
    verdict
}
