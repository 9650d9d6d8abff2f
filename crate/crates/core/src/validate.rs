//! Independent plan validation by timeline simulation.
//!
//! Only the ground model is shared with the planner. Invariants are taken
//! from the durative actions themselves, pairing each end snap with the
//! earliest unmatched start of the same action.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use crate::model::{Endpoint, GroundProblem, SnapAction, State, TaskId, TaskKind};
use crate::plan::{LinkKind, PartialPlan};
use crate::scalar::Scalar;
use crate::tpn::Schedule;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    UnsupportedPrecondition,
    ViolatedInvariant,
    BrokenLink,
    ConstraintViolation,
    UnrefinedTask,
    NegativeTime,
}

impl ViolationKind {
    pub fn name(self) -> &'static str {
        match self {
            ViolationKind::UnsupportedPrecondition => "unsupported-precondition",
            ViolationKind::ViolatedInvariant => "violated-invariant",
            ViolationKind::BrokenLink => "broken-link",
            ViolationKind::ConstraintViolation => "constraint-violation",
            ViolationKind::UnrefinedTask => "unrefined-task",
            ViolationKind::NegativeTime => "negative-time",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Verdict {
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn accepted(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn push(&mut self, kind: ViolationKind, detail: String) {
        self.violations.push(Violation { kind, detail });
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.accepted() {
            return writeln!(f, "plan valid");
        }
        writeln!(f, "plan invalid: {} violation(s)", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {}: {}", v.kind.name(), v.detail)?;
        }
        Ok(())
    }
}

/// A snap action occurrence at a point in time.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct TimedSnap<T> {
    pub time: T,
    pub task: TaskId,
}

struct Interval<'a, T> {
    start: T,
    end: T,
    invariants: &'a crate::model::PropSet,
    name: TaskId,
}

fn interfere(a: &SnapAction, b: &SnapAction) -> bool {
    a.del.intersects(&b.pre) || a.del.intersects(&b.add) || b.del.intersects(&a.pre) || b.del.intersects(&a.add)
}

/// Executes a timeline from the empty state, with the initial state added at
/// time 0, and checks preconditions, invariants, durations, simultaneity
/// and the goal. Sentinel tasks in the timeline are ignored.
pub fn validate_timeline<T: Scalar>(problem: &GroundProblem<T>, timeline: &[TimedSnap<T>]) -> Verdict {
    let mut verdict = Verdict::default();
    let init_task = problem.init_task();
    let goal_task = problem.goal_task();

    let mut events: Vec<(T, &SnapAction)> = Vec::with_capacity(timeline.len() + 1);
    for ev in timeline {
        if ev.task == init_task || ev.task == goal_task {
            continue;
        }
        let Some(action) = problem.snap_of(ev.task) else {
            verdict.push(ViolationKind::UnrefinedTask, format!("{} is not a snap action", problem.display_task(ev.task)));
            continue;
        };
        if ev.time < T::zero() {
            verdict.push(ViolationKind::NegativeTime, format!("{} at {}", problem.display_task(ev.task), ev.time));
        }
        events.push((ev.time, action));
    }
    events.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("comparable times"));

    let mut open: BTreeMap<usize, VecDeque<T>> = BTreeMap::new();
    let mut intervals = Vec::new();
    for &(time, action) in &events {
        let TaskKind::Snap(sid) = problem.kind(action.name) else { unreachable!() };
        let Some((did, endpoint)) = problem.durative_of_snap(sid) else { continue };
        let durative = problem.durative(did);
        match endpoint {
            Endpoint::Start => open.entry(did.index()).or_default().push_back(time),
            Endpoint::End => match open.get_mut(&did.index()).and_then(|q| q.pop_front()) {
                Some(start) => {
                    if time - start != durative.duration {
                        verdict.push(
                            ViolationKind::ConstraintViolation,
                            format!(
                                "{} runs from {} to {} but lasts {}",
                                problem.display_task(durative.name),
                                start,
                                time,
                                durative.duration
                            ),
                        );
                    }
                    intervals.push(Interval { start, end: time, invariants: &durative.invariants, name: durative.name });
                }
                None => verdict.push(
                    ViolationKind::ConstraintViolation,
                    format!("{} ends at {} without having started", problem.display_task(durative.name), time),
                ),
            },
        }
    }
    for (did, starts) in &open {
        for start in starts {
            let name = problem.durative(crate::model::DurativeId(*did as u32)).name;
            verdict.push(
                ViolationKind::ConstraintViolation,
                format!("{} starts at {} and never ends", problem.display_task(name), start),
            );
        }
    }

    // Group simultaneous events, placing the initial state at time 0.
    let init = problem.snap(problem.init_snap);
    let mut groups: Vec<(T, Vec<&SnapAction>)> = Vec::new();
    let mut init_placed = false;
    for &(time, action) in &events {
        if !init_placed && time >= T::zero() {
            if time == T::zero() {
                groups.push((time, vec![init]));
            } else {
                groups.push((T::zero(), vec![init]));
            }
            init_placed = true;
        }
        match groups.last_mut() {
            Some((t, members)) if *t == time => members.push(action),
            _ => groups.push((time, vec![action])),
        }
    }
    if !init_placed {
        groups.push((T::zero(), vec![init]));
    }

    let mut state = State::new();
    for (time, members) in &groups {
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                if interfere(a, b) {
                    verdict.push(
                        ViolationKind::ConstraintViolation,
                        format!(
                            "mutex: {} and {} both at {}",
                            problem.display_task(a.name),
                            problem.display_task(b.name),
                            time
                        ),
                    );
                }
            }
        }
        for a in members {
            for p in a.pre.iter().filter(|p| !state.contains(p)) {
                verdict.push(
                    ViolationKind::UnsupportedPrecondition,
                    format!("{} at {} needs {}", problem.display_task(a.name), time, problem.display_prop(p)),
                );
            }
        }
        for a in members {
            for p in a.del.iter() {
                state.remove(&p);
            }
        }
        for a in members {
            state.extend(a.add.iter());
        }
        for iv in intervals.iter().filter(|iv| iv.start <= *time && *time < iv.end) {
            for p in iv.invariants.iter().filter(|p| !state.contains(p)) {
                verdict.push(
                    ViolationKind::ViolatedInvariant,
                    format!(
                        "{} over ]{}, {}[ needs {} after {}",
                        problem.display_task(iv.name),
                        iv.start,
                        iv.end,
                        problem.display_prop(p),
                        time
                    ),
                );
            }
        }
    }
    for p in problem.goal.iter().filter(|p| !state.contains(p)) {
        verdict.push(ViolationKind::UnsupportedPrecondition, format!("goal {} does not hold at the end", problem.display_prop(p)));
    }
    verdict
}

/// Checks a plan and its schedule: every task is a snap task, the schedule
/// satisfies every constraint, links are not broken, and the timeline of the
/// plan's snap tasks executes.
pub fn validate<T: Scalar>(problem: &GroundProblem<T>, plan: &PartialPlan<T>, schedule: &Schedule<T>) -> Verdict {
    let mut verdict = Verdict::default();
    for (sym, task) in plan.tasks() {
        if !problem.is_snap(task.name) {
            verdict.push(ViolationKind::UnrefinedTask, format!("{sym} {} is not a snap task", problem.display_task(task.name)));
        }
    }
    for c in plan.network().constraints() {
        let (l, r) = (schedule.time(c.left), schedule.time(c.right));
        if !c.holds(l, r) {
            verdict.push(ViolationKind::ConstraintViolation, format!("{c} violated with {}={l}, {}={r}", c.left, c.right));
        }
    }
    let init_time = schedule.time(plan.task(plan.init_task()).expect("init task").point());
    if init_time != T::zero() {
        verdict.push(ViolationKind::ConstraintViolation, format!("initial state placed at {init_time}"));
    }

    let times: Vec<(TaskId, T)> = plan
        .tasks()
        .filter(|(_, t)| problem.is_snap(t.name))
        .map(|(_, t)| (t.name, schedule.time(t.point())))
        .collect();
    for link in plan.links() {
        let (Some(p), Some(c)) = (plan.task(link.producer), plan.task(link.consumer)) else {
            verdict.push(ViolationKind::BrokenLink, format!("link {}->{} refers to a missing task", link.producer, link.consumer));
            continue;
        };
        let (Some(pa), Some(ca)) = (problem.snap_of(p.name), problem.snap_of(c.name)) else {
            verdict.push(ViolationKind::BrokenLink, format!("link {}->{} between non-snap tasks", link.producer, link.consumer));
            continue;
        };
        let (tp, tc) = (schedule.time(p.point()), schedule.time(c.point()));
        let label = format!(
            "{} -{}-> {}",
            problem.display_task(p.name),
            problem.display_prop(link.prop),
            problem.display_task(c.name)
        );
        if tp >= tc {
            verdict.push(ViolationKind::BrokenLink, format!("{label}: producer at {tp} not before consumer at {tc}"));
        }
        if link.kind == LinkKind::Support
            && (!pa.add.contains(link.prop) || !(ca.pre.contains(link.prop) || c.extra_pre.contains(link.prop)))
        {
            verdict.push(ViolationKind::BrokenLink, format!("{label}: proposition not produced or not needed"));
        }
        for &(name, t) in &times {
            if tp < t && t < tc && problem.snap_of(name).is_some_and(|a| a.del.contains(link.prop)) {
                verdict.push(ViolationKind::BrokenLink, format!("{label}: deleted by {} at {t}", problem.display_task(name)));
            }
        }
    }

    let timeline: Vec<TimedSnap<T>> = times.iter().map(|&(task, time)| TimedSnap { time, task }).collect();
    verdict.violations.extend(validate_timeline(problem, &timeline).violations);
    verdict
}
