//! Random refinement walks over the bundled problems, checking how each
//! resolver changes the number of tasks and links.

use htep::model::TaskKind;
use htep::plan::{detect_flaws, initial_plan};
use htep::refine::{apply_resolver, resolvers_for, Resolver};
use htep::Problem;
use rand::rngs::StdRng;
use rand::Rng;

#[derive(Default, Debug)]
pub struct Walk {
    pub steps: u64,
    pub methods: u64,
    pub compilations: u64,
    pub links: u64,
    pub orderings: u64,
    pub restarts: u64,
    pub violations: Vec<String>,
}

/// Expected `(tasks, links)` after applying `r` to a plan with `tasks`
/// tasks and `links` links.
fn expected(problem: &Problem, plan: &htep::Plan, r: &Resolver, tasks: usize, links: usize) -> (usize, usize) {
    match *r {
        Resolver::ApplyMethod { method, .. } => (tasks - 1 + problem.method(method).subtasks().len(), links),
        Resolver::CompileDurative { task } => {
            let name = plan.task(task).unwrap().name;
            let TaskKind::Durative(d) = problem.kind(name) else { panic!("compiling a non-durative task") };
            (tasks + 1, links + problem.durative(d).invariants.len())
        }
        Resolver::AddLink { .. } => (tasks, links + 1),
        Resolver::Promote { .. } | Resolver::Demote { .. } => (tasks, links),
    }
}

pub fn walk(problems: &[Problem], steps: u64, max_depth: usize, rng: &mut StdRng) -> Walk {
    let mut w = Walk::default();
    let mut pb = &problems[0];
    let mut plan = initial_plan(pb);
    let mut depth = 0;
    while w.steps < steps {
        let flaws = detect_flaws(pb, &plan);
        let candidates = if flaws.is_empty() || depth >= max_depth {
            Vec::new()
        } else {
            let flaw = &flaws[rng.gen_range(0..flaws.len())];
            resolvers_for(pb, &plan, flaw)
        };
        let child = (!candidates.is_empty()).then(|| {
            let r = candidates[rng.gen_range(0..candidates.len())];
            (r, apply_resolver(pb, &plan, &r))
        });
        let Some((r, Some(child))) = child else {
            pb = &problems[rng.gen_range(0..problems.len())];
            plan = initial_plan(pb);
            depth = 0;
            w.restarts += 1;
            continue;
        };
        let want = expected(pb, &plan, &r, plan.task_count(), plan.link_count());
        let got = (child.task_count(), child.link_count());
        if want != got {
            w.violations.push(format!("{r:?}: expected (tasks, links) = {want:?}, got {got:?}"));
        }
        match r {
            Resolver::ApplyMethod { .. } => w.methods += 1,
            Resolver::CompileDurative { .. } => w.compilations += 1,
            Resolver::AddLink { .. } => w.links += 1,
            Resolver::Promote { .. } | Resolver::Demote { .. } => w.orderings += 1,
        }
        w.steps += 1;
        depth += 1;
        plan = child;
    }
    w
}
