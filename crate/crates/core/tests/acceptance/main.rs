//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any hard criterion fails. The trend check is reported only.

mod conservation;
mod metric;
mod oracle;
mod point_algebra;
mod suite;

use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use htep::bench::{self, emit_plan, ipc_scores, parse_plan, run_suite, BenchConfig, Manifest, RunOutcome, EFFORT_PER_EXPANSION};
use htep::hddl::{self, GroundOptions};
use htep::heuristics::{FlawStrategy, HeuristicKind};
use htep::model::Relation;
use htep::search::{htep, Outcome, SearchConfig};
use htep::tpn::{PointNetwork, TemporalConstraint, TimePoint};
use htep::validate::{validate, validate_timeline};
use htep::{Problem, Rational};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use suite::SuiteRun;

struct Check {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Check {
    Check { pass, detail }
}

fn eps() -> Rational {
    Rational::new(1, 1000)
}

fn soundness(manifest: &Manifest, config: &BenchConfig<Rational>, run: &SuiteRun) -> Check {
    let mut failures = Vec::new();
    let mut solved = 0;
    for (k, r) in run.records.iter().enumerate() {
        let Some(text) = &r.plan else { continue };
        solved += 1;
        let inst = &manifest.instances[k / config.configs.len()];
        // validate against the full grounding, not the pruned one
        let problem: Problem = hddl::load_files(&inst.domain, &inst.problem, &GroundOptions::default()).unwrap();
        let verdict = parse_plan::<Rational>(text)
            .and_then(|f| f.timeline(&problem))
            .map(|timeline| validate_timeline(&problem, &timeline));
        match verdict {
            Ok(v) if v.accepted() => {}
            Ok(v) => failures.push(format!("{} {}: {}", r.instance, r.config, v.to_string().trim())),
            Err(e) => failures.push(format!("{} {}: {e}", r.instance, r.config)),
        }
    }

    // the search result itself, checked against the partial plan
    let run_config = &config.configs[0];
    let search = SearchConfig {
        heuristic: run_config.heuristic,
        flaw_strategy: run_config.flaw_strategy,
        weights: run_config.weights,
        eager_metric: run_config.eager_metric,
        epsilon: config.budgets.epsilon,
        node_limit: Some((config.budgets.timeout.as_secs_f64() / EFFORT_PER_EXPANSION) as u64),
        time_limit: None,
        memory_limit: None,
        seed: 0,
    };
    let mut direct = 0;
    for (i, inst) in manifest.instances.iter().enumerate() {
        let problem: Problem = hddl::load_files(&inst.domain, &inst.problem, &config.grounding).unwrap();
        let Outcome::Solved { plan, schedule } = htep(&problem, &search).outcome else { continue };
        direct += 1;
        let v = validate(&problem, &plan, &schedule);
        if !v.accepted() {
            failures.push(format!("{} direct: {}", inst.id, v.to_string().trim()));
        }
        let record = &run.records[i * config.configs.len()];
        if record.plan.as_deref() != Some(emit_plan(&problem, &plan, &schedule, config.budgets.epsilon).as_str()) {
            failures.push(format!("{} direct: plan differs from the bench run", inst.id));
        }
    }
    let within = run.elapsed < Duration::from_secs(300);
    check(
        failures.is_empty() && solved > 0 && within,
        format!(
            "{}/{solved} emitted plans accepted from {} runs in {:.1}s; {direct} direct {} solutions pass the structural check{}",
            solved - failures.len().min(solved),
            run.records.len(),
            run.elapsed.as_secs_f64(),
            run_config.id,
            first_failures(&failures)
        ),
    )
}

fn first_failures(failures: &[String]) -> String {
    if failures.is_empty() {
        return String::new();
    }
    format!("; failures: {}", failures.iter().take(3).cloned().collect::<Vec<_>>().join(" | "))
}

fn oracle_equivalence() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let problems = 200;
    let mut runs = 0;
    let mut solvable = 0;
    let mut failures = Vec::new();
    for k in 0..problems {
        let t = oracle::Tiny::random(&mut rng);
        let problem = t.to_problem();
        let truth = oracle::solve(&t).solvable;
        solvable += truth as usize;
        for heuristic in HeuristicKind::ALL {
            for flaw_strategy in [FlawStrategy::Lcfr, FlawStrategy::Fape] {
                let config = SearchConfig { heuristic, flaw_strategy, node_limit: Some(200_000), ..SearchConfig::default() };
                let outcome = htep(&problem, &config).outcome;
                runs += 1;
                let decided = matches!(outcome, Outcome::Solved { .. } | Outcome::Unsolvable);
                if !decided || outcome.is_solved() != truth {
                    failures.push(format!(
                        "problem {k} ({} abstract tasks) {}/{}: planner {}, oracle {}",
                        t.abstract_count(),
                        heuristic.name(),
                        flaw_strategy.name(),
                        outcome.name(),
                        if truth { "solvable" } else { "unsolvable" }
                    ));
                }
            }
        }
    }
    check(
        failures.is_empty() && problems >= 20 && solvable > 0 && solvable < problems,
        format!(
            "{}/{runs} verdicts agree over {problems} problems ({solvable} solvable) and 6 search configurations{}",
            runs - failures.len(),
            first_failures(&failures)
        ),
    )
}

fn temporal_core() -> Check {
    let mut detail = String::new();
    let mut ok = true;
    let mut networks = 0;
    for n in 1..=5 {
        let tally = point_algebra::exhaustive(n);
        ok &= tally.mismatches == 0;
        networks += tally.networks;
        if tally.mismatches > 0 {
            let _ = write!(detail, "{} mismatches at n={n}; ", tally.mismatches);
        }
    }
    let _ = write!(detail, "{networks} networks of <= 5 points exhaustive; ");

    let mut rng = StdRng::seed_from_u64(6);
    let orders = point_algebra::preorders(6);
    let mut mismatches = 0;
    let mut consistent = 0;
    for _ in 0..1000 {
        let mut net = point_algebra::network(6);
        let mut cs = Vec::new();
        for _ in 0..rng.gen_range(1..=15) {
            let (i, j) = (rng.gen_range(0..6), rng.gen_range(0..6));
            let rel = point_algebra::RELATIONS[rng.gen_range(0..6)];
            net.insert(point_algebra::constraint(i, rel, j));
            cs.push((i, rel, j));
        }
        let brute = orders.iter().any(|r| cs.iter().all(|&(i, rel, j)| point_algebra::rank_holds(rel, r[i], r[j])));
        consistent += brute as u32;
        mismatches += (brute != net.is_consistent()) as u32;
        mismatches += (brute != net.check_from_scratch()) as u32;
    }
    ok &= mismatches == 0;
    let _ = write!(detail, "1000 random 6-point networks ({consistent} consistent, {mismatches} mismatches); ");

    let mut scheduled = 0;
    let mut infeasible = 0;
    let mut errors = Vec::new();
    for k in 0..1000 {
        let items = metric::random_items(&mut rng, 6);
        let net = metric::build(6, &items);
        let truth = metric::feasible(6, &items, 1000);
        match net.solve_metric(eps()) {
            Some(schedule) => {
                scheduled += 1;
                if let Err(e) = metric::satisfies(schedule.times(), &items, eps()) {
                    errors.push(format!("network {k}: {e}"));
                }
                if !truth {
                    errors.push(format!("network {k}: scheduled but infeasible"));
                }
            }
            None => {
                infeasible += 1;
                if truth {
                    errors.push(format!("network {k}: feasible but no schedule"));
                }
            }
        }
    }
    ok &= errors.is_empty();
    let _ = write!(
        detail,
        "1000 metric networks ({scheduled} schedules verified, {infeasible} infeasible confirmed){}",
        first_failures(&errors)
    );
    check(ok, detail)
}

fn conservation(manifest: &Manifest, config: &BenchConfig<Rational>) -> Check {
    let problems: Vec<Problem> = manifest
        .instances
        .iter()
        .map(|i| hddl::load_files(&i.domain, &i.problem, &config.grounding).unwrap())
        .collect();
    let mut rng = StdRng::seed_from_u64(4);
    let w = conservation::walk(&problems, 10_000, 80, &mut rng);
    check(
        w.violations.is_empty() && w.methods > 0 && w.compilations > 0,
        format!(
            "{} steps ({} methods, {} compilations, {} links, {} orderings, {} restarts), {} violations{}",
            w.steps,
            w.methods,
            w.compilations,
            w.links,
            w.orderings,
            w.restarts,
            w.violations.len(),
            first_failures(&w.violations)
        ),
    )
}

fn concurrency(run: &SuiteRun) -> Check {
    let mut witnesses = Vec::new();
    for r in run.records.iter().filter(|r| r.suite == "rover" || r.suite == "areascan") {
        let Some(plan) = &r.plan else { continue };
        let iv = suite::intervals(plan);
        let overlap = iv.iter().enumerate().any(|(a, x)| iv[a + 1..].iter().any(|y| x.1 < y.2 && y.1 < x.2));
        let total: Rational = iv.iter().map(|x| x.2 - x.1).sum();
        let makespan = suite::makespan(plan);
        if overlap && makespan < total {
            witnesses.push(format!("{} {} (makespan {makespan} < {total})", r.instance, r.config));
        }
    }
    let shown = witnesses.iter().take(2).cloned().collect::<Vec<_>>().join(", ");
    check(!witnesses.is_empty(), format!("{} concurrent solutions, e.g. {shown}", witnesses.len()))
}

fn trend(run: &SuiteRun) -> Check {
    let by_suite = ipc_scores(&run.records).by_suite();
    let mut wins = [0; 2];
    let mut table = Vec::new();
    for (suite, scores) in &by_suite {
        let time = |c: &str| scores.get(c).map_or(0.0, |s| s.0);
        let fape = time("htep-fape");
        for (k, c) in ["htep-tdgm", "htep-f_tc"].iter().enumerate() {
            wins[k] += (time(c) >= fape) as usize;
        }
        table.push(format!("{suite} tdgm {:.2} f_tc {:.2} fape {fape:.2}", time("htep-tdgm"), time("htep-f_tc")));
    }
    check(
        wins.iter().all(|&w| w >= 2),
        format!(
            "time score >= fape on {}/{} domains for tdgm, {}/{} for f_tc [{}]",
            wins[0],
            by_suite.len(),
            wins[1],
            by_suite.len(),
            table.join("; ")
        ),
    )
}

fn performance(manifest: &Manifest, config: &BenchConfig<Rational>, run: &SuiteRun) -> Check {
    let started = Instant::now();
    let n = 100_001;
    let mut net = PointNetwork::<Rational>::new();
    let points: Vec<TimePoint> = (0..n).map(|_| net.add_point()).collect();
    for w in points.windows(2) {
        net.insert(TemporalConstraint::new(w[0], Relation::Lt, w[1]));
    }
    let consistent = net.is_consistent() && net.check_from_scratch();
    let closing = net.allows(points[n - 1], Relation::Le, points[0]);
    let chain = started.elapsed();

    let budget = config.budgets.timeout.as_secs_f64();
    let mut slowest = (0.0, String::new());
    let mut over = Vec::new();
    for (i, inst) in manifest.instances.iter().enumerate() {
        let span = i * config.configs.len()..(i + 1) * config.configs.len();
        let best = span
            .filter(|&k| run.records[k].outcome == RunOutcome::Solved)
            .map(|k| run.records[k].time.max(run.wall[k].as_secs_f64()))
            .min_by(f64::total_cmp);
        match best {
            Some(t) if t <= budget => {
                if t > slowest.0 {
                    slowest = (t, inst.id.clone());
                }
            }
            _ => over.push(inst.id.clone()),
        }
    }
    check(
        consistent && !closing && chain < Duration::from_secs(1) && over.is_empty(),
        format!(
            "chain of {} constraints built and checked in {:.3}s; {}/{} instances solved within {budget}s by the best configuration (slowest {} at {:.2}s){}",
            n - 1,
            chain.as_secs_f64(),
            manifest.instances.len() - over.len(),
            manifest.instances.len(),
            slowest.1,
            slowest.0,
            first_failures(&over)
        ),
    )
}

fn determinism(manifest: &Manifest, config: &BenchConfig<Rational>, run: &SuiteRun) -> Check {
    let again = run_suite(manifest, config).expect("bundled suite");
    let csv = |records: &[bench::RunRecord<Rational>]| {
        let mut out = Vec::new();
        bench::write_csv(records, &mut out).unwrap();
        out
    };
    let mut diffs = Vec::new();
    for (a, b) in run.records.iter().zip(&again) {
        if a.plan != b.plan {
            diffs.push(format!("{} {}: plan", a.instance, a.config));
        }
        if a.stats.to_kv(false) != b.stats.to_kv(false) {
            diffs.push(format!("{} {}: stats", a.instance, a.config));
        }
    }
    let same_csv = csv(&run.records) == csv(&again);
    if !same_csv {
        diffs.push("csv".into());
    }
    let plans = run.records.iter().filter(|r| r.plan.is_some()).count();
    check(
        diffs.is_empty() && run.records.len() == again.len(),
        format!("second run: {plans} plan files, {} stats blocks and the CSV byte-identical{}", again.len(), first_failures(&diffs)),
    )
}

fn main() -> ExitCode {
    let mut failed = false;
    let mut report = |id: u8, name: &str, hard: bool, started: Instant, c: Check| {
        let label = if c.pass { "PASS" } else { "FAIL" };
        let note = if hard || c.pass { "" } else { " (reported only)" };
        println!("{label} {id} {name}{note}: {} ({:.1}s)", c.detail, started.elapsed().as_secs_f64());
        failed |= hard && !c.pass;
    };

    let (manifest, config) = suite::load();
    let t = Instant::now();
    let run = suite::run(&manifest, &config);
    report(1, "soundness", true, t, soundness(&manifest, &config, &run));

    let t = Instant::now();
    report(2, "oracle equivalence", true, t, oracle_equivalence());

    let t = Instant::now();
    report(3, "temporal core", true, t, temporal_core());

    let t = Instant::now();
    report(4, "refinement conservation", true, t, conservation(&manifest, &config));

    let t = Instant::now();
    report(5, "concurrency", true, t, concurrency(&run));

    let t = Instant::now();
    report(6, "trend", false, t, trend(&run));

    let t = Instant::now();
    report(7, "performance", true, t, performance(&manifest, &config, &run));

    let t = Instant::now();
    report(8, "determinism", true, t, determinism(&manifest, &config, &run));

    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
