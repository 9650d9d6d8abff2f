//! Plan files, benchmark suites, IPC scoring and report emission.
//!
//! A plan file lists the snap actions of a solution, one per line:
//!
//! ```text
//! ;; epsilon = 1/1000
//! ;; makespan = 7
//! 0: (drive@start v1 a b)
//! 5/2: (drive@end v1 a b)
//! ```
//!
//! A suite manifest is a TOML file with one `[[suite]]` table per domain:
//!
//! ```toml
//! [[suite]]
//! name = "gripper"
//! domain = "gripper/domain.hddl"
//! problems = ["gripper/p01.hddl", "gripper/p02.hddl"]
//! ```
//!
//! Paths are relative to the manifest.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use log::info;
use serde::Deserialize;
use thiserror::Error;

use crate::hddl::{self, GroundOptions, HddlError};
use crate::heuristics::{FapeWeights, FlawStrategy, HeuristicKind};
use crate::model::GroundProblem;
use crate::plan::PartialPlan;
use crate::scalar::Scalar;
use crate::search::{htep, Outcome, SearchConfig, SearchStats};
use crate::tpn::Schedule;
use crate::validate::TimedSnap;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("line {line}: {msg}")]
    PlanSyntax { line: usize, msg: String },
    #[error("step {step}: {msg}")]
    PlanAction { step: usize, msg: String },
    #[error("{path}: {msg}")]
    Manifest { path: String, msg: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Hddl(#[from] HddlError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> BenchError + '_ {
    move |source| BenchError::Io { path: path.display().to_string(), source }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanStep<T> {
    pub time: T,
    /// Ground snap action, normalized to `(head arg ...)`.
    pub action: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanFile<T> {
    pub epsilon: Option<T>,
    pub makespan: Option<T>,
    pub steps: Vec<PlanStep<T>>,
}

impl<T: Scalar> PlanFile<T> {
    /// The snap tasks of a solved plan in time order, without the sentinels.
    pub fn from_solution(
        problem: &GroundProblem<T>,
        plan: &PartialPlan<T>,
        schedule: &Schedule<T>,
        epsilon: T,
    ) -> Self {
        let mut steps: Vec<PlanStep<T>> = plan
            .tasks()
            .filter(|(sym, t)| {
                *sym != plan.init_task() && *sym != plan.goal_task() && problem.is_snap(t.name)
            })
            .map(|(_, t)| PlanStep { time: schedule.time(t.point()), action: problem.display_task(t.name) })
            .collect();
        steps.sort_by(|a, b| a.time.partial_cmp(&b.time).expect("comparable times"));
        PlanFile { epsilon: Some(epsilon), makespan: Some(schedule.makespan()), steps }
    }

    /// Resolves each step against the ground problem.
    pub fn timeline(&self, problem: &GroundProblem<T>) -> Result<Vec<TimedSnap<T>>, BenchError> {
        self.steps
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let unknown = || BenchError::PlanAction { step: i + 1, msg: format!("unknown action {}", s.action) };
                let inner = s.action.trim_start_matches('(').trim_end_matches(')');
                let mut words = inner.split_whitespace();
                let head = words.next().ok_or_else(unknown)?;
                let args: Vec<&str> = words.collect();
                let atom = problem.lookup_atom(head, &args).ok_or_else(unknown)?;
                let task = problem.task_id(&atom).ok_or_else(unknown)?;
                if !problem.is_snap(task) {
                    return Err(BenchError::PlanAction {
                        step: i + 1,
                        msg: format!("{} is not a snap action", s.action),
                    });
                }
                Ok(TimedSnap { time: s.time, task })
            })
            .collect()
    }
}

impl<T: Scalar> fmt::Display for PlanFile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(e) = &self.epsilon {
            writeln!(f, ";; epsilon = {e}")?;
        }
        if let Some(m) = &self.makespan {
            writeln!(f, ";; makespan = {m}")?;
        }
        for s in &self.steps {
            writeln!(f, "{}: {}", s.time, s.action)?;
        }
        Ok(())
    }
}

pub fn emit_plan<T: Scalar>(
    problem: &GroundProblem<T>,
    plan: &PartialPlan<T>,
    schedule: &Schedule<T>,
    epsilon: T,
) -> String {
    PlanFile::from_solution(problem, plan, schedule, epsilon).to_string()
}

pub fn parse_plan<T: Scalar>(text: &str) -> Result<PlanFile<T>, BenchError> {
    let mut file = PlanFile { epsilon: None, makespan: None, steps: Vec::new() };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: String| BenchError::PlanSyntax { line, msg };
        let text = raw.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(header) = text.strip_prefix(";;") {
            if let Some((key, value)) = header.split_once('=') {
                let slot = match key.trim() {
                    "epsilon" => &mut file.epsilon,
                    "makespan" => &mut file.makespan,
                    _ => continue,
                };
                *slot = Some(T::parse_literal(value.trim()).ok_or_else(|| err(format!("bad number `{}`", value.trim())))?);
            }
            continue;
        }
        if text.starts_with(';') {
            continue;
        }
        let (time, action) = text.split_once(':').ok_or_else(|| err("expected `<time>: (<action> ...)`".into()))?;
        let time = T::parse_literal(time.trim()).ok_or_else(|| err(format!("bad time `{}`", time.trim())))?;
        let action = action.trim();
        let Some(inner) = action.strip_prefix('(').and_then(|a| a.strip_suffix(')')) else {
            return Err(err(format!("expected a parenthesized action, found `{action}`")));
        };
        if inner.contains(['(', ')']) {
            return Err(err("nested parentheses".into()));
        }
        let words: Vec<String> = inner.split_whitespace().map(str::to_lowercase).collect();
        if words.is_empty() {
            return Err(err("empty action".into()));
        }
        file.steps.push(PlanStep { time, action: format!("({})", words.join(" ")) });
    }
    Ok(file)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    /// `suite/problem-stem`.
    pub id: String,
    pub suite: String,
    pub domain: PathBuf,
    pub problem: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub instances: Vec<Instance>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestToml {
    #[serde(default)]
    suite: Vec<SuiteToml>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteToml {
    name: String,
    domain: PathBuf,
    problems: Vec<PathBuf>,
}

impl Manifest {
    /// Parses a manifest and checks that every referenced file exists.
    pub fn parse(text: &str, base: &Path, origin: &str) -> Result<Manifest, BenchError> {
        let err = |msg: String| BenchError::Manifest { path: origin.to_string(), msg };
        let raw: ManifestToml = toml::from_str(text).map_err(|e| err(e.message().to_string()))?;
        let mut instances = Vec::new();
        for s in raw.suite {
            let domain = base.join(&s.domain);
            if !domain.is_file() {
                return Err(err(format!("missing domain file {}", domain.display())));
            }
            for p in s.problems {
                let problem = base.join(&p);
                if !problem.is_file() {
                    return Err(err(format!("missing problem file {}", problem.display())));
                }
                let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                let id = format!("{}/{}", s.name, stem);
                if instances.iter().any(|i: &Instance| i.id == id) {
                    return Err(err(format!("duplicate instance {id}")));
                }
                instances.push(Instance { id, suite: s.name.clone(), domain: domain.clone(), problem });
            }
        }
        Ok(Manifest { instances })
    }

    pub fn load(path: &Path) -> Result<Manifest, BenchError> {
        let text = std::fs::read_to_string(path).map_err(io_error(path))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Manifest::parse(&text, base, &path.display().to_string())
    }
}

/// Seconds charged per expansion under [`Timing::Effort`]; a conservative
/// figure for an optimized build.
pub const EFFORT_PER_EXPANSION: f64 = 1e-4;

/// How run times are measured.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum Timing {
    /// [`EFFORT_PER_EXPANSION`] seconds per expanded plan. Reproducible.
    #[default]
    Effort,
    /// Wall-clock time from grounding to solution.
    Wall,
}

impl std::str::FromStr for Timing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "effort" => Ok(Timing::Effort),
            "wall" => Ok(Timing::Wall),
            _ => Err(format!("unknown timing `{s}` (expected effort or wall)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub id: String,
    pub heuristic: HeuristicKind,
    pub flaw_strategy: FlawStrategy,
    pub weights: FapeWeights,
    pub eager_metric: bool,
}

impl RunConfig {
    pub fn new(id: &str, heuristic: HeuristicKind, flaw_strategy: FlawStrategy) -> Self {
        RunConfig { id: id.into(), heuristic, flaw_strategy, weights: FapeWeights::default(), eager_metric: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Budgets<T> {
    pub timeout: Duration,
    pub memory_bytes: u64,
    pub node_limit: Option<u64>,
    pub epsilon: T,
    pub timing: Timing,
}

impl<T: Scalar> Default for Budgets<T> {
    fn default() -> Self {
        Budgets {
            timeout: Duration::from_secs(64),
            memory_bytes: 2 << 30,
            node_limit: None,
            epsilon: T::from_ratio(1, 1000),
            timing: Timing::Effort,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig<T> {
    pub configs: Vec<RunConfig>,
    pub budgets: Budgets<T>,
    /// Shared by every configuration.
    pub grounding: GroundOptions,
}

impl<T: Scalar> Default for BenchConfig<T> {
    /// The three HTEP configurations, all with FAPE's flaw selection.
    fn default() -> Self {
        BenchConfig {
            configs: vec![
                RunConfig::new("htep-tdgm", HeuristicKind::Tdgm, FlawStrategy::Fape),
                RunConfig::new("htep-f_tc", HeuristicKind::FTc, FlawStrategy::Fape),
                RunConfig::new("htep-fape", HeuristicKind::Fape, FlawStrategy::Fape),
            ],
            budgets: Budgets::default(),
            grounding: GroundOptions::default(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigToml {
    #[serde(default)]
    budget: BudgetToml,
    #[serde(default)]
    grounding: GroundingToml,
    #[serde(default)]
    config: Vec<RunConfigToml>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct GroundingToml {
    max_instances: Option<usize>,
    prune_unreachable: Option<bool>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct BudgetToml {
    timeout: Option<f64>,
    memory_mb: Option<u64>,
    node_limit: Option<u64>,
    epsilon: Option<String>,
    timing: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfigToml {
    id: String,
    heuristic: String,
    #[serde(default)]
    flaw_strategy: Option<String>,
    #[serde(default)]
    weights: Option<WeightsToml>,
    #[serde(default)]
    eager_metric: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsToml {
    unrefined: Option<u64>,
    open: Option<u64>,
    threat: Option<u64>,
}

impl<T: Scalar> BenchConfig<T> {
    /// Reads a configuration file:
    ///
    /// ```toml
    /// [budget]
    /// timeout = 64        # seconds
    /// memory_mb = 2048
    /// epsilon = "1/1000"
    /// timing = "effort"   # or "wall"
    ///
    /// [grounding]
    /// prune_unreachable = true
    ///
    /// [[config]]
    /// id = "htep-tdgm"
    /// heuristic = "tdgm"
    /// flaw_strategy = "fape"
    /// ```
    ///
    /// Without any `[[config]]` table the default configurations are used.
    pub fn parse(text: &str, origin: &str) -> Result<Self, BenchError> {
        let err = |msg: String| BenchError::Manifest { path: origin.to_string(), msg };
        let raw: ConfigToml = toml::from_str(text).map_err(|e| err(e.message().to_string()))?;
        let mut out = BenchConfig::default();
        let b = raw.budget;
        if let Some(t) = b.timeout {
            if !(t > 0.0 && t.is_finite()) {
                return Err(err("timeout must be positive".into()));
            }
            out.budgets.timeout = Duration::from_secs_f64(t);
        }
        if let Some(m) = b.memory_mb {
            if m == 0 {
                return Err(err("memory_mb must be positive".into()));
            }
            out.budgets.memory_bytes = m << 20;
        }
        out.budgets.node_limit = b.node_limit;
        if let Some(e) = b.epsilon {
            out.budgets.epsilon = T::parse_literal(&e)
                .filter(|e| *e > T::zero())
                .ok_or_else(|| err(format!("bad epsilon `{e}`")))?;
        }
        if let Some(t) = b.timing {
            out.budgets.timing = t.parse().map_err(err)?;
        }
        if let Some(n) = raw.grounding.max_instances {
            out.grounding.max_instances = n;
        }
        if let Some(p) = raw.grounding.prune_unreachable {
            out.grounding.prune_unreachable = p;
        }
        if !raw.config.is_empty() {
            out.configs.clear();
        }
        for c in raw.config {
            let heuristic: HeuristicKind = c.heuristic.parse().map_err(|e: String| err(e))?;
            let flaw_strategy = match c.flaw_strategy {
                Some(s) => s.parse().map_err(|e: String| err(e))?,
                None => FlawStrategy::Fape,
            };
            let mut weights = FapeWeights::default();
            if let Some(w) = c.weights {
                weights.unrefined = w.unrefined.unwrap_or(weights.unrefined);
                weights.open = w.open.unwrap_or(weights.open);
                weights.threat = w.threat.unwrap_or(weights.threat);
            }
            if out.configs.iter().any(|x| x.id == c.id) {
                return Err(err(format!("duplicate configuration {}", c.id)));
            }
            out.configs.push(RunConfig { id: c.id, heuristic, flaw_strategy, weights, eager_metric: c.eager_metric });
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(io_error(path))?;
        BenchConfig::parse(&text, &path.display().to_string())
    }

    fn search_config(&self, run: &RunConfig) -> SearchConfig<T> {
        let b = &self.budgets;
        let node_limit = match b.timing {
            // the effort clock must run out together with the budget
            Timing::Effort => {
                let effort = ((b.timeout.as_secs_f64() / EFFORT_PER_EXPANSION) as u64).max(1);
                Some(b.node_limit.map_or(effort, |n| n.min(effort)))
            }
            Timing::Wall => b.node_limit,
        };
        SearchConfig {
            heuristic: run.heuristic,
            weights: run.weights,
            flaw_strategy: run.flaw_strategy,
            epsilon: b.epsilon,
            node_limit,
            time_limit: Some(b.timeout),
            memory_limit: Some(b.memory_bytes),
            eager_metric: run.eager_metric,
            seed: 0,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RunOutcome {
    Solved,
    Timeout,
    Memory,
    Unsolvable,
}

impl RunOutcome {
    pub fn name(self) -> &'static str {
        match self {
            RunOutcome::Solved => "solved",
            RunOutcome::Timeout => "timeout",
            RunOutcome::Memory => "memory",
            RunOutcome::Unsolvable => "unsolvable",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord<T> {
    pub instance: String,
    pub suite: String,
    pub config: String,
    pub outcome: RunOutcome,
    /// Seconds, measured as configured by [`Timing`].
    pub time: f64,
    /// Present iff solved.
    pub makespan: Option<T>,
    pub stats: SearchStats,
    /// The emitted plan file, when solved.
    pub plan: Option<String>,
}

/// Grounds and solves one instance under one configuration.
pub fn run_instance<T: Scalar>(
    instance: &Instance,
    run: &RunConfig,
    bench: &BenchConfig<T>,
) -> Result<RunRecord<T>, BenchError> {
    let started = Instant::now();
    let problem: GroundProblem<T> = hddl::load_files(&instance.domain, &instance.problem, &bench.grounding)?;
    let result = htep(&problem, &bench.search_config(run));
    let wall = started.elapsed().as_secs_f64();
    let time = match bench.budgets.timing {
        Timing::Effort => result.stats.expanded as f64 * EFFORT_PER_EXPANSION,
        Timing::Wall => wall,
    };
    let (outcome, makespan, plan) = match &result.outcome {
        Outcome::Solved { plan, schedule } => (
            RunOutcome::Solved,
            Some(schedule.makespan()),
            Some(emit_plan(&problem, plan, schedule, bench.budgets.epsilon)),
        ),
        Outcome::Unsolvable => (RunOutcome::Unsolvable, None, None),
        Outcome::NodeLimit | Outcome::Timeout => (RunOutcome::Timeout, None, None),
        Outcome::Memory => (RunOutcome::Memory, None, None),
    };
    info!("{} {}: {} in {:.3}s", instance.id, run.id, outcome.name(), time);
    Ok(RunRecord {
        instance: instance.id.clone(),
        suite: instance.suite.clone(),
        config: run.id.clone(),
        outcome,
        time,
        makespan,
        stats: result.stats,
        plan,
    })
}

/// Runs every configuration on every instance, instance-major. All instances
/// are parsed before the first run so that broken inputs fail early.
pub fn run_suite<T: Scalar>(manifest: &Manifest, bench: &BenchConfig<T>) -> Result<Vec<RunRecord<T>>, BenchError> {
    for i in &manifest.instances {
        hddl::load_files::<T>(&i.domain, &i.problem, &bench.grounding)?;
    }
    let mut records = Vec::with_capacity(manifest.instances.len() * bench.configs.len());
    for i in &manifest.instances {
        for c in &bench.configs {
            records.push(run_instance(i, c, bench)?);
        }
    }
    Ok(records)
}

pub const CSV_HEADER: [&str; 11] = [
    "instance",
    "suite",
    "config",
    "outcome",
    "time",
    "makespan",
    "expanded",
    "generated",
    "dead_ends_qualitative",
    "dead_ends_metric",
    "peak_open",
];

pub fn write_csv<T: Scalar, W: std::io::Write>(records: &[RunRecord<T>], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        let s = &r.stats;
        w.write_record([
            r.instance.clone(),
            r.suite.clone(),
            r.config.clone(),
            r.outcome.name().to_string(),
            format!("{:.4}", r.time),
            r.makespan.map(|m| m.to_string()).unwrap_or_default(),
            s.expanded.to_string(),
            s.generated.to_string(),
            s.dead_ends_qualitative.to_string(),
            s.dead_ends_metric.to_string(),
            s.peak_open.to_string(),
        ])?;
    }
    w.flush().map_err(|source| BenchError::Io { path: "csv output".into(), source })?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceScore {
    pub instance: String,
    pub suite: String,
    pub config: String,
    pub time: f64,
    pub quality: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IpcScores {
    /// Configuration ids in first-seen order.
    pub configs: Vec<String>,
    pub instances: Vec<InstanceScore>,
}

impl IpcScores {
    /// Summed (time, quality) score of a configuration.
    pub fn total(&self, config: &str) -> (f64, f64) {
        self.instances
            .iter()
            .filter(|s| s.config == config)
            .fold((0.0, 0.0), |(t, q), s| (t + s.time, q + s.quality))
    }

    /// Suite -> configuration -> summed (time, quality).
    pub fn by_suite(&self) -> BTreeMap<String, BTreeMap<String, (f64, f64)>> {
        let mut out: BTreeMap<String, BTreeMap<String, (f64, f64)>> = BTreeMap::new();
        for s in &self.instances {
            let e = out.entry(s.suite.clone()).or_default().entry(s.config.clone()).or_default();
            e.0 += s.time;
            e.1 += s.quality;
        }
        out
    }

    /// A plain-text table of the totals per suite.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<12} {:<16} {:>8} {:>8}", "suite", "config", "time", "quality");
        for (suite, configs) in self.by_suite() {
            for c in &self.configs {
                let (t, q) = configs.get(c).copied().unwrap_or_default();
                let _ = writeln!(out, "{suite:<12} {c:<16} {t:>8.3} {q:>8.3}");
            }
        }
        for c in &self.configs {
            let (t, q) = self.total(c);
            let _ = writeln!(out, "{:<12} {c:<16} {t:>8.3} {q:>8.3}", "total");
        }
        out
    }
}

/// Time score of a run taking `t` seconds when the fastest took `best`.
/// Runs of at most a second score 1; `best` is clamped to a second so that
/// the score does not jump just above that threshold.
pub fn time_score(t: f64, best: f64) -> f64 {
    if t <= 1.0 {
        1.0
    } else {
        1.0 / (1.0 + (t / best.max(1.0)).log10())
    }
}

/// Quality score of makespan `q` when the best is `best`.
pub fn quality_score(q: f64, best: f64) -> f64 {
    if q <= best {
        1.0
    } else {
        best / q
    }
}

pub fn ipc_scores<T: Scalar>(records: &[RunRecord<T>]) -> IpcScores {
    let mut configs: Vec<String> = Vec::new();
    for r in records {
        if !configs.contains(&r.config) {
            configs.push(r.config.clone());
        }
    }
    let mut best: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
    for r in records.iter().filter(|r| r.outcome == RunOutcome::Solved) {
        let q = r.makespan.expect("solved runs have a makespan").to_f64();
        let e = best.entry(r.instance.as_str()).or_insert((f64::INFINITY, f64::INFINITY));
        e.0 = e.0.min(r.time);
        e.1 = e.1.min(q);
    }
    let instances = records
        .iter()
        .map(|r| {
            let (time, quality) = match (r.outcome, best.get(r.instance.as_str())) {
                (RunOutcome::Solved, Some(&(bt, bq))) => {
                    (time_score(r.time, bt), quality_score(r.makespan.expect("solved").to_f64(), bq))
                }
                _ => (0.0, 0.0),
            };
            InstanceScore { instance: r.instance.clone(), suite: r.suite.clone(), config: r.config.clone(), time, quality }
        })
        .collect();
    IpcScores { configs, instances }
}

/// Writes one `<suite>.dat` table per suite and a gnuplot script
/// `scores.gp` drawing a time and a quality histogram for each of them.
pub fn write_plots(dir: &Path, scores: &IpcScores) -> Result<(), BenchError> {
    std::fs::create_dir_all(dir).map_err(io_error(dir))?;
    let suites = scores.by_suite();
    for (suite, totals) in &suites {
        let mut dat = String::from("# config time quality\n");
        for c in &scores.configs {
            let (t, q) = totals.get(c).copied().unwrap_or_default();
            let _ = writeln!(dat, "{c} {t:.4} {q:.4}");
        }
        let path = dir.join(format!("{suite}.dat"));
        std::fs::write(&path, dat).map_err(io_error(&path))?;
    }
    let cols = 2.min(suites.len().max(1));
    let rows = suites.len().div_ceil(cols).max(1);
    let mut gp = String::new();
    let _ = writeln!(gp, "set terminal pngcairo size {},{}", 480 * cols, 360 * rows);
    let _ = writeln!(gp, "set output 'scores.png'");
    let _ = writeln!(gp, "set style data histograms");
    let _ = writeln!(gp, "set style histogram clustered gap 1");
    let _ = writeln!(gp, "set style fill solid 0.8 border -1");
    let _ = writeln!(gp, "set yrange [0:*]");
    let _ = writeln!(gp, "set xtics rotate by -30");
    let _ = writeln!(gp, "set multiplot layout {rows},{cols}");
    for suite in suites.keys() {
        let _ = writeln!(gp, "set title '{suite}'");
        let _ = writeln!(gp, "plot '{suite}.dat' using 2:xtic(1) title 'time', '' using 3 title 'makespan'");
    }
    let _ = writeln!(gp, "unset multiplot");
    let path = dir.join("scores.gp");
    std::fs::write(&path, gp).map_err(io_error(&path))?;
    Ok(())
}
