//! Runs of the bundled benchmark suite.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use htep::bench::{run_instance, BenchConfig, Manifest, RunRecord};
use htep::Rational;

pub fn bench_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks")
}

pub fn load() -> (Manifest, BenchConfig<Rational>) {
    let dir = bench_dir();
    let manifest = Manifest::load(&dir.join("suite.toml")).expect("bundled manifest");
    let config = BenchConfig::load(&dir.join("configs.toml")).expect("bundled configs");
    (manifest, config)
}

pub struct SuiteRun {
    pub records: Vec<RunRecord<Rational>>,
    /// Wall time of each record.
    pub wall: Vec<Duration>,
    pub elapsed: Duration,
}

/// Same order as `run_suite`, timing every run.
pub fn run(manifest: &Manifest, config: &BenchConfig<Rational>) -> SuiteRun {
    let started = Instant::now();
    let mut records = Vec::new();
    let mut wall = Vec::new();
    for i in &manifest.instances {
        for c in &config.configs {
            let t = Instant::now();
            records.push(run_instance(i, c, config).expect("bundled instance"));
            wall.push(t.elapsed());
        }
    }
    SuiteRun { records, wall, elapsed: started.elapsed() }
}

/// `(name, start, end)` of every durative action in a plan file, pairing
/// `name@start` with the next `name@end` of the same arguments.
pub fn intervals(plan: &str) -> Vec<(String, Rational, Rational)> {
    let mut open: Vec<(String, Rational)> = Vec::new();
    let mut out = Vec::new();
    for line in plan.lines().filter(|l| !l.starts_with(";;") && !l.trim().is_empty()) {
        let (time, action) = line.split_once(':').expect("time: action");
        let time: Rational = time.trim().parse().expect("rational time");
        let action = action.trim().trim_start_matches('(').trim_end_matches(')');
        let (head, args) = action.split_once(' ').unwrap_or((action, ""));
        if let Some(name) = head.strip_suffix("@start") {
            open.push((format!("{name} {args}"), time));
        } else if let Some(name) = head.strip_suffix("@end") {
            let key = format!("{name} {args}");
            let k = open.iter().position(|(n, _)| *n == key).expect("end without start");
            let (_, start) = open.remove(k);
            out.push((key, start, time));
        }
    }
    assert!(open.is_empty(), "unfinished actions: {open:?}");
    out
}

pub fn makespan(plan: &str) -> Rational {
    let line = plan.lines().find_map(|l| l.strip_prefix(";; makespan = ")).expect("makespan header");
    line.trim().parse().expect("rational makespan")
}
