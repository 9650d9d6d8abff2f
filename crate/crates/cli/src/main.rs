use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use htep::bench::{self, BenchConfig, Manifest, Timing};
use htep::hddl::{self, GroundOptions};
use htep::heuristics::{FlawStrategy, HeuristicKind};
use htep::search::{htep as search, Outcome, SearchConfig};
use htep::validate::validate_timeline;
use htep::{Problem, Rational, Scalar};
use log::info;

const SOLVED: u8 = 0;
const FAILED: u8 = 1;
const BUDGET: u8 = 2;
const USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "htep", version, about = "Temporal HTN planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem and print the plan.
    Plan {
        domain: PathBuf,
        problem: PathBuf,
        #[arg(long, default_value = "tdgm", value_parser = parse_from_str::<HeuristicKind>)]
        heuristic: HeuristicKind,
        #[arg(long, default_value = "lcfr", value_parser = parse_from_str::<FlawStrategy>)]
        flaw_strategy: FlawStrategy,
        /// Separation of strictly ordered events, e.g. `1/1000` or `0.01`.
        #[arg(long, default_value = "1/1000", value_parser = parse_positive)]
        epsilon: Rational,
        /// Time budget in seconds.
        #[arg(long, default_value_t = 64.0)]
        timeout: f64,
        /// Memory budget in MiB.
        #[arg(long, default_value_t = 2048)]
        mem: u64,
        /// Check the metric network of every child plan.
        #[arg(long)]
        eager_metric: bool,
        /// Drop ground actions unreachable under the delete relaxation.
        #[arg(long)]
        prune_unreachable: bool,
        #[arg(long)]
        plan_out: Option<PathBuf>,
        #[arg(long)]
        stats_out: Option<PathBuf>,
    },
    /// Check a plan file against a problem.
    Validate {
        domain: PathBuf,
        problem: PathBuf,
        plan: PathBuf,
    },
    /// Run a benchmark suite and score it.
    Bench {
        manifest: PathBuf,
        #[arg(long)]
        configs: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Directory for per-suite score tables and a gnuplot script.
        #[arg(long)]
        plots: Option<PathBuf>,
        /// `effort` (a fixed cost per expansion) or `wall`.
        #[arg(long, value_parser = parse_from_str::<Timing>)]
        timing: Option<Timing>,
    },
}

fn parse_from_str<T: std::str::FromStr<Err = String>>(s: &str) -> Result<T, String> {
    s.parse()
}

fn parse_positive(s: &str) -> Result<Rational, String> {
    match Rational::parse_literal(s) {
        Some(r) if r > Rational::from_integer(0) => Ok(r),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

fn load(domain: &Path, problem: &Path, prune_unreachable: bool) -> Result<Problem> {
    let options = GroundOptions { prune_unreachable, ..GroundOptions::default() };
    let pb = hddl::load_files(domain, problem, &options)?;
    info!(
        "grounded {} tasks, {} durative actions, {} methods",
        pb.task_count(),
        pb.duratives().len(),
        pb.methods().len()
    );
    Ok(pb)
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Plan {
            domain,
            problem,
            heuristic,
            flaw_strategy,
            epsilon,
            timeout,
            mem,
            eager_metric,
            prune_unreachable,
            plan_out,
            stats_out,
        } => {
            if !(timeout > 0.0 && timeout.is_finite()) || mem == 0 {
                bail!("budgets must be positive");
            }
            let pb = load(&domain, &problem, prune_unreachable)?;
            let config = SearchConfig {
                heuristic,
                flaw_strategy,
                epsilon,
                time_limit: Some(Duration::from_secs_f64(timeout)),
                memory_limit: Some(mem << 20),
                eager_metric,
                ..SearchConfig::default()
            };
            let result = search(&pb, &config);
            let mut stats = format!("outcome = {}\n", result.outcome.name());
            stats.push_str(&result.stats.to_kv(false));
            let code = match &result.outcome {
                Outcome::Solved { plan, schedule } => {
                    write_or_print(plan_out.as_deref(), &bench::emit_plan(&pb, plan, schedule, epsilon))?;
                    SOLVED
                }
                Outcome::Unsolvable => {
                    eprintln!("no solution");
                    FAILED
                }
                other => {
                    eprintln!("budget exhausted: {}", other.name());
                    BUDGET
                }
            };
            match stats_out {
                Some(p) => std::fs::write(&p, &stats).with_context(|| format!("writing {}", p.display()))?,
                None => eprint!("{stats}"),
            }
            Ok(code)
        }
        Command::Validate { domain, problem, plan } => {
            let pb = load(&domain, &problem, false)?;
            let text = std::fs::read_to_string(&plan).with_context(|| format!("reading {}", plan.display()))?;
            let file = bench::parse_plan::<Rational>(&text).with_context(|| format!("in {}", plan.display()))?;
            let timeline = file.timeline(&pb).with_context(|| format!("in {}", plan.display()))?;
            let verdict = validate_timeline(&pb, &timeline);
            print!("{verdict}");
            Ok(if verdict.accepted() { SOLVED } else { FAILED })
        }
        Command::Bench { manifest, configs, csv, plots, timing } => {
            let manifest = Manifest::load(&manifest)?;
            let mut config: BenchConfig<Rational> = match configs {
                Some(p) => BenchConfig::load(&p)?,
                None => BenchConfig::default(),
            };
            if let Some(t) = timing {
                config.budgets.timing = t;
            }
            let records = bench::run_suite(&manifest, &config)?;
            match csv {
                Some(p) => {
                    let f = std::fs::File::create(&p).with_context(|| format!("creating {}", p.display()))?;
                    bench::write_csv(&records, f)?;
                }
                None => bench::write_csv(&records, std::io::stdout().lock())?,
            }
            let scores = bench::ipc_scores(&records);
            eprint!("{}", scores.table());
            if let Some(dir) = plots {
                bench::write_plots(&dir, &scores)?;
            }
            Ok(SOLVED)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HTEP_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { SOLVED };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE)
        }
    }
}
