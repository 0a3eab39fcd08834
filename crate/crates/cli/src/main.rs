//! `propavg` command-line front end.
//!
//! Exit codes: 0 success, 1 a requested notion is not satisfied, 2 bad input,
//! 3 internal error or failed verification in `bench`.

use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use propavg::bench::{run_bench, BenchConfig};
use propavg::generate::{random_instance, RandomFamily};
use propavg::io::{
    from_json, parse_instance, to_json, write_instance, AllocationFile, InstanceFile,
    NotionCertificates, ResultFile,
};
use propavg::oracle::{
    existence_sweep, EnumerationBudget, ExhaustiveFamily, SweepReport, DEFAULT_MAX_ASSIGNMENTS,
};
use propavg::{fairness, solve_with_trace, validate_allocation, Instance, Notion};

#[derive(Parser)]
#[command(
    name = "propavg",
    version,
    about = "Fair division of indivisible goods: solve, verify, generate, benchmark"
)]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a PROPavg allocation and print a result file.
    Solve {
        input: PathBuf,
        /// Write the result here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Extra notions to certify (repeatable or comma-separated).
        #[arg(long = "also-verify", value_delimiter = ',')]
        also_verify: Vec<Notion>,
    },
    /// Check an allocation against fairness notions.
    Verify {
        instance: PathBuf,
        /// Allocation file, or a result file from `solve`.
        allocation: PathBuf,
        /// Notions to check (repeatable or comma-separated). Defaults to PROPAVG.
        #[arg(long = "notion", value_delimiter = ',')]
        notions: Vec<Notion>,
    },
    /// Generate random instances with values uniform in [0, max-value].
    Gen {
        #[command(flatten)]
        shape: Shape,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Write `instance-<k>.json` files here instead of standard output.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Solve and verify seeded random instances, reporting timings.
    Bench {
        #[command(flatten)]
        shape: Shape,
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
    /// Check that every instance of a family admits an allocation satisfying
    /// a notion, by exhaustive enumeration.
    Sweep {
        #[arg(long, default_value = "PROPAVG")]
        notion: Notion,
        /// Agent count, or an inclusive range `a-b` for random families.
        #[arg(long, value_parser = parse_range)]
        agents: RangeInclusive<usize>,
        /// Good count, or an inclusive range `a-b` for random families.
        #[arg(long, value_parser = parse_range)]
        goods: RangeInclusive<usize>,
        #[arg(long, default_value_t = 2)]
        max_value: u64,
        /// Enumerate every valuation matrix with entries in [0, max-value].
        #[arg(long, conflicts_with_all = ["count", "seed"])]
        exhaustive: bool,
        /// Number of random instances.
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Skip instances with more assignments than this.
        #[arg(long, default_value_t = DEFAULT_MAX_ASSIGNMENTS)]
        budget: u64,
    },
}

#[derive(Args)]
struct Shape {
    #[arg(long)]
    agents: usize,
    #[arg(long)]
    goods: usize,
    #[arg(long, default_value_t = 1_000_000)]
    max_value: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Shape {
    fn validate(&self) -> Result<(), Failure> {
        if self.agents == 0 {
            return Err(Failure::Input(anyhow!("--agents must be positive")));
        }
        let total = u128::from(self.max_value) * self.goods as u128;
        if !propavg::instance::within_exact_bound(self.agents, total) {
            return Err(Failure::Input(anyhow!(
                "{} goods worth up to {} each exceed the exact-arithmetic bound",
                self.goods,
                self.max_value
            )));
        }
        Ok(())
    }
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once('-') {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b)?);
            if a > b {
                return Err(format!("empty range {s}"));
            }
            Ok(a..=b)
        }
        None => num(s).map(|v| v..=v),
    }
}

enum Failure {
    /// A requested notion is not satisfied.
    Unsatisfied,
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_instance(path: &Path) -> anyhow::Result<Instance> {
    parse_instance(&read(path)?).with_context(|| format!("parsing instance {}", path.display()))
}

fn write_output(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_solve(input: &Path, out: Option<&Path>, also: &[Notion]) -> Result<(), Failure> {
    let inst = load_instance(input)?;
    let (alloc, trace) = solve_with_trace(&inst).map_err(|e| {
        if e.is_internal() {
            Failure::Internal(e.into())
        } else {
            Failure::Input(e.into())
        }
    })?;
    let mut notions = vec![Notion::PropAvg];
    notions.extend_from_slice(also);
    let result = ResultFile::build(&inst, &alloc, &trace, &notions)
        .map_err(|e| Failure::Internal(anyhow!(e).context("solver output failed validation")))?;
    write_output(out, &to_json(&result))?;
    Ok(())
}

fn verdict_table(reports: &[NotionCertificates]) -> String {
    let mut out = String::new();
    for r in reports {
        let failing: Vec<String> = r
            .agents
            .iter()
            .filter(|c| !c.satisfied)
            .map(|c| c.agent.to_string())
            .collect();
        let mark = if r.satisfied { "yes" } else { "no" };
        out.push_str(&format!("{:<8} {mark}", r.notion.name()));
        if !failing.is_empty() {
            out.push_str(&format!("  (failing agents: {})", failing.join(", ")));
        }
        out.push('\n');
    }
    out
}

fn cmd_verify(
    instance: &Path,
    allocation: &Path,
    notions: &[Notion],
    json: bool,
) -> Result<(), Failure> {
    let inst = load_instance(instance)?;
    let text = read(allocation)?;
    let file: AllocationFile =
        from_json(&text).with_context(|| format!("parsing allocation {}", allocation.display()))?;
    let alloc = file
        .to_allocation()
        .with_context(|| format!("parsing allocation {}", allocation.display()))?;
    validate_allocation(&inst, &alloc).map_err(|v| anyhow!("invalid allocation: {v}"))?;
    let mut wanted: Vec<Notion> = Vec::new();
    for &n in if notions.is_empty() {
        &[Notion::PropAvg][..]
    } else {
        notions
    } {
        if !wanted.contains(&n) {
            wanted.push(n);
        }
    }
    let reports: Vec<NotionCertificates> = fairness::verify_many(&inst, &alloc, &wanted)
        .map_err(|e| Failure::Internal(e.into()))?
        .into_iter()
        .map(|r| NotionCertificates {
            notion: r.notion,
            satisfied: r.all_satisfied(),
            agents: r.agents,
        })
        .collect();
    if json {
        print!("{}", to_json(&reports));
    } else {
        print!("{}", verdict_table(&reports));
    }
    if reports.iter().all(|r| r.satisfied) {
        Ok(())
    } else {
        Err(Failure::Unsatisfied)
    }
}

fn cmd_gen(shape: &Shape, count: usize, out_dir: Option<&Path>) -> Result<(), Failure> {
    shape.validate()?;
    if count == 0 {
        return Err(Failure::Input(anyhow!("--count must be positive")));
    }
    let instance = |k: usize| {
        random_instance(
            shape.agents,
            shape.goods,
            shape.max_value,
            shape.seed.wrapping_add(k as u64),
        )
    };
    match out_dir {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let width = (count - 1).to_string().len();
            for k in 0..count {
                let path = dir.join(format!("instance-{k:0width$}.json"));
                write_output(Some(&path), &write_instance(&instance(k)))?;
            }
        }
        None if count == 1 => print!("{}", write_instance(&instance(0))),
        None => {
            for k in 0..count {
                let line = serde_json::to_string(&InstanceFile::from_instance(&instance(k)))
                    .map_err(|e| Failure::Internal(e.into()))?;
                println!("{line}");
            }
        }
    }
    Ok(())
}

fn cmd_bench(shape: &Shape, trials: usize, json: bool) -> Result<(), Failure> {
    shape.validate()?;
    let config = BenchConfig {
        agents: shape.agents,
        goods: shape.goods,
        trials,
        seed: shape.seed,
        max_value: shape.max_value,
    };
    let report = run_bench(&config).map_err(|e| Failure::Internal(e.into()))?;
    if json {
        print!("{}", to_json(&report));
    } else {
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |ms| format!("{ms:.3} ms"));
        println!(
            "{} trials, n={}, m={}, values <= {}, seed {}",
            trials, config.agents, config.goods, config.max_value, config.seed
        );
        println!("median solve time  {}", fmt(report.median_solve_ms));
        println!("max solve time     {}", fmt(report.max_solve_ms));
        println!("max loop iterations {}", report.max_iterations);
        println!("verification failures {}", report.failures);
    }
    if report.all_verified() {
        Ok(())
    } else {
        Err(Failure::Internal(anyhow!(
            "{} of {} outputs failed PROPAVG verification",
            report.failures,
            trials
        )))
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    notion: Notion,
    agents: RangeInclusive<usize>,
    goods: RangeInclusive<usize>,
    max_value: u64,
    exhaustive: bool,
    count: usize,
    seed: u64,
    budget: u64,
    json: bool,
) -> Result<(), Failure> {
    if *agents.start() == 0 {
        return Err(Failure::Input(anyhow!("--agents must be positive")));
    }
    let budget = EnumerationBudget {
        max_assignments: budget,
    };
    let report: SweepReport = if exhaustive {
        if agents.start() != agents.end() || goods.start() != goods.end() {
            return Err(Failure::Input(anyhow!(
                "--exhaustive needs fixed --agents and --goods"
            )));
        }
        let family = ExhaustiveFamily {
            n_agents: *agents.start(),
            n_goods: *goods.start(),
            max_value,
        };
        let cells = u32::try_from(family.n_agents * family.n_goods).unwrap_or(u32::MAX);
        if (max_value as u128 + 1)
            .checked_pow(cells)
            .is_none_or(|c| c > u128::from(u32::MAX))
        {
            return Err(Failure::Input(anyhow!("exhaustive family is too large")));
        }
        existence_sweep(&family, notion, &budget)
    } else {
        let family = RandomFamily {
            agents,
            goods,
            max_value,
            seed,
            count,
        };
        existence_sweep(&family, notion, &budget)
    };
    if json {
        print!("{}", to_json(&report));
    } else {
        println!(
            "{}: {} instances checked, {} without a satisfying allocation, {} skipped over budget",
            report.notion.name(),
            report.checked,
            report.counterexamples.len(),
            report.skipped.len()
        );
        for c in report.counterexamples.iter().take(10) {
            println!("  #{}: {:?}", c.index, c.valuations);
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve {
            input,
            out,
            also_verify,
        } => cmd_solve(&input, out.as_deref(), &also_verify),
        Command::Verify {
            instance,
            allocation,
            notions,
        } => cmd_verify(&instance, &allocation, &notions, cli.json),
        Command::Gen {
            shape,
            count,
            out_dir,
        } => cmd_gen(&shape, count, out_dir.as_deref()),
        Command::Bench { shape, trials } => cmd_bench(&shape, trials, cli.json),
        Command::Sweep {
            notion,
            agents,
            goods,
            max_value,
            exhaustive,
            count,
            seed,
            budget,
        } => cmd_sweep(
            notion, agents, goods, max_value, exhaustive, count, seed, budget, cli.json,
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Unsatisfied) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(3)
        }
    }
}
