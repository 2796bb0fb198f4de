use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use snrpa_bench::{
    bench, emit_csv, schedule_until, with_problem, BenchConfig, LoadedProblem, ProblemKind,
    ProblemSpec, SolutionFile, Variant,
};
use snrpa_core::{solve, SearchConfig};

#[derive(Parser)]
#[command(name = "snrpa", version, about = "Nested rollout policy adaptation solver and benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one search and print the best score and move sequence.
    Solve(SolveArgs),
    /// Run the multi-seed anytime protocol and write a CSV table.
    Bench(BenchArgs),
    /// Replay a saved solution file against an instance.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Nrpa,
    Snrpa,
    /// Benchmark only: nrpa plus snrpa for every --P value.
    Both,
}

#[derive(Args)]
struct ProblemArgs {
    #[arg(long, value_enum)]
    problem: ProblemKind,
    /// Instance file (tsptw, samegame).
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Atom budget (maximum).
    #[arg(long)]
    budget: Option<usize>,
    /// SameGame: disable the tabu-color playout filter.
    #[arg(long)]
    no_tabu: bool,
}

impl ProblemArgs {
    fn spec(&self, allow_pairs: bool) -> ProblemSpec {
        ProblemSpec {
            kind: self.problem,
            instance: self.instance.clone(),
            budget: self.budget,
            tabu: self.problem == ProblemKind::Samegame && !self.no_tabu,
            allow_pairs,
        }
    }
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 4)]
    level: usize,
    /// Iterations per adaptive level.
    #[arg(long = "N", default_value_t = 100)]
    iterations: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long, value_enum, default_value_t = Algo::Snrpa)]
    algo: Algo,
    /// Evaluation playouts for snrpa.
    #[arg(long = "P", default_value_t = 4)]
    eval_playouts: usize,
    /// Seconds; 0 disables the limit.
    #[arg(long, default_value_t = 10.0)]
    time_limit: f64,
    /// SameGame tabu filter keeps pairs of the dominant color.
    #[arg(long, default_value_t = false, action = clap::ArgAction::Set)]
    allow_pairs: bool,
    /// Threads for evaluation playouts.
    #[arg(long, default_value_t = 1)]
    eval_workers: usize,
    /// Write the best sequence as a JSON solution file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long, value_enum, default_value_t = Algo::Both)]
    algo: Algo,
    /// Evaluation playout counts for snrpa variants.
    #[arg(long = "P", value_delimiter = ',', default_values_t = [2usize, 3, 4])]
    eval_playouts: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    runs: usize,
    /// Final checkpoint in seconds; checkpoints double from 0.01 s.
    #[arg(long, default_value_t = 10.24)]
    time_limit: f64,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    allow_pairs: bool,
    /// Parallel runs.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
    /// Also write the best run's sequence here.
    #[arg(long)]
    best_out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long)]
    solution: PathBuf,
}

fn main() -> ExitCode {
    let result = match Cli::parse().command {
        Command::Solve(args) => run_solve(args),
        Command::Bench(args) => run_bench(args),
        Command::Verify(args) => run_verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn check_time_limit(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        bail!("--time-limit must be a non-negative number of seconds");
    }
    Ok(())
}

fn run_solve(args: SolveArgs) -> Result<()> {
    check_time_limit(args.time_limit)?;
    let variant = match args.algo {
        Algo::Nrpa => Variant::NRPA,
        Algo::Snrpa => Variant::snrpa(args.eval_playouts),
        Algo::Both => bail!("--algo both is only valid for bench"),
    };
    let spec = args.problem.spec(args.allow_pairs);
    let (problem, id) = LoadedProblem::load(&spec).context("loading problem")?;
    let config = SearchConfig {
        level: args.search.level,
        iterations: args.search.iterations,
        eval_playouts: variant.eval_playouts,
        alpha: args.search.alpha,
        seed: args.search.seed,
        deadline: (args.time_limit > 0.0).then(|| Duration::from_secs_f64(args.time_limit)),
        eval_workers: args.eval_workers,
        stop_at_score: None,
    };
    let outcome = with_problem!(&problem, p => solve(p, variant.algorithm, config))?;
    println!("algorithm: {variant}");
    println!("score: {}", outcome.best.score);
    println!("playouts: {}", outcome.stats.playouts);
    let codes: Vec<String> = outcome.best.moves.iter().map(u64::to_string).collect();
    println!("moves: {}", codes.join(" "));
    println!("{}", problem.describe(&outcome.best.moves)?);
    if let Some(path) = args.out {
        SolutionFile::new(spec.kind, &id, variant.to_string(), args.search.seed, &outcome.best)
            .save(&path)?;
        println!("saved {}", path.display());
    }
    Ok(())
}

fn run_bench(args: BenchArgs) -> Result<()> {
    check_time_limit(args.time_limit)?;
    if args.time_limit < 0.01 {
        bail!("--time-limit must be at least 0.01 s for a benchmark");
    }
    let mut variants = Vec::new();
    if matches!(args.algo, Algo::Nrpa | Algo::Both) {
        variants.push(Variant::NRPA);
    }
    if matches!(args.algo, Algo::Snrpa | Algo::Both) {
        variants.extend(args.eval_playouts.iter().map(|&p| Variant::snrpa(p)));
    }
    let config = BenchConfig {
        variants,
        runs: args.runs,
        checkpoints: schedule_until(args.time_limit),
        level: args.search.level,
        iterations: args.search.iterations,
        alpha: args.search.alpha,
        seed_base: args.search.seed,
        jobs: args.jobs,
    };
    config.validate()?;
    let spec = args.problem.spec(args.allow_pairs);
    let (problem, id) = LoadedProblem::load(&spec).context("loading problem")?;
    let report = with_problem!(&problem, p => bench(p, &config))?;
    emit_csv(&report.table, &args.out)?;
    println!("wrote {}", args.out.display());
    if let Some(champion) = report.champion {
        println!(
            "best: {} (variant {}, seed {})",
            champion.outcome.best.score, champion.variant, champion.seed
        );
        if let Some(path) = args.best_out {
            SolutionFile::new(
                spec.kind,
                &id,
                champion.variant.to_string(),
                champion.seed,
                &champion.outcome.best,
            )
            .save(&path)?;
            println!("saved {}", path.display());
        }
    }
    Ok(())
}

fn run_verify(args: VerifyArgs) -> Result<()> {
    let solution = SolutionFile::load(&args.solution)?;
    // Tabu-filtered moves are a subset of the full move set.
    let spec = ProblemSpec {
        tabu: false,
        ..args.problem.spec(false)
    };
    let (problem, id) = LoadedProblem::load(&spec).context("loading problem")?;
    let score = solution.verify(spec.kind, &problem, &id)?;
    println!("verified: score {score}");
    Ok(())
}
