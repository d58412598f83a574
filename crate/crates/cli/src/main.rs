use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod commands;
mod output;

use output::Report;

#[derive(Parser, Debug)]
#[command(name = "tame-density", version)]
#[command(about = "Ramification criteria, exact locus counts mod p^n and density simulation")]
struct Cli {
    /// Output format
    #[arg(long, value_enum, global = true, default_value = "json")]
    format: Format,

    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads for enumeration and simulation (default: all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Semistability threshold N(m, Q_p)
    Threshold(ThresholdArgs),
    /// Check the tame relation, the q-twist of char_poly(tau) and detectable ramification of a pair
    CheckPair(CheckPairArgs),
    /// Evaluate the GL_2 and resultant ramification criteria on a matrix or pair
    Criterion(CriterionArgs),
    /// Build the normal-form ramified GL_2 pair sigma = diag(q beta, beta), tau = [[1, t], [0, 1]]
    Construct(ConstructArgs),
    /// Exact locus count at one precision
    CountLocus(CountLocusArgs),
    /// Locus counts over a range of precisions and the fitted decay exponent
    Decay(DecayArgs),
    /// Chebotarev-style density simulation over streamed primes
    Simulate(SimulateArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub p: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct CheckPairArgs {
    /// Pair JSON: {p, n, q, sigma, tau}
    #[arg(long)]
    pub file: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct CriterionArgs {
    /// Matrix JSON {p, n, m, entries} or pair JSON {p, n, q, sigma, tau}
    #[arg(long)]
    pub file: PathBuf,
    /// The prime q; defaults to the pair's q
    #[arg(long)]
    pub q: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct ConstructArgs {
    #[arg(long)]
    pub q: u64,
    /// Sign of beta: +1 or -1
    #[arg(long, allow_hyphen_values = true, value_parser = parse_sign)]
    pub sign: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub t: i64,
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub n: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct BudgetArgs {
    /// Largest group size to enumerate
    #[arg(long, env = "TAME_DENSITY_BUDGET", default_value_t = tame_density::DEFAULT_BUDGET)]
    pub budget: u64,
    /// Locus criterion: auto, resultant or trace-det
    #[arg(long, default_value = "auto")]
    pub criterion: String,
    /// Cyclotomic value paired with every element of fullgl specs
    #[arg(long, allow_hyphen_values = true)]
    pub fixed_b: Option<i64>,
}

#[derive(Args, Debug, Serialize)]
pub struct CountLocusArgs {
    /// fullgl<m>, detcoupled<m>, productgl1-<m> or cong<k>-<base>
    #[arg(long)]
    pub spec: String,
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub n: u32,
    #[command(flatten)]
    #[serde(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct DecayArgs {
    #[arg(long)]
    pub spec: String,
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub n_from: u32,
    #[arg(long)]
    pub n_to: u32,
    #[command(flatten)]
    #[serde(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub spec: String,
    #[arg(long)]
    pub p: u64,
    /// Comma-separated precisions, e.g. 1,2,3,4
    #[arg(long, value_delimiter = ',', required = true)]
    pub levels: Vec<u32>,
    /// Number of primes to stream
    #[arg(long)]
    pub primes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Extra primes to leave out (p is always skipped)
    #[arg(long, value_delimiter = ',')]
    pub skip: Vec<u64>,
    /// First prime considered
    #[arg(long, default_value_t = 2)]
    pub start: u64,
    /// Largest group enumerated for the exact reference ratios
    #[arg(long, default_value_t = 1_000_000)]
    pub reference_budget: u64,
}

fn parse_sign(s: &str) -> Result<i64, String> {
    match s {
        "+1" | "1" | "+" | "plus" => Ok(1),
        "-1" | "-" | "minus" => Ok(-1),
        other => Err(format!("expected +1 or -1, got {other:?}")),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<tame_density::Error>() {
        Some(tame_density::Error::TooLarge { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        if workers == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .expect("thread pool is configured once");
    }
    let common = output::CommonConfig {
        format: cli.format,
        workers: cli.workers,
    };
    let result = match &cli.command {
        Command::Threshold(a) => commands::threshold(a, &common),
        Command::CheckPair(a) => commands::check_pair(a, &common),
        Command::Criterion(a) => commands::criterion(a, &common),
        Command::Construct(a) => commands::construct(a, &common),
        Command::CountLocus(a) => commands::count_locus(a, &common),
        Command::Decay(a) => commands::decay(a, &common),
        Command::Simulate(a) => commands::simulate(a, &common),
    };
    let (report, status): (Option<Report>, u8) = match result {
        Ok(outcome) => (Some(outcome.report), outcome.status),
        Err(err) => {
            eprintln!("error: {err:#}");
            (None, exit_code(&err))
        }
    };
    if let Some(report) = report {
        if let Err(err) = report.emit(cli.format, cli.output.as_deref()) {
            eprintln!("error: {err:#}");
            return ExitCode::from(1);
        }
    }
    let _ = std::io::stdout().flush();
    ExitCode::from(status)
}
