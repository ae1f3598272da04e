//! `sicframe`: evaluate, average, search, and tabulate SIC frame potentials.

mod table;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sicframe::averages::{
    analytic_avg, analytic_avg_f, exact_avg_fh, mc_avg, mc_avg_f, moment_avg_f,
};
use sicframe::framepot::{clamp_roundoff, f_h_fast, FrameReport};
use sicframe::heisenberg::HWGroup;
use sicframe::record::{AverageRecord, SearchRecord, VectorFile, J17};
use sicframe::sicsearch::{search, verify_sic, Mode, SearchConfig};
use sicframe::subspace::Space;
use sicframe::Error;

#[derive(Parser, Debug)]
#[command(
    name = "sicframe",
    version,
    about = "Weyl-Heisenberg frame potentials and their Fubini-Study averages"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate f_H, F1, F2 and the SIC deviation of a fiducial vector.
    Eval {
        #[arg(long)]
        vector: PathBuf,
    },
    /// Average f_H (or f) over the full space or a Clifford subspace.
    Average {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value = "full")]
        space: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = Quantity::Fh)]
        quantity: Quantity,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, env = "SICFRAME_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Minimize or maximize f_H over fiducial vectors.
    Search {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value = "full")]
        space: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Min)]
        mode: ModeArg,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, default_value_t = 2000)]
        max_iters: usize,
        #[arg(long, env = "SICFRAME_SEED", default_value_t = 0)]
        seed: u64,
        /// Write the best vector here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Min / average / max table of f and f_H across the special subspaces.
    Table {
        #[arg(long, default_value_t = 7)]
        dim: usize,
        /// Monte Carlo samples per average cross-check (0 disables it).
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Restarts per extremum search.
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, env = "SICFRAME_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Analytic,
    Exact,
    Mc,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Quantity {
    Fh,
    F,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Min,
    Max,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

/// A failure with its process exit code.
#[derive(Debug)]
pub(crate) struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn unsupported(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::UnsupportedSubspace(_)
            | Error::UnsupportedDimension { .. }
            | Error::NotTabulated { .. }
            | Error::UnsupportedOrder(_) => CliError::unsupported(e.to_string()),
            Error::Dimension { .. }
            | Error::Norm { .. }
            | Error::Count { .. }
            | Error::InvalidArgument(_) => CliError::input(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

pub(crate) fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("records serialize")
}

fn parse_space(label: &str) -> CliResult<Space> {
    label.parse().map_err(CliError::from)
}

#[derive(Serialize)]
struct EvalReport {
    dim: usize,
    label: Option<String>,
    f_h: J17,
    f1: J17,
    f2: J17,
    sic_deviation: J17,
}

fn cmd_eval(path: &PathBuf) -> CliResult<String> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let loaded = VectorFile::parse(&text)?.to_vector()?;
    if loaded.renormalized {
        eprintln!("warning: vector renormalized on load");
    }
    let v = loaded.vector;
    if v.dim() < 2 {
        return Err(CliError::input("dimension must be at least 2"));
    }
    let g = HWGroup::new(v.dim())?;
    let report = FrameReport::from_vectors(&g.orbit(&v)?)?;
    let check = verify_sic(&v, 0.0)?;
    Ok(to_json(&EvalReport {
        dim: v.dim(),
        label: loaded.label,
        f_h: J17(clamp_roundoff(f_h_fast(&v)?)),
        f1: J17(report.f1),
        f2: J17(report.f2),
        sic_deviation: J17(check.max_deviation),
    }))
}

fn cmd_average(
    dim: usize,
    space: &str,
    method: MethodArg,
    quantity: Quantity,
    samples: usize,
    seed: u64,
) -> CliResult<String> {
    let space = parse_space(space)?;
    let record = match quantity {
        Quantity::F => {
            if space != Space::Full {
                return Err(CliError::unsupported(
                    "<f> is only defined over the full space",
                ));
            }
            match method {
                MethodArg::Analytic => AverageRecord::from_result(&analytic_avg_f(dim)?),
                MethodArg::Exact => AverageRecord::from_result(&moment_avg_f(dim)?),
                MethodArg::Mc => AverageRecord::from_mc(dim, space, &mc_avg_f(dim, samples, seed)?),
            }
        }
        Quantity::Fh => {
            let embedding = space.build(dim)?;
            match method {
                MethodArg::Analytic => AverageRecord::from_result(&analytic_avg(space, dim)?),
                MethodArg::Exact => {
                    AverageRecord::from_result(&exact_avg_fh(dim, embedding.as_ref())?)
                }
                MethodArg::Mc => AverageRecord::from_mc(
                    dim,
                    space,
                    &mc_avg(dim, embedding.as_ref(), samples, seed)?,
                ),
            }
        }
    };
    Ok(to_json(&record))
}

fn cmd_search(
    dim: usize,
    space: &str,
    mode: ModeArg,
    restarts: usize,
    max_iters: usize,
    seed: u64,
    out: Option<&PathBuf>,
) -> CliResult<String> {
    let space = parse_space(space)?;
    let mode = match mode {
        ModeArg::Min => Mode::Minimize,
        ModeArg::Max => Mode::Maximize,
    };
    let mut config = SearchConfig::new(dim, space, mode)
        .with_restarts(restarts)
        .with_seed(seed);
    config.max_iters = max_iters;
    let result = search(&config)?;
    let check = verify_sic(&result.best_vector, 1e-6)?;
    if let Some(path) = out {
        let label = format!("{} {} N={dim}", mode.as_str(), space);
        let file = VectorFile::from_vector(&result.best_vector, Some(label));
        fs::write(path, file.to_json() + "\n")
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    }
    Ok(to_json(&SearchRecord::new(
        space,
        mode.as_str(),
        &result,
        check.max_deviation,
    )))
}

fn run(cli: Cli) -> CliResult<String> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::input(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Eval { vector } => cmd_eval(&vector),
        Command::Average {
            dim,
            space,
            method,
            quantity,
            samples,
            seed,
        } => cmd_average(dim, &space, method, quantity, samples, seed),
        Command::Search {
            dim,
            space,
            mode,
            restarts,
            max_iters,
            seed,
            out,
        } => cmd_search(dim, &space, mode, restarts, max_iters, seed, out.as_ref()),
        Command::Table {
            dim,
            samples,
            restarts,
            seed,
            format,
        } => {
            let t = table::build(dim, samples, restarts, seed)?;
            Ok(match format {
                Format::Json => to_json(&t),
                Format::Csv => t.to_csv(),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
