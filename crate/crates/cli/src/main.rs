use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use blaschke_cli::document::ProblemDocument;
use blaschke_cli::sampling::MIN_GRID;
use blaschke_cli::{
    cmd_forward, cmd_invert, cmd_verify, exit, sample_metric, write_csv, CommandError,
    InvertOptions,
};
use blaschke_core::BlaschkeProduct;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "blaschke",
    version,
    about = "Critical points of normalized Blaschke products"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Critical points from zeros.
    Forward {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Zeros from critical points.
    Invert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Initial continuation step.
        #[arg(long)]
        step: Option<f64>,
        /// Corrector tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Seeded randomized run of the invariant suites; prints a JSON summary.
    Verify {
        #[arg(long)]
        seed: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_degree: u64,
    },
    /// CSV of sigma and R over a square lattice.
    SampleMetric {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Invalid(anyhow::Error),
    Io(anyhow::Error),
    Command(CommandError),
}

impl From<CommandError> for Failure {
    fn from(e: CommandError) -> Self {
        Failure::Command(e)
    }
}

fn read_problem(path: &Path) -> Result<ProblemDocument, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Io)?;
    ProblemDocument::parse(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(Failure::Invalid)
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Io)
}

fn run(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Forward { input, out } => {
            let doc = read_problem(&input)?;
            let result = cmd_forward(&doc)?;
            write_text(&out, &result.to_json())?;
        }
        Command::Invert {
            input,
            out,
            step,
            tol,
        } => {
            let doc = read_problem(&input)?;
            match cmd_invert(&doc, InvertOptions { step, tol }) {
                Ok(result) => write_text(&out, &result.to_json())?,
                Err(CommandError::NotConverged {
                    document,
                    t_reached,
                }) => {
                    write_text(&out, &document.to_json())?;
                    eprintln!("error: continuation stopped at t = {t_reached}");
                    return Ok(exit::NOT_CONVERGED);
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Verify {
            seed,
            trials,
            max_degree,
        } => {
            let summary = cmd_verify(seed, trials as usize, max_degree as usize);
            println!("{}", summary.to_json());
            if !summary.all_passed {
                return Ok(exit::FAILURE);
            }
        }
        Command::SampleMetric { input, grid, out } => {
            let doc = read_problem(&input)?;
            let zeros = doc
                .multiset()
                .with_context(|| format!("in {}", input.display()))
                .map_err(Failure::Invalid)?;
            if grid < MIN_GRID {
                return Err(Failure::Invalid(anyhow::anyhow!(
                    "grid must be at least {MIN_GRID}"
                )));
            }
            let samples = sample_metric(&BlaschkeProduct::new(zeros), grid);
            let file = fs::File::create(&out)
                .with_context(|| format!("creating {}", out.display()))
                .map_err(Failure::Io)?;
            write_csv(&samples, file)
                .with_context(|| format!("writing {}", out.display()))
                .map_err(Failure::Io)?;
        }
    }
    Ok(exit::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(Failure::Invalid(e)) => report(e, exit::INVALID_INPUT),
        Err(Failure::Io(e)) => report(e, exit::FAILURE),
        Err(Failure::Command(e)) => {
            let code = e.exit_code();
            report(e.into(), code)
        }
    };
    ExitCode::from(code as u8)
}

fn report(e: anyhow::Error, code: i32) -> i32 {
    eprintln!("error: {e:#}");
    code
}
