//! `gibbs-rigidity`: command-line access to Gibbs chains on Markov shifts.
//!
//! Every command reads a problem file (`--input`), prints one JSON document
//! on standard output and exits with 0 on success, 2 on bad input or a
//! violated precondition, 3 on a numerical failure and 4 on an obstruction.

mod commands;
mod input;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gibbs_rigidity::{Error, ErrorKind};

#[derive(Debug, Parser)]
#[command(
    name = "gibbs-rigidity",
    version,
    about = "Gibbs measures, entropy spectra and rigidity tests on Markov shifts"
)]
struct Cli {
    #[command(subcommand)]
    group: Group,
}

#[derive(Debug, Subcommand)]
enum Group {
    /// Combinatorics of the transition matrix.
    #[command(subcommand)]
    Shift(ShiftCommand),
    /// Stochasticization, cylinder measures and cohomology.
    #[command(subcommand)]
    Gibbs(GibbsCommand),
    /// Entropy spectrum and characteristic-polynomial families.
    #[command(subcommand)]
    Spectrum(SpectrumCommand),
    /// Membership in G_A, reconstruction and conjugacy tests.
    #[command(subcommand)]
    Rigidity(RigidityCommand),
}

#[derive(Debug, Subcommand)]
enum ShiftCommand {
    /// In-degrees, V0, E0 and the cycle condition.
    Info(Input),
    /// Simple cycles up to rotation.
    Cycles(Input),
    /// Total state amalgamation.
    Amalgamate(Input),
    /// Automorphism verdict and graph automorphism group.
    Autos(Input),
}

#[derive(Debug, Subcommand)]
enum GibbsCommand {
    /// Perron data, Q(f), stationary vector and normalized potential.
    Normalize(Input),
    /// Mass of a cylinder set.
    Measure {
        #[command(flatten)]
        input: Input,
        /// Word in one-based symbols, e.g. 132 (use dots above 9: 1.10.2).
        #[arg(long)]
        word: String,
    },
    /// Kolmogorov-Sinai entropy and pressure.
    Entropy(Input),
    /// Whether two potentials differ by a coboundary plus a constant.
    Cohomology(Pair),
}

#[derive(Debug, Subcommand)]
enum SpectrumCommand {
    /// Sample the entropy spectrum and write a q,alpha,entropy table.
    Curve {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        grid: Grid,
        /// Output path for the table.
        #[arg(long, default_value = "spectrum_curve.csv")]
        table: PathBuf,
    },
    /// Compare the characteristic-polynomial families of two chains.
    Compare {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        grid: Grid,
    },
}

#[derive(Debug, Subcommand)]
enum RigidityCommand {
    /// Distinctness of Q on E0.
    CheckG(Input),
    /// Fraction of random potentials whose chain lies in G_A.
    SampleG {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Recover a word from its sequence of Q values.
    Reconstruct {
        #[command(flatten)]
        input: Input,
        /// Comma-separated Q values along the word's edges.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Induce the block code between two chains in G_A.
    Conjugacy(Pair),
    /// Equal-spectrum partner on the four-symbol example shift.
    Counterexample(Input),
    /// Full strong non-rigidity certificate.
    Certificate(Input),
}

#[derive(Debug, Args)]
struct Input {
    /// Problem file (JSON).
    #[arg(long)]
    input: PathBuf,
}

#[derive(Debug, Args)]
struct Pair {
    #[command(flatten)]
    input: Input,
    /// Second problem file.
    #[arg(long)]
    other: PathBuf,
}

#[derive(Debug, Args)]
struct Grid {
    #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
    qmin: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    qmax: f64,
    #[arg(long, default_value_t = 25)]
    steps: usize,
}

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input.
    Input(String),
    Core(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Precondition => 2,
                ErrorKind::Numerical => 3,
                ErrorKind::Obstruction => 4,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

/// A document for standard output and the exit code that goes with it.
pub struct Outcome {
    pub doc: serde_json::Value,
    pub code: u8,
}

impl Outcome {
    pub fn ok(doc: serde_json::Value) -> Self {
        Outcome { doc, code: 0 }
    }
}

fn dispatch(group: Group) -> (&'static str, Result<Outcome, CliError>) {
    use commands::*;
    match group {
        Group::Shift(c) => match c {
            ShiftCommand::Info(i) => ("shift info", shift_info(&i.input)),
            ShiftCommand::Cycles(i) => ("shift cycles", shift_cycles(&i.input)),
            ShiftCommand::Amalgamate(i) => ("shift amalgamate", shift_amalgamate(&i.input)),
            ShiftCommand::Autos(i) => ("shift autos", shift_autos(&i.input)),
        },
        Group::Gibbs(c) => match c {
            GibbsCommand::Normalize(i) => ("gibbs normalize", gibbs_normalize(&i.input)),
            GibbsCommand::Measure { input, word } => {
                ("gibbs measure", gibbs_measure(&input.input, &word))
            }
            GibbsCommand::Entropy(i) => ("gibbs entropy", gibbs_entropy(&i.input)),
            GibbsCommand::Cohomology(p) => (
                "gibbs cohomology",
                gibbs_cohomology(&p.input.input, &p.other),
            ),
        },
        Group::Spectrum(c) => match c {
            SpectrumCommand::Curve { input, grid, table } => (
                "spectrum curve",
                spectrum_curve(&input.input, grid.qmin, grid.qmax, grid.steps, &table),
            ),
            SpectrumCommand::Compare { pair, grid } => (
                "spectrum compare",
                spectrum_compare(
                    &pair.input.input,
                    &pair.other,
                    grid.qmin,
                    grid.qmax,
                    grid.steps,
                ),
            ),
        },
        Group::Rigidity(c) => match c {
            RigidityCommand::CheckG(i) => ("rigidity check-g", check_g(&i.input)),
            RigidityCommand::SampleG {
                input,
                samples,
                seed,
            } => ("rigidity sample-g", sample_g(&input.input, samples, seed)),
            RigidityCommand::Reconstruct { input, values } => {
                ("rigidity reconstruct", reconstruct(&input.input, &values))
            }
            RigidityCommand::Conjugacy(p) => {
                ("rigidity conjugacy", conjugacy(&p.input.input, &p.other))
            }
            RigidityCommand::Counterexample(i) => {
                ("rigidity counterexample", counterexample(&i.input))
            }
            RigidityCommand::Certificate(i) => ("rigidity certificate", certificate(&i.input)),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, result) = dispatch(cli.group);
    let (doc, code) = match result {
        Ok(Outcome { mut doc, code }) => {
            doc["command"] = command.into();
            (Some(doc), code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let doc = match &e {
                CliError::Core(err) if err.kind() == ErrorKind::Obstruction => {
                    Some(commands::obstruction(command, err))
                }
                _ => None,
            };
            (doc, e.exit_code())
        }
    };
    if let Some(doc) = doc {
        let mut stdout = std::io::stdout().lock();
        if stdout
            .write_all(output::to_string(&doc).as_bytes())
            .is_err()
        {
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}
