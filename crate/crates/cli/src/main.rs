//! `glpk`: batch front end for checking, translating, evaluating and
//! searching GLP proofs and finite models.
//!
//! Exit codes: 0 valid / true / no countermodel, 1 invalid / false /
//! countermodel found, 2 usage or format error.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "glpk", version, about = "Proof checker and finite-model tool for the provability logic GLP")]
pub struct Cli {
    /// Emit a single-line JSON report
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Args, Clone, Default)]
pub struct Context {
    /// Comma-separated formulas allowed at boxed leaves (overrides the file)
    #[arg(long)]
    pub sigma: Option<String>,
    /// Comma-separated formulas allowed at local leaves (overrides the file)
    #[arg(long)]
    pub gamma: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Local,
    Global,
    Glocal,
    GlocalStar,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Check a Hilbert, cyclic or omega proof file
    Check {
        file: PathBuf,
        #[command(flatten)]
        ctx: Context,
    },
    /// Print the boxed and local assumption leaves of a proof file
    Classify {
        file: PathBuf,
        /// Classify the unravelling of a cyclic proof by occurrences
        #[arg(long)]
        inf: bool,
    },
    /// Translate a cyclic proof into a Hilbert proof
    ToHilbert {
        file: PathBuf,
        #[command(flatten)]
        ctx: Context,
        /// Keep empty conjunctions as T in the conclusion
        #[arg(long)]
        raw: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Fold a proof graph into a cyclic proof
    Ravel {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Translate a cyclic proof, read as a regular infinite proof, into an omega proof
    ToOmega {
        file: PathBuf,
        #[command(flatten)]
        ctx: Context,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Translate an omega proof into a cyclic presentation of an infinite proof
    ToInf {
        file: PathBuf,
        #[command(flatten)]
        ctx: Context,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a formula in a model file
    Eval {
        model: PathBuf,
        #[arg(long)]
        phi: String,
        /// World name or index; without it the formula must hold everywhere
        #[arg(long)]
        world: Option<String>,
    },
    /// Semantic consequence at a model world, or countermodel search
    Consequence {
        #[arg(long)]
        phi: String,
        #[command(flatten)]
        ctx: Context,
        #[arg(long, value_enum, default_value = "glocal")]
        mode: Mode,
        #[arg(long, conflicts_with = "search")]
        model: Option<PathBuf>,
        #[arg(long)]
        world: Option<String>,
        /// Comma-separated world names of a 0-neighbourhood, for glocal-star
        #[arg(long)]
        nbhd: Option<String>,
        /// Search all GLP-spaces up to this many points
        #[arg(long)]
        search: Option<usize>,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a finite algebra file and optionally evaluate a formula in it
    Algebra {
        file: PathBuf,
        #[arg(long)]
        phi: Option<String>,
        /// Valuation as comma-separated var=bitmask pairs
        #[arg(long)]
        val: Option<String>,
        #[command(flatten)]
        ctx: Context,
        #[arg(long, value_enum, default_value = "glocal")]
        mode: Mode,
    },
    /// Search for a countermodel
    Search {
        #[arg(long)]
        phi: String,
        #[command(flatten)]
        ctx: Context,
        #[arg(long, value_enum, default_value = "glocal")]
        mode: Mode,
        #[arg(long, default_value_t = 3)]
        points: usize,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(commands::Outcome { report, document }) => {
            match document {
                Some(doc) => {
                    print!("{doc}");
                    eprint!("{}", report.render(cli.json));
                }
                None => print!("{}", report.render(cli.json)),
            }
            if report.ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
