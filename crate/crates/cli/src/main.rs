//! `sortsym`: check, generalize, symmetry-break, solve and inspect
//! many-sorted finite model finding problems.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use sortsym::oracle::DEFAULT_CAP;

use report::Failure;

#[derive(Parser, Debug)]
#[command(name = "sortsym", version, about)]
struct Cli {
    /// Append wall-clock time to the report. Off by default so that output
    /// is byte-identical across runs.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and well-sort a problem file.
    Check { path: PathBuf },
    /// Split sorts as far as the formulas allow and print the generalized problem.
    Infer {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Re-check the witness and compare satisfiability with the oracle.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Append symmetry-breaking constraints chosen by a plan.
    Break {
        path: PathBuf,
        /// `auto` or a plan file.
        #[arg(long, default_value = "auto")]
        plan: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Check soundness and orbit completeness with the oracle.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Decide satisfiability by exhaustive search.
    Solve {
        path: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        /// Write the witness here instead of inlining it in the report.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Partition the interpretations into orbits of the domain-symmetry group.
    Orbits {
        path: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Expand quantifiers over the finite domains.
    Ground {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Upper bound on formula nodes in the output.
        #[arg(long, default_value_t = 1_000_000)]
        max_nodes: usize,
    },
    /// Write a reproducible set of small random problems.
    Corpus {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Directory for `problem-NNNN.sexp` files; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Keep domain elements out of the formulas.
        #[arg(long)]
        pure: bool,
        #[arg(long, default_value_t = 20_000)]
        cap: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = match cli.command {
        Command::Check { path } => commands::check(&path),
        Command::Infer {
            path,
            out,
            verify,
            cap,
        } => commands::infer(&path, out.as_deref(), verify, cap),
        Command::Break {
            path,
            plan,
            out,
            verify,
            cap,
        } => commands::break_symmetry(&path, &plan, out.as_deref(), verify, cap),
        Command::Solve { path, cap, witness } => commands::solve(&path, cap, witness.as_deref()),
        Command::Orbits { path, cap } => commands::orbits(&path, cap),
        Command::Ground {
            path,
            out,
            max_nodes,
        } => commands::ground(&path, out.as_deref(), max_nodes),
        Command::Corpus {
            seed,
            count,
            out,
            pure,
            cap,
        } => commands::corpus(seed, count, out.as_deref(), pure, cap),
    };
    match result {
        Ok(mut report) => {
            if cli.timing {
                report.push("elapsed-ms", start.elapsed().as_millis());
            }
            report.emit();
            ExitCode::from(report.code)
        }
        Err(Failure {
            code,
            message,
            context,
        }) => {
            for line in context {
                println!("{line}");
            }
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
