use std::process::ExitCode;

use clap::{Parser, Subcommand};
use duval_cli::{commands, exit_code, Format, Target};

#[derive(Parser)]
#[command(name = "duval", version, about = "Finite subgroup schemes of SL2 and their invariant rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Every catalog scheme of order at most --max-order in characteristic --p.
    Catalog {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 120)]
        max_order: u64,
    },
    /// Minimal generators, relation, normal form and Hilbert function.
    Invariants {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 60)]
        dmax: u32,
    },
    /// Validates and classifies every scheme in a document.
    Classify {
        #[arg(long)]
        input: String,
    },
    /// Checks the classical explicit invariants of types A and D.
    Verify {
        #[arg(long = "type")]
        ty: String,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        p: u64,
    },
    /// Smith normal form of an integer matrix (whitespace-separated rows).
    Snf {
        /// Matrix file; standard input when absent.
        #[arg(long)]
        input: Option<String>,
    },
    /// Seeded classification round trips over the catalog.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Single prime to test; default 2, 3, 5, 7, 11.
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 120)]
        max_order: u64,
        /// Conjugations per instance.
        #[arg(long, default_value_t = 20)]
        rounds: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let fmt = cli.format;
    let result = match cli.command {
        Command::Catalog { p, max_order } => commands::catalog(p, max_order, fmt),
        Command::Invariants { target, dmax } => commands::invariants(&target, dmax, fmt),
        Command::Classify { input } => commands::classify(&input, fmt),
        Command::Verify { ty, n, p } => commands::verify(&ty, n, p, fmt),
        Command::Snf { input } => commands::snf(input.as_deref(), fmt),
        Command::Selftest {
            seed,
            p,
            max_order,
            rounds,
        } => commands::selftest(seed, p, max_order, rounds, fmt),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
