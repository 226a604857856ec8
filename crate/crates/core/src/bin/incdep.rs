use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use incdep::cli::{run, Command, OutputFormat, RunConfig};
use incdep::witness::WitnessFormat;

#[derive(Parser)]
#[command(
    name = "incdep",
    version,
    about = "Implication of inclusion atoms over Boolean teams"
)]
struct Args {
    #[command(subcommand)]
    command: Cmd,
    /// Cross-check the verdict by enumerating all teams.
    #[arg(long, global = true)]
    oracle: bool,
    #[arg(long, global = true, value_enum, default_value = "table")]
    witness: Witness,
    /// Print the derivation of entailed queries.
    #[arg(long, global = true)]
    trace: bool,
    #[arg(long, global = true, default_value_t = 4)]
    max_oracle_vars: usize,
    /// Permit --max-oracle-vars 5 (about 4.3 billion teams).
    #[arg(long, global = true)]
    allow_large_oracle: bool,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide a problem file.
    Decide { file: PathBuf },
    /// Sweep all teams over p1 p2 p3 for the Armstrong gap.
    CheckArmstrong,
    /// Check that the n+1 premises of the coverage rule are all needed.
    CheckNoKary {
        #[arg(long)]
        n: usize,
    },
    /// Reduce a 3-CNF DIMACS file to a coverage question and compare with brute force.
    #[command(name = "reduce-3sat")]
    Reduce3sat { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Witness {
    Table,
    Constraints,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let command = match args.command {
        Cmd::Decide { file } => Command::Decide { input: file },
        Cmd::CheckArmstrong => Command::CheckArmstrong,
        Cmd::CheckNoKary { n } => Command::CheckNoKary { n },
        Cmd::Reduce3sat { file } => Command::Reduce3Sat { input: file },
    };
    let cfg = RunConfig {
        command,
        witness: match args.witness {
            Witness::Table => WitnessFormat::Table,
            Witness::Constraints => WitnessFormat::Constraints,
            Witness::None => WitnessFormat::None,
        },
        trace: args.trace,
        oracle: args.oracle,
        max_oracle_vars: args.max_oracle_vars,
        allow_large_oracle: args.allow_large_oracle,
        format: match args.format {
            Format::Json => OutputFormat::Json,
            Format::Text => OutputFormat::Text,
        },
    };
    let report = run(&cfg);
    print!("{}", report.stdout);
    eprint!("{}", report.stderr);
    ExitCode::from(report.exit as u8)
}
