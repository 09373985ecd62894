mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use trustview_core::gate::KeyPair;
use trustview_fixtures::scenario::{scenario_session, Scenario};

#[derive(Parser)]
#[command(name = "trustview", version, about = "Checks that a form submission matches what the user saw and typed")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a recorded session and sign its request if it passes.
    Verify(verify::VerifyArgs),
    /// Create a signing key pair.
    Keygen {
        /// Writes `<out>.key` and `<out>.pub`.
        #[arg(long)]
        out: PathBuf,
        /// Derive the key from this seed instead of system entropy.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Synthetic session generation.
    Fixtures {
        #[command(subcommand)]
        command: FixturesCommand,
    },
    /// Summarise verdict documents as CSV.
    Report(report::ReportArgs),
}

#[derive(Subcommand)]
enum FixturesCommand {
    /// Write one session directory.
    Gen(GenArgs),
}

#[derive(Args)]
struct GenArgs {
    /// benign, min-tamper, context-hide, host-tamper or temporal
    #[arg(long)]
    scenario: Scenario,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn keygen(out: PathBuf, seed: Option<u64>) -> Result<()> {
    let key = match seed {
        Some(s) => KeyPair::from_u64(s),
        None => KeyPair::generate(),
    };
    let (private, public) = key.write_files(&out)?;
    println!("wrote {} and {}", private.display(), public.display());
    Ok(())
}

fn generate(args: GenArgs) -> Result<()> {
    let s = scenario_session(args.scenario, args.seed).with_context(|| format!("generating {} seed {}", args.scenario, args.seed))?;
    s.write_dir(&args.out)?;
    println!("{} session (seed {}) written to {}", args.scenario, args.seed, args.out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify(args) => verify::run(args),
        Command::Keygen { out, seed } => keygen(out, seed).map(|_| ExitCode::SUCCESS),
        Command::Fixtures { command: FixturesCommand::Gen(args) } => generate(args).map(|_| ExitCode::SUCCESS),
        Command::Report(args) => report::run(args).map(|_| ExitCode::SUCCESS),
    }
}

/// Error chain on one line, skipping causes already quoted by their parent.
fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if !out.contains(&text) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&text);
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(1)
        }
    }
}
