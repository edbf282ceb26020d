use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qrev_cli::{fixture, run, CliConfig, Command as CliCommand, EXIT_INVALID};

/// Quantum operation reversibility and teleportation toolkit.
#[derive(Parser)]
#[command(name = "qrev", version, about)]
struct Args {
    #[command(subcommand)]
    command: Commands,

    /// Acceptance tolerance for reversibility and scheme checks.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tolerance: f64,

    /// Seed for all randomized steps (sampling, probes, constructions).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Read input from a built-in fixture instead of a file or stdin.
    #[arg(long, global = true, value_name = "NAME")]
    fixture: Option<String>,

    /// Read input JSON from this file (default: stdin).
    #[arg(long, global = true, value_name = "PATH")]
    input: Option<PathBuf>,

    /// Write output JSON to this file (default: stdout).
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Pretty-print the output JSON.
    #[arg(long, global = true)]
    pretty: bool,
}

#[derive(Subcommand)]
enum Commands {
    /// Check conditions 2 and 3 for an ideal operation on a subspace.
    CheckReversible,
    /// Construct the reversing unitary and emit the certificate.
    Reverse,
    /// Run the information-gain necessary condition on a general operation.
    InfoGain,
    /// Measure and reverse a state in the Mabuchi-Zoller scenario.
    MzDemo,
    /// Verify a teleportation scheme outcome by outcome.
    TeleportVerify,
    /// Schmidt-characterize a teleportation scheme.
    TeleportCharacterize,
    /// Build a named scheme (bell / general / overcomplete).
    TeleportBuild,
    /// Sample one outcome of a generalized measurement.
    Simulate,
}

impl Commands {
    fn as_cli(&self) -> CliCommand {
        match self {
            Self::CheckReversible => CliCommand::CheckReversible,
            Self::Reverse => CliCommand::Reverse,
            Self::InfoGain => CliCommand::InfoGain,
            Self::MzDemo => CliCommand::MzDemo,
            Self::TeleportVerify => CliCommand::TeleportVerify,
            Self::TeleportCharacterize => CliCommand::TeleportCharacterize,
            Self::TeleportBuild => CliCommand::TeleportBuild,
            Self::Simulate => CliCommand::Simulate,
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();

    let input: Vec<u8> = if let Some(name) = &args.fixture {
        match fixture(name) {
            Some(bytes) => bytes,
            None => {
                eprintln!(
                    "{{\"error\":{{\"code\":\"unknown-fixture\",\"message\":\"no fixture named {name}\"}}}}"
                );
                return ExitCode::from(EXIT_INVALID as u8);
            }
        }
    } else if let Some(path) = &args.input {
        match fs::read(path) {
            Ok(bytes) => bytes,
            Err(e) => {
                eprintln!(
                    "{{\"error\":{{\"code\":\"io\",\"message\":\"cannot read {}: {e}\"}}}}",
                    path.display()
                );
                return ExitCode::from(EXIT_INVALID as u8);
            }
        }
    } else {
        let mut buf = Vec::new();
        if std::io::stdin().read_to_end(&mut buf).is_err() {
            eprintln!("{{\"error\":{{\"code\":\"io\",\"message\":\"cannot read stdin\"}}}}");
            return ExitCode::from(EXIT_INVALID as u8);
        }
        buf
    };

    let config = CliConfig {
        command: args.command.as_cli(),
        tolerance: args.tolerance,
        seed: args.seed,
        pretty: args.pretty,
    };
    let (exit, output) = run(&config, &input);

    let write_result = match &args.output {
        Some(path) => fs::write(path, &output),
        None => std::io::stdout().write_all(&output),
    };
    if let Err(e) = write_result {
        eprintln!("{{\"error\":{{\"code\":\"io\",\"message\":\"cannot write output: {e}\"}}}}");
        return ExitCode::from(EXIT_INVALID as u8);
    }
    ExitCode::from(exit as u8)
}
