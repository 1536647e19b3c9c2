use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use stableseg::commands::{self, Method, Output, VerifyOptions};
use stableseg::report::Format;
use stableseg_core::oracle::DEFAULT_ATOM_CAP;

/// Stability analysis of third-degree price discrimination segmentations.
#[derive(Parser)]
#[command(name = "stableseg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Human,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Mer,
    Greedy,
    TwoValue,
}

#[derive(Subcommand)]
enum Command {
    /// Report prices, surplus and stability of a segmentation.
    Analyze {
        market: String,
        segmentation: String,
        /// Merge segments with equal prices before analysis.
        #[arg(long)]
        canonical: bool,
        #[arg(long, value_enum, default_value = "human")]
        format: FormatArg,
    },
    /// Build a stable segmentation and print it in segmentation file format.
    Construct {
        market: String,
        #[arg(long, value_enum, default_value = "mer")]
        method: MethodArg,
        /// Print the equal-revenue steps as comment lines (mer only).
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        canonical: bool,
    },
    /// Describe the core of the market.
    Core {
        market: String,
        #[arg(long, value_enum, default_value = "human")]
        format: FormatArg,
    },
    /// Cross-check the decision procedures against brute-force enumeration.
    Verify {
        market: String,
        /// Split the market into this many equal-mass atoms.
        #[arg(long)]
        atoms: Option<usize>,
        /// Largest number of atoms to enumerate.
        #[arg(long, env = "STABLESEG_ATOM_CAP", default_value_t = DEFAULT_ATOM_CAP)]
        cap: usize,
        /// Check constructed segmentations only, without enumeration.
        #[arg(long)]
        targeted: bool,
        #[arg(long, value_enum, default_value = "human")]
        format: FormatArg,
    },
}

fn format(f: FormatArg) -> Format {
    match f {
        FormatArg::Human => Format::Human,
        FormatArg::Machine => Format::Machine,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze {
            market,
            segmentation,
            canonical,
            format: f,
        } => commands::analyze(&market, &segmentation, canonical, format(f)),
        Command::Construct {
            market,
            method,
            trace,
            canonical,
        } => {
            let method = match method {
                MethodArg::Mer => Method::Mer,
                MethodArg::Greedy => Method::Greedy,
                MethodArg::TwoValue => Method::TwoValue,
            };
            commands::construct(&market, method, trace, canonical)
        }
        Command::Core { market, format: f } => commands::core(&market, format(f)),
        Command::Verify {
            market,
            atoms,
            cap,
            targeted,
            format: f,
        } => commands::verify(
            &market,
            &VerifyOptions {
                atoms,
                cap,
                targeted,
            },
            format(f),
        ),
    };
    match result {
        Ok(Output {
            stdout,
            warnings,
            code,
        }) => {
            for w in warnings {
                eprintln!("warning: {w}");
            }
            print!("{stdout}");
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
