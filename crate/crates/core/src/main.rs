use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use affode::report::{self, ReportError, Suite, DEFAULT_MAX_DEGREE};

#[derive(Parser)]
#[command(name = "affode", version, about = "Equivalence of y'' = f(x, y, y') under area-preserving maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify f: branch, linearizability, invariants, curvature.
    Analyze {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long)]
        json: bool,
        /// Also run the formal computation and instantiate it.
        #[arg(long)]
        formal_cross_check: bool,
    },
    /// Run the built-in identity checks.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long)]
        json: bool,
    },
    /// Print the curvature of the normal connection (requires I = 0).
    Curvature {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Structure,
    Connection,
    All,
}

fn max_degree() -> Result<u32, String> {
    match std::env::var("AFFODE_MAX_DEGREE") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("AFFODE_MAX_DEGREE must be a non-negative integer, got {v:?}")),
        Err(_) => Ok(DEFAULT_MAX_DEGREE),
    }
}

fn emit<T: Serialize>(value: &T, json: bool, text: impl FnOnce(&T) -> String) {
    if json {
        println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
    } else {
        print!("{}", text(value));
    }
}

fn fail(e: ReportError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cap = match max_degree() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match cli.command {
        Command::Analyze {
            f,
            json,
            formal_cross_check,
        } => match report::analyze(&f, formal_cross_check, cap) {
            Ok(r) => {
                emit(&r, json, report::AnalysisReport::to_text);
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Curvature { f, json } => match report::curvature(&f, cap) {
            Ok(r) => {
                emit(&r, json, report::CurvatureReport::to_text);
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Verify { suite, json } => {
            let suite = match suite {
                SuiteArg::Structure => Suite::Structure,
                SuiteArg::Connection => Suite::Connection,
                SuiteArg::All => Suite::All,
            };
            let r = report::verify(suite);
            emit(&r, json, report::VerifySuiteResult::to_text);
            if r.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
    }
}
