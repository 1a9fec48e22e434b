use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use lndcert::certify;
use lndcert::derivation::parse_derivation;
use lndcert::parse::parse_poly;
use lndcert::scenario::{run_scenario, ScenarioError};

#[derive(Parser)]
#[command(name = "lndcert", version, about = "Exact certificates for derivations and automorphisms of polynomial rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario file and emit a report
    Run {
        scenario: PathBuf,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Record measured per-task durations (reports stop being
        /// byte-reproducible)
        #[arg(long)]
        timings: bool,
    },
    /// Certify that the degree-d composed automorphism is not algebraic
    Certify {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value = "5")]
        budget: usize,
        #[arg(long, default_value = "16")]
        cap: usize,
    },
    /// Lift a kernel element of the lowest homogeneous component through a
    /// degree truncation
    Lift {
        #[arg(long)]
        derivation: String,
        #[arg(long)]
        g0: String,
        #[arg(long, default_value = "12")]
        cap: usize,
        /// Number of variables for parsing
        #[arg(long, default_value = "2")]
        nvars: usize,
    },
    /// Parse a polynomial and print its canonical form, order, and lowest
    /// homogeneous component
    Check {
        #[arg(long)]
        poly: String,
        #[arg(long, default_value = "2")]
        nvars: usize,
    },
}

const EXIT_OK: u8 = 0;
const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Run {
            scenario,
            out,
            format,
            timings,
        } => {
            let report = match run_scenario(&scenario, timings) {
                Ok(r) => r,
                Err(e @ ScenarioError::Io(_)) | Err(e @ ScenarioError::Schema(_)) => {
                    return Err(e.to_string())
                }
            };
            let rendered = match format {
                Format::Json => report.to_json(),
                Format::Text => report.render_text(),
            };
            match out {
                Some(path) => std::fs::write(&path, &rendered)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
                None => println!("{rendered}"),
            }
            Ok(if report.has_failures() { EXIT_FAILED } else { EXIT_OK })
        }
        Command::Certify { d, budget, cap } => {
            let report = certify::certify_non_algebraic(d, budget, cap)
                .map_err(|e| e.to_string())?;
            println!(
                "d = {d}, budget = {budget}, cap = {cap}: lhc degrees {:?}, span dims {:?}",
                report.probe.lhc_degrees, report.probe.dims
            );
            if report.verified {
                println!("NON_ALGEBRAIC certificate verified");
                Ok(EXIT_OK)
            } else {
                println!("certificate NOT established");
                Ok(EXIT_FAILED)
            }
        }
        Command::Lift {
            derivation,
            g0,
            cap,
            nvars,
        } => {
            let d = parse_derivation(&derivation, nvars).map_err(|e| e.to_string())?;
            let g0 = parse_poly(&g0, nvars).map_err(|e| e.to_string())?;
            let lift = certify::kernel_lift(&d, &g0, cap).map_err(|e| e.to_string())?;
            println!("{lift}");
            Ok(EXIT_OK)
        }
        Command::Check { poly, nvars } => {
            let p = parse_poly(&poly, nvars).map_err(|e| e.to_string())?;
            println!("canonical: {p}");
            match p.ord() {
                Some(o) => {
                    println!("ord: {o}");
                    println!("lhc: {}", p.lhc().map_err(|e| e.to_string())?);
                }
                None => println!("ord: undefined (zero polynomial)"),
            }
            Ok(EXIT_OK)
        }
    }
}
