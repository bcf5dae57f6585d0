use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mdiqkd_cli::problem::{solve, ProblemFile};
use mdiqkd_cli::report::{execute, report_json, write_trace_file};
use mdiqkd_cli::scenario::ScenarioFile;
use mdiqkd_cli::tables::{table_rows, write_tables};
use mdiqkd_cli::{CliError, CliResult};
use mdiqkd_core::opsets::{CatalogKind, CodingScheme};

#[derive(Parser)]
#[command(name = "mdiqkd", version, about = "Run QKD scenarios, dump operator tables, solve discrimination problems")]
struct Cli {
    /// Worker threads for round-level parallelism (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a session described by a JSON or TOML scenario file.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Report path; falls back to the scenario's output.report, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-round CSV trace path; falls back to the scenario's output.trace.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Replace the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the keep/discard and coding tables of a catalog as CSV.
    DumpTables {
        /// BB84-4, BB84-8, SixState-24 or General-12.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        theta: Option<f64>,
        /// fixed or flip; defaults to the catalog's own scheme.
        #[arg(long)]
        coding: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Min-error and unambiguous discrimination of the states in a JSON problem file.
    Discriminate {
        #[arg(long, alias = "scenario")]
        problem: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Runtime(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Runtime(e.to_string())),
    }
}

fn main_inner(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Run {
            scenario,
            out,
            trace,
            seed,
        } => {
            let file = ScenarioFile::load(&scenario)?;
            let trace = trace.or_else(|| file.output.trace.clone());
            let out = out.or_else(|| file.output.report.clone());
            let (report, rounds) = execute(&file, seed, trace.is_some())?;
            if let Some(t) = &trace {
                write_trace_file(&rounds, t)?;
            }
            emit(&report_json(&report)?, out.as_deref())
        }
        Command::DumpTables {
            kind,
            theta,
            coding,
            out,
        } => {
            let kind: CatalogKind = kind.parse().map_err(|e: mdiqkd_core::Error| CliError::Config(e.to_string()))?;
            let coding = match coding.as_deref() {
                None => None,
                Some("fixed") => Some(CodingScheme::FixedPerOperator),
                Some("flip") => Some(CodingScheme::FlipParityPerCell),
                Some(other) => return Err(CliError::Config(format!("unknown coding `{other}`"))),
            };
            let rows = table_rows(kind, theta, coding)?;
            let mut buf = Vec::new();
            write_tables(&rows, &mut buf)?;
            emit(&String::from_utf8_lossy(&buf), out.as_deref())
        }
        Command::Discriminate { problem, out } => {
            let result = solve(&ProblemFile::load(&problem)?)?;
            let mut s = serde_json::to_string_pretty(&result).map_err(|e| CliError::Runtime(e.to_string()))?;
            s.push('\n');
            emit(&s, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mdiqkd: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
