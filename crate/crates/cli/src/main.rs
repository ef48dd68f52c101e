use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use opcone::examples::{ExampleName, ExampleSpec};
use opcone::suites::{emit_report, run_suite, SuiteConfig, SUITES};
use opcone::tol::Tolerances;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "opcone", version, about = "Property suites for the real-positive cone of matrix algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named suite and write its JSON report.
    Run {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Iteration tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        exact_tol: Option<f64>,
        #[arg(long)]
        rank_tol: Option<f64>,
        /// Report path; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the data of a constructed example as JSON.
    Example {
        name: ExampleArg,
        #[arg(long, default_value_t = 4)]
        size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List registered suites.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleArg {
    TwoDim,
    Rdr,
    Volterra,
}

impl From<ExampleArg> for ExampleName {
    fn from(a: ExampleArg) -> Self {
        match a {
            ExampleArg::TwoDim => ExampleName::TwoDim,
            ExampleArg::Rdr => ExampleName::Rdr,
            ExampleArg::Volterra => ExampleName::Volterra,
        }
    }
}

fn tolerances(tol: Option<f64>, exact: Option<f64>, rank: Option<f64>) -> opcone::Result<Tolerances> {
    let d = Tolerances::default();
    Tolerances::new(exact.unwrap_or(d.exact_tol), tol.unwrap_or(d.iter_tol), rank.unwrap_or(d.rank_tol))
}

/// Writes to stdout; a closed pipe is not an error.
fn print(text: &str) -> std::io::Result<()> {
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => r,
    }
}

fn write_or_print(text: &str, out: Option<&PathBuf>) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n")),
        None => print(text),
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Run { suite, dim, trials, seed, tol, exact_tol, rank_tol, out } => {
            let tol = tolerances(tol, exact_tol, rank_tol).map_err(|e| e.to_string())?;
            let cfg = SuiteConfig { suite, dim, trials, seed, tol };
            let report = run_suite(&cfg).map_err(|e| e.to_string())?;
            match &out {
                Some(p) => emit_report(&report, p).map_err(|e| format!("writing {}: {e}", p.display()))?,
                None => print(&report.to_json_string()).map_err(|e| e.to_string())?,
            }
            eprintln!("{}: {} cases, {} failed, {} ms", report.suite, report.cases.len(), report.failures.len(), report.wall_ms);
            Ok(report.passed())
        }
        Command::Example { name, size, out } => {
            let spec = ExampleSpec::new(name.into(), size).map_err(|e| e.to_string())?;
            let json = spec.build_json(&Tolerances::default()).map_err(|e| e.to_string())?;
            let text = serde_json::to_string_pretty(&json).map_err(|e| e.to_string())?;
            write_or_print(&text, out.as_ref()).map_err(|e| e.to_string())?;
            Ok(true)
        }
        Command::List => {
            let lines: Vec<String> = SUITES.iter().map(|s| format!("{:<20} {}", s.name, s.description)).collect();
            print(&lines.join("\n")).map_err(|e| e.to_string())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
