//! `sigmalab` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 invariant violation,
//! 3 cap exceeded.

mod analyze;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sigmalab::demo::counterexample_demo;
use sigmalab::gallery::{from_spec, ScenarioSpec};
use sigmalab::lab::boylan_distance_capped;
use sigmalab::LabError;

use crate::output::{write_csv, write_json, Table};

#[derive(Debug, Parser)]
#[command(name = "sigmalab", version)]
#[command(about = "Exact diagnostics for sequences of finite σ-algebras on [0,1)")]
struct Cli {
    /// Print progress to stderr.
    #[arg(long, short, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Built-in demonstrations.
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
    /// Run the analyses listed in a scenario file.
    Analyze {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Output formats, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "json")]
        formats: Vec<Format>,
        /// Override the scenario's cap on elementary cells.
        #[arg(long)]
        join_cap: Option<usize>,
        /// Override the scenario's cap on atoms per side of a Boylan distance.
        #[arg(long)]
        boylan_cap: Option<usize>,
    },
    /// Boylan distance between two terms of a scenario's sequence.
    Boylan {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
    },
}

#[derive(Debug, Subcommand)]
enum Demo {
    /// The typewriter sequence: L1 convergence without a.e. convergence.
    Counterexample {
        #[arg(long)]
        n_max: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "json,csv")]
        formats: Vec<Format>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lab(LabError::Invariant(_)) => 2,
            CliError::Lab(LabError::CapExceeded { .. }) => 3,
            CliError::Lab(_) | CliError::Io(_) => 1,
        }
    }
}

pub fn io_error(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn load_scenario(path: &std::path::Path) -> Result<ScenarioSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    Ok(ScenarioSpec::from_json(&text)?)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Demo {
            which: Demo::Counterexample { n_max, out, formats },
        } => {
            let report = counterexample_demo(n_max)?;
            std::fs::create_dir_all(&out).map_err(|e| io_error(&out, e))?;
            if formats.contains(&Format::Json) {
                write_json(&out.join("counterexample.json"), &report)?;
            }
            if formats.contains(&Format::Csv) {
                let mut rows = Table::new(&["index", "n", "k", "on_a", "on_b", "on_c", "l1"]);
                for r in &report.rows {
                    rows.push(vec![
                        r.index.to_string(),
                        r.n.to_string(),
                        r.k.to_string(),
                        Table::dec(&r.on_a),
                        Table::dec(&r.on_b),
                        Table::dec(&r.on_c),
                        Table::dec(&r.l1),
                    ]);
                }
                write_csv(&out.join("counterexample.csv"), &rows)?;
                let mut exc = Table::new(&["start", "exceedance"]);
                for (n, m) in report.exceedance.iter().enumerate() {
                    exc.push(vec![n.to_string(), Table::dec(m)]);
                }
                write_csv(&out.join("counterexample_exceedance.csv"), &exc)?;
            }
            for b in &report.blocks {
                println!("n = {:2}  max L1 = {}  (bound {})", b.n, b.l1, b.bound);
            }
            for v in &report.verdicts {
                println!("{v}");
            }
            Ok(())
        }
        Command::Analyze {
            scenario,
            out,
            formats,
            join_cap,
            boylan_cap,
        } => {
            let mut spec = load_scenario(&scenario)?;
            if let Some(cap) = join_cap {
                spec.caps.join_atoms = cap;
            }
            if let Some(cap) = boylan_cap {
                spec.caps.boylan_atoms = cap;
            }
            std::fs::create_dir_all(&out).map_err(|e| io_error(&out, e))?;
            analyze::run(&spec, &out, &formats, cli.verbose)
        }
        Command::Boylan { scenario, i, j } => {
            let spec = load_scenario(&scenario)?;
            let seq = from_spec(&spec)?;
            for idx in [i, j] {
                if idx > spec.horizon {
                    return Err(LabError::Horizon {
                        requested: idx,
                        max: spec.horizon,
                    }
                    .into());
                }
            }
            let d = boylan_distance_capped(&seq.term(i)?, &seq.term(j)?, spec.caps.boylan_atoms)?;
            println!("d({i}, {j}) = {d} ≈ {}", d.to_decimal(15));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
