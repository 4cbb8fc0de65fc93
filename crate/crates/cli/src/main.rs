use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use weylsteer_cli::commands::{self, SolveModel, SolveRequest};
use weylsteer_cli::error::read_file;
use weylsteer_cli::runspec::RunSpec;
use weylsteer_cli::{CliError, CliResult};
use weylsteer_core::design::DesignParams;

#[derive(Parser)]
#[command(name = "weylsteer", version, about = "Cartan-form steering and CNOT synthesis for coupled qubit pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Local-equivalence class, invariants and CNOT verdict of a 4×4 unitary.
    Decompose {
        /// Matrix file: 4 lines of 4 entries, each `a+bi` or `(a,b)`.
        matrix: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Steering trajectory of a run specification, written as CSV.
    Steer {
        /// JSON run specification.
        runspec: PathBuf,
        /// CSV destination (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the directly propagated endpoint unitary in matrix format.
        #[arg(long)]
        endpoint: Option<PathBuf>,
    },
    /// Rabi frequencies and gate time that produce a CNOT-class gate.
    Solve {
        /// capacitive, inductive-rf, dc-detune, sym-dc[-plus] or asym-dc[-plus].
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 1.0)]
        g: f64,
        #[arg(long, default_value_t = 0.0)]
        k: f64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Second mode number (defaults to `n`).
        #[arg(long)]
        m: Option<u32>,
        /// JSON seed `{"t_half_pi", "omega2", "omega_z"}` for design models.
        #[arg(long, conflicts_with_all = ["n", "m"])]
        seed_file: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Regenerates table 1, 2 or 3 as CSV.
    Table {
        #[arg(value_parser = clap::value_parser!(u32).range(1..=3))]
        number: u32,
        /// Compare against the published values; exit 5 on any mismatch.
        #[arg(long)]
        diff: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn output(path: Option<&PathBuf>) -> CliResult<Box<dyn Write>> {
    match path {
        Some(p) => File::create(p)
            .map(|f| Box::new(BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn path_str(p: &PathBuf) -> String {
    p.display().to_string()
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Decompose { matrix, json } => {
            let report = commands::decompose(&read_file(&path_str(&matrix))?)?;
            commands::write_decompose(&mut io::stdout().lock(), &report, json)
        }
        Command::Steer { runspec, out, endpoint } => {
            let spec = RunSpec::from_json(&read_file(&path_str(&runspec))?)?;
            let result = commands::steer(&spec, commands::recon_tolerance()?)?;
            let mut w = output(out.as_ref())?;
            commands::write_steer_csv(&mut w, &result.rows, spec.units)?;
            w.flush().map_err(|source| CliError::Io { path: "<output>".into(), source })?;
            if let Some(p) = endpoint {
                let mut w = output(Some(&p))?;
                commands::write_matrix(&mut w, &result.endpoint)?;
                w.flush().map_err(|source| CliError::Io { path: path_str(&p), source })?;
            }
            Ok(())
        }
        Command::Solve { model, g, k, n, m, seed_file, json } => {
            let seed = match seed_file {
                Some(p) => Some(
                    serde_json::from_str::<DesignParams>(&read_file(&path_str(&p))?)
                        .map_err(|e| CliError::Parse { line: Some(e.line()), message: e.to_string() })?,
                ),
                None => None,
            };
            let req = SolveRequest { model: model.parse::<SolveModel>()?, g, k, n, m, seed };
            let (solution, class_residual) = commands::solve(&req)?;
            commands::write_solve(&mut io::stdout().lock(), &solution, class_residual, json)
        }
        Command::Table { number, diff, out } => {
            let mut w = output(out.as_ref())?;
            let result = commands::table(&mut w, &mut io::stderr().lock(), number, diff);
            w.flush().map_err(|source| CliError::Io { path: "<output>".into(), source })?;
            result
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
