use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use metaplectic_cli::{run_text, Overrides, Report, Status};

/// Gate-checked Toeplitz/Weyl calculus for quadratic-exponential symbols.
///
/// Reads a JSON job (command, weight, symbols or forms, options) and prints
/// the gate trail. Exit codes: 0 all gates passed, 1 a gate failed,
/// 2 input error, 3 numerical failure.
#[derive(Debug, Parser)]
#[command(name = "metaplectic", version)]
struct Cli {
    /// Job file; stdin when absent or "-".
    job: Option<PathBuf>,
    /// Relative tolerance for definiteness and spectral gates.
    #[arg(long)]
    tol: Option<f64>,
    /// Run the quadrature oracle (n = 1 only).
    #[arg(long)]
    oracle: bool,
    /// Gauss-Legendre points per axis.
    #[arg(long = "grid-m")]
    grid_m: Option<usize>,
    /// Fixed grid half-width.
    #[arg(long = "grid-R")]
    grid_r: Option<f64>,
    /// Machine-readable JSON report.
    #[arg(long)]
    json: bool,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_job(path: Option<&PathBuf>) -> Result<String, String> {
    let mut text = String::new();
    match path {
        Some(p) if p.as_os_str() != "-" => {
            text = std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?
        }
        _ => {
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| format!("cannot read stdin: {e}"))?;
        }
    }
    Ok(text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        tol: cli.tol,
        oracle: cli.oracle,
        grid_m: cli.grid_m,
        grid_r: cli.grid_r,
    };
    let report = match read_job(cli.job.as_ref()) {
        Ok(text) => run_text(&text, &overrides),
        Err(m) => Report::failure(None, Status::InputError, m),
    };
    let rendered = if cli.json { report.to_json() } else { report.to_human() };
    print!("{rendered}");
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &rendered) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(report.exit_code as u8)
}
