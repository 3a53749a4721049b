use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use majorana::commands::{run_audit, run_classify, run_evolve, run_spectrum, run_verify};
use majorana::{exit, CliError, Options, RunConfig};

/// Majorana fermions in 1+1 dimensions under a scalar potential.
#[derive(Debug, Parser)]
#[command(name = "majorana", version, about)]
struct Cli {
    /// Run configuration (JSON)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for artifacts
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Override the command's headline tolerance
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Algebraic and oracle spectra
    Spectrum,
    /// Density traces of a separable state
    Evolve {
        /// Also integrate the first-order equations directly
        #[arg(long)]
        pde: bool,
    },
    /// Run the invariant suite
    Verify,
    /// Broken or unbroken supersymmetry
    Classify,
    /// Check that the couplings respect the Majorana condition
    Audit,
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let path = cli
        .config
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let cfg = RunConfig::load(&path)?;
    if let Some(tol) = cli.tol {
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(CliError::Config(
                "--tol must be a non-negative number".into(),
            ));
        }
    }
    let mut opts = Options {
        out: cli.out,
        tol: cli.tol,
        pde: false,
    };
    let outcome = match cli.command {
        Command::Spectrum => run_spectrum(&cfg, &opts)?,
        Command::Evolve { pde } => {
            opts.pde = pde;
            run_evolve(&cfg, &opts)?
        }
        Command::Verify => run_verify(&cfg, &opts)?,
        Command::Classify => run_classify(&cfg, &opts)?,
        Command::Audit => run_audit(&cfg, &opts)?,
    };
    for path in &outcome.artifacts {
        println!("{}", path.display());
    }
    if !outcome.pass {
        eprintln!("tolerance check failed; see the report");
    }
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(exit::OK);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(exit::CONFIG);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::from(exit::OK),
        Ok(false) => ExitCode::from(exit::TOLERANCE),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
