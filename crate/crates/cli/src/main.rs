use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use superatom_core::error::Error;
use superatom_qpt::config::ExperimentConfig;
use superatom_qpt::{presets, runner};

/// Default base directory for results when `--out` is not given.
const OUT_ENV: &str = "SUPERATOM_QPT_OUT";

#[derive(Parser)]
#[command(
    name = "superatom-qpt",
    about = "Simulated gate tomography on superatom qubits",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a preset or a JSON experiment config
    Run {
        /// Preset name or path to a config file
        target: String,
        /// Output directory (default: $SUPERATOM_QPT_OUT/<name> or results/<name>)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Integrator tolerance override
        #[arg(long)]
        tol: Option<f64>,
        /// Worker threads (default: one per core)
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List the available presets
    List,
    /// Check a preset or config file and report every problem found
    Validate {
        /// Preset name or path to a config file
        target: String,
    },
}

/// Validation and bad input exit with 2, a reconstruction that fails to
/// converge with 3, integrator failures with 4.
fn exit_code(err: &Error) -> ExitCode {
    match err {
        Error::ConvergenceFailure { .. } => ExitCode::from(3),
        Error::IntegrationFailure { .. } => ExitCode::from(4),
        Error::Io(_) => ExitCode::from(1),
        _ => ExitCode::from(2),
    }
}

fn load_config(target: &str) -> Result<ExperimentConfig, Error> {
    if let Some(preset) = presets::find(target) {
        return Ok(preset.config());
    }
    let path = PathBuf::from(target);
    if !path.exists() {
        return Err(Error::invalid(format!(
            "'{target}' is neither a preset nor a config file (see `superatom-qpt list`)"
        )));
    }
    let text = std::fs::read_to_string(&path)?;
    ExperimentConfig::from_json(&text)
}

fn report_diags(diags: &[String]) -> Error {
    for d in diags {
        eprintln!("config: {d}");
    }
    Error::invalid(format!(
        "configuration failed validation ({} problem{})",
        diags.len(),
        if diags.len() == 1 { "" } else { "s" }
    ))
}

fn default_out_dir(name: &str) -> PathBuf {
    std::env::var_os(OUT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("results"))
        .join(name)
}

fn run(
    target: &str,
    out: Option<PathBuf>,
    tol: Option<f64>,
    threads: Option<usize>,
) -> Result<(), Error> {
    let mut cfg = load_config(target)?;
    if let Some(tol) = tol {
        cfg.tol = tol;
    }
    let diags = cfg.validate();
    if !diags.is_empty() {
        return Err(report_diags(&diags));
    }
    let out_dir = out.unwrap_or_else(|| default_out_dir(&cfg.name));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    pool.install(|| runner::run(&cfg, &out_dir))?;
    Ok(())
}

fn validate(target: &str) -> Result<(), Error> {
    let cfg = load_config(target)?;
    let diags = cfg.validate();
    if diags.is_empty() {
        println!("{}: ok", cfg.name);
        Ok(())
    } else {
        Err(report_diags(&diags))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Run {
            target,
            out,
            tol,
            threads,
        } => run(target, out.clone(), *tol, *threads),
        Cmd::List => {
            for p in presets::PRESETS {
                println!("{:<20} {}", p.name, p.about);
            }
            Ok(())
        }
        Cmd::Validate { target } => validate(target),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}
