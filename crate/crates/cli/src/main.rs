//! `spectra`: command-line front end for the spectral algorithms and oracles.
//!
//! Every command writes its artifacts and a `manifest.json` into the output
//! directory. Failures print a JSON error payload on stderr and exit with
//! 2 (configuration), 3 (computation) or 4 (I/O).

mod commands;
mod error;
mod output;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::Value;

use commands::*;
use error::{CliError, CliResult};
use output::{read_text, Run};

#[derive(Debug, Parser)]
#[command(
    name = "spectra",
    version,
    about = "Spectra of periodic operators with error control"
)]
struct Cli {
    /// Worker threads for the scans (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, env = "SPECTRA_OUT_DIR", default_value = "spectra-out")]
    out: PathBuf,
    /// Also write an SVG scatter plot next to every cloud CSV.
    #[arg(long, global = true)]
    svg: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Spectrum of a banded periodic matrix on the 1/n lattice.
    Matrix(MatrixArgs),
    /// Birman-Schwinger spectrum of -d^2/dx^2 + V with periodic V.
    Schrodinger(SchrodingerArgs),
    /// Two-limit tower for a potential with one singular point.
    Tower(TowerArgs),
    /// Hill discriminant oracle on a window grid.
    Discriminant(DiscriminantArgs),
    /// Finite-difference eigenvalues on a truncated domain, with the ones
    /// falling in spectral gaps reported.
    Pollution(PollutionArgs),
    /// Distance between two cloud CSVs.
    Metrics(MetricsArgs),
    /// Hausdorff and Attouch-Wets distances between two cloud CSVs.
    Compare(CompareArgs),
    /// Run a JSON run configuration.
    Run(RunArgs),
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
}

/// `{"subcommand", "parameters", "out_dir", "seed"}`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    subcommand: String,
    #[serde(default)]
    parameters: serde_json::Map<String, Value>,
    #[serde(default)]
    out_dir: Option<PathBuf>,
    /// Accepted for reproducibility records; no command is randomized.
    #[serde(default)]
    #[allow(dead_code)]
    seed: Option<u64>,
}

const RUNNABLE: [&str; 7] = [
    "matrix",
    "schrodinger",
    "tower",
    "discriminant",
    "pollution",
    "metrics",
    "compare",
];

/// Turns a run configuration into the equivalent argument list.
fn run_argv(cfg: &RunConfig) -> CliResult<Vec<String>> {
    if !RUNNABLE.contains(&cfg.subcommand.as_str()) {
        return Err(CliError::config(format!(
            "unknown subcommand `{}`; expected one of {}",
            cfg.subcommand,
            RUNNABLE.join(", ")
        )));
    }
    let mut argv = vec!["spectra".to_string(), cfg.subcommand.clone()];
    let scalar = |key: &str, v: &Value| -> CliResult<String> {
        match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            _ => Err(CliError::config(format!(
                "parameter `{key}`: expected a string or a number"
            ))),
        }
    };
    for (key, value) in &cfg.parameters {
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            Value::Bool(true) => argv.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) if items.iter().any(Value::is_array) => {
                for item in items {
                    let Value::Array(inner) = item else {
                        return Err(CliError::config(format!("parameter `{key}`: mixed list")));
                    };
                    let joined = inner
                        .iter()
                        .map(|v| scalar(key, v))
                        .collect::<CliResult<Vec<_>>>()?
                        .join(",");
                    argv.extend([flag.clone(), joined]);
                }
            }
            Value::Array(items) => {
                let joined = items
                    .iter()
                    .map(|v| scalar(key, v))
                    .collect::<CliResult<Vec<_>>>()?
                    .join(",");
                argv.extend([flag, joined]);
            }
            Value::Object(_) => {
                return Err(CliError::config(format!(
                    "parameter `{key}`: objects are not supported"
                )))
            }
            v => argv.extend([flag, scalar(key, v)?]),
        }
    }
    Ok(argv)
}

fn parse_cli<I: IntoIterator<Item = String>>(args: I) -> Result<Cli, ExitCode> {
    Cli::try_parse_from(args).map_err(|e| match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        _ => fail(&CliError::config(e.render().to_string().trim().to_string())),
    })
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.payload());
    ExitCode::from(e.kind.exit_code() as u8)
}

fn execute(cli: Cli) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::config("--threads must be positive"));
        }
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let start = Instant::now();
    let mut run = Run::create(&cli.out)?;
    let (name, report) = match &cli.command {
        Command::Matrix(a) => ("matrix", matrix(a, &mut run, cli.svg)?),
        Command::Schrodinger(a) => ("schrodinger", schrodinger(a, &mut run, cli.svg)?),
        Command::Tower(a) => ("tower", tower(a, &mut run, cli.svg)?),
        Command::Discriminant(a) => ("discriminant", discriminant(a, &mut run, cli.svg)?),
        Command::Pollution(a) => ("pollution", pollution(a, &mut run)?),
        Command::Metrics(a) => {
            let (report, result) = metrics(a, &mut run)?;
            println!("{result}");
            ("metrics", report)
        }
        Command::Compare(a) => {
            let (report, result) = compare(a, &mut run)?;
            println!("{result}");
            ("compare", report)
        }
        Command::Run(_) => unreachable!("run configs are expanded before execution"),
    };
    run.finish(name, report.inputs, start.elapsed(), report.summary)
}

fn expand_run(cli: Cli) -> Result<Cli, ExitCode> {
    let Command::Run(args) = &cli.command else {
        return Ok(cli);
    };
    let cfg: RunConfig = read_text(&args.config)
        .and_then(|text| {
            serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", args.config.display())))
        })
        .map_err(|e| fail(&e))?;
    let mut argv = run_argv(&cfg).map_err(|e| fail(&e))?;
    argv.extend([
        "--out".to_string(),
        cfg.out_dir.unwrap_or(cli.out).display().to_string(),
    ]);
    if let Some(t) = cli.threads {
        argv.extend(["--threads".to_string(), t.to_string()]);
    }
    if cli.svg {
        argv.push("--svg".into());
    }
    parse_cli(argv)
}

fn main() -> ExitCode {
    let cli = match parse_cli(std::env::args()).and_then(expand_run) {
        Ok(cli) => cli,
        Err(code) => return code,
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
