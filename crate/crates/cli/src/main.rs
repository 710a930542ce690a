use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use lambdavar_cli::output::{emit, render, resolve_format};
use lambdavar_cli::{reproduce, run, CliError, Format, LoadedConfig, Target, WORKERS_ENV};

/// Lambda-VaR solvers and optimal indemnity design.
#[derive(Debug, Parser)]
#[command(name = "lambdavar", version)]
struct Args {
    /// JSON run configuration.
    #[arg(long, value_name = "PATH", required_unless_present = "reproduce", conflicts_with = "reproduce")]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Seed for the oracle and sampled diagnostics.
    #[arg(long)]
    seed: Option<u64>,
    /// Emit a fixed reproduction table.
    #[arg(long, value_enum, value_name = "TARGET")]
    reproduce: Option<Target>,
    /// Worker threads for sweeps; defaults to the logical core count.
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(args: &Args) -> Result<u8, CliError> {
    if let Some(n) = args.workers {
        if n == 0 {
            return Err(CliError::Validation(format!("{WORKERS_ENV} must be positive")));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Numeric(e.to_string()))?;
    }
    if let Some(target) = args.reproduce {
        return reproduce_target(target, args.out.as_deref());
    }
    let path = args.config.as_deref().expect("clap enforces --config");
    let loaded = LoadedConfig::from_path(path)?;
    let out = run(&loaded, args.seed)?;
    let spec = loaded.config.output.clone().unwrap_or_default();
    let dest = args.out.as_deref().or(spec.path.as_deref());
    let format = resolve_format(args.format, spec.format, dest);
    emit(&render(&out, format)?, dest, &mut io::stdout().lock())?;
    if out.oracle_pass() {
        Ok(0)
    } else {
        eprintln!("oracle check failed");
        Ok(3)
    }
}

fn reproduce_target(target: Target, out: Option<&Path>) -> Result<u8, CliError> {
    let rep = reproduce(target)?;
    let summary = serde_json::to_string_pretty(&rep.summary())? + "\n";
    match out {
        Some(p) => {
            emit(&rep.to_csv()?, Some(p), &mut io::sink())?;
            let mut s = p.as_os_str().to_owned();
            s.push(".summary.json");
            emit(&summary, Some(Path::new(&s)), &mut io::sink())?;
        }
        None => {
            io::stdout().lock().write_all(rep.to_csv()?.as_bytes())?;
            io::stderr().lock().write_all(summary.as_bytes())?;
        }
    }
    Ok(if rep.pass() { 0 } else { 3 })
}
