use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use anisoflow::io::{cmd_check, cmd_decompose, cmd_norms, cmd_run, DecomposeMode};
use anisoflow::lab::{CaseId, FieldClass};

#[derive(Parser)]
#[command(name = "anisoflow", version, about = "Spectral Navier-Stokes runs, norms and inequality checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a run configuration; writes snapshots, monitor.csv and manifest.txt.
    Run { config: PathBuf },
    /// Print norms of a field file, one line per spec (e.g. L2, H(0.5), B(0,2,inf), Bp(6)).
    Norms {
        field: PathBuf,
        #[arg(required = true)]
        specs: Vec<String>,
    },
    /// Print per-block L^p norms of a field file as CSV.
    Decompose {
        field: PathBuf,
        #[arg(long, default_value = "iso")]
        mode: DecomposeMode,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// Audit one inequality (case a-k) on a seeded ensemble at N and 2N.
    Check {
        case: CaseId,
        /// Parameter override `name=value`; repeatable.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, f64)>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 32)]
        resolution: usize,
        /// Field class; defaults to the case's natural class.
        #[arg(long)]
        class: Option<FieldClass>,
        /// Write the per-member CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, found `{s}`"))?;
    let v = match v.trim() {
        "inf" => f64::INFINITY,
        t => t.parse::<f64>().map_err(|e| format!("{k}: {e}"))?,
    };
    Ok((k.trim().to_string(), v))
}

fn run(cli: Cli) -> anisoflow::Result<ExitCode> {
    match cli.command {
        Command::Run { config } => {
            let out = cmd_run(&config)?;
            println!("{} records -> {}", out.records.len(), out.csv_path.display());
            println!("manifest -> {}", out.manifest_path.display());
            if !out.events.is_empty() {
                eprintln!("{} CFL warning(s)", out.events.len());
            }
            if let Some(f) = out.failure {
                eprintln!("run stopped: {f}");
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Norms { field, specs } => {
            for (spec, value) in cmd_norms(&field, &specs)? {
                println!("{spec} {value:.16e}");
            }
        }
        Command::Decompose { field, mode, p } => print!("{}", cmd_decompose(&field, mode, p)?),
        Command::Check { case, params, seed, count, resolution, class, csv } => {
            let report = cmd_check(case, &params, seed, count, resolution, class)?;
            if let Some(path) = csv {
                std::fs::write(path, report.csv())?;
            }
            print!("{}", report.summary());
            if !report.passed {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
