use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rotinv::criterion::{write_scan_csv, write_scan_json};
use rotinv::lhv::{verify_bound_with, BoundCheckConfig};
use rotinv::{ghz_planar_tensor, ghz_scan, ri_criterion, t_max, CorrelationTensor, TMaxConfig};

const EXIT_INVALID: u8 = 2;
const EXIT_UNCERTIFIED: u8 = 3;

#[derive(Parser)]
#[command(version, about = "Rotational-invariance criterion for N-party planar correlations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct OptimizerArgs {
    /// Master seed for the multistart optimizer
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random starts
    #[arg(long, default_value_t = 64)]
    starts: usize,
    /// Sweep cap per start
    #[arg(long, default_value_t = 1000)]
    max_sweeps: usize,
    /// Exit with code 3 if the T_max result is not certified
    #[arg(long)]
    require_certified: bool,
}

impl OptimizerArgs {
    fn config(&self) -> TMaxConfig {
        TMaxConfig {
            max_sweeps: self.max_sweeps,
            ..TMaxConfig::default().with_seed(self.seed).with_random_starts(self.starts)
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Write the planar tensor of a noisy GHZ state as JSON
    Tensor {
        #[arg(long)]
        ghz: usize,
        #[arg(long)]
        visibility: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximal correlation T_max of a tensor
    Tmax {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Evaluate (E,E) against 4^N·T_max
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Scan GHZ visibilities and classify each point
    Scan {
        #[arg(long)]
        ghz: usize,
        #[arg(long)]
        v_min: f64,
        #[arg(long)]
        v_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Sample random local realistic models against the bound
    VerifyBound {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        /// Also score the saturating strategy
        #[arg(long)]
        include_optimal: bool,
        #[arg(long)]
        require_certified: bool,
    },
}

fn read_tensor(path: &Path) -> Result<CorrelationTensor> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    CorrelationTensor::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(&text, None)
}

/// Returns (optimizer certified, certification required).
fn run(cli: Cli) -> Result<(bool, bool)> {
    match cli.command {
        Command::Tensor { ghz, visibility, out } => {
            let mut text = ghz_planar_tensor(ghz, visibility)?.to_json()?;
            text.push('\n');
            emit(&text, out.as_deref())?;
            Ok((true, false))
        }
        Command::Tmax { input, opt } => {
            let r = t_max(&read_tensor(&input)?, &opt.config())?;
            emit_json(&r)?;
            Ok((r.certified, opt.require_certified))
        }
        Command::Check { input, opt } => {
            let r = ri_criterion(&read_tensor(&input)?, &opt.config())?;
            emit_json(&r)?;
            Ok((r.certified, opt.require_certified))
        }
        Command::Scan {
            ghz,
            v_min,
            v_max,
            steps,
            format,
            out,
            opt,
        } => {
            let points = ghz_scan(ghz, v_min, v_max, steps, &opt.config())?;
            let mut buf = Vec::new();
            match format {
                Format::Csv => write_scan_csv(&points, &mut buf)?,
                Format::Json => {
                    write_scan_json(&points, &mut buf)?;
                    buf.push(b'\n');
                }
            }
            emit(std::str::from_utf8(&buf)?, out.as_deref())?;
            let certified = points.iter().all(|p| p.report.certified);
            Ok((certified, opt.require_certified))
        }
        Command::VerifyBound {
            input,
            trials,
            seed,
            include_optimal,
            require_certified,
        } => {
            let config = BoundCheckConfig {
                include_optimal,
                ..BoundCheckConfig::new(trials, seed)
            };
            let r = verify_bound_with(&read_tensor(&input)?, &config)?;
            emit_json(&r)?;
            Ok((r.certified, require_certified))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INVALID)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok((false, true)) => {
            eprintln!("error: optimizer result is not certified");
            ExitCode::from(EXIT_UNCERTIFIED)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
