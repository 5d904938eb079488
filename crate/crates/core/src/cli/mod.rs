//! Command-line front end: JSON configs in, JSON reports and CSV traces out.
//!
//! Exit codes: 0 when every verdict passes (or the command has none), 2 when a verdict fails,
//! 1 on input or numerical errors. Output files are written only after the run completes.

mod commands;
mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value};

use crate::error::{LabError, Result};
use crate::report::CheckReport;

pub use config::FSpec;

#[derive(Debug, Parser)]
#[command(name = "dlab", version, about = "Numerical laboratory for Dirichlet series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON config for the subcommand; flags given on the command line override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "dlab-out")]
    pub out_dir: PathBuf,
    /// Overrides the config seed (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, short, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct FArg {
    /// Corpus name, path to a series JSON file, or inline series JSON.
    #[arg(long)]
    pub f: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate f at points.
    Eval {
        #[command(flatten)]
        f: FArg,
        #[arg(long, num_args = 2, allow_negative_numbers = true, value_names = ["RE", "IM"])]
        s: Option<Vec<f64>>,
    },
    /// Window means against the torus mean.
    Mean {
        #[command(flatten)]
        f: FArg,
        #[arg(long, allow_negative_numbers = true)]
        sigma: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Jessen function on a sigma grid, with a convexity check.
    Jessen {
        #[command(flatten)]
        f: FArg,
    },
    HardyStein {
        #[command(flatten)]
        f: FArg,
        #[arg(long)]
        p: Option<f64>,
    },
    Lp {
        #[command(flatten)]
        f: FArg,
        #[arg(long)]
        p: Option<f64>,
    },
    LpBoundary {
        #[command(flatten)]
        f: FArg,
        #[arg(long)]
        p: Option<f64>,
    },
    LpTorus {
        #[command(flatten)]
        f: FArg,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Isolate zeros in a rectangle.
    Zeros {
        #[command(flatten)]
        f: FArg,
        #[arg(long, num_args = 4, allow_negative_numbers = true, value_names = ["SIGMA0", "SIGMA1", "T0", "T1"])]
        rect: Option<Vec<f64>>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// N_f(xi, T) from isolated xi-points.
    Counting {
        #[command(flatten)]
        f: FArg,
        #[arg(long, num_args = 2, allow_negative_numbers = true, value_names = ["RE", "IM"])]
        xi: Option<Vec<f64>>,
        #[arg(long = "T")]
        t: Option<f64>,
    },
    MeanCounting {
        #[command(flatten)]
        f: FArg,
        #[arg(long, num_args = 2, allow_negative_numbers = true, value_names = ["RE", "IM"])]
        xi: Option<Vec<f64>>,
    },
    Jensen {
        #[command(flatten)]
        f: FArg,
        #[arg(long)]
        sigma0: Option<f64>,
    },
    BlaschkeCheck {
        #[command(flatten)]
        f: FArg,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
    },
    /// Time fraction of the Kronecker flow inside a polygon set.
    Visit {
        #[arg(long = "T")]
        t: Option<f64>,
    },
    /// Build the outer function for a parallelogram cover and write it as a generalized series.
    SsBuild {
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        degree: Option<u32>,
    },
    Gap {
        #[arg(long)]
        delta: Option<f64>,
    },
    Oscillation,
    /// List the corpus of named functions.
    Corpus,
}

/// Files produced by a command, written together at the end.
#[derive(Debug, Default)]
pub struct Outputs {
    pub files: Vec<(String, Vec<u8>)>,
    pub reports: Vec<CheckReport>,
    pub stdout: String,
}

impl Outputs {
    pub fn json(&mut self, name: &str, value: &impl serde::Serialize) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| LabError::InvalidParameter(e.to_string()))?;
        bytes.push(b'\n');
        self.files.push((name.to_string(), bytes));
        Ok(())
    }

    pub fn csv<R: serde::Serialize>(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = R>) -> Result<()> {
        let err = |e: csv::Error| LabError::InvalidParameter(e.to_string());
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(header).map_err(err)?;
        for r in rows {
            w.serialize(r).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::InvalidParameter(e.to_string()))?;
        self.files.push((name.to_string(), bytes));
        Ok(())
    }

    fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.passed())
    }
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, dir.join(name))
}

fn load_config(cli: &Cli) -> Result<Value> {
    let Some(path) = &cli.config else { return Ok(Value::Object(Map::new())) };
    let text = fs::read_to_string(path)
        .map_err(|e| LabError::Input { pointer: String::new(), message: format!("{}: {e}", path.display()) })?;
    let v: Value = crate::io::from_json(&text)?;
    if !v.is_object() {
        return Err(LabError::Input { pointer: String::new(), message: "config must be a JSON object".into() });
    }
    Ok(v)
}

/// Runs the command and returns the exit code; messages go to stderr, tables to stdout.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            if out.all_pass() {
                0
            } else {
                2
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(cli: &Cli) -> Result<Outputs> {
    let cfg = load_config(cli)?;
    let out = commands::dispatch(cli, cfg)?;
    if !out.files.is_empty() {
        let io_err = |e: std::io::Error| LabError::InvalidParameter(format!("{}: {e}", cli.out_dir.display()));
        fs::create_dir_all(&cli.out_dir).map_err(io_err)?;
        for (name, bytes) in &out.files {
            write_atomic(&cli.out_dir, name, bytes).map_err(io_err)?;
        }
    }
    if cli.verbose {
        for r in &out.reports {
            eprintln!("{}: {:?} (lhs {:.6e}, rhs {:.6e})", r.check, r.verdict, r.lhs, r.rhs);
        }
    }
    Ok(out)
}

pub fn main() -> i32 {
    let cli = Cli::parse();
    run(&cli)
}
