//! Command-line front end. JSON problem files in, JSON reports out.
//!
//! Exit codes: 0 success, 2 parse or usage error, 3 cycle or precheck
//! failure, 4 infeasible division, 5 divergent norm, 6 singular point,
//! 7 identity failure.

mod commands;
pub mod problem;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CYCLE: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;
pub const EXIT_DIVERGENT: i32 = 5;
pub const EXIT_SINGULAR: i32 = 6;
pub const EXIT_IDENTITY: i32 = 7;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
    /// Partial results to include in the report.
    pub results: Option<Value>,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into(), results: None }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(EXIT_PARSE, message)
    }

    pub fn with_results(mut self, results: Value) -> Self {
        self.results = Some(results);
        self
    }
}

#[derive(Debug, Parser)]
#[command(name = "koszul-division", version, about = "Koszul complexes, exactness scores and weighted L² division")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Problem file (JSON).
    #[arg(long)]
    pub input: PathBuf,
    /// Also write the report to this file.
    #[arg(long)]
    pub json_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    /// JSON list of points, each a list of [re, im] pairs.
    #[arg(long, conflicts_with = "grid")]
    pub points: Option<PathBuf>,
    /// Quadrature nodes of the problem domain at radial x angular resolution.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    L2,
    Adjugate,
    Pointwise,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check d∘d = 0 for every degree and that the target is a cycle.
    CheckComplex {
        #[command(flatten)]
        io: InputArgs,
    },
    /// Exactness scores against |s|² at sample points.
    Exactness {
        #[command(flatten)]
        io: InputArgs,
        #[command(flatten)]
        pts: PointArgs,
    },
    /// Solve the division problem.
    Divide {
        #[command(flatten)]
        io: InputArgs,
        #[arg(long, value_enum, default_value = "l2")]
        mode: Mode,
        #[command(flatten)]
        pts: PointArgs,
        /// Total degree of the polynomial search space.
        #[arg(long)]
        degree: Option<u32>,
        /// Base quadrature resolution as R,A.
        #[arg(long, value_parser = parse_resolution)]
        resolution: Option<(usize, usize)>,
    },
    /// Finite-difference and algebraic identity checks at seeded random points.
    VerifyIdentities {
        #[command(flatten)]
        io: InputArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        npoints: usize,
    },
    /// Randomized check of the generalized trace bound.
    TraceBound {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
}

fn parse_pair(s: &str, sep: char) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(sep).ok_or_else(|| format!("expected two integers separated by '{sep}'"))?;
    let a = a.trim().parse::<usize>().map_err(|e| e.to_string())?;
    let b = b.trim().parse::<usize>().map_err(|e| e.to_string())?;
    Ok((a, b))
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    parse_pair(s, 'x')
}

fn parse_resolution(s: &str) -> Result<(usize, usize), String> {
    parse_pair(s, ',')
}

/// Inputs read from disk, digested into the report.
pub(crate) struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    fn new() -> Self {
        Self { hasher: Sha256::new() }
    }

    pub(crate) fn read(&mut self, path: &PathBuf) -> Result<String, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
        self.hasher.update((text.len() as u64).to_le_bytes());
        self.hasher.update(text.as_bytes());
        Ok(text)
    }

    fn digest(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}

pub(crate) struct Outcome {
    pub results: Value,
    pub warnings: Vec<String>,
    pub code: i32,
}

fn echo(cmd: &Command) -> Value {
    let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
    match cmd {
        Command::CheckComplex { io } => json!({"name": "check-complex", "input": io.input.display().to_string()}),
        Command::Exactness { io, pts } => json!({
            "name": "exactness", "input": io.input.display().to_string(),
            "points": path(&pts.points), "grid": pts.grid,
        }),
        Command::Divide { io, mode, pts, degree, resolution } => json!({
            "name": "divide", "input": io.input.display().to_string(),
            "mode": format!("{mode:?}").to_lowercase(), "points": path(&pts.points), "grid": pts.grid,
            "degree": degree, "resolution": resolution,
        }),
        Command::VerifyIdentities { io, seed, npoints } => json!({
            "name": "verify-identities", "input": io.input.display().to_string(), "seed": seed, "npoints": npoints,
        }),
        Command::TraceBound { seed, trials, .. } => json!({"name": "trace-bound", "seed": seed, "trials": trials}),
    }
}

/// Parses arguments, runs the command, prints the JSON report to standard
/// output and a one-line summary to standard error. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let start = Instant::now();
    let mut inputs = Inputs::new();
    let outcome = commands::execute(&cli.command, &mut inputs);
    let (results, warnings, code, error) = match outcome {
        Ok(o) => (o.results, o.warnings, o.code, None),
        Err(e) => (e.results.unwrap_or(Value::Null), Vec::new(), e.code, Some(e.message)),
    };
    let report = json!({
        "command": echo(&cli.command),
        "inputs_digest": inputs.digest(),
        "exit_code": code,
        "error": error,
        "results": results,
        "warnings": warnings,
    });
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    print!("{text}");
    let out = match &cli.command {
        Command::CheckComplex { io }
        | Command::Exactness { io, .. }
        | Command::Divide { io, .. }
        | Command::VerifyIdentities { io, .. } => io.json_out.as_ref(),
        Command::TraceBound { json_out, .. } => json_out.as_ref(),
    };
    if let Some(path) = out {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("cannot write {}: {e}", path.display());
        }
    }
    let name = echo(&cli.command)["name"].as_str().unwrap_or("").to_string();
    match &error {
        Some(msg) => eprintln!("{name}: exit {code}: {msg} ({:.3} s)", start.elapsed().as_secs_f64()),
        None => eprintln!("{name}: exit {code} ({:.3} s)", start.elapsed().as_secs_f64()),
    }
    code
}
