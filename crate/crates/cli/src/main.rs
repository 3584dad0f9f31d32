mod algebra;
mod args;
mod cert;
mod covers;
mod dynamics;

use cert::{emit, Certificate};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(boxdim_core::Error),
    Io(std::io::Error),
}

impl From<boxdim_core::Error> for CliError {
    fn from(e: boxdim_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "boxdim", version, about = "Finite-scale certificates for box spaces, covers, decay functions and dynamics")]
struct Cli {
    /// Certificate path (default: standard output).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel checks.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Element cap for balls and coset enumerations.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Seed for marker-search tie breaking.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Group arithmetic and word metric.
    #[command(subcommand)]
    Group(algebra::GroupCmd),
    /// Subgroup chains, coset spaces and radius checks.
    #[command(subcommand)]
    Chain(algebra::ChainCmd),
    /// Distance in a finite window of the box space.
    Boxdist(algebra::BoxdistArgs),
    /// Periodic coloured covers.
    #[command(subcommand)]
    Cover(covers::CoverCmd),
    /// Decay functions of covers.
    #[command(subcommand)]
    Decay(covers::DecayCmd),
    /// Rokhlin towers of odometers.
    #[command(subcommand)]
    Rokhlin(dynamics::RokhlinCmd),
    /// Amenability-dimension witnesses.
    #[command(subcommand)]
    Amdim(dynamics::AmdimCmd),
    /// Nilpotent growth certificates.
    Growth(dynamics::GrowthArgs),
    /// Marker sets for free finite actions.
    Marker(dynamics::MarkerArgs),
}

/// Shared run context: the replayable argument list and global limits.
pub struct Ctx {
    pub argv: Vec<String>,
    pub cap: Option<usize>,
    pub seed: u64,
}

impl Ctx {
    pub fn cap_or(&self, default: usize) -> usize {
        self.cap.unwrap_or(default)
    }

    /// The inputs block: the argument list that replays this run plus the
    /// resolved provenance fields.
    pub fn inputs(&self, provenance: Value) -> Value {
        let mut v = json!({ "argv": self.argv });
        if let Value::Object(m) = provenance {
            for (k, x) in m {
                v[k] = x;
            }
        }
        v
    }
}

/// Arguments that do not change the certificate: the output path and the
/// thread count.
fn replay_argv(raw: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in raw {
        if skip {
            skip = false;
            continue;
        }
        if a == "--out" || a == "--threads" {
            skip = true;
            continue;
        }
        if a.starts_with("--out=") || a.starts_with("--threads=") {
            continue;
        }
        out.push(a.clone());
    }
    out
}

fn run(cli: Cli, ctx: &Ctx) -> Result<Certificate, CliError> {
    match cli.command {
        Command::Group(c) => algebra::group(c, ctx),
        Command::Chain(c) => algebra::chain(c, ctx),
        Command::Boxdist(a) => algebra::boxdist(a, ctx),
        Command::Cover(c) => covers::cover(c, ctx),
        Command::Decay(c) => covers::decay(c, ctx),
        Command::Rokhlin(c) => dynamics::rokhlin(c, ctx),
        Command::Amdim(c) => dynamics::amdim(c, ctx),
        Command::Growth(a) => dynamics::growth(a, ctx),
        Command::Marker(a) => dynamics::marker(a, ctx),
    }
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&raw) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("boxdim: --threads: {e}");
            return ExitCode::from(2);
        }
    }
    let ctx = Ctx {
        argv: replay_argv(&raw[1..]),
        cap: cli.cap,
        seed: cli.seed,
    };
    let out = cli.out.clone();
    match run(cli, &ctx) {
        Ok(cert) => {
            if let Err(e) = emit(&cert, out.as_deref()) {
                eprintln!("boxdim: writing certificate: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(if cert.pass() { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("boxdim: {e}");
            ExitCode::from(2)
        }
    }
}
