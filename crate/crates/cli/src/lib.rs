//! Batch front end for `heislift-core`: JSON inputs, deterministic reports.

pub mod commands;
pub mod formats;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use report::{render, Failure, Format, Outcome, RunReport, EXIT_INPUT, EXIT_OK, EXIT_USAGE};

fn odd_prime(s: &str) -> Result<u64, String> {
    let p: u64 = s.parse().map_err(|_| format!("`{s}` is not an integer"))?;
    if p == 2 || !heislift_core::padic::is_prime(p) {
        return Err(format!("{p} is not an odd prime (p = 2 is unsupported)"));
    }
    Ok(p)
}

#[derive(Clone, Debug, Args)]
pub struct GlobalOpts {
    /// Odd prime; must agree with the input file when both are given.
    #[arg(long, global = true, env = "HEISLIFT_PRIME", value_parser = odd_prime)]
    pub prime: Option<u64>,
    /// p-adic precision for Heisenberg systems (default 32).
    #[arg(long, global = true, env = "HEISLIFT_PRECISION")]
    pub precision: Option<u32>,
    /// Bound on exhaustive searches.
    #[arg(long, global = true, env = "HEISLIFT_BUDGET", default_value_t = heislift_core::heisenberg::DEFAULT_BUDGET)]
    pub budget: u64,
    /// Seed for randomized choices.
    #[arg(long, global = true, env = "HEISLIFT_SEED")]
    pub seed: Option<u64>,
    #[arg(long, global = true, env = "HEISLIFT_FORMAT", value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

#[derive(Clone, Debug, Parser)]
#[command(name = "heislift", version, about = "Heisenberg lifting, cochain calculus and parabolic tables")]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Decide H1 and H2 for a system file.
    HeisCheck { file: PathBuf },
    /// List all solutions mod p.
    HeisEnumerate { file: PathBuf },
    /// Lift a mod-p solution and verify the residuals.
    HeisSolve {
        file: PathBuf,
        /// Comma-separated `x` mod p; defaults to the file's solution or an enumerated one.
        #[arg(long, value_delimiter = ',')]
        xbar: Option<Vec<u64>>,
        #[arg(long, value_delimiter = ',', requires = "xbar")]
        ybar: Option<Vec<u64>>,
    },
    /// Cohomology of a module file.
    CohCompute { file: PathBuf },
    /// Cup pairing of a pair file, with involution and truncation checks when present.
    CohCup { file: PathBuf },
    /// All Heisenberg cocycles of a pair file over F_p.
    CohClassify {
        file: PathBuf,
        /// Cross-check against brute force over matrix pairs in the realization.
        #[arg(long)]
        oracle: bool,
    },
    /// Write the parabolic data of a classical group.
    AtlasDump { family: String, n: usize, k: usize },
    /// Check fixed points and the involution of a parabolic.
    AtlasVerify { family: String, n: usize, k: usize },
    /// Integer bounds `h1 >= degree a b` and `h2 <= a b` on declared inputs.
    DimBounds {
        #[arg(long)]
        degree: u64,
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::HeisCheck { .. } => "heis-check",
            Command::HeisEnumerate { .. } => "heis-enumerate",
            Command::HeisSolve { .. } => "heis-solve",
            Command::CohCompute { .. } => "coh-compute",
            Command::CohCup { .. } => "coh-cup",
            Command::CohClassify { .. } => "coh-classify",
            Command::AtlasDump { .. } => "atlas-dump",
            Command::AtlasVerify { .. } => "atlas-verify",
            Command::DimBounds { .. } => "dim-bounds",
        }
    }

    fn file(&self) -> Option<&PathBuf> {
        match self {
            Command::HeisCheck { file }
            | Command::HeisEnumerate { file }
            | Command::HeisSolve { file, .. }
            | Command::CohCompute { file }
            | Command::CohCup { file }
            | Command::CohClassify { file, .. } => Some(file),
            _ => None,
        }
    }
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Parse `args`, run the command, write the report to `out`, and return the exit code.
pub fn run<I, T, W>(args: I, out: &mut W) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = write!(out, "{}", e.render());
            return code;
        }
    };
    let start = Instant::now();
    let name = cli.command.name().to_string();
    let (input, outcome) = match cli.command.file() {
        Some(path) => match std::fs::read(path) {
            Ok(bytes) => {
                let o = commands::dispatch(&cli, Some(&bytes));
                (bytes, o)
            }
            Err(e) => (Vec::new(), Err(Failure { code: EXIT_INPUT, kind: "input", message: format!("{}: {e}", path.display()) })),
        },
        None => (canonical_args(&cli).into_bytes(), commands::dispatch(&cli, None)),
    };
    let outcome = outcome.unwrap_or_else(|f| Outcome { failure: Some(f), ..Default::default() });
    let (status, code, error) = match &outcome.failure {
        None => ("ok".to_string(), EXIT_OK, None),
        Some(f) => (f.kind.to_string(), f.code, Some(f.message.clone())),
    };
    let report = RunReport {
        command: name,
        input_digest: digest(&input),
        status,
        exit_code: code,
        error,
        results: outcome.results,
        residual_valuations: outcome.residual_valuations,
        achieved_prec: outcome.achieved_prec,
    };
    let elapsed = (cli.opts.format == Format::Human).then(|| start.elapsed().as_millis());
    let _ = out.write_all(render(&report, cli.opts.format, elapsed).as_bytes());
    code
}

fn canonical_args(cli: &Cli) -> String {
    let o = &cli.opts;
    let base = format!("prime={:?};precision={:?};budget={};seed={:?}", o.prime, o.precision, o.budget, o.seed);
    match &cli.command {
        Command::AtlasDump { family, n, k } | Command::AtlasVerify { family, n, k } => format!("{base};{family};{n};{k}"),
        Command::DimBounds { degree, a, b } => format!("{base};{degree};{a};{b}"),
        _ => base,
    }
}
