//! Run reports, exit codes and rendering.

use serde::Serialize;
use serde_json::Value;

use heislift_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_HEISENBERG: i32 = 2;
pub const EXIT_NO_SOLUTION: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;
pub const EXIT_PRECISION: i32 = 5;
pub const EXIT_INVARIANT: i32 = 6;
pub const EXIT_VERIFY: i32 = 7;
pub const EXIT_USAGE: i32 = 64;

/// A failed command: exit code, short kind, message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, kind: "usage", message: message.into() }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, kind: "input", message: message.into() }
    }

    pub fn verify(message: impl Into<String>) -> Self {
        Failure { code: EXIT_VERIFY, kind: "verification", message: message.into() }
    }

    pub fn no_solution() -> Self {
        Failure { code: EXIT_NO_SOLUTION, kind: "no-solution", message: "no solution mod p".into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match e {
            Error::NotHeisenbergH1 | Error::NotHeisenbergH2 => (EXIT_NOT_HEISENBERG, "not-heisenberg"),
            Error::InvalidModPSolution => (EXIT_NO_SOLUTION, "no-solution"),
            Error::SearchSpaceTooLarge { .. } => (EXIT_BUDGET, "budget"),
            Error::PrecisionExhausted | Error::PrecisionTooLarge { .. } => (EXIT_PRECISION, "precision"),
            Error::NonCommuting
            | Error::NotEquivariant
            | Error::NotAntisymmetric
            | Error::NotInvolution
            | Error::DoesNotDescend
            | Error::NotACocycle
            | Error::SummandsNotStable
            | Error::BracketNotBlock
            | Error::NotClassical
            | Error::DegeneratePairing
            | Error::NotOrthogonal
            | Error::NotUnipotent => (EXIT_INVARIANT, "invariant"),
            Error::InvalidPrime(_) | Error::InvalidRank { .. } => (EXIT_USAGE, "usage"),
            _ => (EXIT_INPUT, "input"),
        };
        Failure { code, kind, message: e.to_string() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 of the input file, or of the canonical argument string.
    pub input_digest: String,
    pub status: String,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_valuations: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub achieved_prec: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

/// Result of one command before it is wrapped in a report.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub results: Value,
    pub residual_valuations: Option<Vec<String>>,
    pub achieved_prec: Option<u32>,
    /// Reported alongside the results, with a nonzero exit.
    pub failure: Option<Failure>,
}

impl Outcome {
    pub fn ok(results: Value) -> Self {
        Outcome { results, ..Default::default() }
    }
}

pub fn render(report: &RunReport, format: Format, elapsed_ms: Option<u128>) -> String {
    match format {
        Format::Machine => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Human => {
            let mut out = String::new();
            out.push_str(&format!("{} [{}]\n", report.command, report.status));
            if let Some(e) = &report.error {
                out.push_str(&format!("error: {e}\n"));
            }
            flatten(&mut out, "", &report.results);
            if let Some(p) = report.achieved_prec {
                out.push_str(&format!("achieved precision: {p}\n"));
            }
            if let Some(v) = &report.residual_valuations {
                out.push_str(&format!("residual valuations: {}\n", v.join(" ")));
            }
            out.push_str(&format!("input sha256: {}\n", report.input_digest));
            if let Some(ms) = elapsed_ms {
                out.push_str(&format!("elapsed: {ms} ms\n"));
            }
            out
        }
    }
}

fn flatten(out: &mut String, prefix: &str, v: &Value) {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(out, &key, v);
            }
        }
        Value::Null if prefix.is_empty() => {}
        other => out.push_str(&format!("{prefix}: {other}\n")),
    }
}
