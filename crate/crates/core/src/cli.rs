//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification or selftest failure, 2 parse, shape
//! or input-validation error, 3 unsupported ring/kind, 4 refusal (clusters
//! that cannot be separated, or no convergence).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::canonical::DecompKind;
use crate::decomp::{decompose, Options};
use crate::error::Error;
use crate::io::{factorization_to_json, matrix_from_json, verify_input_from_json};
use crate::scalars::RingId;
use crate::testkit::suite::{render, selftest, SuiteConfig};
use crate::testkit::verify_factorization;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;
pub const EXIT_REFUSED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "ringdecomp", version, about = "Canonical SVD, spectral and Jordan decompositions over *-rings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decompose a matrix read from a JSON file.
    Decompose(DecomposeArgs),
    /// Check a factorization file against its matrix.
    Verify(VerifyArgs),
    /// Run the property suite on seeded random inputs.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct Tolerances {
    /// Residual and self-adjointness tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Eigenvalue and singular value clustering radius.
    #[arg(long = "cluster-tol", default_value_t = 1e-6)]
    pub cluster_tol: f64,
}

impl Tolerances {
    fn options(&self) -> Options {
        Options { tol: self.tol, cluster_tol: self.cluster_tol, ..Options::default() }
    }
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Expected ring of the input (zero, real, complex, dual-trivial, dual-conj,
    /// quaternion, double-complex, integer).
    #[arg(long)]
    pub ring: Option<RingId>,
    /// svd, spectral or jordan.
    #[arg(long)]
    pub kind: DecompKind,
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Where to write the factorization JSON; omitted means no file.
    #[arg(long = "out")]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub tols: Tolerances,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub ring: Option<RingId>,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[command(flatten)]
    pub tols: Tolerances,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Trials per cell.
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Restrict to these rings (repeatable).
    #[arg(long)]
    pub ring: Vec<RingId>,
    #[command(flatten)]
    pub tols: Tolerances,
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UnsupportedRingKind { .. } => EXIT_UNSUPPORTED,
        Error::ClusterAmbiguity { .. } | Error::NoConvergence => EXIT_REFUSED,
        _ => EXIT_INPUT,
    }
}

fn read_json(path: &Path) -> Result<Value, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn check_ring(expected: Option<RingId>, found: RingId) -> Result<(), Error> {
    match expected {
        Some(r) if r != found => Err(Error::RingMismatch(r, found)),
        _ => Ok(()),
    }
}

fn decompose_cmd(a: &DecomposeArgs, out: &mut dyn Write) -> Result<i32, Error> {
    let m = matrix_from_json(&read_json(&a.input)?)?;
    check_ring(a.ring, m.ring())?;
    let f = decompose(&m, a.kind, &a.tols.options())?;
    let report = verify_factorization(&m, &f, a.tols.tol);
    let residuals = json!({ "reconstruction": report.reconstruction, "left": report.left, "right": report.right });
    let doc = factorization_to_json(&m, &f, residuals)?;
    if let Some(path) = &a.output {
        let text = serde_json::to_string_pretty(&doc).expect("finite values serialize") + "\n";
        std::fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    }
    let _ = writeln!(out, "{} over {} ({}x{}): {} blocks", a.kind, m.ring(), m.rows(), m.cols(), f.blocks.len());
    for b in &f.blocks {
        let _ = writeln!(out, "  {b}");
    }
    let _ = writeln!(out, "reconstruction residual {:e}", report.reconstruction);
    Ok(EXIT_OK)
}

fn verify_cmd(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32, Error> {
    let (m, f) = verify_input_from_json(&read_json(&a.input)?)?;
    check_ring(a.ring, m.ring())?;
    let r = verify_factorization(&m, &f, a.tols.tol);
    let _ = writeln!(out, "reconstruction {:e}", r.reconstruction);
    let _ = writeln!(out, "left factor    {:e}", r.left);
    let _ = writeln!(out, "right factor   {:e}", r.right);
    let _ = writeln!(out, "generators     {}/{}", r.generators.iter().filter(|&&g| g).count(), r.generators.len());
    let failures = r.failures();
    for msg in &failures {
        let _ = writeln!(out, "FAIL: {msg}");
    }
    let _ = writeln!(out, "{}", if failures.is_empty() { "PASS" } else { "FAIL" });
    Ok(if failures.is_empty() { EXIT_OK } else { EXIT_FAILED })
}

fn selftest_cmd(a: &SelftestArgs, out: &mut dyn Write) -> i32 {
    let cfg = SuiteConfig {
        trials: a.trials,
        seed: a.seed,
        rings: if a.ring.is_empty() { None } else { Some(a.ring.clone()) },
        opts: a.tols.options(),
    };
    let results = selftest(&cfg);
    let _ = write!(out, "{}", render(&results));
    let ok = results.iter().all(|r| r.passed());
    let _ = writeln!(out, "{}", if ok { "PASS" } else { "FAIL" });
    if ok {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_INPUT;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let res = match &cli.command {
        Command::Decompose(a) => decompose_cmd(a, out),
        Command::Verify(a) => verify_cmd(a, out),
        Command::Selftest(a) => Ok(selftest_cmd(a, out)),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
