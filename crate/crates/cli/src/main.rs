//! `trigapprox`: coefficient dumps, index sequences, and the verification campaign.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use trigapprox::{compute_coefficients, decreasing_seq, increasing_seq, Approximator64, LebesgueExponent, NormVariant, SolverOptions};
use trigapprox_verify::corpus;
use trigapprox_verify::reports::{write_atomic, write_reports, Outcome, Summary};
use trigapprox_verify::{HarnessError, RunConfig, StatementId};

/// Exit statuses. Each failure cause has its own.
mod status {
    pub const EXPLICIT_FAILURE: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const ANOMALY: u8 = 3;
    pub const SOLVER: u8 = 4;
    pub const IO: u8 = 5;
}

#[derive(Parser)]
#[command(name = "trigapprox", version, about = "Trigonometric approximation tools and inequality verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print Fourier coefficients of a corpus function as CSV (k, a_k, b_k).
    Coeffs {
        function: String,
        #[arg(long, default_value_t = 16384)]
        samples: usize,
        #[arg(long, default_value_t = 16)]
        kmax: usize,
    },
    /// Run the verification campaign and write reports.
    Verify(VerifyArgs),
    /// Print an index sequence as JSON, with its invariant checks.
    Sequence {
        #[arg(value_enum)]
        kind: SequenceKind,
        #[arg(long)]
        m: usize,
        /// Required for `increasing`.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value = "poly5")]
        function: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, default_value = "inf")]
        p: LebesgueExponent,
        #[arg(long, default_value_t = 4096)]
        samples: usize,
        #[arg(long, default_value_t = 1e-9)]
        rel_tol: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SequenceKind {
    Decreasing,
    Increasing,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated statement ids; an empty value selects none.
    #[arg(long)]
    statements: Option<String>,
    /// Comma-separated corpus names, or `all`.
    #[arg(long)]
    corpus: Option<String>,
    /// Comma-separated degrees.
    #[arg(long)]
    grid_n: Option<String>,
    /// Reserved; nothing is randomized.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    quiet: bool,
}

struct Failure {
    status: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { status: status::USAGE, message: message.into() }
    }
}

impl From<trigapprox::Error> for Failure {
    fn from(e: trigapprox::Error) -> Self {
        let status = if matches!(e, trigapprox::Error::Solve(_)) { status::SOLVER } else { status::USAGE };
        Failure { status, message: e.to_string() }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        let status = match &e {
            HarnessError::Config(_) => status::USAGE,
            HarnessError::Io { .. } => status::IO,
            HarnessError::Numeric { .. } | HarnessError::Encode(_) => status::SOLVER,
        };
        Failure { status, message: e.to_string() }
    }
}

fn io_failure(e: io::Error) -> Failure {
    Failure { status: status::IO, message: e.to_string() }
}

fn split_list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).collect()
}

fn lookup(name: &str) -> Result<&'static corpus::CorpusFunction, Failure> {
    corpus::lookup(name).ok_or_else(|| Failure::usage(format!("unknown corpus function {name:?}")))
}

#[derive(Serialize)]
struct CoeffRow {
    k: usize,
    a_k: f64,
    b_k: f64,
}

fn coeffs(function: &str, samples: usize, kmax: usize) -> Result<u8, Failure> {
    let f = lookup(function)?;
    let grid = f.grid(samples, 1.0)?;
    let c = compute_coefficients(&grid, kmax)?;
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    for (k, a_k, b_k) in c.rows() {
        w.serialize(CoeffRow { k, a_k, b_k }).map_err(|e| Failure { status: status::IO, message: e.to_string() })?;
    }
    w.flush().map_err(io_failure)?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn sequence(
    kind: SequenceKind,
    m: usize,
    n: Option<usize>,
    function: &str,
    x: f64,
    p: LebesgueExponent,
    samples: usize,
    rel_tol: f64,
) -> Result<u8, Failure> {
    let value = match kind {
        SequenceKind::Decreasing => {
            let seq = decreasing_seq(m)?;
            let violations = seq.violations();
            serde_json::json!({ "kind": "decreasing", "sequence": seq, "violations": violations, "ok": violations.is_empty() })
        }
        SequenceKind::Increasing => {
            let n = n.ok_or_else(|| Failure::usage("increasing needs --n"))?;
            let f = lookup(function)?;
            let app = Approximator64::new(f.grid(samples, 1.0)?, SolverOptions::default());
            let seq = increasing_seq::<f64>(n, m, rel_tol, |k, nu| {
                Ok(app.f_average(k, nu, x, p, NormVariant::SupOverH)?.average)
            })?;
            let violations = seq.violations();
            serde_json::json!({
                "kind": "increasing",
                "function": f.name,
                "x": x,
                "p": p,
                "sequence": seq,
                "violations": violations,
                "ok": violations.is_empty(),
            })
        }
    };
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &value).map_err(|e| Failure { status: status::IO, message: e.to_string() })?;
    writeln!(out).map_err(io_failure)?;
    Ok(0)
}

fn load_config(args: &VerifyArgs) -> Result<RunConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure { status: status::IO, message: format!("{}: {e}", path.display()) })?;
            RunConfig::from_toml(&text).map_err(HarnessError::from)?
        }
        None => RunConfig::default(),
    };
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    if let Some(s) = &args.statements {
        cfg.statements =
            split_list(s).into_iter().map(str::parse::<StatementId>).collect::<Result<_, _>>().map_err(HarnessError::from)?;
    }
    if let Some(c) = &args.corpus {
        cfg.corpus = split_list(c).into_iter().map(String::from).collect();
    }
    if let Some(ns) = &args.grid_n {
        cfg.grid.n = split_list(ns)
            .into_iter()
            .map(|t| t.parse::<usize>().map_err(|e| Failure::usage(format!("--grid-n {t:?}: {e}"))))
            .collect::<Result<_, _>>()?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate().map_err(HarnessError::from)?;
    Ok(cfg)
}

fn verify(args: &VerifyArgs) -> Result<u8, Failure> {
    let cfg = load_config(args)?;
    if cfg.statements.is_empty() {
        return Ok(0);
    }
    let out = trigapprox_verify::run(&cfg)?;
    let summary = Summary::build(&out, &cfg);
    fs::create_dir_all(&cfg.out).map_err(io_failure)?;
    write_atomic(&cfg.out.join("config.toml"), cfg.to_canonical().as_bytes())?;
    write_reports(&cfg.out, &out, &summary)?;
    if !args.quiet {
        for (id, s) in &summary.statements {
            let k = summary.fitted_constants.get(id).and_then(|f| f.value()).map_or(String::new(), |k| format!(" K={k:.4}"));
            println!("{id:6} rows={:6} failed={:5} anomalies={}{k}", s.rows, s.failed, s.anomalies);
        }
        if let Some(o) = &summary.oracle {
            println!("oracle windows={} agree={:.4} direct-failures={}", o.windows, o.share, o.direct_failures);
        }
        println!("reports in {}", cfg.out.display());
    }
    Ok(match summary.outcome() {
        Outcome::Ok => 0,
        Outcome::ExplicitFailure => status::EXPLICIT_FAILURE,
        Outcome::Anomaly => status::ANOMALY,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Coeffs { function, samples, kmax } => coeffs(function, *samples, *kmax),
        Command::Verify(args) => verify(args),
        Command::Sequence { kind, m, n, function, x, p, samples, rel_tol } => {
            sequence(*kind, *m, *n, function, *x, *p, *samples, *rel_tol)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.status)
        }
    }
}
