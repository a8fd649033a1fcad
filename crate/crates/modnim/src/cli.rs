//! Command-line front end.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 usage, 3 solver budget,
//! 4 no closed form for the request, 5 environment (e.g. port in use).

use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use modnim_core::analysis::{analyze, Method};
use modnim_core::closed_form::{build_qset_explicit, build_qset_recursive};
use modnim_core::solver::DEFAULT_CELL_BUDGET;
use modnim_core::{Error as CoreError, Position, Rules};

use crate::report::{emit_reports, Format};
use crate::verify::{self, VerificationReport, VerifyError};
use crate::wire::{ppositions_csv, PPositionsJson, SolveJson};

pub mod exit {
    pub const OK: u8 = 0;
    pub const VERIFY_FAILED: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const BUDGET: u8 = 3;
    pub const UNSUPPORTED: u8 = 4;
    pub const ENVIRONMENT: u8 = 5;
}

#[derive(Debug, Parser)]
#[command(name = "modnim", version, about = "Analyze, verify and play m-Modular Nim")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the P/N status of a position and its winning moves.
    Solve(SolveArgs),
    /// List the two-heap P-positions.
    Ppositions(PPositionsArgs),
    /// Check the closed forms against the exhaustive solver.
    Verify(VerifyArgs),
    /// Play against the engine in the terminal.
    Play(PlayArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub m: u64,
    /// Comma-separated heap sizes, e.g. 7,8.
    #[arg(long, value_delimiter = ',', required = true)]
    pub heaps: Vec<u64>,
    /// Use the exhaustive solver even when a closed form applies.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value_t = DEFAULT_CELL_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Json => Format::Json,
            OutputFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Construction {
    Recursive,
    Explicit,
}

#[derive(Debug, Args)]
pub struct PPositionsArgs {
    #[arg(long)]
    pub m: u64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,
    #[arg(long, value_enum, default_value = "explicit")]
    pub method: Construction,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("modulus").required(true).args(["m", "m_max"]))]
pub struct VerifyArgs {
    #[arg(long)]
    pub m: Option<u64>,
    /// Verify every m from 1 up to this value (odd m only above two heaps).
    #[arg(long)]
    pub m_max: Option<u64>,
    #[arg(long, default_value_t = 2)]
    pub heaps: usize,
    /// Box size per heap; defaults to 3m for two heaps (or more if the P-set
    /// needs it), 2m for three heaps, m for four or more.
    #[arg(long)]
    pub bound: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,
    /// Only explore with the solver; allowed where no closed form exists.
    #[arg(long)]
    pub oracle_only: bool,
    #[arg(long, default_value_t = DEFAULT_CELL_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Args)]
pub struct PlayArgs {
    #[arg(long)]
    pub m: u64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub heaps: Vec<u64>,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub human_first: bool,
    #[arg(long, default_value_t = DEFAULT_CELL_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Directory with the built web UI.
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
    #[arg(long, default_value_t = crate::service::DEFAULT_SERVICE_BUDGET)]
    pub budget: u64,
}

/// Result of running a command: exit code plus what to print.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: u8,
    pub stdout: Vec<u8>,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: Vec<u8>) -> Self {
        Outcome {
            code: exit::OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: u8, msg: impl Into<String>) -> Self {
        Outcome {
            code,
            stdout: Vec::new(),
            stderr: msg.into(),
        }
    }
}

fn rules_or_usage(m: u64) -> Result<Rules, Outcome> {
    Rules::new(m).map_err(|e| Outcome::fail(exit::USAGE, format!("error: {e}")))
}

fn core_failure(e: CoreError) -> Outcome {
    match e {
        CoreError::BudgetExceeded { .. } => Outcome::fail(exit::BUDGET, format!("error: {e}")),
        other => Outcome::fail(exit::USAGE, format!("error: {other}")),
    }
}

pub fn cmd_solve(args: &SolveArgs) -> Outcome {
    let rules = match rules_or_usage(args.m) {
        Ok(r) => r,
        Err(o) => return o,
    };
    let p = match Position::new(args.heaps.clone()) {
        Ok(p) => p,
        Err(e) => return Outcome::fail(exit::USAGE, format!("error: {e}")),
    };
    let method = if args.oracle { Method::Oracle } else { Method::Auto };
    match analyze(&rules, &p, method, args.budget) {
        Ok(rec) => {
            let mut out = serde_json::to_vec(&SolveJson::from(&rec)).expect("serializes");
            out.push(b'\n');
            Outcome::ok(out)
        }
        Err(e) => core_failure(e),
    }
}

pub fn cmd_ppositions(args: &PPositionsArgs) -> Outcome {
    let rules = match rules_or_usage(args.m) {
        Ok(r) => r,
        Err(o) => return o,
    };
    let set = match args.method {
        Construction::Recursive => build_qset_recursive(&rules),
        Construction::Explicit => build_qset_explicit(&rules),
    };
    let out = match args.format {
        OutputFormat::Json => {
            let mut v = serde_json::to_vec(&PPositionsJson::from(&set)).expect("serializes");
            v.push(b'\n');
            v
        }
        OutputFormat::Csv => ppositions_csv(&set),
    };
    Outcome::ok(out)
}

fn verify_one(args: &VerifyArgs, rules: &Rules) -> Result<VerificationReport, Outcome> {
    let usage = |e: VerifyError| Outcome::fail(exit::USAGE, format!("error: {e}"));
    if args.oracle_only {
        let bound = args.bound.unwrap_or_else(|| verify::default_multiheap_bound(rules, args.heaps));
        return verify::explore_oracle(rules, args.heaps, bound, args.budget).map_err(usage);
    }
    if args.heaps == 2 {
        let bound = args.bound.unwrap_or_else(|| verify::default_2heap_bound(rules));
        return verify::verify_2heap(rules, bound, args.budget).map_err(usage);
    }
    if !rules.is_odd() {
        return Err(Outcome::fail(
            exit::UNSUPPORTED,
            format!(
                "no closed form for even m with {} heaps (m = {}); use --oracle-only to explore",
                args.heaps,
                rules.m()
            ),
        ));
    }
    let bound = args.bound.unwrap_or_else(|| verify::default_multiheap_bound(rules, args.heaps));
    verify::verify_multiheap_odd(rules, args.heaps, bound, args.budget).map_err(usage)
}

pub fn cmd_verify(args: &VerifyArgs) -> Outcome {
    if args.heaps == 0 {
        return Outcome::fail(exit::USAGE, "error: --heaps must be at least 1");
    }
    let ms: Vec<u64> = match (args.m, args.m_max) {
        (Some(m), None) => vec![m],
        (None, Some(max)) => (1..=max)
            .filter(|m| args.heaps == 2 || args.oracle_only || m % 2 == 1)
            .collect(),
        _ => return Outcome::fail(exit::USAGE, "error: give exactly one of --m and --m-max"),
    };
    let mut reports = Vec::with_capacity(ms.len());
    for m in ms {
        let rules = match rules_or_usage(m) {
            Ok(r) => r,
            Err(o) => return o,
        };
        match verify_one(args, &rules) {
            Ok(r) => reports.push(r),
            Err(o) => return o,
        }
    }
    let stdout = emit_reports(&reports, args.format.into());
    let code = if reports.iter().any(VerificationReport::any_failed) {
        exit::VERIFY_FAILED
    } else if reports.iter().any(VerificationReport::any_skipped) {
        exit::BUDGET
    } else {
        exit::OK
    };
    let stderr = match code {
        exit::VERIFY_FAILED => "verification failed".to_string(),
        exit::BUDGET => "some checks were skipped: solver budget exceeded".to_string(),
        _ => String::new(),
    };
    Outcome { code, stdout, stderr }
}

pub fn cmd_play(args: &PlayArgs) -> Outcome {
    let rules = match rules_or_usage(args.m) {
        Ok(r) => r,
        Err(o) => return o,
    };
    let start = match Position::new(args.heaps.clone()) {
        Ok(p) => p,
        Err(e) => return Outcome::fail(exit::USAGE, format!("error: {e}")),
    };
    // the engine's grid, if any, is built up front so budget problems surface here
    if let Err(e) = modnim_core::analysis::Engine::new(rules, &start, args.budget) {
        return core_failure(e);
    }
    let stdin = io::stdin();
    match crate::play::run(rules, start, args.human_first, args.budget, stdin.lock(), io::stdout()) {
        Ok(_) => Outcome::ok(Vec::new()),
        Err(e) => Outcome::fail(exit::ENVIRONMENT, format!("error: {e}")),
    }
}

pub fn cmd_serve(args: &ServeArgs) -> Outcome {
    let rt = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => return Outcome::fail(exit::ENVIRONMENT, format!("error: {e}")),
    };
    let config = crate::service::Config {
        budget: args.budget,
        static_dir: args.static_dir.clone(),
        ..Default::default()
    };
    let addr = format!("{}:{}", args.host, args.port);
    rt.block_on(async {
        let listener = match tokio::net::TcpListener::bind(&addr).await {
            Ok(l) => l,
            Err(e) => return Outcome::fail(exit::ENVIRONMENT, format!("error: cannot bind {addr}: {e}")),
        };
        eprintln!("listening on http://{addr}");
        match crate::service::serve(listener, config).await {
            Ok(()) => Outcome::ok(Vec::new()),
            Err(e) => Outcome::fail(exit::ENVIRONMENT, format!("error: {e}")),
        }
    })
}

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Ppositions(a) => cmd_ppositions(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Play(a) => cmd_play(a),
        Command::Serve(a) => cmd_serve(a),
    }
}

/// Parses the process arguments, runs the command and returns the exit code.
pub fn main() -> u8 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::OK };
        }
    };
    let out = run(&cli);
    let _ = io::stdout().write_all(&out.stdout);
    if !out.stderr.is_empty() {
        eprintln!("{}", out.stderr);
    }
    out.code
}
