use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qlancaster::Error;

mod eval;
mod output;
mod verify;

#[derive(Parser, Debug)]
#[command(name = "qlancaster", version, about = "q-ultraspherical Lancaster kernels: evaluate, verify, scan, sample")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a polynomial, density, coefficient or kernel; prints JSON.
    Eval {
        #[command(subcommand)]
        target: eval::Target,
    },
    /// Run a verification suite and write a JSON report.
    Verify(verify::VerifyArgs),
    /// Main kernel on a grid: series, closed form and their difference (CSV).
    Scan(ScanArgs),
    /// Simulate the stationary chain (CSV with columns t, x).
    Sample(SampleArgs),
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct ScanArgs {
    #[arg(long)]
    pub r1: f64,
    #[arg(long)]
    pub r2: f64,
    #[arg(short, long)]
    pub q: f64,
    /// Points per axis.
    #[arg(long, default_value_t = 21)]
    pub grid: usize,
    #[arg(long, default_value_t = qlancaster::quadverify::LE_TERMS)]
    pub max_terms: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct SampleArgs {
    #[arg(long)]
    pub r1: f64,
    #[arg(long)]
    pub r2: f64,
    #[arg(short, long)]
    pub q: f64,
    #[arg(long, default_value_t = 1000)]
    pub length: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Points per CDF table.
    #[arg(long, default_value_t = 1025)]
    pub grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or parameters outside their domain (exit 2).
    Usage(String),
    /// A check ran and failed, or a numeric method gave up (exit 1).
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Arity(_) | Error::Index(_) | Error::Size(_) | Error::Regime(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Check(e.to_string()),
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut s = std::io::stdout().lock();
            s.write_all(text.as_bytes()).map_err(|e| Failure::Check(e.to_string()))
        }
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Eval { target } => {
            let v = eval::run(&target)?;
            emit(&None, &format!("{}\n", serde_json::to_string_pretty(&v).expect("serializable")))?;
            Ok(true)
        }
        Command::Verify(args) => {
            let (text, ok) = verify::run(&args)?;
            emit(&args.out, &text)?;
            Ok(ok)
        }
        Command::Scan(args) => {
            let text = output::scan(&args)?;
            emit(&args.out, &text)?;
            Ok(true)
        }
        Command::Sample(args) => {
            let text = output::sample(&args)?;
            emit(&args.out, &text)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
