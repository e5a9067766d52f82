use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use extpow::Ring;

mod commands;

/// Exit codes.
pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INDETERMINATE: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "extpow",
    version,
    about = "Exterior powers of GL_n and their invariant forms; JSON reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Indent the JSON output.
    #[arg(long, global = true)]
    pretty: bool,

    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an element of the m-th exterior power representation.
    Rep(RepArgs),
    /// Sampled checks of the stabilizer characterizations.
    Verify(VerifyArgs),
    /// Dimension of a stabilizer Lie algebra.
    Liedim(LiedimArgs),
    /// Sample-level check of the normalizer and transporter equalities.
    Normalizer(NormalizerArgs),
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("element").required(true).args(["transvection", "torus", "word", "matrix"]))]
pub struct RepArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value = "Q", value_parser = parse_ring)]
    pub ring: Ring,
    /// `i,j`: the exterior power of t_{i,j}(xi).
    #[arg(long, value_name = "I,J")]
    pub transvection: Option<String>,
    /// `i`: the exterior power of d_i(xi).
    #[arg(long, value_name = "I")]
    pub torus: Option<usize>,
    /// Elementary word `i,j,x;i,j,x;...`.
    #[arg(long, value_name = "WORD")]
    pub word: Option<String>,
    /// `identity`, or an n x n matrix as a JSON array of rows.
    #[arg(long, value_name = "MATRIX")]
    pub matrix: Option<String>,
    /// Value of xi; an indeterminate over the ring when omitted.
    #[arg(long)]
    pub xi: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Kind {
    Plucker,
    Form,
    Ideal,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value = "Q", value_parser = parse_ring)]
    pub ring: Ring,
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Mode {
    Plain,
    Extended,
    Ideal,
    Plucker,
}

#[derive(Args, Debug)]
pub struct LiedimArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value = "Q", value_parser = parse_ring)]
    pub field: Ring,
    #[arg(long, value_enum, default_value = "extended")]
    pub mode: Mode,
}

#[derive(Args, Debug)]
pub struct NormalizerArgs {
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value = "Q", value_parser = parse_ring)]
    pub ring: Ring,
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn parse_ring(s: &str) -> Result<Ring, String> {
    s.parse().map_err(|e: extpow::Error| e.to_string())
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("EXTPOW_THREADS") else {
        return Ok(());
    };
    let threads: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("EXTPOW_THREADS must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    let outcome = match &cli.command {
        Command::Rep(a) => commands::rep(a),
        Command::Verify(a) => commands::verify(a),
        Command::Liedim(a) => commands::liedim(a),
        Command::Normalizer(a) => commands::normalizer(a),
    };
    let (report, code) = match outcome {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                extpow::Error::Indeterminate { .. } => EXIT_INDETERMINATE,
                _ => EXIT_USAGE,
            };
            return ExitCode::from(code);
        }
    };
    let text = if cli.pretty {
        serde_json::to_string_pretty(&report)
    } else {
        serde_json::to_string(&report)
    }
    .expect("JSON values serialize");
    let written = match &cli.output {
        Some(path) => std::fs::write(path, format!("{text}\n")).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    ExitCode::from(code)
}
