//! Command-line workbench: presentation files in, homology, product and Δ
//! tables out.

pub mod commands;
pub mod parse;
pub mod report;

use std::ops::RangeInclusive;

use clap::{Parser, Subcommand};

use commands::{CliError, OpArg, SpaceArg, Theta};
use report::{Format, Report};

/// The bundled n = 2 unknot.
pub const UNKNOT: &str = include_str!("../data/unknot.dga");
/// The bundled n = 3 unknot.
pub const UNKNOT3: &str = include_str!("../data/unknot3.dga");

const MACHINE_HELP: &str = "\
Machine format (--format machine): one record per line,
  record<TAB><kind>{<TAB><key><TAB><value>}
with keys in a fixed order per kind:
  section         title
  validate        check status [cutoff] detail
  homology        space degree cutoff status [dim chains cycles boundaries representatives]
  product         op left right degree (cutoff class | error)
  product_chain   op left right chain
  product_class   degree cutoff class | status
  bv              generator degree delta_squared (cutoff image | error)
  bv_chain        cutoff verdict anticommutes commutes trivial neither
  skipped         table degree reason
  info            products
Every value that depends on the word-length truncation sits in a record
carrying its cutoff.

A degree whose differential escapes the cutoff is refused in-band with
status dirty (or `refused` in text output); that alone is not a failure.

Exit codes: 0 success, 1 a mathematical check failed, 2 input error.";

#[derive(Debug, Parser)]
#[command(name = "sftkit", version, about = "Exact computations for Legendrian DGAs: homology, products and the BV operator", after_help = MACHINE_HELP)]
pub struct Cli {
    /// Rendering of M^cyc classes: θ replaced by 1, or written out.
    #[arg(long, value_enum, default_value_t = Theta::One, global = true)]
    pub theta: Theta,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check d² = 0, d_M² = 0, d_U² = 0 and the Hamiltonian identities.
    Validate {
        file: String,
        /// Highest master equation to check.
        #[arg(long, default_value_t = 4)]
        qmax: usize,
        /// Word-length cutoff for the d_M² and d_U² checks.
        #[arg(long, default_value_t = 6)]
        maxlen: usize,
    },
    /// Truncated homology of M^cyc or 𝐌^bal.
    Homology {
        file: String,
        #[arg(long, value_enum, default_value_t = SpaceArg::Mcyc)]
        space: SpaceArg,
        /// Word-length cutoff.
        #[arg(long, default_value_t = 6)]
        maxlen: usize,
        /// Degree window `a..b` (inclusive).
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        degrees: Option<RangeInclusive<i64>>,
    },
    /// Products ⊠, ⊡ or ⋄: a table over homology generators, or one pair.
    Product {
        file: String,
        #[arg(long, value_enum)]
        op: OpArg,
        /// Tabulate all pairs of generators.
        #[arg(long, conflicts_with_all = ["x", "y"])]
        table: bool,
        /// Left factor, in the element grammar.
        #[arg(long, requires = "y", allow_hyphen_values = true)]
        x: Option<String>,
        /// Right factor.
        #[arg(long, requires = "x", allow_hyphen_values = true)]
        y: Option<String>,
        /// Longest generator word in a table, and base cutoff.
        #[arg(long, default_value_t = 7)]
        maxlen: usize,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        degrees: Option<RangeInclusive<i64>>,
    },
    /// The BV operator Δ on homology generators.
    Bv {
        file: String,
        /// Tabulate Δ on all generators (the only mode).
        #[arg(long)]
        table: bool,
        #[arg(long, default_value_t = 7)]
        maxlen: usize,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        degrees: Option<RangeInclusive<i64>>,
    },
    /// Everything at once.
    Report {
        file: String,
        #[arg(long, default_value_t = 4)]
        qmax: usize,
        #[arg(long, default_value_t = 6)]
        maxlen: usize,
    },
}

pub fn parse_range(s: &str) -> Result<RangeInclusive<i64>, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s}"))?;
    let a: i64 = a.trim().parse().map_err(|_| format!("bad lower bound in {s}"))?;
    let b: i64 = b.trim().trim_start_matches('=').parse().map_err(|_| format!("bad upper bound in {s}"))?;
    if a > b {
        return Err(format!("empty range {s}"));
    }
    Ok(a..=b)
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn read(file: &str) -> Result<parse::ParsedFile, CliError> {
    let text = match file {
        "@unknot" => UNKNOT.to_string(),
        "@unknot3" => UNKNOT3.to_string(),
        _ => std::fs::read_to_string(file).map_err(|e| CliError::Input(format!("{file}: {e}")))?,
    };
    parse::parse_file(&text).map_err(|e| CliError::Input(format!("{file}: {e}")))
}

fn execute(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Validate { file, qmax, maxlen } => commands::validate(&read(file)?, *qmax, *maxlen),
        Command::Homology { file, space, maxlen, degrees } => commands::homology(&read(file)?, space.kind(), *maxlen, degrees.clone()),
        Command::Product { file, op, table, x, y, maxlen, degrees } => {
            let f = read(file)?;
            match (table, x, y) {
                (true, _, _) => commands::product_table(&f, op.op(), *maxlen, degrees.clone(), cli.theta),
                (false, Some(x), Some(y)) => commands::product_pair(&f, op.op(), x, y, *maxlen, cli.theta),
                _ => Err(CliError::Input("product needs --table or both --x and --y".into())),
            }
        }
        Command::Bv { file, maxlen, degrees, .. } => commands::bv(&read(file)?, *maxlen, degrees.clone(), cli.theta),
        Command::Report { file, qmax, maxlen } => commands::full_report(&read(file)?, *qmax, *maxlen, cli.theta),
    }
}

/// Runs a parsed command line. A file argument of `@unknot` or `@unknot3`
/// selects a bundled example.
pub fn run(cli: &Cli) -> Outcome {
    match execute(cli) {
        Ok(rep) => Outcome {
            stdout: rep.render(cli.format),
            stderr: if rep.failed { "some checks failed\n".into() } else { String::new() },
            code: i32::from(rep.failed),
        },
        Err(e) => Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), code: e.exit_code() },
    }
}

/// Parses and runs an argument list (including the program name).
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                Outcome { stdout: text, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: text, code }
            }
        }
    }
}
