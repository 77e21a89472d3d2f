use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use weilinv_cli::{default_max_order, run, Command, Format, Input, JobSpec};

#[derive(Parser)]
#[command(
    name = "weilinv",
    version,
    about = "Invariants of Weil representations of discriminant forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dimension of the invariant space.
    Dim(Args),
    /// A basis of invariants obtained by projecting basis vectors.
    Invariants(Args),
    /// Lifts of fundamental invariants along isotropic subgroups.
    InducedBasis(Args),
    /// Run the property battery on one form.
    Verify(Args),
    /// Dimension of weight-2 cusp forms for a prime-level symbol.
    S2dim(Args),
    /// Singular-weight Jacobi form generators for a lattice.
    Jacobi(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Genus symbol such as 2_II^-4 or 3^+1.5^-2.
    #[arg(long, conflicts_with = "gram", required_unless_present = "gram")]
    symbol: Option<String>,
    /// JSON file holding the Gram matrix as an array of arrays.
    #[arg(long)]
    gram: Option<PathBuf>,
    /// Cross-validate against brute-force computations.
    #[arg(long)]
    check: bool,
    /// Largest |D| accepted.
    #[arg(long)]
    max_order: Option<u64>,
    #[arg(long, value_enum, default_value_t = Fmt::Json)]
    format: Fmt,
    /// Number of theta coefficients for `jacobi`.
    #[arg(long)]
    precision: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Json,
    Text,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Dim(a) => (Command::Dim, a),
        Cmd::Invariants(a) => (Command::Invariants, a),
        Cmd::InducedBasis(a) => (Command::InducedBasis, a),
        Cmd::Verify(a) => (Command::Verify, a),
        Cmd::S2dim(a) => (Command::S2Dim, a),
        Cmd::Jacobi(a) => (Command::Jacobi, a),
    };
    let input = match (args.symbol, args.gram) {
        (Some(s), None) => Input::Symbol(s),
        (None, Some(p)) => Input::GramFile(p),
        _ => unreachable!("clap enforces exactly one input"),
    };
    let format = match args.format {
        Fmt::Json => Format::Json,
        Fmt::Text => Format::Text,
    };
    let spec = JobSpec {
        command,
        input,
        check: args.check,
        max_order: args.max_order.unwrap_or_else(default_max_order),
        format,
        precision: args.precision,
    };
    let outcome = run(&spec);
    let text = outcome.render(format);
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(text.as_bytes());
    if let Some(err) = outcome.document.get("error") {
        eprintln!("error: {}", err["message"].as_str().unwrap_or("unknown"));
    }
    ExitCode::from(outcome.status as u8)
}
