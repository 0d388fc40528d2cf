use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dirac_gaps::walks::WalkKind;
use dirac_gaps_cli::checks::VerifyOptions;
use dirac_gaps_cli::commands::{cmd_gaps, cmd_verify, cmd_walks};
use dirac_gaps_cli::config::{self, FileConfig, Overrides, ENV_PRECISION, ENV_REL_TOL};
use dirac_gaps_cli::literal::PotentialLiteral;
use dirac_gaps_cli::CliError;

/// Eigenvalue pairs and spectral gaps of 1D Dirac operators with
/// trigonometric potentials.
#[derive(Parser)]
#[command(name = "dirac-gaps", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate eigenvalue pairs and gaps over a range of n.
    Gaps(GapsArgs),
    /// List the admissible walks of one class with their weights at z = 0.
    Walks(WalksArgs),
    /// Run the acceptance checks.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GapsArgs {
    /// Potential coefficients a,A,b,B, e.g. 1,2,3,4 or 1.5-0.5i,0,i,2.
    #[arg(long = "pot", allow_hyphen_values = true)]
    potential: Option<String>,
    /// Inclusive range start:end.
    #[arg(long = "n", allow_hyphen_values = true)]
    n_range: Option<String>,
    /// series, matrix, both or asym.
    #[arg(long)]
    method: Option<String>,
    /// Working precision in bits.
    #[arg(long, env = ENV_PRECISION)]
    precision: Option<u32>,
    /// Relative stopping tolerance.
    #[arg(long, env = ENV_REL_TOL)]
    rel_tol: Option<f64>,
    /// Output file (stdout when omitted).
    #[arg(long = "out")]
    output: Option<PathBuf>,
    /// csv or json (default: from the output extension, else csv).
    #[arg(long)]
    format: Option<String>,
    /// Significant digits in the table.
    #[arg(long)]
    digits: Option<usize>,
    /// Fourier modes beyond |n| kept by the matrix oracle.
    #[arg(long)]
    extra_modes: Option<u32>,
    /// JSON file with any of the fields above.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct WalksArgs {
    #[arg(long, allow_hyphen_values = true)]
    n: i64,
    /// Backtracking level of an X or Y walk.
    #[arg(long, conflicts_with = "nu")]
    r: Option<usize>,
    /// Loop index of a W walk.
    #[arg(long)]
    nu: Option<usize>,
    /// X (-n to n), Y (n to -n) or W (n to n).
    #[arg(long)]
    kind: WalkKind,
    #[arg(long = "pot", allow_hyphen_values = true, default_value = config::DEFAULT_POTENTIAL)]
    potential: String,
    #[arg(long, env = ENV_PRECISION, default_value_t = 256)]
    precision: u32,
    #[arg(long, default_value_t = 20)]
    digits: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// Only the walk-sum, even-n and free-operator checks.
    #[arg(long)]
    quick: bool,
    /// Run every check at this precision with rescaled tolerances.
    #[arg(long)]
    precision: Option<u32>,
}

fn gaps(args: GapsArgs) -> Result<(), CliError> {
    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let over = Overrides {
        potential: args.potential,
        n_range: args.n_range,
        method: args.method,
        precision_bits: args.precision,
        rel_tol: args.rel_tol,
        output: args.output,
        format: args.format,
        digits: args.digits,
        extra_modes: args.extra_modes,
    };
    cmd_gaps(&config::resolve(over, file)?)
}

fn walks(args: WalksArgs) -> Result<(), CliError> {
    let index = match (args.kind, args.r, args.nu) {
        (_, Some(i), None) | (_, None, Some(i)) => i,
        (WalkKind::W, None, None) => 1,
        (_, None, None) => 0,
        (_, Some(_), Some(_)) => unreachable!("clap rejects both"),
    };
    if args.precision < 53 {
        return Err(CliError::Argument(format!("precision must be at least 53 bits, got {}", args.precision)));
    }
    let potential: PotentialLiteral = args.potential.parse()?;
    let stdout = std::io::stdout();
    cmd_walks(&mut stdout.lock(), args.kind, args.n, index, &potential, args.precision, args.digits)
}

fn verify(args: VerifyArgs) -> Result<(), CliError> {
    if let Some(p) = args.precision {
        if p < 64 {
            return Err(CliError::Argument(format!("verify needs at least 64 bits, got {p}")));
        }
    }
    let opts = VerifyOptions {
        precision: args.precision,
        quick: args.quick,
    };
    let stdout = std::io::stdout();
    cmd_verify(&mut stdout.lock(), &opts)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gaps(a) => gaps(a),
        Command::Walks(a) => walks(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dirac-gaps: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
