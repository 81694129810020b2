use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

/// Exact and Monte Carlo moments of Gaussian matrices, with the hypermap
/// oracles and the forest bijection behind them.
#[derive(Debug, Parser)]
#[command(name = "octamoment", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    #[value(name = "b")]
    B,
    #[value(name = "c")]
    C,
    #[value(name = "L")]
    L,
    #[value(name = "LP")]
    Lp,
    /// `L`, `b` and `c` side by side, one row per `(λ, μ, r)`.
    #[value(name = "all")]
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Field {
    Real,
    Complex,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Connection coefficient tables from the pairing oracle.
    Coeffs {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value = "all")]
        kind: Kind,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long, default_value_t = octamoment::oracle::PAIRING_MAX_N)]
        oracle_max_n: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Monomial expansion of the real or complex moment.
    Expansion {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value = "real")]
        field: Field,
        /// Refuse oracle substitution; exit 2 if flagged strata exist.
        #[arg(long)]
        strict: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long, default_value_t = octamoment::oracle::PARTITIONED_MAX_N)]
        partitioned_max_n: usize,
        #[arg(long, default_value_t = octamoment::oracle::PAIRING_MAX_N)]
        oracle_max_n: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a verification suite against the oracles.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, alias = "n")]
        n_max: Option<u32>,
        #[arg(long, value_enum, default_value = "pretty")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Map a hypermap JSON to its forest, or a forest JSON back.
    Bijection {
        /// JSON file, or `-` for stdin.
        #[arg(long)]
        input: PathBuf,
        /// Write the forest in DOT format here.
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "pretty")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Monte Carlo estimate, compared with the exact value when available.
    Mc {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value = "real")]
        field: Field,
        /// Dimension for identity matrices when no X or Y is given.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Matrix JSON file for X.
        #[arg(long, conflicts_with = "x_eigs")]
        x: Option<PathBuf>,
        /// Eigenvalues of X, comma separated rationals.
        #[arg(long, allow_hyphen_values = true)]
        x_eigs: Option<String>,
        #[arg(long, conflicts_with = "y_eigs")]
        y: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        y_eigs: Option<String>,
        #[arg(long, default_value_t = octamoment::verify::MC_SAMPLES)]
        samples: u64,
        #[arg(long, default_value_t = octamoment::verify::MC_SEED)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Flagged strata of the real expansion with their oracle values.
    Report {
        #[arg(long, default_value_t = 5)]
        n_max: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Outcome of a subcommand that ran to completion.
pub enum Status {
    Ok,
    Failed,
    Degenerate,
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("OCTAMOMENT_THREADS") {
        let k: usize = v
            .parse()
            .map_err(|_| anyhow::anyhow!("OCTAMOMENT_THREADS must be a positive integer, got {v:?}"))?;
        if k == 0 {
            anyhow::bail!("OCTAMOMENT_THREADS must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    configure_threads()?;
    match cli.command {
        Command::Coeffs {
            n,
            kind,
            format,
            oracle_max_n,
            output,
        } => commands::coeffs(n, kind, format, oracle_max_n, output.as_deref()),
        Command::Expansion {
            n,
            field,
            strict,
            format,
            partitioned_max_n,
            oracle_max_n,
            output,
        } => {
            let bounds = octamoment::closed_forms::OracleBounds {
                partitioned_max_n,
                pairing_max_n: oracle_max_n,
            };
            commands::expansion(n, field, strict, format, bounds, output.as_deref())
        }
        Command::Verify {
            suite,
            n_max,
            format,
            output,
        } => commands::verify(&suite, n_max, format, output.as_deref()),
        Command::Bijection {
            input,
            dot,
            format,
            output,
        } => commands::bijection(&input, dot.as_deref(), format, output.as_deref()),
        Command::Mc {
            n,
            field,
            dim,
            x,
            x_eigs,
            y,
            y_eigs,
            samples,
            seed,
            output,
        } => {
            let x = commands::matrix(x.as_deref(), x_eigs.as_deref(), dim)?;
            let y = commands::matrix(y.as_deref(), y_eigs.as_deref(), dim)?;
            commands::mc(n, field, &x, &y, samples, seed, output.as_deref())
        }
        Command::Report { n_max, format, output } => commands::report(n_max, format, output.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Ok(Status::Degenerate) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
