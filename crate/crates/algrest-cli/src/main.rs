//! `algrest` — compute restriction-space bases, action tables, class
//! reductions, symplectic invariants and golden-table verification for the
//! built-in singular-curve catalog or user-supplied germ files.

use clap::{Parser, Subcommand, ValueEnum};
use std::process::ExitCode;

mod cmd;

pub const EXIT_OK: u8 = 0;
pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_BOUND: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Md,
}

#[derive(Parser)]
#[command(
    name = "algrest",
    version,
    about = "Exact symplectic classification engine for singular curve germs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the bases of the restriction spaces of 2-forms and closed
    /// 2-forms, with quasi-degrees.
    Basis {
        /// Catalog family (U7|U8|U9) or path to a germ-definition file.
        #[arg(long)]
        germ: String,
        /// Truncation quasi-degree.
        #[arg(long, default_value_t = algrest::restriction::DEFAULT_DEGREE_BOUND)]
        degree_bound: i64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Print the infinitesimal-action table of the tangent fields.
    ActionTable {
        /// Catalog family (U7|U8|U9) or `all`.
        #[arg(long)]
        germ: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Reduce a closed coordinate vector to its normal form.
    Classify {
        /// Catalog family (U7|U8|U9).
        #[arg(long)]
        germ: String,
        /// Comma-separated closed coordinates, e.g. `1,3,0,1,0,0,0`.
        #[arg(long)]
        coeffs: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Compute the full invariant report of a catalog class.
    Invariants {
        /// Catalog family (U7|U8|U9).
        #[arg(long)]
        germ: String,
        /// Class label, e.g. `5` or `3,0_5`.
        #[arg(long)]
        class: String,
        /// Comma-separated rational moduli (seeded random when omitted).
        #[arg(long)]
        moduli: Option<String>,
        /// Seed for random moduli.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Search ceiling for tangency orders.
        #[arg(long, default_value_t = algrest::invariants::DEFAULT_LT_CEILING)]
        ceiling: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Recompute every golden table cell and compare.
    Verify {
        /// `U7`, `U8`, `U9` or `all`.
        #[arg(long, default_value = "all")]
        family: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override the golden data with a JSON file (negative controls).
        #[arg(long)]
        golden: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Basis {
            germ,
            degree_bound,
            format,
        } => cmd::basis(&germ, degree_bound, format),
        Command::ActionTable { germ, format } => cmd::action_table(&germ, format),
        Command::Classify {
            germ,
            coeffs,
            format,
        } => cmd::classify(&germ, &coeffs, format),
        Command::Invariants {
            germ,
            class,
            moduli,
            seed,
            ceiling,
            format,
        } => cmd::invariants(&germ, &class, moduli.as_deref(), seed, ceiling, format),
        Command::Verify {
            family,
            seed,
            golden,
            format,
        } => cmd::verify(&family, seed, golden.as_deref(), format),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {:#}", e);
            let code = cmd::classify_error(&e);
            ExitCode::from(code)
        }
    }
}

pub fn engine_err_code(e: &algrest::EngineError) -> u8 {
    use algrest::EngineError as E;
    match e {
        E::CeilingExhausted { .. } | E::StabilizationFailed { .. } | E::PieceAboveBound { .. } => {
            EXIT_BOUND
        }
        _ => EXIT_INPUT,
    }
}
