//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Output format of a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Human-readable summary.
    Text,
    /// Pretty-printed JSON with sorted keys.
    Json,
}

/// Parsed invocation: global flags and one command.
#[derive(Clone, Debug, Parser)]
#[command(name = "njk", version, about = "Exact checks and cohomology for Nijenhuis Lie algebras and algebroids")]
pub struct RunConfig {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Seed for randomized checks.
    #[arg(long, env = "NJK_SEED", default_value_t = 0, global = true)]
    pub seed: u64,
    /// Print nothing; report through the exit code only.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    pub timing: bool,
    /// What to compute.
    #[command(subcommand)]
    pub command: Command,
}

/// Input file; `-` reads standard input.
#[derive(Clone, Debug, Args)]
pub struct InputArg {
    /// JSON input file, or `-` for stdin.
    pub file: PathBuf,
}

/// Top-level commands.
#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Validate a structure.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Betti numbers of the CE, NjO or NjL complex of a Lie algebra file.
    Cohomology {
        /// Which complex.
        #[arg(long, value_enum)]
        complex: Complex,
        /// Highest cochain degree.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_degree: u64,
        #[command(flatten)]
        input: InputArg,
    },
    /// Maurer-Cartan residuals of the bracket and operator of a Lie algebra file.
    Mc {
        /// Largest component arity.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n_max: u64,
        #[command(flatten)]
        input: InputArg,
    },
    /// Frölicher-Nijenhuis bracket of two forms on R^n.
    FnBracket {
        #[command(flatten)]
        input: InputArg,
    },
    /// Nijenhuis torsion of the operator in an algebroid file.
    Torsion {
        #[command(flatten)]
        input: InputArg,
    },
    /// FN cohomology of the diagonal operator on R^n and the homotopy identity.
    Poincare {
        /// Dimension of R^n.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Highest polynomial degree of coefficients.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_poly_deg: u64,
    },
    /// Checks on a Nijenhuis Lie algebroid.
    #[command(subcommand)]
    Algebroid(AlgebroidCommand),
    /// Exactness of the long exact sequence of a Lie algebra file.
    Les {
        /// Highest degree.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_degree: u64,
        #[command(flatten)]
        input: InputArg,
    },
}

/// Structures accepted by `check`.
#[derive(Clone, Debug, Subcommand)]
pub enum CheckCommand {
    /// Jacobi identity.
    Lie(InputArg),
    /// Jacobi identity and vanishing torsion of `nijenhuis`.
    Nijenhuis(InputArg),
    /// Representation axioms, and the Nijenhuis condition when both operators are given.
    Rep(InputArg),
    /// Algebroid axioms by two routes, and torsion when `nijenhuis` is given.
    Algebroid(InputArg),
}

/// Algebroid subcommands.
#[derive(Clone, Debug, Subcommand)]
pub enum AlgebroidCommand {
    /// `Φ` is a chain map on monomial fields, and `Φ(Q)` is the torsion.
    Phi {
        /// Highest field arity.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        max_arity: u64,
        /// Highest polynomial degree of sample fields.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        max_poly_deg: u64,
        #[command(flatten)]
        input: InputArg,
    },
    /// `δ_NjLD² = 0` on seeded random cone elements.
    Njld {
        /// Number of random samples.
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        /// Highest field arity.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        max_arity: u64,
        #[command(flatten)]
        input: InputArg,
    },
    /// Maurer-Cartan residuals of `(Q, P)`.
    Mc(InputArg),
}

/// Cochain complexes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Complex {
    /// Chevalley-Eilenberg.
    Ce,
    /// Nijenhuis-operator complex.
    Njo,
    /// Mapping cone.
    Njl,
}
