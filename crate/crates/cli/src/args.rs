use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "ellcert",
    version,
    about = "Certified ℓ planning for (1 - 1/e - ε) submodular maximization"
)]
pub struct Cli {
    #[command(flatten)]
    pub run: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Bits of precision for the first enclosure attempt.
    #[arg(long, global = true, default_value_t = 32)]
    pub precision_start: u32,
    /// Precision at which an undecided comparison is reported as inconclusive.
    #[arg(
        long,
        global = true,
        env = "ELLCERT_PRECISION_CAP",
        default_value_t = 4096
    )]
    pub precision_cap: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for randomized inputs.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Threads for parallel sweeps; output is identical for any value.
    #[arg(long, global = true)]
    pub worker_count: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    /// One JSON object per line, each tagged with a schema version and a kind.
    #[value(alias = "structured")]
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute ℓ under the requested rule(s).
    Plan {
        #[arg(long, allow_hyphen_values = true)]
        eps: String,
        #[arg(long, value_enum, default_value_t = Rule::All)]
        rule: Rule,
    },
    /// Run a certification sweep.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// First ℓ (bounds: default 1, ordering: default 2).
        #[arg(long)]
        lmin: Option<u64>,
        /// Last ℓ (bounds: default 10000, ordering: default 100).
        #[arg(long)]
        lmax: Option<u64>,
        /// Points `a:b:step` for the log suite, read as exact decimals.
        #[arg(long, default_value = "0:10:0.125")]
        grid: String,
        /// Comma-separated ℓ values for the expansion suite.
        #[arg(long, value_delimiter = ',', default_values_t = [100u64, 1000, 10000])]
        ells: Vec<u64>,
    },
    /// Reproduce the ℓ savings table.
    Table {
        /// Comma-separated ε values; defaults to the five published rows.
        #[arg(long, value_delimiter = ',')]
        eps: Vec<String>,
        /// Compare against the published values and fail on a mismatch.
        #[arg(long)]
        check: bool,
    },
    /// Check the closed-form certificate and the direct comparison at one (ℓ, ε).
    Certify {
        #[arg(long)]
        ell: u64,
        #[arg(long, allow_hyphen_values = true)]
        eps: String,
    },
    /// Optimum, greedy and the ρ(ℓ_star) target on a coverage instance.
    Testbed {
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        instance: Option<PathBuf>,
        /// Generate a seeded random instance with this many elements.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value = "0.1", allow_hyphen_values = true)]
        eps: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    Bf,
    Ps,
    Star,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Bounds,
    Logs,
    Ordering,
    Expansion,
}
