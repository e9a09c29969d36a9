use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use trotter_core::error_op::NormKind;
use trotter_core::graph::ColoringStrategy;
use trotter_core::ordering::{OrderingStrategy, DEFAULT_ENUMERATION_CAP};

use crate::input::TimeArg;
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "trotter-order",
    version,
    about = "Trotter term-ordering analysis for qubit Hamiltonians"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    /// Seed for random orderings.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Total evolution time, or `auto` to derive it from a reference energy.
    #[arg(long, global = true, default_value = "auto")]
    pub time: TimeArg,
    /// Trotter number.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub steps: u32,
    #[arg(long = "trotter-order", visible_alias = "order", global = true, default_value_t = 2,
          value_parser = clap::value_parser!(u8).range(1..=2))]
    pub trotter_order: u8,
    #[arg(long, global = true, default_value = "coeff")]
    pub norm: NormKind,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Energy used by `--time auto` instead of the exact ground-state energy.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub reference_energy: Option<f64>,
    #[arg(long, global = true, default_value = "independent-set")]
    pub coloring: ColoringStrategy,
    /// Write the main output here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reorder a Hamiltonian and write it with a permutation sidecar.
    Order {
        input: String,
        #[arg(long, default_value = "magnitude")]
        strategy: OrderingStrategy,
        /// Sidecar path; defaults to `<output>.json` when `--output` is set.
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Measure every ordering of the active part.
    Enumerate {
        input: String,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: usize,
        /// CDF resolution.
        #[arg(long, default_value_t = 250)]
        bins: usize,
        #[arg(long = "threshold", value_delimiter = ',', default_values_t = [1.5936e-3, 5e-3])]
        thresholds: Vec<f64>,
        /// Summary JSON path; defaults to `<output>.summary.json`, or stderr.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Resumable progress file.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000_000)]
        checkpoint_interval: u64,
    },
    /// Rank ordering strategies by measured error.
    Compare {
        input: String,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "magnitude,lexicographic,deplete_groups,equalise_groups,commutator,reverse_commutator,error_operator_greedy"
        )]
        strategies: Vec<OrderingStrategy>,
        /// Also report error-operator norms.
        #[arg(long)]
        with_norms: bool,
    },
    /// Measure random orderings and bin them against error-operator norms.
    Sample {
        input: String,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = 1000)]
        bins: usize,
        /// Histogram JSON path; defaults to `<output>.hist.json`, or stderr.
        #[arg(long)]
        histogram: Option<PathBuf>,
    },
    /// Commuting-set statistics for one or more Hamiltonians.
    ColorStats {
        #[arg(required = true)]
        inputs: Vec<String>,
    },
    /// Norms of the error operator of an ordering.
    ErrorOp {
        input: String,
        #[arg(long, default_value = "as_given")]
        strategy: OrderingStrategy,
        /// Step size; defaults to time / steps.
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Measure the Trotter error of one ordering.
    Simulate {
        input: String,
        #[arg(long, default_value = "as_given")]
        strategy: OrderingStrategy,
        /// Comma-separated Trotter numbers to sweep instead of `--steps`.
        #[arg(long, value_delimiter = ',')]
        sweep: Vec<usize>,
    },
    /// List the built-in fixtures, or write them as files.
    Fixtures {
        #[arg(long)]
        write: Option<PathBuf>,
    },
}
