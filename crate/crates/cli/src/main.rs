use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use blockelim_cli::bench::cmd_bench;
use blockelim_cli::commands::{
    build_params, cmd_check, cmd_gen, cmd_graph, cmd_solve, SolveMode, SolveOptions, StrategyArg,
};
use blockelim_cli::CliError;

#[derive(Parser)]
#[command(
    name = "blockelim",
    version,
    about = "Block local elimination solver for sparse 0/1 integer linear programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a quasi-block (staircase) instance file
    Gen {
        /// Total variables (k must divide n)
        #[arg(long)]
        n: usize,
        /// Total constraints (k must divide m)
        #[arg(long)]
        m: usize,
        /// Number of blocks
        #[arg(long)]
        k: usize,
        /// Separator size (variables shared between consecutive blocks)
        #[arg(long)]
        b: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        coeff_min: i64,
        #[arg(long, default_value_t = 10)]
        coeff_max: i64,
        /// Right-hand-side factor as a fraction p/q in (0,1)
        #[arg(long, default_value = "3/5")]
        rhs_factor: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Solve an instance and write a solution file
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = SolveMode::Lea)]
        mode: SolveMode,
        /// Partition file (lines `block <v1> <v2> ...` in elimination order)
        #[arg(long)]
        partition: Option<PathBuf>,
        /// Derive the partition from indistinguishable-vertex blocks
        #[arg(long)]
        auto_blocks: bool,
        #[arg(long, value_enum, default_value_t = StrategyArg::Bnb)]
        strategy: StrategyArg,
        /// Wall-clock limit in seconds; 0 disables the limit
        #[arg(long, default_value_t = 120.0)]
        timeout: f64,
        #[arg(long)]
        node_budget: Option<u64>,
        #[arg(long)]
        width_cap: Option<u32>,
        /// Solution file path (default: the instance path with a .sol extension)
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Dump the per-block elimination tables to stderr
        #[arg(long)]
        trace: bool,
    },
    /// Emit the interaction graph (or the quotient graph) in DOT format
    Graph {
        instance: PathBuf,
        /// Quotient by a partition instead of the raw interaction graph
        #[arg(long)]
        quotient: bool,
        #[arg(long)]
        partition: Option<PathBuf>,
        #[arg(long)]
        auto_blocks: bool,
        /// Output file (default: stdout)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Validate a solution file against an instance
    Check {
        instance: PathBuf,
        solution: PathBuf,
    },
    /// Run timed mode comparisons from a bench spec, writing a CSV report
    Bench {
        /// Spec file: one `n m k b seed modes reps timeout` row per line
        spec: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Worker threads across rows (default: available parallelism; use 1
        /// for timing-grade runs)
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen {
            n,
            m,
            k,
            b,
            seed,
            coeff_min,
            coeff_max,
            rhs_factor,
            output,
        } => {
            let params = build_params(n, m, k, b, seed, (coeff_min, coeff_max), &rhs_factor)?;
            cmd_gen(&params, &output)
        }
        Command::Solve {
            instance,
            mode,
            partition,
            auto_blocks,
            strategy,
            timeout,
            node_budget,
            width_cap,
            output,
            trace,
        } => cmd_solve(
            &instance,
            &SolveOptions {
                mode,
                strategy: strategy.into(),
                partition_file: partition,
                auto_blocks,
                timeout,
                node_budget,
                width_cap,
                output,
                trace,
            },
        ),
        Command::Graph {
            instance,
            quotient,
            partition,
            auto_blocks,
            output,
        } => cmd_graph(
            &instance,
            quotient,
            partition.as_deref(),
            auto_blocks,
            output.as_deref(),
        ),
        Command::Check { instance, solution } => cmd_check(&instance, &solution),
        Command::Bench { spec, output, jobs } => cmd_bench(&spec, &output, jobs),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            // Infeasible and check reports were already printed on stdout.
            if !matches!(err, CliError::Infeasible | CliError::CheckFailed(_)) {
                eprintln!("error: {err}");
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
