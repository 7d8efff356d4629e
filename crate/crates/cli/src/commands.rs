//! Implementations of the `gen`, `solve`, `graph`, and `check` subcommands.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::ValueEnum;

use blockelim::elimination::{forward, solve_lea, BlockSolveMode};
use blockelim::generator::{generate, staircase_partition, GeneratorParams};
use blockelim::graph::{
    find_indistinguishable_blocks, quotient_graph, InteractionGraph, OrderedPartition,
};
use blockelim::model::{
    parse_instance, parse_solution, serialize_instance, serialize_solution, IlpInstance, Status,
};
use blockelim::subsolver::{solve_monolithic, Limits, LocalSolver, SolveError, Strategy};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveMode {
    Mono,
    Lea,
    #[value(name = "lea-pkg")]
    LeaPkg,
}

impl SolveMode {
    pub fn name(self) -> &'static str {
        match self {
            SolveMode::Mono => "mono",
            SolveMode::Lea => "lea",
            SolveMode::LeaPkg => "lea-pkg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Exhaustive,
    Bnb,
}

impl From<StrategyArg> for Strategy {
    fn from(arg: StrategyArg) -> Self {
        match arg {
            StrategyArg::Exhaustive => Strategy::Exhaustive,
            StrategyArg::Bnb => Strategy::BranchAndBound,
        }
    }
}

pub fn cmd_gen(params: &GeneratorParams, output: &Path) -> Result<(), CliError> {
    let instance = generate(params)?;
    fs::write(output, serialize_instance(&instance))?;
    eprintln!("wrote {}", output.display());
    Ok(())
}

/// Partition file format: one `block <v1> <v2> ...` line per elimination
/// block, variables 1-based, `#` comments ignored.
pub fn parse_partition(text: &str, n: usize) -> Result<OrderedPartition, CliError> {
    let mut blocks = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let mut tokens = line.split_whitespace();
        if tokens.next() != Some("block") {
            return Err(CliError::Input(format!(
                "partition line {lineno}: expected `block <v1> <v2> ...`"
            )));
        }
        let mut block = Vec::new();
        for tok in tokens {
            let v: usize = tok.parse().map_err(|_| {
                CliError::Input(format!("partition line {lineno}: invalid variable {tok:?}"))
            })?;
            if v == 0 || v > n {
                return Err(CliError::Input(format!(
                    "partition line {lineno}: variable {v} out of range 1..={n}"
                )));
            }
            block.push(v - 1);
        }
        blocks.push(block);
    }
    let partition = OrderedPartition::new(blocks);
    partition.validate(n)?;
    Ok(partition)
}

pub fn render_partition(partition: &OrderedPartition) -> String {
    let mut out = String::new();
    for block in partition.blocks() {
        out.push_str("block");
        for &v in block {
            write!(out, " {}", v + 1).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Picks the elimination partition: an explicit file wins, then
/// indistinguishable-vertex blocks when requested, then staircase metadata.
pub fn resolve_partition(
    instance: &IlpInstance,
    partition_file: Option<&Path>,
    auto_blocks: bool,
) -> Result<OrderedPartition, CliError> {
    if let Some(path) = partition_file {
        let text = fs::read_to_string(path)?;
        return parse_partition(&text, instance.n());
    }
    if auto_blocks {
        let graph = InteractionGraph::from_instance(instance);
        return Ok(find_indistinguishable_blocks(&graph));
    }
    if let Some(meta) = instance.meta() {
        return Ok(staircase_partition(meta));
    }
    Err(CliError::Input(
        "missing partition: pass --partition <file>, --auto-blocks, or use an instance with a meta header"
            .into(),
    ))
}

pub struct SolveOptions {
    pub mode: SolveMode,
    pub strategy: Strategy,
    pub partition_file: Option<PathBuf>,
    pub auto_blocks: bool,
    /// Seconds; 0 disables the limit.
    pub timeout: f64,
    pub node_budget: Option<u64>,
    pub width_cap: Option<u32>,
    pub output: Option<PathBuf>,
    pub trace: bool,
}

pub fn cmd_solve(instance_path: &Path, opts: &SolveOptions) -> Result<(), CliError> {
    let text = fs::read_to_string(instance_path)?;
    let instance = parse_instance(&text)?;

    let mut limits = Limits::default();
    if let Some(budget) = opts.node_budget {
        limits.node_budget = budget;
    }
    if let Some(cap) = opts.width_cap {
        limits.width_cap = cap;
    }
    if !(0.0..=1e9).contains(&opts.timeout) {
        return Err(CliError::Input("timeout must be in 0..=1e9 seconds".into()));
    }
    if opts.timeout > 0.0 {
        limits.deadline = Some(Instant::now() + Duration::from_secs_f64(opts.timeout));
    }

    let partition = match opts.mode {
        SolveMode::Mono => None,
        SolveMode::Lea | SolveMode::LeaPkg => Some(resolve_partition(
            &instance,
            opts.partition_file.as_deref(),
            opts.auto_blocks,
        )?),
    };

    let start = Instant::now();
    let outcome = match opts.mode {
        SolveMode::Mono => solve_monolithic(&instance, opts.strategy, &limits),
        SolveMode::Lea | SolveMode::LeaPkg => {
            let solver = LocalSolver {
                strategy: opts.strategy,
                limits,
            };
            let block_mode = if opts.mode == SolveMode::Lea {
                BlockSolveMode::PerEntry
            } else {
                BlockSolveMode::Package
            };
            solve_lea(&instance, partition.as_ref().unwrap(), &solver, block_mode)
        }
    };
    let seconds = start.elapsed().as_secs_f64();

    match outcome {
        Ok(solution) => {
            if opts.trace {
                if let Some(partition) = &partition {
                    let solver = LocalSolver {
                        strategy: opts.strategy,
                        limits,
                    };
                    let block_mode = if opts.mode == SolveMode::Lea {
                        BlockSolveMode::PerEntry
                    } else {
                        BlockSolveMode::Package
                    };
                    if let Ok(record) = forward(&instance, partition, &solver, block_mode) {
                        eprint!("{}", record.render_trace());
                    }
                }
            }
            let output = opts
                .output
                .clone()
                .unwrap_or_else(|| instance_path.with_extension("sol"));
            fs::write(&output, serialize_solution(&solution))?;
            let status = match solution.status {
                Status::Optimal => "optimal",
                Status::Infeasible => "infeasible",
            };
            let objective = solution
                .objective
                .map_or("-".to_string(), |v| v.to_string());
            println!(
                "{} {} {} {:.6}",
                opts.mode.name(),
                status,
                objective,
                seconds
            );
            match solution.status {
                Status::Optimal => Ok(()),
                Status::Infeasible => Err(CliError::Infeasible),
            }
        }
        Err(SolveError::Timeout) => {
            println!("{} TIMEOUT - {:.6}", opts.mode.name(), seconds);
            Err(CliError::Timeout)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn cmd_graph(
    instance_path: &Path,
    quotient: bool,
    partition_file: Option<&Path>,
    auto_blocks: bool,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let text = fs::read_to_string(instance_path)?;
    let instance = parse_instance(&text)?;
    let graph = InteractionGraph::from_instance(&instance);
    let dot = if quotient {
        let partition = resolve_partition(&instance, partition_file, auto_blocks)?;
        quotient_graph(&graph, &partition)?.to_dot()
    } else {
        graph.to_dot()
    };
    match output {
        Some(path) => fs::write(path, dot)?,
        None => print!("{dot}"),
    }
    Ok(())
}

pub fn cmd_check(instance_path: &Path, solution_path: &Path) -> Result<(), CliError> {
    let instance = parse_instance(&fs::read_to_string(instance_path)?)?;
    let (status, claimed, assignment) = parse_solution(&fs::read_to_string(solution_path)?)?;

    if status == Status::Infeasible {
        println!("ok");
        return Ok(());
    }
    let claimed = claimed.ok_or_else(|| CliError::Input("solution file has no obj line".into()))?;
    let assignment =
        assignment.ok_or_else(|| CliError::Input("solution file has no x line".into()))?;
    if assignment.len() != instance.n() {
        return Err(CliError::Input(format!(
            "assignment has {} bits, expected {}",
            assignment.len(),
            instance.n()
        )));
    }

    let (feasible, actual) = instance.evaluate(&assignment)?;
    let mut problems = Vec::new();
    if !feasible {
        for (i, con) in instance.constraints().iter().enumerate() {
            let lhs: i64 = con
                .support
                .iter()
                .filter(|&&(j, _)| assignment.get(j) == Some(true))
                .map(|&(_, a)| a)
                .sum();
            if lhs > con.rhs {
                problems.push(format!(
                    "constraint {} violated: lhs {} > rhs {}",
                    i + 1,
                    lhs,
                    con.rhs
                ));
            }
        }
    }
    if actual != claimed {
        problems.push(format!(
            "objective mismatch: claimed {claimed}, actual {actual}"
        ));
    }

    if problems.is_empty() {
        println!("ok");
        Ok(())
    } else {
        for problem in &problems {
            println!("{problem}");
        }
        Err(CliError::CheckFailed(problems.join("; ")))
    }
}

/// Parses a `p/q` right-hand-side factor.
pub fn parse_ratio(text: &str) -> Result<(i64, i64), CliError> {
    let (num, den) = text
        .split_once('/')
        .ok_or_else(|| CliError::Input(format!("invalid rhs factor {text:?}, expected p/q")))?;
    let parse = |s: &str| {
        s.parse::<i64>()
            .map_err(|_| CliError::Input(format!("invalid rhs factor {text:?}, expected p/q")))
    };
    Ok((parse(num)?, parse(den)?))
}

pub fn build_params(
    n: usize,
    m: usize,
    k: usize,
    b: usize,
    seed: u64,
    coeff_range: (i64, i64),
    rhs_factor: &str,
) -> Result<GeneratorParams, CliError> {
    let (rhs_num, rhs_den) = parse_ratio(rhs_factor)?;
    let mut params = GeneratorParams::new(n, m, k, b, seed);
    params.coeff_range = coeff_range;
    params.rhs_num = rhs_num;
    params.rhs_den = rhs_den;
    params.validate()?;
    Ok(params)
}
