//! Benchmark harness: timed comparisons of monolithic solving against the
//! two elimination modes on generated staircase instances, reported as CSV.
//!
//! A bench spec is line-oriented: `n m k b seed modes reps timeout`, where
//! `modes` is `all` or a comma-separated subset of `mono,lea,lea-pkg` and
//! `timeout` is in seconds. Instance generation and partition setup run
//! outside the timed region; only the solve call is measured, and the
//! median over `reps` repetitions is reported. All solves use the
//! branch-and-bound subsolver.
//!
//! Objectives across the completed modes of a row must agree; a mismatch is
//! a solver bug and aborts the whole run.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use blockelim::elimination::{solve_lea, BlockSolveMode};
use blockelim::generator::{generate, staircase_partition, GeneratorParams};
use blockelim::model::Status;
use blockelim::subsolver::{solve_monolithic, Limits, LocalSolver, SolveError, Strategy};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchMode {
    Mono,
    Lea,
    LeaPkg,
}

impl BenchMode {
    pub const ALL: [BenchMode; 3] = [BenchMode::Mono, BenchMode::Lea, BenchMode::LeaPkg];

    pub fn name(self) -> &'static str {
        match self {
            BenchMode::Mono => "mono",
            BenchMode::Lea => "lea",
            BenchMode::LeaPkg => "lea-pkg",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub params: GeneratorParams,
    pub modes: Vec<BenchMode>,
    pub reps: usize,
    pub timeout: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Optimal,
    Infeasible,
    Timeout,
}

impl RunStatus {
    pub fn name(self) -> &'static str {
        match self {
            RunStatus::Optimal => "optimal",
            RunStatus::Infeasible => "infeasible",
            RunStatus::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ModeResult {
    pub mode: BenchMode,
    /// Median solve time over the repetitions; `None` when timed out.
    pub median: Option<Duration>,
    pub objective: Option<i64>,
    pub status: RunStatus,
}

#[derive(Debug, Clone)]
pub struct RowResult {
    pub params: GeneratorParams,
    pub results: Vec<ModeResult>,
    /// All completed (non-timeout) modes reported the same status and
    /// objective. Always true on emitted rows; a violation aborts the run.
    pub agreement: bool,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<RowResult>,
}

pub fn parse_bench_spec(text: &str) -> Result<Vec<BenchRow>, CliError> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 8 {
            return Err(CliError::Input(format!(
                "bench spec line {lineno}: expected `n m k b seed modes reps timeout`, found {} fields",
                tokens.len()
            )));
        }
        let field = |i: usize, what: &str| -> Result<u64, CliError> {
            tokens[i].parse().map_err(|_| {
                CliError::Input(format!(
                    "bench spec line {lineno}: invalid {what} {:?}",
                    tokens[i]
                ))
            })
        };
        let n = field(0, "n")? as usize;
        let m = field(1, "m")? as usize;
        let k = field(2, "k")? as usize;
        let b = field(3, "b")? as usize;
        let seed = field(4, "seed")?;
        let modes = parse_modes(tokens[5], lineno)?;
        let reps = field(6, "reps")? as usize;
        if reps == 0 {
            return Err(CliError::Input(format!(
                "bench spec line {lineno}: reps must be >= 1"
            )));
        }
        let timeout: f64 = tokens[7].parse().map_err(|_| {
            CliError::Input(format!(
                "bench spec line {lineno}: invalid timeout {:?}",
                tokens[7]
            ))
        })?;
        if !(timeout > 0.0 && timeout <= 1e9) {
            return Err(CliError::Input(format!(
                "bench spec line {lineno}: timeout must be in (0, 1e9] seconds"
            )));
        }
        let params = GeneratorParams::new(n, m, k, b, seed);
        params.validate()?;
        rows.push(BenchRow {
            params,
            modes,
            reps,
            timeout: Duration::from_secs_f64(timeout),
        });
    }
    if rows.is_empty() {
        return Err(CliError::Input("bench spec contains no rows".into()));
    }
    Ok(rows)
}

fn parse_modes(token: &str, lineno: usize) -> Result<Vec<BenchMode>, CliError> {
    if token == "all" {
        return Ok(BenchMode::ALL.to_vec());
    }
    token
        .split(',')
        .map(|name| match name {
            "mono" => Ok(BenchMode::Mono),
            "lea" => Ok(BenchMode::Lea),
            "lea-pkg" => Ok(BenchMode::LeaPkg),
            other => Err(CliError::Input(format!(
                "bench spec line {lineno}: unknown mode {other:?}"
            ))),
        })
        .collect()
}

/// Runs every row, spreading rows over up to `jobs` worker threads. Each
/// row runs on a single worker so its timings are not skewed by sharing a
/// core with its own competitors; use `jobs = 1` for timing-grade runs.
pub fn run_bench(rows: &[BenchRow], jobs: usize) -> Result<BenchReport, CliError> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<RowResult, CliError>>>> =
        Mutex::new((0..rows.len()).map(|_| None).collect());
    let workers = jobs.max(1).min(rows.len());

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= rows.len() {
                    break;
                }
                let result = run_row(&rows[i]);
                slots.lock().unwrap()[i] = Some(result);
            });
        }
    });

    let mut report_rows = Vec::with_capacity(rows.len());
    for slot in slots.into_inner().unwrap() {
        let row = slot.expect("worker left a row unprocessed")?;
        if !row.agreement {
            let p = &row.params;
            return Err(CliError::Internal(format!(
                "objective disagreement across modes on row n={} m={} k={} b={} seed={}",
                p.n, p.m, p.k, p.b, p.seed
            )));
        }
        report_rows.push(row);
    }
    Ok(BenchReport { rows: report_rows })
}

fn run_row(row: &BenchRow) -> Result<RowResult, CliError> {
    let instance = generate(&row.params)?;
    let partition = staircase_partition(instance.meta().expect("generated instances carry meta"));

    let mut results = Vec::with_capacity(row.modes.len());
    for &mode in &row.modes {
        let mut times = Vec::with_capacity(row.reps);
        let mut objective = None;
        let mut status = RunStatus::Optimal;
        for _ in 0..row.reps {
            let limits = Limits {
                deadline: Some(Instant::now() + row.timeout),
                ..Limits::default()
            };
            let start = Instant::now();
            let outcome = match mode {
                BenchMode::Mono => solve_monolithic(&instance, Strategy::BranchAndBound, &limits),
                BenchMode::Lea | BenchMode::LeaPkg => {
                    let solver = LocalSolver {
                        strategy: Strategy::BranchAndBound,
                        limits,
                    };
                    let block_mode = if mode == BenchMode::Lea {
                        BlockSolveMode::PerEntry
                    } else {
                        BlockSolveMode::Package
                    };
                    solve_lea(&instance, &partition, &solver, block_mode)
                }
            };
            let elapsed = start.elapsed();
            match outcome {
                Ok(solution) => {
                    times.push(elapsed);
                    objective = solution.objective;
                    status = match solution.status {
                        Status::Optimal => RunStatus::Optimal,
                        Status::Infeasible => RunStatus::Infeasible,
                    };
                }
                Err(SolveError::Timeout) => {
                    status = RunStatus::Timeout;
                    objective = None;
                    break;
                }
                Err(e) => return Err(e.into()),
            }
        }
        let median = (status != RunStatus::Timeout).then(|| {
            times.sort();
            times[times.len() / 2]
        });
        let p = &row.params;
        eprintln!(
            "bench n={} m={} k={} b={} seed={} {}: {} {}",
            p.n,
            p.m,
            p.k,
            p.b,
            p.seed,
            mode.name(),
            status.name(),
            median.map_or("TIMEOUT".to_string(), |d| format!(
                "{:.6}s",
                d.as_secs_f64()
            )),
        );
        results.push(ModeResult {
            mode,
            median,
            objective,
            status,
        });
    }

    let mut completed = results.iter().filter(|r| r.status != RunStatus::Timeout);
    let agreement = match completed.next() {
        None => true,
        Some(first) => {
            completed.all(|r| r.status == first.status && r.objective == first.objective)
        }
    };
    Ok(RowResult {
        params: row.params.clone(),
        results,
        agreement,
    })
}

/// CSV rendering: `n,m,k,b,mode,median_seconds,objective,status`, one line
/// per (row, mode). Timed-out modes carry a TIMEOUT marker and no objective.
pub fn render_csv(report: &BenchReport) -> String {
    let mut out = String::from("n,m,k,b,mode,median_seconds,objective,status\n");
    for row in &report.rows {
        let p = &row.params;
        for result in &row.results {
            let median = result
                .median
                .map_or("TIMEOUT".to_string(), |d| format!("{:.6}", d.as_secs_f64()));
            let objective = result.objective.map_or(String::new(), |v| v.to_string());
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                p.n,
                p.m,
                p.k,
                p.b,
                result.mode.name(),
                median,
                objective,
                result.status.name()
            )
            .unwrap();
        }
    }
    out
}

/// The `bench` subcommand: parse the spec, run it, write the CSV report.
pub fn cmd_bench(
    spec_path: &std::path::Path,
    output: &std::path::Path,
    jobs: Option<usize>,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(spec_path)?;
    let rows = parse_bench_spec(&text)?;
    let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()));
    let report = run_bench(&rows, jobs)?;
    std::fs::write(output, render_csv(&report))?;
    eprintln!("wrote {}", output.display());
    Ok(())
}
