//! Exact solvers for block subproblems and for the monolithic baseline.
//!
//! Two interchangeable strategies sit behind one interface: complete
//! enumeration and depth-first implicit enumeration with an additive upper
//! bound. Both return identical optima under the shared tie-break rule
//! (lexicographically smallest assignment, variables ascending, 0 before 1).
//!
//! The package solver amortizes a whole block family at once: all
//! neighborhood assignments of a block share the same columns and differ
//! only in the reduced right-hand sides, so one sweep over the block
//! assignments serves every table entry.

use std::time::Instant;

use thiserror::Error;

use crate::elimination::{
    FixedComponent, LocalOptimum, LocalSubproblem, LocalTable, ReducedConstraint, TableComponent,
};
use crate::graph::{GraphError, PartitionViolation};
use crate::model::{Assignment, Constraint, IlpInstance, ModelError, Solution, SolveStats};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid partition: {0}")]
    InvalidPartition(#[from] PartitionViolation),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("neighborhood width {width} exceeds the table width cap {cap}")]
    WidthCapExceeded { width: usize, cap: u32 },
    #[error("block size {size} exceeds the subsolver cap {cap}")]
    BlockCapExceeded { size: usize, cap: u32 },
    #[error("node budget of {budget} exhausted")]
    NodeBudgetExhausted { budget: u64 },
    #[error("solve timed out")]
    Timeout,
    #[error("backward pass requires a feasible record")]
    InfeasibleRecord,
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    Exhaustive,
    BranchAndBound,
}

/// Resource limits shared by all solvers.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    /// Complete candidate assignments a single solve may evaluate.
    /// Exceeding it is an error, never an approximate answer.
    pub node_budget: u64,
    /// Largest block a local solve (or a monolithic exhaustive solve) will
    /// enumerate. Table patterns are packed into 64-bit words, so the
    /// effective maximum is 62 regardless of this setting.
    pub block_cap: u32,
    /// Largest neighborhood the elimination pass will tabulate; tables hold
    /// `2^width` entries, so this bounds memory.
    pub width_cap: u32,
    /// Wall-clock cutoff; solvers poll it and abort with `Timeout`.
    pub deadline: Option<Instant>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            node_budget: 100_000_000,
            block_cap: 30,
            width_cap: 25,
            deadline: None,
        }
    }
}

/// Strategy plus limits: the pluggable solver handed to the elimination
/// driver for the subproblems in blocks.
#[derive(Debug, Clone, Copy, Default)]
pub struct LocalSolver {
    pub strategy: Strategy,
    pub limits: Limits,
}

/// Result of one local solve: the tie-broken optimum (or `None` when the
/// subproblem is infeasible) and the number of candidates evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalSolve {
    pub best: Option<LocalOptimum>,
    pub nodes: u64,
}

fn check_deadline(limits: &Limits) -> Result<(), SolveError> {
    match limits.deadline {
        Some(deadline) if Instant::now() >= deadline => Err(SolveError::Timeout),
        _ => Ok(()),
    }
}

fn pack(bits: &[bool]) -> u64 {
    let len = bits.len();
    debug_assert!(len <= 64);
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (t, &bit)| acc | ((bit as u64) << (len - 1 - t)))
}

struct RawSolve {
    best: Option<(i64, Vec<bool>)>,
    leaves: u64,
}

/// Complete enumeration in counting (= lexicographic) order, keeping the
/// first strict maximum.
fn exhaustive_raw(sub: &LocalSubproblem, limits: &Limits) -> Result<RawSolve, SolveError> {
    let len = sub.block.len();
    if len > 62 {
        return Err(SolveError::BlockCapExceeded { size: len, cap: 62 });
    }
    let mut bits = vec![false; len];
    let mut best: Option<(i64, Vec<bool>)> = None;
    let mut leaves = 0u64;
    for pat in 0..(1u64 << len) {
        leaves += 1;
        if leaves > limits.node_budget {
            return Err(SolveError::NodeBudgetExhausted {
                budget: limits.node_budget,
            });
        }
        if pat & 4095 == 0 {
            check_deadline(limits)?;
        }
        for (t, bit) in bits.iter_mut().enumerate() {
            *bit = (pat >> (len - 1 - t)) & 1 == 1;
        }
        if let Some(value) = evaluate_candidate(sub, &bits) {
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                best = Some((value, bits.clone()));
            }
        }
    }
    Ok(RawSolve { best, leaves })
}

/// Objective of a complete block assignment, or `None` when it violates a
/// constraint or lands on an infeasible table entry.
fn evaluate_candidate(sub: &LocalSubproblem, bits: &[bool]) -> Option<i64> {
    for con in &sub.constraints {
        let lhs: i64 = con
            .coeffs
            .iter()
            .filter(|&&(pos, _)| bits[pos])
            .map(|&(_, a)| a)
            .sum();
        if lhs > con.rhs {
            return None;
        }
    }
    let mut value: i64 = sub
        .objective
        .iter()
        .zip(bits)
        .filter(|&(_, &bit)| bit)
        .map(|(&c, _)| c)
        .sum();
    for comp in &sub.components {
        value += comp.value_at(bits)?;
    }
    Some(value)
}

struct BranchState<'a> {
    sub: &'a LocalSubproblem,
    limits: &'a Limits,
    bits: Vec<bool>,
    /// Left-hand side contributed by decided positions, per constraint.
    fixed_lhs: Vec<i64>,
    /// `sum of min(0, a)` over undecided positions, per constraint.
    min_rest: Vec<i64>,
    /// `pos_suffix[d]` = sum of `max(0, c_t)` for `t >= d`.
    pos_suffix: Vec<i64>,
    /// Per block position: the `(constraint, coefficient)` terms touching it.
    pos_terms: Vec<Vec<(usize, i64)>>,
    /// Prune when `bound <= floor`.
    floor: Option<i64>,
    best: Option<(i64, Vec<bool>)>,
    leaves: u64,
    expansions: u64,
}

impl<'a> BranchState<'a> {
    fn new(sub: &'a LocalSubproblem, limits: &'a Limits) -> Self {
        let len = sub.block.len();
        let mut pos_suffix = vec![0i64; len + 1];
        for d in (0..len).rev() {
            pos_suffix[d] = pos_suffix[d + 1] + sub.objective[d].max(0);
        }
        let mut pos_terms = vec![Vec::new(); len];
        let mut min_rest = vec![0i64; sub.constraints.len()];
        for (c, con) in sub.constraints.iter().enumerate() {
            for &(pos, a) in &con.coeffs {
                pos_terms[pos].push((c, a));
                min_rest[c] += a.min(0);
            }
        }
        BranchState {
            sub,
            limits,
            bits: vec![false; len],
            fixed_lhs: vec![0; sub.constraints.len()],
            min_rest,
            pos_suffix,
            pos_terms,
            floor: None,
            best: None,
            leaves: 0,
            expansions: 0,
        }
    }

    fn satisfiable(&self) -> bool {
        self.sub
            .constraints
            .iter()
            .enumerate()
            .all(|(c, con)| self.fixed_lhs[c] + self.min_rest[c] <= con.rhs)
    }

    /// Admissible upper bound for completions of the first `depth` bits:
    /// the exact decided objective plus every remaining positive coefficient
    /// plus each component's best consistent entry.
    fn bound(&self, depth: usize, owned: i64) -> Option<i64> {
        let mut bound = owned + self.pos_suffix[depth];
        for comp in &self.sub.components {
            bound += comp.max_given_prefix(&self.bits, depth)?;
        }
        Some(bound)
    }

    fn dfs(&mut self, depth: usize, owned: i64) -> Result<(), SolveError> {
        if depth == self.sub.block.len() {
            self.leaves += 1;
            if self.leaves > self.limits.node_budget {
                return Err(SolveError::NodeBudgetExhausted {
                    budget: self.limits.node_budget,
                });
            }
            if self.leaves & 1023 == 0 {
                check_deadline(self.limits)?;
            }
            let mut value = owned;
            for comp in &self.sub.components {
                match comp.value_at(&self.bits) {
                    Some(v) => value += v,
                    None => return Ok(()),
                }
            }
            if self.floor.is_none_or(|f| value > f) {
                self.floor = Some(value);
                self.best = Some((value, self.bits.clone()));
            }
            return Ok(());
        }

        self.expansions += 1;
        if self.expansions > self.limits.node_budget.saturating_mul(64) {
            return Err(SolveError::NodeBudgetExhausted {
                budget: self.limits.node_budget,
            });
        }
        if self.expansions & 4095 == 0 {
            check_deadline(self.limits)?;
        }

        for value in [false, true] {
            self.bits[depth] = value;
            for t in 0..self.pos_terms[depth].len() {
                let (c, a) = self.pos_terms[depth][t];
                self.min_rest[c] -= a.min(0);
                if value {
                    self.fixed_lhs[c] += a;
                }
            }
            if self.satisfiable() {
                let owned_next = owned + if value { self.sub.objective[depth] } else { 0 };
                if let Some(bound) = self.bound(depth + 1, owned_next) {
                    if self.floor.is_none_or(|f| bound > f) {
                        self.dfs(depth + 1, owned_next)?;
                    }
                }
            }
            for t in 0..self.pos_terms[depth].len() {
                let (c, a) = self.pos_terms[depth][t];
                self.min_rest[c] += a.min(0);
                if value {
                    self.fixed_lhs[c] -= a;
                }
            }
        }
        self.bits[depth] = false;
        Ok(())
    }
}

/// Feasible assignment found by a one-pass greedy dive, used to seed the
/// branch-and-bound floor at `value - 1`. Only attempted on component-free
/// subproblems. Seeding one below the greedy value never changes the
/// returned optimum: the lexicographically smallest optimum still beats the
/// floor, so it is found first.
fn greedy_value(sub: &LocalSubproblem) -> Option<i64> {
    let len = sub.block.len();
    let mut fixed = vec![0i64; sub.constraints.len()];
    let mut min_rest = vec![0i64; sub.constraints.len()];
    let mut pos_terms = vec![Vec::new(); len];
    for (c, con) in sub.constraints.iter().enumerate() {
        for &(pos, a) in &con.coeffs {
            pos_terms[pos].push((c, a));
            min_rest[c] += a.min(0);
        }
    }
    if sub
        .constraints
        .iter()
        .enumerate()
        .any(|(c, con)| min_rest[c] > con.rhs)
    {
        return None;
    }
    let mut total = 0i64;
    for (terms, &coeff) in pos_terms.iter().zip(&sub.objective) {
        let prefer = coeff > 0;
        let mut chosen = None;
        for value in [prefer, !prefer] {
            let ok = terms.iter().all(|&(c, a)| {
                let fixed_next = fixed[c] + if value { a } else { 0 };
                let rest_next = min_rest[c] - a.min(0);
                fixed_next + rest_next <= sub.constraints[c].rhs
            });
            if ok {
                chosen = Some(value);
                break;
            }
        }
        let value = chosen?;
        for &(c, a) in terms {
            min_rest[c] -= a.min(0);
            if value {
                fixed[c] += a;
            }
        }
        if value {
            total += coeff;
        }
    }
    Some(total)
}

fn bnb_raw(sub: &LocalSubproblem, limits: &Limits) -> Result<RawSolve, SolveError> {
    let mut state = BranchState::new(sub, limits);
    if !state.satisfiable() {
        return Ok(RawSolve {
            best: None,
            leaves: 0,
        });
    }
    if sub.components.is_empty() {
        if let Some(v) = greedy_value(sub) {
            state.floor = Some(v - 1);
        }
    }
    state.dfs(0, 0)?;
    Ok(RawSolve {
        best: state.best,
        leaves: state.leaves,
    })
}

fn finish_local(raw: RawSolve) -> LocalSolve {
    LocalSolve {
        best: raw.best.map(|(value, bits)| LocalOptimum {
            value,
            pattern: pack(&bits),
        }),
        nodes: raw.leaves,
    }
}

fn check_block_cap(len: usize, limits: &Limits) -> Result<(), SolveError> {
    if len > limits.block_cap as usize || len > 62 {
        return Err(SolveError::BlockCapExceeded {
            size: len,
            cap: limits.block_cap.min(62),
        });
    }
    Ok(())
}

/// Exact maximum over all block assignments by complete enumeration.
pub fn solve_local_exhaustive(
    sub: &LocalSubproblem,
    limits: &Limits,
) -> Result<LocalSolve, SolveError> {
    check_block_cap(sub.block.len(), limits)?;
    Ok(finish_local(exhaustive_raw(sub, limits)?))
}

/// Exact maximum by depth-first implicit enumeration. The bound is the
/// decided objective plus every remaining positive coefficient plus each
/// table component's best consistent completion; subtrees with
/// `bound <= incumbent` are pruned.
pub fn solve_local_bnb(sub: &LocalSubproblem, limits: &Limits) -> Result<LocalSolve, SolveError> {
    check_block_cap(sub.block.len(), limits)?;
    Ok(finish_local(bnb_raw(sub, limits)?))
}

pub fn solve_local(
    sub: &LocalSubproblem,
    strategy: Strategy,
    limits: &Limits,
) -> Result<LocalSolve, SolveError> {
    match strategy {
        Strategy::Exhaustive => solve_local_exhaustive(sub, limits),
        Strategy::BranchAndBound => solve_local_bnb(sub, limits),
    }
}

/// Where a table component's scope bit is assigned from.
#[derive(Debug, Clone, Copy)]
enum BitSource {
    Block(usize),
    Neighborhood(usize),
}

#[derive(Debug, Clone)]
struct SplitComponent {
    /// One entry per scope position, in scope order.
    sources: Vec<BitSource>,
    values: Vec<Option<i64>>,
}

#[derive(Debug, Clone)]
struct SplitConstraint {
    block_coeffs: Vec<(usize, i64)>,
    nb_coeffs: Vec<(usize, i64)>,
    rhs: i64,
}

/// A whole block family: owned objective terms, consumed table components,
/// and the block's constraints split into block-side and neighborhood-side
/// columns. Instantiating a neighborhood assignment only changes reduced
/// right-hand sides and fixed component bits.
#[derive(Debug, Clone)]
pub struct BlockPackage {
    block: Vec<usize>,
    neighborhood: Vec<usize>,
    objective: Vec<i64>,
    constraints: Vec<SplitConstraint>,
    components: Vec<SplitComponent>,
}

impl BlockPackage {
    /// Splits `rows` and `components` over the block/neighborhood columns.
    /// Every variable they mention must lie in `block` or `neighborhood`.
    pub fn build(
        n: usize,
        block: &[usize],
        neighborhood: &[usize],
        objective: &[i64],
        rows: &[&Constraint],
        components: Vec<TableComponent>,
    ) -> Result<Self, SolveError> {
        #[derive(Clone, Copy, PartialEq)]
        enum Where {
            Outside,
            Block(usize),
            Neighborhood(usize),
        }
        let mut place = vec![Where::Outside; n];
        for (pos, &v) in block.iter().enumerate() {
            place[v] = Where::Block(pos);
        }
        for (pos, &v) in neighborhood.iter().enumerate() {
            place[v] = Where::Neighborhood(pos);
        }
        let outside = |v: usize| {
            SolveError::Internal(format!(
                "variable x{} lies outside the block and its neighborhood",
                v + 1
            ))
        };

        let mut constraints = Vec::with_capacity(rows.len());
        for row in rows {
            let mut block_coeffs = Vec::new();
            let mut nb_coeffs = Vec::new();
            for &(v, a) in &row.support {
                match place[v] {
                    Where::Block(pos) => block_coeffs.push((pos, a)),
                    Where::Neighborhood(pos) => nb_coeffs.push((pos, a)),
                    Where::Outside => return Err(outside(v)),
                }
            }
            constraints.push(SplitConstraint {
                block_coeffs,
                nb_coeffs,
                rhs: row.rhs,
            });
        }

        let mut split_components = Vec::with_capacity(components.len());
        for comp in components {
            let mut sources = Vec::with_capacity(comp.scope.len());
            for &v in &comp.scope {
                match place[v] {
                    Where::Block(pos) => sources.push(BitSource::Block(pos)),
                    Where::Neighborhood(pos) => sources.push(BitSource::Neighborhood(pos)),
                    Where::Outside => return Err(outside(v)),
                }
            }
            split_components.push(SplitComponent {
                sources,
                values: comp.values,
            });
        }

        Ok(BlockPackage {
            block: block.to_vec(),
            neighborhood: neighborhood.to_vec(),
            objective: block.iter().map(|&v| objective[v]).collect(),
            constraints,
            components: split_components,
        })
    }

    pub fn block(&self) -> &[usize] {
        &self.block
    }

    pub fn neighborhood(&self) -> &[usize] {
        &self.neighborhood
    }

    /// The subproblem for one neighborhood assignment `tau` (packed
    /// big-endian over the sorted neighborhood).
    pub fn instantiate(&self, tau: u64) -> LocalSubproblem {
        let nl = self.neighborhood.len();
        let tau_bit = |q: usize| (tau >> (nl - 1 - q)) & 1 == 1;

        let constraints = self
            .constraints
            .iter()
            .map(|con| {
                let reduction: i64 = con
                    .nb_coeffs
                    .iter()
                    .filter(|&&(q, _)| tau_bit(q))
                    .map(|&(_, a)| a)
                    .sum();
                ReducedConstraint {
                    coeffs: con.block_coeffs.clone(),
                    rhs: con.rhs - reduction,
                }
            })
            .collect();

        let components = self
            .components
            .iter()
            .map(|comp| {
                let scope_len = comp.sources.len();
                let mut positions = Vec::new();
                let mut block_shifts = Vec::new();
                let mut base = 0usize;
                for (t, source) in comp.sources.iter().enumerate() {
                    let shift = scope_len - 1 - t;
                    match *source {
                        BitSource::Block(pos) => {
                            positions.push(pos);
                            block_shifts.push(shift);
                        }
                        BitSource::Neighborhood(q) => {
                            if tau_bit(q) {
                                base |= 1 << shift;
                            }
                        }
                    }
                }
                let restricted = 1usize << positions.len();
                let values = (0..restricted)
                    .map(|r| {
                        let mut key = base;
                        for (t, &shift) in block_shifts.iter().enumerate() {
                            if (r >> (positions.len() - 1 - t)) & 1 == 1 {
                                key |= 1 << shift;
                            }
                        }
                        comp.values[key]
                    })
                    .collect();
                FixedComponent { positions, values }
            })
            .collect();

        LocalSubproblem {
            block: self.block.clone(),
            objective: self.objective.clone(),
            constraints,
            components,
        }
    }
}

/// Builds the whole block table in one sweep over the block assignments.
/// Entrywise identical (values and tie-broken optima) to solving every
/// neighborhood assignment independently.
pub fn solve_block_package(
    pkg: &BlockPackage,
    _strategy: Strategy,
    limits: &Limits,
) -> Result<(LocalTable, u64), SolveError> {
    let bl = pkg.block.len();
    let nl = pkg.neighborhood.len();
    check_block_cap(bl, limits)?;
    if nl > limits.width_cap as usize {
        return Err(SolveError::WidthCapExceeded {
            width: nl,
            cap: limits.width_cap,
        });
    }

    let m = pkg.constraints.len();
    let ncomp = pkg.components.len();
    let entries_len = 1usize << nl;

    // Neighborhood-side reductions depend only on tau; precompute them when
    // the tables stay small, otherwise recompute per candidate.
    let precompute = nl <= 16;
    let (rhs_red, comp_nb_key) = if precompute {
        let mut rhs_red = vec![0i64; entries_len * m];
        let mut comp_nb_key = vec![0usize; entries_len * ncomp];
        for tau in 0..entries_len as u64 {
            let (rhs_row, key_row) = nb_side(pkg, tau);
            rhs_red[tau as usize * m..(tau as usize + 1) * m].copy_from_slice(&rhs_row);
            comp_nb_key[tau as usize * ncomp..(tau as usize + 1) * ncomp].copy_from_slice(&key_row);
        }
        (rhs_red, comp_nb_key)
    } else {
        (Vec::new(), Vec::new())
    };

    let mut entries: Vec<Option<LocalOptimum>> = vec![None; entries_len];
    let mut bits = vec![false; bl];
    let mut usage = vec![0i64; m];
    let mut comp_block_key = vec![0usize; ncomp];
    let mut nodes = 0u64;

    for pat in 0..(1u64 << bl) {
        nodes += 1;
        if nodes > limits.node_budget {
            return Err(SolveError::NodeBudgetExhausted {
                budget: limits.node_budget,
            });
        }
        if pat & 1023 == 0 {
            check_deadline(limits)?;
        }
        for (t, bit) in bits.iter_mut().enumerate() {
            *bit = (pat >> (bl - 1 - t)) & 1 == 1;
        }
        let owned: i64 = pkg
            .objective
            .iter()
            .zip(&bits)
            .filter(|&(_, &bit)| bit)
            .map(|(&c, _)| c)
            .sum();
        for (c, con) in pkg.constraints.iter().enumerate() {
            usage[c] = con
                .block_coeffs
                .iter()
                .filter(|&&(pos, _)| bits[pos])
                .map(|&(_, a)| a)
                .sum();
        }
        for (ci, comp) in pkg.components.iter().enumerate() {
            let scope_len = comp.sources.len();
            let mut key = 0usize;
            for (t, source) in comp.sources.iter().enumerate() {
                if let BitSource::Block(pos) = *source {
                    if bits[pos] {
                        key |= 1 << (scope_len - 1 - t);
                    }
                }
            }
            comp_block_key[ci] = key;
        }

        for tau in 0..entries_len {
            let scratch;
            let (rhs_row, key_row): (&[i64], &[usize]) = if precompute {
                (
                    &rhs_red[tau * m..(tau + 1) * m],
                    &comp_nb_key[tau * ncomp..(tau + 1) * ncomp],
                )
            } else {
                scratch = nb_side(pkg, tau as u64);
                (&scratch.0, &scratch.1)
            };
            if usage.iter().zip(rhs_row).any(|(&u, &rhs)| u > rhs) {
                continue;
            }
            let mut value = owned;
            let mut feasible = true;
            for (ci, comp) in pkg.components.iter().enumerate() {
                match comp.values[comp_block_key[ci] | key_row[ci]] {
                    Some(v) => value += v,
                    None => {
                        feasible = false;
                        break;
                    }
                }
            }
            if feasible && entries[tau].is_none_or(|e| value > e.value) {
                entries[tau] = Some(LocalOptimum {
                    value,
                    pattern: pat,
                });
            }
        }
    }

    Ok((
        LocalTable {
            block: pkg.block.clone(),
            neighborhood: pkg.neighborhood.clone(),
            entries,
        },
        nodes,
    ))
}

/// Reduced right-hand sides and component key bits contributed by one
/// neighborhood assignment.
fn nb_side(pkg: &BlockPackage, tau: u64) -> (Vec<i64>, Vec<usize>) {
    let nl = pkg.neighborhood.len();
    let tau_bit = |q: usize| (tau >> (nl - 1 - q)) & 1 == 1;
    let rhs_row = pkg
        .constraints
        .iter()
        .map(|con| {
            let reduction: i64 = con
                .nb_coeffs
                .iter()
                .filter(|&&(q, _)| tau_bit(q))
                .map(|&(_, a)| a)
                .sum();
            con.rhs - reduction
        })
        .collect();
    let key_row = pkg
        .components
        .iter()
        .map(|comp| {
            let scope_len = comp.sources.len();
            let mut key = 0usize;
            for (t, source) in comp.sources.iter().enumerate() {
                if let BitSource::Neighborhood(q) = *source {
                    if tau_bit(q) {
                        key |= 1 << (scope_len - 1 - t);
                    }
                }
            }
            key
        })
        .collect();
    (rhs_row, key_row)
}

/// Solves the whole instance as a single block with an empty neighborhood.
/// Also serves as the brute-force oracle when run exhaustively on small
/// instances.
pub fn solve_monolithic(
    instance: &IlpInstance,
    strategy: Strategy,
    limits: &Limits,
) -> Result<Solution, SolveError> {
    let start = Instant::now();
    let n = instance.n();
    if strategy == Strategy::Exhaustive && (n > limits.block_cap as usize || n > 62) {
        return Err(SolveError::BlockCapExceeded {
            size: n,
            cap: limits.block_cap.min(62),
        });
    }
    let block: Vec<usize> = (0..n).collect();
    let rows: Vec<&Constraint> = instance.constraints().iter().collect();
    let pkg = BlockPackage::build(n, &block, &[], instance.objective(), &rows, Vec::new())?;
    let sub = pkg.instantiate(0);
    let raw = match strategy {
        Strategy::Exhaustive => exhaustive_raw(&sub, limits)?,
        Strategy::BranchAndBound => bnb_raw(&sub, limits)?,
    };
    let stats = SolveStats {
        nodes: raw.leaves,
        table_entries: 0,
        wall: start.elapsed(),
    };
    match raw.best {
        None => Ok(Solution::infeasible(stats)),
        Some((value, bits)) => {
            let assignment = Assignment::from_bits(bits);
            let (feasible, objective) = instance.evaluate(&assignment)?;
            if !feasible || objective != value {
                return Err(SolveError::Internal(format!(
                    "monolithic optimum evaluates to ({feasible}, {objective}), expected (true, {value})"
                )));
            }
            Ok(Solution::optimal(assignment, value, stats))
        }
    }
}
