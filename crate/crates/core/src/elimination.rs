//! The block local elimination algorithm: a forward pass that eliminates
//! variable blocks in partition order while tabulating optimal local
//! solutions as functions of each block's neighborhood, and a backward pass
//! that recovers a full optimal assignment from the stored tables.
//!
//! The forward pass keeps a working interaction graph. Eliminating a block
//! turns its neighborhood into a clique, so variables coupled only through a
//! stored table automatically appear in later neighborhoods. Each original
//! constraint enters exactly one block subproblem family (the first block
//! intersecting its support) and each stored table is consumed exactly once.
//!
//! Bit patterns are packed big-endian over the sorted variable list of their
//! scope: the smallest variable maps to the most significant bit, so counting
//! order equals lexicographic order on assignments. Ties between equally
//! optimal local assignments always resolve to the lexicographically
//! smallest pattern.

use std::fmt::Write as _;
use std::time::Instant;

use crate::graph::{InteractionGraph, OrderedPartition};
use crate::model::{Assignment, IlpInstance, Solution, SolveStats};
use crate::subsolver::{solve_block_package, solve_local, BlockPackage, LocalSolver, SolveError};

/// How the forward pass fills each block's table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockSolveMode {
    /// One independent subproblem solve per neighborhood assignment.
    PerEntry,
    /// One sweep over the block assignments serving all neighborhood
    /// assignments at once (they differ only in the right-hand sides).
    Package,
}

/// Stored h-function of an eliminated block: a table over the assignments
/// of `scope` holding the optimal local contribution, or `None` where no
/// feasible local completion exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableComponent {
    /// Sorted ascending; all scope variables are alive at creation time.
    pub scope: Vec<usize>,
    /// Indexed by the packed scope pattern; length `2^scope.len()`.
    pub values: Vec<Option<i64>>,
    /// Elimination step that produced this component.
    pub origin: usize,
}

/// Optimal local solution of one table entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalOptimum {
    pub value: i64,
    /// Packed assignment of the block variables (big-endian over the
    /// sorted block).
    pub pattern: u64,
}

/// Per-block elimination table: for every assignment of the neighborhood,
/// the optimal block contribution and the block assignment achieving it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalTable {
    pub block: Vec<usize>,
    pub neighborhood: Vec<usize>,
    /// Indexed by the packed neighborhood pattern; length `2^|Nb|`.
    pub entries: Vec<Option<LocalOptimum>>,
}

impl LocalTable {
    /// Textual dump in the layout used for tracing: one row per
    /// neighborhood assignment with its h-value and local optimum.
    pub fn render(&self, display_index: usize) -> String {
        let mut out = String::new();
        write!(out, "table {display_index} block {}", var_list(&self.block)).unwrap();
        writeln!(out, " nb {}", var_list(&self.neighborhood)).unwrap();
        out.push_str("nb | h | opt\n");
        let width = self.neighborhood.len();
        for (key, entry) in self.entries.iter().enumerate() {
            let nb_bits = if width == 0 {
                "-".to_string()
            } else {
                pattern_string(key as u64, width)
            };
            match entry {
                Some(opt) => writeln!(
                    out,
                    "{nb_bits} | {} | {}",
                    opt.value,
                    pattern_string(opt.pattern, self.block.len())
                )
                .unwrap(),
                None => writeln!(out, "{nb_bits} | infeasible | -").unwrap(),
            }
        }
        out
    }
}

fn var_list(vars: &[usize]) -> String {
    if vars.is_empty() {
        return "-".to_string();
    }
    let mut out = String::new();
    for (i, &v) in vars.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "x{}", v + 1).unwrap();
    }
    out
}

/// Bit string of a packed pattern, first variable first.
pub fn pattern_string(pattern: u64, len: usize) -> String {
    (0..len)
        .map(|t| {
            if (pattern >> (len - 1 - t)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Ordered result of the forward pass; enables the backward pass.
#[derive(Debug, Clone)]
pub struct EliminationRecord {
    pub n: usize,
    /// One table per block, in elimination order. The last table's
    /// neighborhood is empty.
    pub tables: Vec<LocalTable>,
    /// Optimal objective, or `None` when the instance is infeasible.
    pub final_value: Option<i64>,
    pub stats: SolveStats,
}

impl EliminationRecord {
    /// Trace dump of every table plus the final value.
    pub fn render_trace(&self) -> String {
        let mut out = String::new();
        for (j, table) in self.tables.iter().enumerate() {
            out.push_str(&table.render(j + 1));
        }
        match self.final_value {
            Some(v) => writeln!(out, "final {v}").unwrap(),
            None => out.push_str("final infeasible\n"),
        }
        out
    }
}

/// One block subproblem with the neighborhood assignment substituted in:
/// the decision variables are exactly the block, constraints carry reduced
/// right-hand sides, and consumed table components are restricted to their
/// block-side bits.
#[derive(Debug, Clone)]
pub struct LocalSubproblem {
    /// Sorted ascending.
    pub block: Vec<usize>,
    /// Owned objective coefficients, one per block position. Coefficients of
    /// neighborhood variables are never included; they belong to the blocks
    /// containing those variables.
    pub objective: Vec<i64>,
    pub constraints: Vec<ReducedConstraint>,
    pub components: Vec<FixedComponent>,
}

/// Constraint restricted to the block: `sum coeffs <= rhs` where `rhs`
/// already accounts for the fixed neighborhood variables.
#[derive(Debug, Clone)]
pub struct ReducedConstraint {
    /// `(block position, coefficient)` pairs, positions ascending.
    pub coeffs: Vec<(usize, i64)>,
    pub rhs: i64,
}

/// Table component with all non-block scope variables fixed; what remains
/// is a function of the listed block positions.
#[derive(Debug, Clone)]
pub struct FixedComponent {
    /// Block positions the component still depends on, ascending.
    pub positions: Vec<usize>,
    /// Indexed by the packed pattern over `positions`; length
    /// `2^positions.len()`.
    pub values: Vec<Option<i64>>,
}

impl FixedComponent {
    /// Value under a complete block assignment (indexed by position).
    pub fn value_at(&self, bits: &[bool]) -> Option<i64> {
        let p = self.positions.len();
        let mut key = 0usize;
        for (t, &pos) in self.positions.iter().enumerate() {
            if bits[pos] {
                key |= 1 << (p - 1 - t);
            }
        }
        self.values[key]
    }

    /// Largest value consistent with the first `depth` decided positions;
    /// `None` when every consistent entry is infeasible. Positions
    /// `>= depth` are free.
    pub fn max_given_prefix(&self, bits: &[bool], depth: usize) -> Option<i64> {
        let p = self.positions.len();
        let det = self.positions.partition_point(|&pos| pos < depth);
        let mut base = 0usize;
        for (t, &pos) in self.positions[..det].iter().enumerate() {
            if bits[pos] {
                base |= 1 << (p - 1 - t);
            }
        }
        // Free positions occupy the low bits, so the candidates form one
        // contiguous slice.
        let span = 1usize << (p - det);
        self.values[base..base + span]
            .iter()
            .flatten()
            .copied()
            .max()
    }
}

/// Blocks, neighborhood widths, and table sizes of a dry-run elimination:
/// simulates the graph side only, without solving anything.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WidthRow {
    pub block: usize,
    pub width: usize,
    pub table_size: u128,
}

pub fn table_width_report(
    instance: &IlpInstance,
    partition: &OrderedPartition,
) -> Result<Vec<WidthRow>, SolveError> {
    partition.validate(instance.n())?;
    let mut graph = InteractionGraph::from_instance(instance);
    let mut rows = Vec::with_capacity(partition.len());
    for (j, block) in partition.blocks().iter().enumerate() {
        let nb = graph.block_neighborhood(block)?;
        rows.push(WidthRow {
            block: j,
            width: nb.len(),
            table_size: 1u128 << nb.len().min(127),
        });
        graph.eliminate_block(block)?;
    }
    Ok(rows)
}

/// Forward part: eliminates the blocks in partition order, building one
/// [`LocalTable`] per block. The final value is the unique entry of the
/// last (neighborhood-free) table.
pub fn forward(
    instance: &IlpInstance,
    partition: &OrderedPartition,
    solver: &LocalSolver,
    mode: BlockSolveMode,
) -> Result<EliminationRecord, SolveError> {
    let n = instance.n();
    partition.validate(n)?;

    let mut graph = InteractionGraph::from_instance(instance);
    let mut pool: Vec<TableComponent> = Vec::new();
    let mut retired = vec![false; instance.m()];
    let mut in_block = vec![false; n];
    let mut tables = Vec::with_capacity(partition.len());
    let mut stats = SolveStats::default();

    for (j, block) in partition.blocks().iter().enumerate() {
        let nb = graph.block_neighborhood(block)?;
        let width = nb.len();
        if width > solver.limits.width_cap as usize {
            return Err(SolveError::WidthCapExceeded {
                width,
                cap: solver.limits.width_cap,
            });
        }

        for &v in block {
            in_block[v] = true;
        }
        // U_j: the not-yet-retired constraints touching this block.
        let mut rows: Vec<&crate::model::Constraint> = Vec::new();
        for (i, con) in instance.constraints().iter().enumerate() {
            if !retired[i] && con.vars().any(|v| in_block[v]) {
                retired[i] = true;
                rows.push(con);
            }
        }
        // Consume every stored table whose scope the subproblem can cover,
        // i.e. scope ⊆ block ∪ neighborhood. Scope-free components are plain
        // constants and fold into the next block the same way. Entries whose
        // scope lies entirely in the neighborhood shift each h-value without
        // affecting the argmax, which keeps the tables cumulative.
        let mut in_context = in_block.clone();
        for &v in &nb {
            in_context[v] = true;
        }
        let mut consumed = Vec::new();
        let mut kept = Vec::new();
        for comp in pool.drain(..) {
            if comp.scope.iter().all(|&v| in_context[v]) {
                consumed.push(comp);
            } else {
                kept.push(comp);
            }
        }
        pool = kept;
        for &v in block {
            in_block[v] = false;
        }

        let pkg = BlockPackage::build(n, block, &nb, instance.objective(), &rows, consumed)?;
        let table = match mode {
            BlockSolveMode::Package => {
                let (table, nodes) = solve_block_package(&pkg, solver.strategy, &solver.limits)?;
                stats.nodes += nodes;
                table
            }
            BlockSolveMode::PerEntry => {
                let mut entries = vec![None; 1usize << width];
                for tau in 0..(1u64 << width) {
                    let sub = pkg.instantiate(tau);
                    let local = solve_local(&sub, solver.strategy, &solver.limits)?;
                    stats.nodes += local.nodes;
                    entries[tau as usize] = local.best;
                }
                LocalTable {
                    block: block.clone(),
                    neighborhood: nb.clone(),
                    entries,
                }
            }
        };
        stats.table_entries += table.entries.len() as u64;

        pool.push(TableComponent {
            scope: nb,
            values: table.entries.iter().map(|e| e.map(|o| o.value)).collect(),
            origin: j,
        });
        tables.push(table);
        graph.eliminate_block(block)?;
    }

    debug_assert_eq!(graph.alive_count(), 0);
    debug_assert!(retired.iter().all(|&r| r));
    // Exactly the last block's component remains, and its scope is empty
    // because nothing else was alive when that block was eliminated.
    if pool.len() != 1 || !pool[0].scope.is_empty() {
        return Err(SolveError::Internal(
            "table components left over after the last elimination".into(),
        ));
    }
    let final_value = pool[0].values[0];

    Ok(EliminationRecord {
        n,
        tables,
        final_value,
        stats,
    })
}

/// Backward part: walks the tables in reverse elimination order, reading
/// each neighborhood assignment off the already-fixed variables and adopting
/// the stored local optimum.
pub fn backward(record: &EliminationRecord) -> Result<Assignment, SolveError> {
    if record.final_value.is_none() {
        return Err(SolveError::InfeasibleRecord);
    }
    let mut assignment = Assignment::undefined(record.n);
    for table in record.tables.iter().rev() {
        let width = table.neighborhood.len();
        let mut key = 0usize;
        for (t, &v) in table.neighborhood.iter().enumerate() {
            let bit = assignment.get(v).ok_or_else(|| {
                SolveError::Internal(format!("backward pass hit undefined variable x{}", v + 1))
            })?;
            if bit {
                key |= 1 << (width - 1 - t);
            }
        }
        let entry = table.entries[key].as_ref().ok_or_else(|| {
            SolveError::Internal("backward pass hit an infeasible table entry".into())
        })?;
        let len = table.block.len();
        for (t, &v) in table.block.iter().enumerate() {
            assignment.set(v, (entry.pattern >> (len - 1 - t)) & 1 == 1);
        }
    }
    debug_assert!(assignment.is_complete());
    Ok(assignment)
}

/// Forward plus backward: the complete block local elimination solve.
/// The returned assignment always re-evaluates to the claimed objective.
pub fn solve_lea(
    instance: &IlpInstance,
    partition: &OrderedPartition,
    solver: &LocalSolver,
    mode: BlockSolveMode,
) -> Result<Solution, SolveError> {
    let start = Instant::now();
    let record = forward(instance, partition, solver, mode)?;
    let mut stats = record.stats;
    match record.final_value {
        None => {
            stats.wall = start.elapsed();
            Ok(Solution::infeasible(stats))
        }
        Some(value) => {
            let assignment = backward(&record)?;
            let (feasible, objective) = instance.evaluate(&assignment)?;
            if !feasible || objective != value {
                return Err(SolveError::Internal(format!(
                    "recovered assignment evaluates to ({feasible}, {objective}), expected (true, {value})"
                )));
            }
            stats.wall = start.elapsed();
            Ok(Solution::optimal(assignment, value, stats))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_instance;
    use crate::subsolver::{solve_monolithic, Strategy};

    fn example_instance() -> IlpInstance {
        parse_instance(crate::model::tests::EXAMPLE_FILE).unwrap()
    }

    fn example_partition() -> OrderedPartition {
        OrderedPartition::new(vec![vec![4], vec![0, 1, 3], vec![5, 6], vec![2]])
    }

    fn entry(table: &LocalTable, key: usize) -> (i64, u64) {
        let opt = table.entries[key].unwrap();
        (opt.value, opt.pattern)
    }

    #[test]
    fn forward_reproduces_example_tables() {
        let record = forward(
            &example_instance(),
            &example_partition(),
            &LocalSolver::default(),
            BlockSolveMode::PerEntry,
        )
        .unwrap();
        assert_eq!(record.tables.len(), 4);

        // Block {x5}, neighborhood {x2}: h(0) = 4 with x5 = 1, h(1) = 0 with x5 = 0.
        let t1 = &record.tables[0];
        assert_eq!(t1.neighborhood, vec![1]);
        assert_eq!(entry(t1, 0), (4, 0b1));
        assert_eq!(entry(t1, 1), (0, 0b0));

        // Block {x1,x2,x4}, neighborhood {x3}: h(0) = 11 at (1,0,1), h(1) = 6 at (1,0,0).
        let t2 = &record.tables[1];
        assert_eq!(t2.neighborhood, vec![2]);
        assert_eq!(entry(t2, 0), (11, 0b101));
        assert_eq!(entry(t2, 1), (6, 0b100));

        // Block {x6,x7}, neighborhood {x3}: h(0) = 18 at (1,1), h(1) = 12 at (1,0).
        let t3 = &record.tables[2];
        assert_eq!(t3.neighborhood, vec![2]);
        assert_eq!(entry(t3, 0), (18, 0b11));
        assert_eq!(entry(t3, 1), (12, 0b10));

        // Block {x3}, empty neighborhood: final value 18 with x3 = 0.
        let t4 = &record.tables[3];
        assert!(t4.neighborhood.is_empty());
        assert_eq!(entry(t4, 0), (18, 0b0));
        assert_eq!(record.final_value, Some(18));
    }

    #[test]
    fn forward_single_negative_variable() {
        let inst = parse_instance("ilp 1 0\nobj -3\n").unwrap();
        let record = forward(
            &inst,
            &OrderedPartition::singletons(1),
            &LocalSolver::default(),
            BlockSolveMode::PerEntry,
        )
        .unwrap();
        assert_eq!(record.final_value, Some(0));
        assert_eq!(entry(&record.tables[0], 0), (0, 0));
    }

    #[test]
    fn backward_recovers_example_solution() {
        let record = forward(
            &example_instance(),
            &example_partition(),
            &LocalSolver::default(),
            BlockSolveMode::PerEntry,
        )
        .unwrap();
        let assignment = backward(&record).unwrap();
        assert_eq!(assignment.bitstring(), "1001111");
    }

    #[test]
    fn backward_on_single_block_is_the_stored_optimum() {
        let inst = parse_instance("ilp 2 1\nobj 3 4\ncon 1 2 1:1 2:1\n").unwrap();
        let partition = OrderedPartition::new(vec![vec![0, 1]]);
        let record = forward(
            &inst,
            &partition,
            &LocalSolver::default(),
            BlockSolveMode::PerEntry,
        )
        .unwrap();
        let assignment = backward(&record).unwrap();
        assert_eq!(assignment.bitstring(), "01");
        assert_eq!(record.final_value, Some(4));
    }

    #[test]
    fn backward_consistency_on_random_instances() {
        let mut rng = crate::generator::SplitMix64::new(51);
        for _ in 0..20 {
            let n = 10;
            let objective: Vec<i64> = (0..n).map(|_| rng.next_in_range(-8, 8)).collect();
            let mut constraints = Vec::with_capacity(4);
            for _ in 0..4 {
                let mut support = Vec::new();
                for v in 0..n {
                    if rng.next_u64().is_multiple_of(3) {
                        support.push((v, rng.next_in_range(-5, 8)));
                    }
                }
                if support.is_empty() {
                    support.push((0, 1));
                }
                constraints.push(crate::model::Constraint::new(
                    support,
                    rng.next_in_range(0, 12),
                ));
            }
            let inst = IlpInstance::new(n, objective, constraints, None).unwrap();
            let partition =
                OrderedPartition::new(vec![vec![0, 3, 7], vec![1, 4], vec![2, 5, 8], vec![6, 9]]);
            let record = forward(
                &inst,
                &partition,
                &LocalSolver::default(),
                BlockSolveMode::PerEntry,
            )
            .unwrap();
            if let Some(value) = record.final_value {
                let assignment = backward(&record).unwrap();
                assert_eq!(inst.evaluate(&assignment).unwrap(), (true, value));
            }
        }
    }

    #[test]
    fn backward_rejects_infeasible_record() {
        let inst = parse_instance("ilp 1 1\nobj 1\ncon -1 1 1:1\n").unwrap();
        let record = forward(
            &inst,
            &OrderedPartition::singletons(1),
            &LocalSolver::default(),
            BlockSolveMode::PerEntry,
        )
        .unwrap();
        assert_eq!(record.final_value, None);
        assert!(matches!(
            backward(&record),
            Err(SolveError::InfeasibleRecord)
        ));
    }

    #[test]
    fn solve_lea_on_example() {
        let solution = solve_lea(
            &example_instance(),
            &example_partition(),
            &LocalSolver::default(),
            BlockSolveMode::PerEntry,
        )
        .unwrap();
        assert_eq!(solution.objective, Some(18));
        assert_eq!(solution.assignment.unwrap().bitstring(), "1001111");
    }

    #[test]
    fn solve_lea_reports_infeasible() {
        let inst = parse_instance("ilp 2 1\nobj 1 1\ncon -1 1 1:1\n").unwrap();
        let solution = solve_lea(
            &inst,
            &OrderedPartition::singletons(2),
            &LocalSolver::default(),
            BlockSolveMode::PerEntry,
        )
        .unwrap();
        assert_eq!(solution.status, crate::model::Status::Infeasible);
    }

    #[test]
    fn singleton_partition_matches_monolithic() {
        let inst = example_instance();
        let mono = solve_monolithic(&inst, Strategy::Exhaustive, &Default::default()).unwrap();
        let lea = solve_lea(
            &inst,
            &OrderedPartition::singletons(7),
            &LocalSolver::default(),
            BlockSolveMode::PerEntry,
        )
        .unwrap();
        assert_eq!(lea.objective, mono.objective);
    }

    #[test]
    fn width_report_for_example_partition() {
        let rows = table_width_report(&example_instance(), &example_partition()).unwrap();
        let widths: Vec<usize> = rows.iter().map(|r| r.width).collect();
        let sizes: Vec<u128> = rows.iter().map(|r| r.table_size).collect();
        assert_eq!(widths, vec![1, 1, 1, 0]);
        assert_eq!(sizes, vec![2, 2, 2, 1]);
    }

    #[test]
    fn width_report_on_edgeless_graph() {
        let inst = parse_instance("ilp 3 0\nobj 1 1 1\n").unwrap();
        let rows = table_width_report(&inst, &OrderedPartition::singletons(3)).unwrap();
        assert!(rows.iter().all(|r| r.width == 0));
    }

    #[test]
    fn width_report_on_staircase_instance() {
        let params = crate::generator::GeneratorParams::new(36, 6, 6, 2, 5);
        let inst = crate::generator::generate(&params).unwrap();
        let partition = crate::generator::staircase_partition(inst.meta().unwrap());
        let rows = table_width_report(&inst, &partition).unwrap();
        let widths: Vec<usize> = rows.iter().map(|r| r.width).collect();
        assert_eq!(widths, vec![2, 2, 2, 2, 2, 0]);
    }

    #[test]
    fn forward_rejects_invalid_partition() {
        let partition = OrderedPartition::new(vec![vec![0, 1], vec![1, 2]]);
        let err = forward(
            &parse_instance("ilp 3 0\nobj 1 1 1\n").unwrap(),
            &partition,
            &LocalSolver::default(),
            BlockSolveMode::PerEntry,
        )
        .unwrap_err();
        assert!(matches!(err, SolveError::InvalidPartition(_)));
    }

    #[test]
    fn trace_matches_example_tables() {
        let record = forward(
            &example_instance(),
            &example_partition(),
            &LocalSolver::default(),
            BlockSolveMode::PerEntry,
        )
        .unwrap();
        let trace = record.render_trace();
        let expected = "\
table 1 block x5 nb x2
nb | h | opt
0 | 4 | 1
1 | 0 | 0
table 2 block x1,x2,x4 nb x3
nb | h | opt
0 | 11 | 101
1 | 6 | 100
table 3 block x6,x7 nb x3
nb | h | opt
0 | 18 | 11
1 | 12 | 10
table 4 block x3 nb -
nb | h | opt
- | 18 | 0
final 18
";
        assert_eq!(trace, expected);
    }

    #[test]
    fn package_mode_matches_per_entry_on_example() {
        let inst = example_instance();
        let partition = example_partition();
        let solver = LocalSolver::default();
        let per_entry = forward(&inst, &partition, &solver, BlockSolveMode::PerEntry).unwrap();
        let package = forward(&inst, &partition, &solver, BlockSolveMode::Package).unwrap();
        assert_eq!(per_entry.tables, package.tables);
        assert_eq!(per_entry.final_value, package.final_value);
    }

    #[test]
    fn width_cap_is_enforced() {
        // A dense instance where the first singleton's neighborhood is huge.
        let mut text = String::from("ilp 8 1\nobj 1 1 1 1 1 1 1 1\ncon 8 8");
        for j in 1..=8 {
            text.push_str(&format!(" {j}:1"));
        }
        text.push('\n');
        let inst = parse_instance(&text).unwrap();
        let mut solver = LocalSolver::default();
        solver.limits.width_cap = 3;
        let err = forward(
            &inst,
            &OrderedPartition::singletons(8),
            &solver,
            BlockSolveMode::PerEntry,
        )
        .unwrap_err();
        assert!(matches!(err, SolveError::WidthCapExceeded { width: 7, .. }));
    }
}
