//! Solver toolkit for sparse binary integer linear programs built around
//! block local elimination: nonserial dynamic programming over the variable
//! interaction graph.
//!
//! The pieces:
//!
//! * [`model`] — problem/solution types, exact evaluation, and the canonical
//!   text file formats;
//! * [`graph`] — interaction graphs, the elimination game, ordered
//!   partitions, indistinguishable-vertex blocks, quotient graphs, DOT
//!   output;
//! * [`elimination`] — the forward table-building pass and the backward
//!   solution-recovery pass;
//! * [`subsolver`] — exact solvers for the block subproblems (complete and
//!   implicit enumeration), the amortized package solver, and the
//!   monolithic baseline;
//! * [`generator`] — deterministic quasi-block instance generation with the
//!   canonical staircase elimination partition.

pub mod elimination;
pub mod generator;
pub mod graph;
pub mod model;
pub mod subsolver;

pub use elimination::{
    backward, forward, solve_lea, table_width_report, BlockSolveMode, EliminationRecord,
    LocalOptimum, LocalTable, TableComponent,
};
pub use generator::{generate, staircase_partition, GeneratorParams, SplitMix64};
pub use graph::{
    find_indistinguishable_blocks, quotient_graph, InteractionGraph, OrderedPartition,
    QuotientGraph,
};
pub use model::{
    parse_instance, serialize_instance, serialize_solution, Assignment, Constraint, IlpInstance,
    Solution, SolveStats, StaircaseMeta, Status,
};
pub use subsolver::{
    solve_block_package, solve_local, solve_local_bnb, solve_local_exhaustive, solve_monolithic,
    BlockPackage, Limits, LocalSolver, SolveError, Strategy,
};
