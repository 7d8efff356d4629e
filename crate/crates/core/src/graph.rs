//! Variable interaction graphs, the elimination game, ordered partitions,
//! indistinguishable-vertex blocks, and quotient graphs.
//!
//! Two variables interact when they share a constraint, so every constraint
//! support induces a clique. Eliminating a block first turns the block's
//! neighborhood into a clique (the fill of the elimination game) and then
//! removes the block's vertices.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::IlpInstance;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex x{} has already been eliminated", .0 + 1)]
    DeadVertex(usize),
    #[error("vertex x{} out of range", .0 + 1)]
    OutOfRange(usize),
}

/// First violation found when checking an ordered partition.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionViolation {
    #[error("block {block} is empty")]
    EmptyBlock { block: usize },
    #[error("variable x{} appears in more than one block", var + 1)]
    Overlap { var: usize },
    #[error("variable x{} is not covered by any block", var + 1)]
    Missing { var: usize },
    #[error("variable x{} out of range 1..={n}", var + 1)]
    OutOfRange { var: usize, n: usize },
}

/// Undirected graph on variable indices with an alive-vertex mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionGraph {
    n: usize,
    adj: Vec<BTreeSet<usize>>,
    alive: Vec<bool>,
    alive_count: usize,
}

impl InteractionGraph {
    pub fn empty(n: usize) -> Self {
        InteractionGraph {
            n,
            adj: vec![BTreeSet::new(); n],
            alive: vec![true; n],
            alive_count: n,
        }
    }

    /// Edge {u, v} exists iff some constraint support contains both.
    pub fn from_instance(instance: &IlpInstance) -> Self {
        let mut graph = Self::empty(instance.n());
        for con in instance.constraints() {
            let vars: Vec<usize> = con.vars().collect();
            graph.add_clique(&vars);
        }
        graph
    }

    /// Test helper: graph from an explicit edge list.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut graph = Self::empty(n);
        for &(u, v) in edges {
            graph.add_edge(u, v);
        }
        graph
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alive_count(&self) -> usize {
        self.alive_count
    }

    pub fn is_alive(&self, v: usize) -> bool {
        self.alive[v]
    }

    pub fn alive_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&v| self.alive[v])
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        debug_assert!(self.alive[u] && self.alive[v]);
        if u != v {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
        }
    }

    pub fn add_clique(&mut self, vars: &[usize]) {
        for (i, &u) in vars.iter().enumerate() {
            for &v in &vars[i + 1..] {
                self.add_edge(u, v);
            }
        }
    }

    /// Sorted edge list (u < v) over alive vertices.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for u in 0..self.n {
            if !self.alive[u] {
                continue;
            }
            for &v in self.adj[u].range(u + 1..) {
                edges.push((u, v));
            }
        }
        edges
    }

    /// Union of the block members' neighborhoods minus the block itself,
    /// restricted to alive vertices. Returned sorted ascending.
    pub fn block_neighborhood(&self, block: &[usize]) -> Result<Vec<usize>, GraphError> {
        let mut in_block = vec![false; self.n];
        for &v in block {
            if v >= self.n {
                return Err(GraphError::OutOfRange(v));
            }
            if !self.alive[v] {
                return Err(GraphError::DeadVertex(v));
            }
            in_block[v] = true;
        }
        let mut nb = BTreeSet::new();
        for &v in block {
            for &u in &self.adj[v] {
                if !in_block[u] {
                    debug_assert!(self.alive[u]);
                    nb.insert(u);
                }
            }
        }
        Ok(nb.into_iter().collect())
    }

    /// One step of the elimination game: the block's neighborhood becomes a
    /// clique, then the block's vertices and their incident edges are removed.
    pub fn eliminate_block(&mut self, block: &[usize]) -> Result<(), GraphError> {
        let nb = self.block_neighborhood(block)?;
        self.add_clique(&nb);
        for &v in block {
            let neighbors = std::mem::take(&mut self.adj[v]);
            for u in neighbors {
                self.adj[u].remove(&v);
            }
            self.alive[v] = false;
            self.alive_count -= 1;
        }
        Ok(())
    }

    /// DOT rendering with vertices labeled `x<j>` (1-based).
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph interaction {\n");
        for v in self.alive_vertices() {
            writeln!(out, "  x{};", v + 1).unwrap();
        }
        for (u, v) in self.edges() {
            writeln!(out, "  x{} -- x{};", u + 1, v + 1).unwrap();
        }
        out.push_str("}\n");
        out
    }
}

/// Ordered sequence of variable blocks; each block's members are kept
/// sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedPartition {
    blocks: Vec<Vec<usize>>,
}

impl OrderedPartition {
    pub fn new(blocks: Vec<Vec<usize>>) -> Self {
        let blocks = blocks
            .into_iter()
            .map(|mut block| {
                block.sort_unstable();
                block
            })
            .collect();
        OrderedPartition { blocks }
    }

    /// Trivial partition into n singletons in index order.
    pub fn singletons(n: usize) -> Self {
        OrderedPartition {
            blocks: (0..n).map(|v| vec![v]).collect(),
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Checks disjointness, nonemptiness, and coverage of `0..n`, reporting
    /// the first violation found.
    pub fn validate(&self, n: usize) -> Result<(), PartitionViolation> {
        let mut seen = vec![false; n];
        for (idx, block) in self.blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(PartitionViolation::EmptyBlock { block: idx });
            }
            for &v in block {
                if v >= n {
                    return Err(PartitionViolation::OutOfRange { var: v, n });
                }
                if seen[v] {
                    return Err(PartitionViolation::Overlap { var: v });
                }
                seen[v] = true;
            }
        }
        if let Some(var) = seen.iter().position(|&s| !s) {
            return Err(PartitionViolation::Missing { var });
        }
        Ok(())
    }
}

/// Graph on block indices; edge (i, k) iff some vertex of block i is
/// adjacent to some vertex of block k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientGraph {
    p: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl QuotientGraph {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    /// DOT rendering with blocks labeled `X<l>` (1-based).
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph quotient {\n");
        for l in 0..self.p {
            writeln!(out, "  X{};", l + 1).unwrap();
        }
        for &(i, k) in &self.edges {
            writeln!(out, "  X{} -- X{};", i + 1, k + 1).unwrap();
        }
        out.push_str("}\n");
        out
    }
}

/// Quotient of `graph` by `partition`. The partition must be valid over the
/// alive vertices of `graph`.
pub fn quotient_graph(
    graph: &InteractionGraph,
    partition: &OrderedPartition,
) -> Result<QuotientGraph, PartitionViolation> {
    let n = graph.n();
    let mut block_of = vec![usize::MAX; n];
    for (idx, block) in partition.blocks().iter().enumerate() {
        if block.is_empty() {
            return Err(PartitionViolation::EmptyBlock { block: idx });
        }
        for &v in block {
            if v >= n || !graph.is_alive(v) {
                return Err(PartitionViolation::OutOfRange { var: v, n });
            }
            if block_of[v] != usize::MAX {
                return Err(PartitionViolation::Overlap { var: v });
            }
            block_of[v] = idx;
        }
    }
    if let Some(var) = graph.alive_vertices().find(|&v| block_of[v] == usize::MAX) {
        return Err(PartitionViolation::Missing { var });
    }

    let mut edges = BTreeSet::new();
    for u in graph.alive_vertices() {
        for &v in graph.neighbors(u) {
            let (bu, bv) = (block_of[u], block_of[v]);
            if bu != bv {
                edges.insert((bu.min(bv), bu.max(bv)));
            }
        }
    }
    Ok(QuotientGraph {
        p: partition.len(),
        edges,
    })
}

/// Groups alive vertices by closed neighborhood. Two vertices share a block
/// iff `adj(u) ∪ {u} == adj(v) ∪ {v}`; blocks are ordered by smallest member.
pub fn find_indistinguishable_blocks(graph: &InteractionGraph) -> OrderedPartition {
    let mut groups: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for v in graph.alive_vertices() {
        let mut closed: Vec<usize> = graph.neighbors(v).iter().copied().collect();
        let pos = closed.binary_search(&v).unwrap_err();
        closed.insert(pos, v);
        match groups.iter_mut().find(|(key, _)| *key == closed) {
            Some((_, members)) => members.push(v),
            None => groups.push((closed, vec![v])),
        }
    }
    let mut blocks: Vec<Vec<usize>> = groups.into_iter().map(|(_, members)| members).collect();
    blocks.sort_by_key(|block| block[0]);
    OrderedPartition::new(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_instance;

    fn example_graph() -> InteractionGraph {
        let inst = parse_instance(crate::model::tests::EXAMPLE_FILE).unwrap();
        InteractionGraph::from_instance(&inst)
    }

    /// Partition ({x5}, {x1,x2,x4}, {x6,x7}, {x3}) in 0-based indices.
    fn example_partition() -> OrderedPartition {
        OrderedPartition::new(vec![vec![4], vec![0, 1, 3], vec![5, 6], vec![2]])
    }

    #[test]
    fn example_instance_edges() {
        let graph = example_graph();
        let expected = vec![
            (0, 1),
            (0, 2),
            (1, 2),
            (1, 3),
            (1, 4),
            (2, 3),
            (2, 5),
            (2, 6),
            (5, 6),
        ];
        assert_eq!(graph.edges(), expected);
    }

    #[test]
    fn no_constraints_means_no_edges() {
        let inst = parse_instance("ilp 3 0\nobj 1 1 1\n").unwrap();
        let graph = InteractionGraph::from_instance(&inst);
        assert!(graph.edges().is_empty());
    }

    #[test]
    fn single_constraint_induces_clique() {
        let inst = parse_instance("ilp 3 1\nobj 1 1 1\ncon 2 3 1:1 2:1 3:1\n").unwrap();
        let graph = InteractionGraph::from_instance(&inst);
        assert_eq!(graph.edges(), vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn neighborhood_of_x5_is_x2() {
        let graph = example_graph();
        assert_eq!(graph.block_neighborhood(&[4]).unwrap(), vec![1]);
    }

    #[test]
    fn neighborhood_after_elimination() {
        let mut graph = example_graph();
        graph.eliminate_block(&[4]).unwrap();
        assert_eq!(graph.block_neighborhood(&[0, 1, 3]).unwrap(), vec![2]);
    }

    #[test]
    fn neighborhood_of_everything_is_empty() {
        let graph = example_graph();
        let all: Vec<usize> = (0..7).collect();
        assert!(graph.block_neighborhood(&all).unwrap().is_empty());
    }

    #[test]
    fn neighborhood_rejects_dead_vertex() {
        let mut graph = example_graph();
        graph.eliminate_block(&[4]).unwrap();
        assert_eq!(
            graph.block_neighborhood(&[4]),
            Err(GraphError::DeadVertex(4))
        );
        assert_eq!(graph.eliminate_block(&[4]), Err(GraphError::DeadVertex(4)));
    }

    #[test]
    fn eliminate_creates_fill_edge_on_path() {
        // Path 1 - 2 - 3: eliminating the middle vertex fills (1, 3).
        let mut graph = InteractionGraph::from_edges(3, &[(0, 1), (1, 2)]);
        graph.eliminate_block(&[1]).unwrap();
        assert_eq!(graph.edges(), vec![(0, 2)]);
        assert!(!graph.is_alive(1));
    }

    #[test]
    fn eliminate_keeps_triangle_edge() {
        let mut graph = InteractionGraph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]);
        graph.eliminate_block(&[1]).unwrap();
        assert_eq!(graph.edges(), vec![(0, 2)]);
        assert_eq!(graph.alive_count(), 2);
    }

    #[test]
    fn eliminate_x5_needs_no_fill() {
        let mut graph = example_graph();
        let before = graph.edges();
        graph.eliminate_block(&[4]).unwrap();
        let after = graph.edges();
        // Only edges incident to x5 disappeared; |Nb| = 1 means no fill.
        assert_eq!(
            after,
            before
                .into_iter()
                .filter(|&(u, v)| u != 4 && v != 4)
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn quotient_of_example_partition() {
        let graph = example_graph();
        let quotient = quotient_graph(&graph, &example_partition()).unwrap();
        let expected: BTreeSet<(usize, usize)> = [(0, 1), (1, 3), (2, 3)].into_iter().collect();
        assert_eq!(*quotient.edges(), expected);
    }

    #[test]
    fn quotient_of_singletons_is_original() {
        let graph = example_graph();
        let quotient = quotient_graph(&graph, &OrderedPartition::singletons(7)).unwrap();
        let edges: Vec<(usize, usize)> = quotient.edges().iter().copied().collect();
        assert_eq!(edges, graph.edges());
    }

    #[test]
    fn quotient_of_single_block_has_no_edges() {
        let graph = example_graph();
        let partition = OrderedPartition::new(vec![(0..7).collect()]);
        let quotient = quotient_graph(&graph, &partition).unwrap();
        assert_eq!(quotient.p(), 1);
        assert!(quotient.edges().is_empty());
    }

    #[test]
    fn indistinguishable_blocks_of_example() {
        let graph = example_graph();
        let partition = find_indistinguishable_blocks(&graph);
        // x6 and x7 share the closed neighborhood {x3, x6, x7}.
        assert_eq!(
            partition.blocks(),
            &[vec![0], vec![1], vec![2], vec![3], vec![4], vec![5, 6]]
        );
    }

    #[test]
    fn indistinguishable_blocks_of_complete_graph() {
        let graph =
            InteractionGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let partition = find_indistinguishable_blocks(&graph);
        assert_eq!(partition.blocks(), &[vec![0, 1, 2, 3]]);
    }

    #[test]
    fn indistinguishable_blocks_of_edgeless_graph() {
        let graph = InteractionGraph::empty(3);
        let partition = find_indistinguishable_blocks(&graph);
        assert_eq!(partition.blocks(), &[vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn validate_accepts_example_partition() {
        assert_eq!(example_partition().validate(7), Ok(()));
    }

    #[test]
    fn validate_reports_overlap() {
        let partition = OrderedPartition::new(vec![vec![0, 1], vec![1, 2]]);
        assert_eq!(
            partition.validate(3),
            Err(PartitionViolation::Overlap { var: 1 })
        );
    }

    #[test]
    fn validate_reports_missing_coverage() {
        let partition = OrderedPartition::new(vec![vec![0], vec![2]]);
        assert_eq!(
            partition.validate(3),
            Err(PartitionViolation::Missing { var: 1 })
        );
    }

    #[test]
    fn dot_output_for_example() {
        let graph = example_graph();
        let dot = graph.to_dot();
        assert_eq!(dot.matches(" -- ").count(), 9);
        assert!(dot.contains("x1 -- x2;"));
        let quotient = quotient_graph(&graph, &example_partition()).unwrap();
        let dot = quotient.to_dot();
        assert_eq!(dot.matches(" -- ").count(), 3);
        assert!(dot.contains("X1 -- X2;"));
    }

    #[test]
    fn eliminating_all_blocks_empties_graph() {
        let mut graph = example_graph();
        for block in example_partition().blocks() {
            graph.eliminate_block(block).unwrap();
        }
        assert_eq!(graph.alive_count(), 0);
        assert!(graph.edges().is_empty());
    }
}
