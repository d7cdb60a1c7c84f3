//! Graphical criteria that certify two graphs have different Jacobian
//! matroids, each with the column set that exhibits the rank gap, plus the
//! cascade that runs them all next to the matroid oracle.
//!
//! A witness column set `S` always has strictly larger generic rank in one
//! graph than in the other; [`CriterionWitness::higher_rank_graph`] says which.

use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::digraph::{Digraph, GraphError, NodeSet};
use crate::jacobian::ColumnIndex;
use crate::matroid::{compare_oracles, ColumnSet, MatroidComparison, MatroidError, RankOracle, RankOracleConfig, Verdict};

/// Neighborhoods larger than this are not enumerated for parentally closed sets.
pub const PC_NEIGHBORHOOD_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CriterionError {
    #[error("graphs have different node counts ({left} and {right})")]
    NodeCountMismatch { left: usize, right: usize },
    #[error("precondition not met: {0}")]
    Precondition(&'static str),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
}

fn check_node_counts(g1: &Digraph, g2: &Digraph) -> Result<(), CriterionError> {
    if g1.node_count() != g2.node_count() {
        return Err(CriterionError::NodeCountMismatch { left: g1.node_count(), right: g2.node_count() });
    }
    Ok(())
}

/// A set `L` of neighbors of `anchor` with `pa(L) ∩ nb(anchor) ⊆ L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PcSet {
    anchor: usize,
    members: NodeSet,
}

impl PcSet {
    /// Checks that `members` are neighbors of `anchor` and parentally closed.
    pub fn new(g: &Digraph, anchor: usize, members: NodeSet) -> Result<Self, CriterionError> {
        let nb = g.neighbors(anchor)?;
        if !members.is_subset(nb) {
            return Err(CriterionError::Precondition("set contains a non-neighbor of the anchor"));
        }
        if !is_parentally_closed(g, anchor, members) {
            return Err(CriterionError::Precondition("set is not parentally closed"));
        }
        Ok(PcSet { anchor, members })
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn members(&self) -> NodeSet {
        self.members
    }
}

impl fmt::Display for PcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (w.r.t. {})", self.members, self.anchor)
    }
}

/// `pa(L) ∩ nb(i) ⊆ L`.
pub fn is_parentally_closed(g: &Digraph, i: usize, set: NodeSet) -> bool {
    g.pa_of_set(set).intersection(g.nb(i)).is_subset(set)
}

/// Parentally closed subsets of a neighborhood, by increasing size and then
/// lexicographically.
#[derive(Debug, Clone)]
pub struct PcSets<'a> {
    g: &'a Digraph,
    anchor: usize,
    neighbors: Vec<usize>,
    size: usize,
    combo: Option<Vec<usize>>,
}

impl<'a> PcSets<'a> {
    fn advance(&mut self) -> Option<NodeSet> {
        let m = self.neighbors.len();
        loop {
            if self.size > m {
                return None;
            }
            let next = match self.combo.take() {
                None => Some((0..self.size).collect::<Vec<_>>()),
                Some(mut c) => {
                    let k = self.size;
                    match (0..k).rev().find(|&p| c[p] < m - k + p) {
                        Some(p) => {
                            c[p] += 1;
                            for q in p + 1..k {
                                c[q] = c[q - 1] + 1;
                            }
                            Some(c)
                        }
                        None => None,
                    }
                }
            };
            match next {
                Some(c) => {
                    let set = c.iter().map(|&p| self.neighbors[p]).collect();
                    self.combo = Some(c);
                    return Some(set);
                }
                None => {
                    self.size += 1;
                    self.combo = None;
                }
            }
        }
    }
}

impl Iterator for PcSets<'_> {
    type Item = PcSet;

    fn next(&mut self) -> Option<PcSet> {
        loop {
            let set = self.advance()?;
            if is_parentally_closed(self.g, self.anchor, set) {
                return Some(PcSet { anchor: self.anchor, members: set });
            }
        }
    }
}

/// Every parentally closed set with respect to `i`, including `∅` and `nb(i)`.
pub fn pc_sets(g: &Digraph, i: usize) -> Result<PcSets<'_>, GraphError> {
    let neighbors = g.neighbors(i)?.to_vec();
    Ok(PcSets { g, anchor: i, neighbors, size: 0, combo: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CriterionKind {
    OutDegree,
    TransitiveTriangleFree,
    ParentallyClosed,
    AcyclicConstruction,
}

impl fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CriterionKind::OutDegree => "out-degree",
            CriterionKind::TransitiveTriangleFree => "transitive-triangle-free",
            CriterionKind::ParentallyClosed => "parentally-closed",
            CriterionKind::AcyclicConstruction => "acyclic-construction",
        })
    }
}

/// How the witness columns were built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "kebab-case")]
pub enum Construction {
    /// Different edge counts: adjacent pairs plus one diagonal of the larger graph.
    EdgeCount,
    /// Lower-bound set at the node in the graph with fewer children there.
    LowerBound,
    /// `i -> j` in one graph only, with common child `l` of `i` and `j` in the
    /// other: lower-bound set at `j` (with `K_ii` as extra diagonal) and
    /// `K_ll` swapped for `K_ij`.
    CommonChild { j: usize, l: usize },
    /// `i -> j` in one graph, `j -> i` in the other: lower-bound set at `j`
    /// with `K_ii` swapped for `K_ij` (or, when `j` is adjacent to every
    /// node, its nonadjacent pair column swapped for `K_ij`).
    ReversedEdge { j: usize },
    /// `i, j` adjacent in one graph only and without common children in the
    /// other: the single column `K_ij`.
    Adjacency { j: usize },
    /// `(S_E \ S_−) ∪ S_+` built from a parentally closed set.
    ParentallyClosed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionWitness {
    pub kind: CriterionKind,
    pub node: usize,
    pub pc_set: Option<PcSet>,
    pub columns: Option<ColumnSet>,
    /// The graph (1 or 2) in which `columns` has the smaller rank; for the
    /// parentally closed criterion this is the graph attaining the larger
    /// intersection `|ch(i) ∩ L|`.
    pub direction: u8,
    pub construction: Construction,
}

impl CriterionWitness {
    /// The graph (1 or 2) in which `columns` has the larger rank.
    pub fn higher_rank_graph(&self) -> u8 {
        3 - self.direction
    }
}

fn k(i: usize, j: usize) -> ColumnIndex {
    ColumnIndex::new(i, j)
}

fn adjacent_pair_columns(g: &Digraph) -> ColumnSet {
    g.edges().iter().map(|&(a, b)| k(a, b)).collect()
}

/// Smallest pair `x < y`, both different from `avoid`, that is nonadjacent in `g`.
fn first_nonadjacent_pair(g: &Digraph, avoid: usize) -> Option<(usize, usize)> {
    crate::digraph::unordered_pairs(g.node_count()).find(|&(x, y)| x != avoid && y != avoid && !g.is_adjacent(x, y))
}

/// A set of `|D|+1` columns avoiding every `K_i·` whose rank in `g` is at
/// least `|D| − |ch(i)| + 1`. `extra` is the diagonal added when `i` is not
/// adjacent to everything (smallest nonadjacent node by default).
///
/// `g` must not be complete.
pub fn lower_bound_columns(g: &Digraph, i: usize, extra: Option<usize>) -> ColumnSet {
    let n = g.node_count();
    let nb = g.nb(i);
    let mut s: ColumnSet = adjacent_pair_columns(g).iter().filter(|c| !c.touches(i)).collect();
    if nb.len() < n - 1 {
        s.extend(nb.iter().map(ColumnIndex::diagonal));
        let j0 = extra
            .or_else(|| g.nodes().find(|&v| v != i && !nb.contains(v)))
            .expect("some node is not adjacent to i");
        debug_assert!(j0 != i && !nb.contains(j0));
        s.insert(ColumnIndex::diagonal(j0));
    } else {
        s.extend(g.nodes().filter(|&v| v != i).map(ColumnIndex::diagonal));
        let (x, y) = first_nonadjacent_pair(g, i).expect("graph is not complete");
        s.insert(k(x, y));
    }
    s
}

/// `(S_E \ S_−) ∪ S_+` for anchor `i` and set `members`, with `S_E` and the
/// adjacencies taken from `other` (the graph expected to have the larger rank).
pub fn pc_columns(other: &Digraph, i: usize, members: NodeSet) -> ColumnSet {
    let n = other.node_count();
    if members == NodeSet::full(n).difference(NodeSet::singleton(i)) {
        return lower_bound_columns(other, i, None);
    }
    let nb = other.nb(i);
    let mut s: ColumnSet =
        adjacent_pair_columns(other).iter().filter(|c| !members.iter().any(|m| *c == k(i, m))).collect();
    s.extend(members.intersection(nb).iter().map(ColumnIndex::diagonal));
    let j0 = other.nodes().find(|&v| v != i && !members.contains(v)).expect("L misses some node");
    s.insert(ColumnIndex::diagonal(j0));
    s
}

/// Fires when some node has different out-degrees and at least one graph is
/// not complete; reports the smallest such node.
pub fn outdegree_criterion(g1: &Digraph, g2: &Digraph) -> Option<CriterionWitness> {
    if g1.node_count() != g2.node_count() || (g1.is_complete() && g2.is_complete()) {
        return None;
    }
    let i = g1.nodes().find(|&v| g1.out_degree(v) != g2.out_degree(v))?;
    let (direction, construction, columns) = if g1.edge_count() != g2.edge_count() {
        let (small, large) = if g1.edge_count() < g2.edge_count() { (1, g2) } else { (2, g1) };
        let mut s = adjacent_pair_columns(large);
        s.insert(ColumnIndex::diagonal(1));
        (small, Construction::EdgeCount, s)
    } else {
        let (direction, other) = if g1.out_degree(i) > g2.out_degree(i) { (1, g2) } else { (2, g1) };
        (direction, Construction::LowerBound, lower_bound_columns(other, i, None))
    };
    Some(CriterionWitness {
        kind: CriterionKind::OutDegree,
        node: i,
        pc_set: None,
        columns: Some(columns),
        direction,
        construction,
    })
}

/// Fires when both graphs are transitive-triangle-free, neither is complete,
/// and their edge sets differ.
pub fn ttf_criterion(g1: &Digraph, g2: &Digraph) -> Option<CriterionWitness> {
    if g1.node_count() != g2.node_count()
        || g1.is_complete()
        || g2.is_complete()
        || g1 == g2
        || !g1.is_transitive_triangle_free()
        || !g2.is_transitive_triangle_free()
    {
        return None;
    }
    if let Some(w) = outdegree_criterion(g1, g2) {
        return Some(CriterionWitness { kind: CriterionKind::TransitiveTriangleFree, ..w });
    }
    let i = g1.nodes().find(|&v| g1.ch(v) != g2.ch(v))?;
    let j = g1.ch(i).difference(g2.ch(i)).first()?;
    let (direction, construction, columns) = if g2.has_edge(j, i) {
        let mut s = lower_bound_columns(g2, j, None);
        if g2.nb(j).len() + 1 < g2.node_count() {
            s.remove(ColumnIndex::diagonal(i));
        } else {
            // `j` is adjacent to every node: the free column is the
            // nonadjacent pair, not a diagonal.
            let (x, y) = first_nonadjacent_pair(g2, j).expect("graph is not complete");
            s.remove(k(x, y));
        }
        s.insert(k(i, j));
        (1, Construction::ReversedEdge { j }, s)
    } else if let Some(l) = g2.ch(i).intersection(g2.ch(j)).first() {
        let mut s = lower_bound_columns(g2, j, Some(i));
        s.remove(ColumnIndex::diagonal(l));
        s.insert(k(i, j));
        (1, Construction::CommonChild { j, l }, s)
    } else {
        (2, Construction::Adjacency { j }, [k(i, j)].into_iter().collect())
    };
    Some(CriterionWitness {
        kind: CriterionKind::TransitiveTriangleFree,
        node: i,
        pc_set: None,
        columns: Some(columns),
        direction,
        construction,
    })
}

fn pc_witness(g1: &Digraph, g2: &Digraph, direction: u8, set: PcSet, kind: CriterionKind) -> CriterionWitness {
    let (mine, other) = if direction == 1 { (g1, g2) } else { (g2, g1) };
    debug_assert!(
        mine.ch(set.anchor).intersection(set.members).len() > other.ch(set.anchor).intersection(set.members).len()
    );
    CriterionWitness {
        kind,
        node: set.anchor,
        pc_set: Some(set),
        columns: Some(pc_columns(other, set.anchor, set.members)),
        direction,
        construction: Construction::ParentallyClosed,
    }
}

/// True if the parentally closed search would skip some node of either graph.
pub fn pc_search_truncated(g1: &Digraph, g2: &Digraph) -> bool {
    g1.nodes().any(|i| g1.nb(i).len() > PC_NEIGHBORHOOD_LIMIT || g2.nb(i).len() > PC_NEIGHBORHOOD_LIMIT)
}

/// Searches nodes in order and, per node, the parentally closed sets of the
/// first graph and then of the second, for `|ch_k(i) ∩ L| > |ch_{3−k}(i) ∩ L|`.
/// Requires both graphs non-complete. Nodes whose neighborhood exceeds
/// [`PC_NEIGHBORHOOD_LIMIT`] are skipped.
pub fn pc_criterion(g1: &Digraph, g2: &Digraph) -> Option<CriterionWitness> {
    if g1.node_count() != g2.node_count() || g1.is_complete() || g2.is_complete() {
        return None;
    }
    for i in g1.nodes() {
        for (direction, mine, other) in [(1, g1, g2), (2, g2, g1)] {
            if mine.nb(i).len() > PC_NEIGHBORHOOD_LIMIT {
                continue;
            }
            let hit = pc_sets(mine, i)
                .expect("node in range")
                .find(|set| mine.ch(i).intersection(set.members).len() > other.ch(i).intersection(set.members).len());
            if let Some(set) = hit {
                return Some(pc_witness(g1, g2, direction, set, CriterionKind::ParentallyClosed));
            }
        }
    }
    None
}

/// A parentally closed witness read off a topological order of an acyclic graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AcyclicWitness {
    /// The graph (1 or 2) the set lives in; it attains the larger intersection.
    pub direction: u8,
    pub pc_set: PcSet,
}

/// With `G_k` acyclic (the first graph if both are), take `i` first in its
/// topological order with `ch_1(i) ≠ ch_2(i)`, `j` the smallest node of
/// `ch_k(i) \ ch_{3−k}(i)`, and `L = ({j} ∪ an_k(j)) ∩ nb_k(i)`. If
/// `ch_k(i) ⊊ ch_{3−k}(i)` the witness is `L = nb_{3−k}(i)` in the other graph.
pub fn acyclic_pc_witness(g1: &Digraph, g2: &Digraph) -> Result<AcyclicWitness, CriterionError> {
    check_node_counts(g1, g2)?;
    if g1.out_degree_sequence() != g2.out_degree_sequence() {
        return Err(CriterionError::Precondition("out-degree sequences differ"));
    }
    if g1 == g2 {
        return Err(CriterionError::Precondition("graphs are identical"));
    }
    if g1.is_complete() || g2.is_complete() {
        return Err(CriterionError::Precondition("a graph is complete"));
    }
    let (direction, dag, other, order) = if let Some(order) = g1.topological_order() {
        (1, g1, g2, order)
    } else if let Some(order) = g2.topological_order() {
        (2, g2, g1, order)
    } else {
        return Err(CriterionError::Precondition("neither graph is acyclic"));
    };
    let i = order
        .into_iter()
        .find(|&v| dag.ch(v) != other.ch(v))
        .ok_or(CriterionError::Precondition("graphs are identical"))?;
    match dag.ch(i).difference(other.ch(i)).first() {
        Some(j) => {
            let members = NodeSet::singleton(j).union(dag.an(j)).intersection(dag.nb(i));
            Ok(AcyclicWitness { direction, pc_set: PcSet::new(dag, i, members)? })
        }
        // Equal sorted sequences still allow ch_k(i) ⊊ ch_{3−k}(i); then the
        // whole neighborhood in the other graph separates the two.
        None => Ok(AcyclicWitness { direction: 3 - direction, pc_set: PcSet::new(other, i, other.nb(i))? }),
    }
}

/// Whether [`acyclic_pc_witness`]'s preconditions hold.
pub fn acyclic_witness_applies(g1: &Digraph, g2: &Digraph) -> bool {
    g1.node_count() == g2.node_count()
        && g1 != g2
        && !g1.is_complete()
        && !g2.is_complete()
        && (g1.is_acyclic() || g2.is_acyclic())
        && g1.out_degree_sequence() == g2.out_degree_sequence()
}

/// Violations of the conditions every pair with equal matroids satisfies.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct NecessaryConditionReport {
    /// Pairs `{i, j}` adjacent or with a common child in exactly one graph.
    pub pattern_differences: Vec<(usize, usize)>,
    /// Nodes that are sinks in both graphs but have different parents.
    pub sink_parent_differences: Vec<usize>,
}

impl NecessaryConditionReport {
    pub fn violated(&self) -> bool {
        !self.pattern_differences.is_empty() || !self.sink_parent_differences.is_empty()
    }
}

/// Whether `i` and `j` are adjacent or share a child, i.e. whether column
/// `K_ij` of the Jacobian is nonzero.
pub fn linked(g: &Digraph, i: usize, j: usize) -> bool {
    g.is_adjacent(i, j) || !g.ch(i).intersection(g.ch(j)).is_empty()
}

pub fn necessary_condition_checks(g1: &Digraph, g2: &Digraph) -> Result<NecessaryConditionReport, CriterionError> {
    check_node_counts(g1, g2)?;
    let pattern_differences =
        crate::digraph::unordered_pairs(g1.node_count()).filter(|&(i, j)| linked(g1, i, j) != linked(g2, i, j)).collect();
    let sink_parent_differences = g1
        .nodes()
        .filter(|&v| g1.ch(v).is_empty() && g2.ch(v).is_empty() && g1.pa(v) != g2.pa(v))
        .collect();
    Ok(NecessaryConditionReport { pattern_differences, sink_parent_differences })
}

/// Outcome of one cascade stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stage {
    pub name: &'static str,
    pub fired: bool,
    pub witness: Option<Value>,
}

/// The matroid part of a [`DistinguishReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatroidSummary {
    pub verdict: Verdict,
    pub witness: Option<ColumnSet>,
    pub failure_bound: f64,
}

impl From<&MatroidComparison> for MatroidSummary {
    fn from(c: &MatroidComparison) -> Self {
        MatroidSummary { verdict: c.verdict, witness: c.witness.clone(), failure_bound: c.failure_bound }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistinguishReport {
    pub stages: Vec<Stage>,
    pub matroid: Option<MatroidSummary>,
    /// First stage that certified different matroids, `"matroid"` if only the
    /// oracle did, `None` if nothing did.
    pub decided_by: Option<&'static str>,
    /// Set when some neighborhood was too large for the parentally closed search.
    pub pc_search_truncated: bool,
}

impl DistinguishReport {
    pub fn stage(&self, name: &str) -> Option<&Stage> {
        self.stages.iter().find(|s| s.name == name)
    }

    /// Whether any graphical criterion (not the edge count or the necessary
    /// conditions) fired.
    pub fn criterion_fired(&self) -> bool {
        self.stages.iter().any(|s| s.fired && CRITERION_STAGES.contains(&s.name))
    }
}

pub const STAGE_EDGE_COUNT: &str = "edge-count";
pub const STAGE_NECESSARY: &str = "necessary-conditions";
pub const STAGE_OUTDEGREE: &str = "outdegree";
pub const STAGE_TTF: &str = "ttf";
pub const STAGE_PC: &str = "pc";
const CRITERION_STAGES: [&str; 3] = [STAGE_OUTDEGREE, STAGE_TTF, STAGE_PC];

fn stage<T: Serialize>(name: &'static str, witness: Option<T>) -> Stage {
    Stage {
        name,
        fired: witness.is_some(),
        witness: witness.map(|w| serde_json::to_value(w).expect("witness serializes")),
    }
}

/// Every criterion stage, cheapest first, without the matroid oracle.
pub fn criteria_stages(g1: &Digraph, g2: &Digraph) -> Result<Vec<Stage>, CriterionError> {
    check_node_counts(g1, g2)?;
    let edge_counts = (g1.edge_count() != g2.edge_count()).then(|| json!({"edges": [g1.edge_count(), g2.edge_count()]}));
    let necessary = necessary_condition_checks(g1, g2)?;
    let [outdegree, ttf, pc] = criterion_witnesses(g1, g2)?;
    Ok(vec![
        stage(STAGE_EDGE_COUNT, edge_counts),
        stage(STAGE_NECESSARY, necessary.violated().then_some(necessary)),
        stage(STAGE_OUTDEGREE, outdegree),
        stage(STAGE_TTF, ttf),
        stage(STAGE_PC, pc),
    ])
}

/// The out-degree, transitive-triangle-free and parentally closed witnesses,
/// in that order. The last uses the acyclic construction when it applies.
pub fn criterion_witnesses(g1: &Digraph, g2: &Digraph) -> Result<[Option<CriterionWitness>; 3], CriterionError> {
    check_node_counts(g1, g2)?;
    let pc = if acyclic_witness_applies(g1, g2) {
        let w = acyclic_pc_witness(g1, g2)?;
        Some(pc_witness(g1, g2, w.direction, w.pc_set, CriterionKind::AcyclicConstruction))
    } else {
        pc_criterion(g1, g2)
    };
    Ok([outdegree_criterion(g1, g2), ttf_criterion(g1, g2), pc])
}

fn assemble(g1: &Digraph, g2: &Digraph, comparison: Option<&MatroidComparison>) -> Result<DistinguishReport, CriterionError> {
    let stages = criteria_stages(g1, g2)?;
    let decided_by = stages.iter().find(|s| s.fired).map(|s| s.name).or_else(|| {
        comparison.filter(|c| c.verdict == Verdict::Different).map(|_| "matroid")
    });
    Ok(DistinguishReport {
        stages,
        matroid: comparison.map(MatroidSummary::from),
        decided_by,
        pc_search_truncated: pc_search_truncated(g1, g2),
    })
}

/// Run every criterion, then the matroid oracle.
pub fn distinguish(g1: &Digraph, g2: &Digraph, cfg: &RankOracleConfig) -> Result<DistinguishReport, CriterionError> {
    check_node_counts(g1, g2)?;
    let comparison = compare_oracles(&RankOracle::new(g1, cfg)?, &RankOracle::new(g2, cfg)?)?;
    assemble(g1, g2, Some(&comparison))
}

/// As [`distinguish`] with oracles prepared by the caller.
pub fn distinguish_with_oracles(a: &RankOracle, b: &RankOracle) -> Result<DistinguishReport, CriterionError> {
    check_node_counts(a.graph(), b.graph())?;
    let comparison = compare_oracles(a, b)?;
    assemble(a.graph(), b.graph(), Some(&comparison))
}

/// The criteria alone; `matroid` is left empty.
pub fn distinguish_without_matroid(g1: &Digraph, g2: &Digraph) -> Result<DistinguishReport, CriterionError> {
    assemble(g1, g2, None)
}
