//! Labeled simple directed graphs.
//!
//! Nodes are the integers `1..=n`. A [`Digraph`] is simple: no self-loops and
//! never both `i -> j` and `j -> i`. Neighborhoods are stored as 64-bit masks,
//! so graphs are limited to [`MAX_NODES`] nodes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest node count a [`Digraph`] can hold.
pub const MAX_NODES: usize = 64;

/// Default cap for exhaustive enumeration (3^21 graphs at n = 7).
pub const MAX_ENUMERATION_NODES: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("node count must be between 1 and {MAX_NODES}, got {0}")]
    BadNodeCount(usize),
    #[error("node {node} is out of range 1..={n}")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(usize, usize),
    #[error("anti-parallel edges {0} -> {1} and {1} -> {0}")]
    AntiParallel(usize, usize),
    #[error("enumeration of {n}-node graphs exceeds the cap of {cap} nodes")]
    EnumerationTooLarge { n: usize, cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: expected `n <count>` header before any edge")]
    MissingHeader { line: usize },
    #[error("no `n <count>` header found")]
    Empty,
    #[error("line {line}: malformed line `{content}`")]
    Malformed { line: usize, content: String },
    #[error("line {line}: second `n` header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: invalid node count {count}")]
    BadNodeCount { line: usize, count: usize },
    #[error("line {line}: node {node} is out of range 1..={n}")]
    NodeOutOfRange { line: usize, node: usize, n: usize },
    #[error("line {line}: self-loop at node {node}")]
    SelfLoop { line: usize, node: usize },
    #[error("line {line}: duplicate edge {u} -> {v}")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: edge {u} -> {v} is anti-parallel to an earlier edge {v} -> {u}")]
    AntiParallel { line: usize, u: usize, v: usize },
}

/// A set of nodes, stored as a bit mask (bit `i - 1` for node `i`).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeSet(u64);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    pub fn from_bits(bits: u64) -> Self {
        NodeSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// All nodes `1..=n`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            NodeSet(u64::MAX)
        } else {
            NodeSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(node: usize) -> Self {
        NodeSet(1u64 << (node - 1))
    }

    pub fn contains(self, node: usize) -> bool {
        node >= 1 && node <= 64 && self.0 & (1u64 << (node - 1)) != 0
    }

    pub fn insert(&mut self, node: usize) {
        self.0 |= 1u64 << (node - 1);
    }

    pub fn remove(&mut self, node: usize) {
        self.0 &= !(1u64 << (node - 1));
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 | other.0)
    }

    pub fn intersection(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & other.0)
    }

    pub fn difference(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: NodeSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest node in the set.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    /// Nodes in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let node = bits.trailing_zeros() as usize + 1;
            bits &= bits - 1;
            Some(node)
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut set = NodeSet::EMPTY;
        for node in iter {
            set.insert(node);
        }
        set
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, node) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{node}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for NodeSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// Out-degrees of all nodes, sorted in decreasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OutDegreeSequence(Vec<usize>);

impl OutDegreeSequence {
    pub fn from_degrees(mut degrees: Vec<usize>) -> Self {
        degrees.sort_unstable_by(|a, b| b.cmp(a));
        OutDegreeSequence(degrees)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

impl fmt::Display for OutDegreeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, d) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

/// Wire form of a graph: node count plus sorted edge list.
#[derive(Serialize, Deserialize)]
struct RawDigraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

/// A labeled simple directed graph on nodes `1..=n`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDigraph", into = "RawDigraph")]
pub struct Digraph {
    n: usize,
    /// Sorted lexicographically.
    edges: Vec<(usize, usize)>,
    children: Vec<NodeSet>,
    parents: Vec<NodeSet>,
}

impl TryFrom<RawDigraph> for Digraph {
    type Error = GraphError;

    fn try_from(raw: RawDigraph) -> Result<Self, Self::Error> {
        Digraph::new(raw.n, raw.edges)
    }
}

impl From<Digraph> for RawDigraph {
    fn from(g: Digraph) -> Self {
        RawDigraph { n: g.n, edges: g.edges }
    }
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digraph(n={}, edges=[", self.n)?;
        for (k, (u, v)) in self.edges.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{u}->{v}")?;
        }
        write!(f, "])")
    }
}

impl Digraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        if n == 0 || n > MAX_NODES {
            return Err(GraphError::BadNodeCount(n));
        }
        let mut children = vec![NodeSet::EMPTY; n];
        let mut parents = vec![NodeSet::EMPTY; n];
        let mut list = Vec::new();
        for (u, v) in edges {
            for node in [u, v] {
                if node == 0 || node > n {
                    return Err(GraphError::NodeOutOfRange { node, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if children[u - 1].contains(v) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
            if children[v - 1].contains(u) {
                return Err(GraphError::AntiParallel(u, v));
            }
            children[u - 1].insert(v);
            parents[v - 1].insert(u);
            list.push((u, v));
        }
        list.sort_unstable();
        Ok(Digraph { n, edges: list, children, parents })
    }

    pub fn edgeless(n: usize) -> Result<Self, GraphError> {
        Digraph::new(n, [])
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> {
        1..=self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u >= 1 && u <= self.n && self.children[u - 1].contains(v)
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.has_edge(u, v) || self.has_edge(v, u)
    }

    fn check(&self, node: usize) -> Result<(), GraphError> {
        if node == 0 || node > self.n {
            Err(GraphError::NodeOutOfRange { node, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn children(&self, i: usize) -> Result<NodeSet, GraphError> {
        self.check(i)?;
        Ok(self.ch(i))
    }

    pub fn parents(&self, i: usize) -> Result<NodeSet, GraphError> {
        self.check(i)?;
        Ok(self.pa(i))
    }

    pub fn neighbors(&self, i: usize) -> Result<NodeSet, GraphError> {
        self.check(i)?;
        Ok(self.nb(i))
    }

    /// Nodes with a directed path into `j`. `j` itself is included only when it
    /// lies on a directed cycle.
    pub fn ancestors(&self, j: usize) -> Result<NodeSet, GraphError> {
        self.check(j)?;
        Ok(self.an(j))
    }

    /// Children of `i`. Panics if `i` is not a node.
    pub fn ch(&self, i: usize) -> NodeSet {
        self.children[i - 1]
    }

    /// Parents of `i`. Panics if `i` is not a node.
    pub fn pa(&self, i: usize) -> NodeSet {
        self.parents[i - 1]
    }

    /// Nodes adjacent to `i`. Panics if `i` is not a node.
    pub fn nb(&self, i: usize) -> NodeSet {
        self.children[i - 1].union(self.parents[i - 1])
    }

    /// Union of the parents of every node in `set`.
    pub fn pa_of_set(&self, set: NodeSet) -> NodeSet {
        set.iter().fold(NodeSet::EMPTY, |acc, v| acc.union(self.pa(v)))
    }

    /// Ancestors of `j` (see [`Digraph::ancestors`]). Panics if `j` is not a node.
    pub fn an(&self, j: usize) -> NodeSet {
        let mut seen = NodeSet::EMPTY;
        let mut frontier = self.pa(j);
        while !frontier.is_empty() {
            let fresh = frontier.difference(seen);
            seen = seen.union(fresh);
            frontier = self.pa_of_set(fresh).difference(seen);
        }
        seen
    }

    /// Nodes reachable from `i` along at least one edge.
    pub fn reachable_from(&self, i: usize) -> NodeSet {
        let mut seen = NodeSet::EMPTY;
        let mut frontier = self.ch(i);
        while !frontier.is_empty() {
            let fresh = frontier.difference(seen);
            seen = seen.union(fresh);
            frontier = fresh
                .iter()
                .fold(NodeSet::EMPTY, |acc, v| acc.union(self.ch(v)))
                .difference(seen);
        }
        seen
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.ch(i).len()
    }

    pub fn out_degree_sequence(&self) -> OutDegreeSequence {
        OutDegreeSequence::from_degrees(self.nodes().map(|i| self.out_degree(i)).collect())
    }

    /// True iff every unordered pair of nodes is adjacent.
    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.n * (self.n - 1) / 2
    }

    /// True iff no edge `j -> i` has `ch(j) ∩ ch(i) ≠ ∅`.
    pub fn is_transitive_triangle_free(&self) -> bool {
        self.edges
            .iter()
            .all(|&(j, i)| self.ch(j).intersection(self.ch(i)).is_empty())
    }

    /// Strongly connected components, each sorted, ordered by smallest member.
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        let reach: Vec<NodeSet> = self.nodes().map(|i| self.reachable_from(i)).collect();
        let mut assigned = NodeSet::EMPTY;
        let mut components = Vec::new();
        for i in self.nodes() {
            if assigned.contains(i) {
                continue;
            }
            let mut component = NodeSet::singleton(i);
            for j in reach[i - 1].iter() {
                if reach[j - 1].contains(i) {
                    component.insert(j);
                }
            }
            assigned = assigned.union(component);
            components.push(component.to_vec());
        }
        components
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// The lexicographically smallest topological order, or `None` if the graph
    /// has a directed cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut placed = NodeSet::EMPTY;
        let mut order = Vec::with_capacity(self.n);
        while order.len() < self.n {
            let next = self
                .nodes()
                .find(|&v| !placed.contains(v) && self.pa(v).is_subset(placed))?;
            placed.insert(next);
            order.push(next);
        }
        Some(order)
    }

    /// The graph with node `v` renamed to `perm[v - 1]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Digraph, GraphError> {
        assert_eq!(perm.len(), self.n, "permutation length must equal node count");
        Digraph::new(self.n, self.edges.iter().map(|&(u, v)| (perm[u - 1], perm[v - 1])))
    }

    /// Rank of this graph in [`SimpleDigraphs`] order.
    pub fn enumeration_index(&self) -> u64 {
        let mut index = 0u64;
        let mut weight = 1u64;
        for (u, v) in unordered_pairs(self.n) {
            let digit = if self.has_edge(u, v) {
                1
            } else if self.has_edge(v, u) {
                2
            } else {
                0
            };
            index += digit * weight;
            weight = weight.saturating_mul(3);
        }
        index
    }

    /// The graph at position `index` of [`SimpleDigraphs`] order: pair `k` of the
    /// lexicographically sorted unordered pairs is ternary digit `k` (least
    /// significant first) with 0 = absent, 1 = `i -> j`, 2 = `j -> i`.
    pub fn from_enumeration_index(n: usize, index: u64) -> Result<Digraph, GraphError> {
        if n > MAX_ENUMERATION_NODES {
            return Err(GraphError::EnumerationTooLarge { n, cap: MAX_ENUMERATION_NODES });
        }
        let mut rest = index;
        let mut edges = Vec::new();
        for (u, v) in unordered_pairs(n) {
            match rest % 3 {
                1 => edges.push((u, v)),
                2 => edges.push((v, u)),
                _ => {}
            }
            rest /= 3;
        }
        Digraph::new(n, edges)
    }
}

/// Unordered node pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn unordered_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| (i, j)))
}

/// Number of labeled simple digraphs on `n` nodes, `3^(n(n-1)/2)`.
pub fn simple_digraph_count(n: usize) -> u64 {
    3u64.pow((n * n.saturating_sub(1) / 2) as u32)
}

/// Every labeled simple digraph on `n` nodes, each exactly once, in ternary
/// counter order. Can start from any index so a sweep can be split across
/// workers.
#[derive(Debug, Clone)]
pub struct SimpleDigraphs {
    n: usize,
    next: u64,
    end: u64,
}

impl SimpleDigraphs {
    pub fn new(n: usize) -> Result<Self, GraphError> {
        Self::with_cap(n, MAX_ENUMERATION_NODES)
    }

    pub fn with_cap(n: usize, cap: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::BadNodeCount(0));
        }
        if n > cap.min(MAX_ENUMERATION_NODES) {
            return Err(GraphError::EnumerationTooLarge { n, cap: cap.min(MAX_ENUMERATION_NODES) });
        }
        Ok(SimpleDigraphs { n, next: 0, end: simple_digraph_count(n) })
    }

    /// Restrict the stream to indices `start..end` (clamped to the total).
    pub fn range(mut self, start: u64, end: u64) -> Self {
        self.end = end.min(self.end);
        self.next = start.min(self.end);
        self
    }

    pub fn total(&self) -> u64 {
        simple_digraph_count(self.n)
    }
}

impl Iterator for SimpleDigraphs {
    type Item = Digraph;

    fn next(&mut self) -> Option<Digraph> {
        if self.next >= self.end {
            return None;
        }
        let g = Digraph::from_enumeration_index(self.n, self.next).expect("index within range");
        self.next += 1;
        Some(g)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

/// Parse the line-oriented graph format: `n <count>` then one `<u> <v>` per
/// edge; `#` starts a comment.
pub fn parse_graph(text: &str) -> Result<Digraph, ParseError> {
    let mut n: Option<usize> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut children: Vec<NodeSet> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let malformed = || ParseError::Malformed { line, content: content.to_string() };
        if tokens[0] == "n" {
            if tokens.len() != 2 {
                return Err(malformed());
            }
            if n.is_some() {
                return Err(ParseError::DuplicateHeader { line });
            }
            let count: usize = tokens[1].parse().map_err(|_| malformed())?;
            if count == 0 || count > MAX_NODES {
                return Err(ParseError::BadNodeCount { line, count });
            }
            n = Some(count);
            children = vec![NodeSet::EMPTY; count];
            continue;
        }
        let Some(count) = n else {
            return Err(ParseError::MissingHeader { line });
        };
        if tokens.len() != 2 {
            return Err(malformed());
        }
        let u: usize = tokens[0].parse().map_err(|_| malformed())?;
        let v: usize = tokens[1].parse().map_err(|_| malformed())?;
        for node in [u, v] {
            if node == 0 || node > count {
                return Err(ParseError::NodeOutOfRange { line, node, n: count });
            }
        }
        if u == v {
            return Err(ParseError::SelfLoop { line, node: u });
        }
        if children[u - 1].contains(v) {
            return Err(ParseError::DuplicateEdge { line, u, v });
        }
        if children[v - 1].contains(u) {
            return Err(ParseError::AntiParallel { line, u, v });
        }
        children[u - 1].insert(v);
        edges.push((u, v));
    }
    let n = n.ok_or(ParseError::Empty)?;
    Ok(Digraph::new(n, edges).expect("validated while parsing"))
}

/// Render a graph in the format accepted by [`parse_graph`].
pub fn serialize_graph(g: &Digraph) -> String {
    let mut out = format!("n {}\n", g.n);
    for (u, v) in &g.edges {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

impl fmt::Display for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_graph(self))
    }
}

impl FromStr for Digraph {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_graph(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn set(nodes: &[usize]) -> NodeSet {
        nodes.iter().copied().collect()
    }

    /// Reachability by explicit path search, independent of the mask closure.
    fn brute_force_ancestors(g: &Digraph, j: usize) -> NodeSet {
        let mut out = NodeSet::EMPTY;
        for i in g.nodes() {
            let mut stack = vec![i];
            let mut visited = vec![false; g.node_count() + 1];
            'search: while let Some(u) = stack.pop() {
                for &(a, b) in g.edges() {
                    if a == u {
                        if b == j {
                            out.insert(i);
                            break 'search;
                        }
                        if !visited[b] {
                            visited[b] = true;
                            stack.push(b);
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn children_examples() {
        assert_eq!(gallery::diamond().children(1).unwrap(), set(&[2, 3]));
        assert_eq!(Digraph::edgeless(3).unwrap().children(2).unwrap(), NodeSet::EMPTY);
        assert_eq!(gallery::four_cycle().children(4).unwrap(), set(&[2]));
    }

    #[test]
    fn out_of_range_node() {
        let g = gallery::diamond();
        assert_eq!(g.children(5), Err(GraphError::NodeOutOfRange { node: 5, n: 4 }));
        assert!(g.parents(0).is_err());
        assert!(g.ancestors(9).is_err());
    }

    #[test]
    fn ancestors_examples() {
        let cycle = gallery::four_cycle();
        assert_eq!(cycle.ancestors(4).unwrap(), set(&[1, 2, 3, 4]));
        assert_eq!(brute_force_ancestors(&cycle, 4), set(&[1, 2, 3, 4]));
        let diamond = gallery::diamond();
        assert_eq!(diamond.ancestors(4).unwrap(), set(&[1, 2, 3]));
        assert_eq!(diamond.ancestors(1).unwrap(), NodeSet::EMPTY);
        assert_eq!(cycle.ancestors(1).unwrap(), NodeSet::EMPTY);
    }

    #[test]
    fn ancestors_match_path_search_on_all_four_node_graphs() {
        for g in SimpleDigraphs::new(4).unwrap() {
            for j in g.nodes() {
                assert_eq!(g.an(j), brute_force_ancestors(&g, j), "{g:?} node {j}");
            }
        }
    }

    #[test]
    fn out_degree_sequences() {
        assert_eq!(gallery::ttf_pair().0.out_degree_sequence().as_slice(), &[3, 1, 1, 1, 1, 0]);
        assert_eq!(
            gallery::ttf_pair().0.out_degree_sequence(),
            gallery::ttf_pair().1.out_degree_sequence()
        );
        assert_eq!(Digraph::edgeless(4).unwrap().out_degree_sequence().as_slice(), &[0, 0, 0, 0]);
        let tournament = Digraph::new(3, [(1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(tournament.out_degree_sequence().as_slice(), &[2, 1, 0]);
        assert_eq!(tournament.out_degree_sequence().to_string(), "(2,1,0)");
    }

    #[test]
    fn completeness() {
        let tournament5 = Digraph::new(5, unordered_pairs(5)).unwrap();
        assert!(tournament5.is_complete());
        assert!(!gallery::diamond().is_complete());
        assert!(Digraph::edgeless(1).unwrap().is_complete());
    }

    #[test]
    fn transitive_triangles() {
        assert!(gallery::ttf_pair().0.is_transitive_triangle_free());
        assert!(gallery::ttf_pair().1.is_transitive_triangle_free());
        assert!(gallery::diamond().is_transitive_triangle_free());
        let triangle = Digraph::new(3, [(1, 2), (2, 3), (1, 3)]).unwrap();
        assert!(!triangle.is_transitive_triangle_free());
        let (g1, g2) = gallery::pc_pair();
        assert!(!g1.is_transitive_triangle_free());
        assert!(!g2.is_transitive_triangle_free());
    }

    #[test]
    fn transitive_triangle_matches_triple_patterns() {
        // A triple is a transitive triangle iff its induced subgraph is acyclic
        // with all three pairs adjacent.
        for g in SimpleDigraphs::new(4).unwrap() {
            let mut found = false;
            for a in 1..=4 {
                for b in 1..=4 {
                    for c in 1..=4 {
                        if a != b && b != c && a != c && g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c) {
                            found = true;
                        }
                    }
                }
            }
            assert_eq!(g.is_transitive_triangle_free(), !found, "{g:?}");
        }
    }

    #[test]
    fn scc_examples() {
        let (g1, g2) = gallery::same_scc_pair();
        assert_eq!(g1.strongly_connected_components(), vec![vec![1, 2, 3, 4, 5], vec![6]]);
        assert_eq!(g2.strongly_connected_components(), vec![vec![1, 2, 3, 4, 5], vec![6]]);
        assert_eq!(
            gallery::diamond().strongly_connected_components(),
            vec![vec![1], vec![2], vec![3], vec![4]]
        );
        assert_eq!(gallery::four_cycle().strongly_connected_components(), vec![vec![1], vec![2, 3, 4]]);
    }

    #[test]
    fn topological_orders() {
        assert_eq!(gallery::diamond().topological_order(), Some(vec![1, 2, 3, 4]));
        assert_eq!(gallery::four_cycle().topological_order(), None);
        assert_eq!(Digraph::edgeless(3).unwrap().topological_order(), Some(vec![1, 2, 3]));
        let g = Digraph::new(3, [(3, 1), (2, 1)]).unwrap();
        assert_eq!(g.topological_order(), Some(vec![2, 3, 1]));
    }

    /// Lexicographic minimum over all permutations that respect every edge.
    fn brute_force_min_topological_order(g: &Digraph) -> Option<Vec<usize>> {
        fn permutations(rest: &mut Vec<usize>, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if rest.is_empty() {
                out.push(prefix.clone());
                return;
            }
            for k in 0..rest.len() {
                let v = rest.remove(k);
                prefix.push(v);
                permutations(rest, prefix, out);
                prefix.pop();
                rest.insert(k, v);
            }
        }
        let mut all = Vec::new();
        permutations(&mut g.nodes().collect(), &mut Vec::new(), &mut all);
        all.into_iter()
            .filter(|order| {
                g.edges().iter().all(|&(u, v)| {
                    order.iter().position(|&x| x == u) < order.iter().position(|&x| x == v)
                })
            })
            .min()
    }

    #[test]
    fn topological_order_is_lexicographic_minimum() {
        for g in SimpleDigraphs::new(4).unwrap() {
            assert_eq!(g.topological_order(), brute_force_min_topological_order(&g), "{g:?}");
        }
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(SimpleDigraphs::new(2).unwrap().count(), 3);
        assert_eq!(SimpleDigraphs::new(3).unwrap().count(), 27);
        let all: Vec<_> = SimpleDigraphs::new(4).unwrap().collect();
        assert_eq!(all.len(), 729);
        let distinct: std::collections::HashSet<_> = all.iter().map(|g| g.edges().to_vec()).collect();
        assert_eq!(distinct.len(), 729);
        for (k, g) in all.iter().enumerate() {
            assert_eq!(g.enumeration_index(), k as u64);
        }
    }

    #[test]
    fn enumeration_is_restartable() {
        let tail: Vec<_> = SimpleDigraphs::new(4).unwrap().range(700, 800).collect();
        assert_eq!(tail.len(), 29);
        assert_eq!(tail[0], Digraph::from_enumeration_index(4, 700).unwrap());
    }

    #[test]
    fn enumeration_cap() {
        assert!(matches!(SimpleDigraphs::new(8), Err(GraphError::EnumerationTooLarge { .. })));
        assert!(SimpleDigraphs::with_cap(5, 4).is_err());
    }

    #[test]
    fn parse_example() {
        let g = parse_graph("n 4\n1 2\n2 3\n3 4\n4 2\n").unwrap();
        assert_eq!(g, gallery::four_cycle());
        let g = parse_graph("# nothing\nn 3 # three nodes\n").unwrap();
        assert_eq!(g, Digraph::edgeless(3).unwrap());
    }

    #[test]
    fn parse_errors_name_lines() {
        assert_eq!(parse_graph("n 3\n1 2\n2 1\n"), Err(ParseError::AntiParallel { line: 3, u: 2, v: 1 }));
        assert_eq!(parse_graph("n 3\n1 2\n1 2\n"), Err(ParseError::DuplicateEdge { line: 3, u: 1, v: 2 }));
        assert_eq!(parse_graph("n 3\n\n2 2\n"), Err(ParseError::SelfLoop { line: 3, node: 2 }));
        assert_eq!(
            parse_graph("n 3\n1 x\n"),
            Err(ParseError::Malformed { line: 2, content: "1 x".into() })
        );
        assert_eq!(parse_graph("1 2\n"), Err(ParseError::MissingHeader { line: 1 }));
        assert_eq!(parse_graph("n 2\n1 3\n"), Err(ParseError::NodeOutOfRange { line: 2, node: 3, n: 2 }));
        assert_eq!(parse_graph("n 2\nn 2\n"), Err(ParseError::DuplicateHeader { line: 2 }));
        assert_eq!(parse_graph("# empty\n"), Err(ParseError::Empty));
    }

    #[test]
    fn construction_enforces_invariants() {
        assert_eq!(Digraph::new(2, [(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert_eq!(Digraph::new(2, [(1, 2), (2, 1)]), Err(GraphError::AntiParallel(2, 1)));
        assert_eq!(Digraph::new(2, [(1, 3)]), Err(GraphError::NodeOutOfRange { node: 3, n: 2 }));
        assert_eq!(Digraph::new(0, []), Err(GraphError::BadNodeCount(0)));
    }

    #[test]
    fn json_round_trip_validates() {
        let g = gallery::diamond();
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"n":4,"edges":[[1,2],[1,3],[2,4],[3,4]]}"#);
        assert_eq!(serde_json::from_str::<Digraph>(&json).unwrap(), g);
        assert!(serde_json::from_str::<Digraph>(r#"{"n":2,"edges":[[1,2],[2,1]]}"#).is_err());
    }
}
