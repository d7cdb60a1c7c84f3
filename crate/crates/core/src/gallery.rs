//! Named graphs used throughout the tests, benches and README.
//!
//! Each graph is read from `data/graphs/*.g`, the same files the CLI examples use.

use crate::digraph::{parse_graph, Digraph};

macro_rules! graph_file {
    ($name:literal) => {
        parse_graph(include_str!(concat!("../data/graphs/", $name)))
            .expect(concat!("bundled graph ", $name, " parses"))
    };
}

/// `1 -> 2, 1 -> 3, 2 -> 4, 3 -> 4`.
pub fn diamond() -> Digraph {
    graph_file!("diamond.g")
}

/// Source node 1 feeding the directed cycle `2 -> 3 -> 4 -> 2`.
pub fn four_cycle() -> Digraph {
    graph_file!("four_cycle.g")
}

/// `1 -> 2, 2 -> 3, 2 -> 4, 3 -> 4`: the graph whose Jacobian is written out in
/// the rank-bound worked example (it has `2 -> 4` where [`four_cycle`] has `4 -> 2`).
pub fn rank_bound_example() -> Digraph {
    graph_file!("rank_bound_example.g")
}

/// Two transitive-triangle-free graphs on 6 nodes with the same out-degree
/// sequence `(3,1,1,1,1,0)`, differing only in the children of node 1.
pub fn ttf_pair() -> (Digraph, Digraph) {
    (graph_file!("ttf_g1.g"), graph_file!("ttf_g2.g"))
}

/// Two 4-node graphs with transitive triangles and out-degree sequence
/// `(2,2,0,0)` that only a parentally closed set separates. Labels: `j = 1`,
/// `i = 2`, `l1 = 3`, `l2 = 4`.
pub fn pc_pair() -> (Digraph, Digraph) {
    (graph_file!("pc_g1.g"), graph_file!("pc_g2.g"))
}

/// Two 6-node graphs with out-degree sequence `(3,2,2,2,2,0)`, strongly
/// connected components `{1..5}, {6}`, no parentally-closed-set witness, and
/// different Jacobian matroids.
pub fn same_scc_pair() -> (Digraph, Digraph) {
    (graph_file!("same_scc_g1.g"), graph_file!("same_scc_g2.g"))
}

/// Two complete 5-node digraphs that differ only in the direction of the edge
/// between 4 and 5, and share a Jacobian matroid.
pub fn complete5_pair() -> (Digraph, Digraph) {
    (graph_file!("complete5_g1.g"), graph_file!("complete5_g2.g"))
}
