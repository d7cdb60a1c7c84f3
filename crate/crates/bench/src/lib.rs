//! Benchmark inputs shared by the criterion benches.

use sem_matroid::Digraph;

/// Graphs of increasing size: a directed path on `n` nodes for each `n` in `sizes`.
pub fn paths(sizes: &[usize]) -> Vec<Digraph> {
    sizes
        .iter()
        .map(|&n| Digraph::new(n, (1..n).map(|v| (v, v + 1))).expect("path is a valid digraph"))
        .collect()
}
