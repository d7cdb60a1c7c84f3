//! Jacobian matroids of homoscedastic linear structural equation models.
//!
//! A model on a simple directed graph `G = (V, D)` sends edge weights `Λ` and a
//! common error variance to the precision matrix `K = s(I − Λ)(I − Λ)ᵀ`. Two
//! graphs are distinguishable from data when their models differ; this crate
//! compares them through the matroids of their parameterization Jacobians and
//! through combinatorial criteria that certify different matroids.

pub mod criteria;
pub mod digraph;
pub mod field;
pub mod gallery;
pub mod harness;
pub mod jacobian;
pub mod matroid;
pub mod poly;

pub use digraph::{Digraph, GraphError, NodeSet, OutDegreeSequence, ParseError};
pub use jacobian::{build_jacobian, simplify_s_row, ColumnIndex, Jacobian, ParamPoint};
pub use poly::{Polynomial, Variable};
pub use matroid::{
    compare_oracles, exact_rank, find_distinguishing_set, generic_rank, is_independent, matroid_rank, matroids_equal,
    ColumnSet, MatroidComparison, MatroidError, RankOracle, RankOracleConfig, Verdict,
};
pub use criteria::{
    distinguish, outdegree_criterion, pc_criterion, ttf_criterion, CriterionError, CriterionWitness, DistinguishReport,
    PcSet,
};
pub use harness::{
    classify_family, criterion_soundness_sweep, verify_complete_conjecture, verify_pc_conjecture, CompleteSweepConfig,
    HarnessError, ReportMeta, SweepConfig, SweepMode, SweepResult,
};
