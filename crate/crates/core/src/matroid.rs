//! Jacobian matroids: randomized rank over a prime field, an exact rank oracle
//! for cross-checking, matroid comparison and distinguishing-set search.
//!
//! A column set is independent when the corresponding columns of the symbolic
//! Jacobian are linearly independent over the fraction field of the parameter
//! ring. The randomized oracle evaluates the Jacobian at a few random points of
//! `F_q`; an evaluated rank never exceeds the generic rank, and equals it unless
//! the point lies on a hypersurface of degree at most `2(|D| + 1)`.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::digraph::Digraph;
use crate::field::{Echelon, PrimeField, MERSENNE_61};
use crate::jacobian::{build_jacobian, ColumnIndex, ColumnParseError, Jacobian};
use crate::poly::{Polynomial, Variable};

/// Seed used when none is configured.
pub const DEFAULT_SEED: u64 = 20_240_601;
/// Default cap on the number of same-size column subsets a search may visit.
pub const DEFAULT_MAX_COMBINATIONS: u64 = 10_000_000;
/// Largest `|S|·(|D|+1)` accepted by [`exact_rank`].
pub const EXACT_RANK_MAX_ENTRIES: usize = 400;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatroidError {
    #[error("{0} is not a prime below 2^63")]
    NotPrime(u64),
    #[error("prime {prime} is too small for degree bound {degree_bound}")]
    PrimeTooSmall { prime: u64, degree_bound: u64 },
    #[error("trial count must be between 1 and 64")]
    NoTrials,
    #[error("graphs have different node counts ({left} and {right})")]
    NodeCountMismatch { left: usize, right: usize },
    #[error("{0} is not a column of this Jacobian")]
    UnknownColumn(ColumnIndex),
    #[error("{columns} columns exceed the supported maximum of 64")]
    TooManyColumns { columns: usize },
    #[error("C({columns}, {size}) = {count} column subsets exceeds the cap of {cap}")]
    TooManyCombinations { columns: usize, size: usize, count: u128, cap: u64 },
    #[error("exact rank of {entries} polynomial entries exceeds the cap of {cap}")]
    ExactRankTooLarge { entries: usize, cap: usize },
}

/// Parameters of the randomized rank oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankOracleConfig {
    prime: u64,
    trials: u32,
    seed: u64,
    max_combinations: u64,
}

impl Default for RankOracleConfig {
    fn default() -> Self {
        RankOracleConfig {
            prime: MERSENNE_61,
            trials: 3,
            seed: DEFAULT_SEED,
            max_combinations: DEFAULT_MAX_COMBINATIONS,
        }
    }
}

impl RankOracleConfig {
    pub fn new(prime: u64, trials: u32, seed: u64) -> Result<Self, MatroidError> {
        PrimeField::new(prime).ok_or(MatroidError::NotPrime(prime))?;
        if trials == 0 || trials > 64 {
            return Err(MatroidError::NoTrials);
        }
        Ok(RankOracleConfig { prime, trials, seed, ..Default::default() })
    }

    pub fn with_seed(self, seed: u64) -> Self {
        RankOracleConfig { seed, ..self }
    }

    pub fn with_max_combinations(self, cap: u64) -> Self {
        RankOracleConfig { max_combinations: cap, ..self }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn trials(&self) -> u32 {
        self.trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn max_combinations(&self) -> u64 {
        self.max_combinations
    }

    fn field(&self) -> PrimeField {
        PrimeField::new(self.prime).expect("validated on construction")
    }

    /// `(2(|D|+1) / q)^t`: the chance that every trial underestimates a rank.
    pub fn failure_bound(&self, edges: usize) -> f64 {
        (degree_bound(edges) as f64 / self.prime as f64).powi(self.trials as i32)
    }
}

fn degree_bound(edges: usize) -> u64 {
    2 * (edges as u64 + 1)
}

/// A set of precision entries, iterated in column order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColumnSet(BTreeSet<ColumnIndex>);

impl ColumnSet {
    pub fn new() -> Self {
        ColumnSet::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, c: ColumnIndex) -> bool {
        self.0.contains(&c)
    }

    pub fn insert(&mut self, c: ColumnIndex) -> bool {
        self.0.insert(c)
    }

    pub fn remove(&mut self, c: ColumnIndex) -> bool {
        self.0.remove(&c)
    }

    pub fn iter(&self) -> impl Iterator<Item = ColumnIndex> + '_ {
        self.0.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<ColumnIndex> {
        self.iter().collect()
    }
}

impl FromIterator<ColumnIndex> for ColumnSet {
    fn from_iter<I: IntoIterator<Item = ColumnIndex>>(iter: I) -> Self {
        ColumnSet(iter.into_iter().collect())
    }
}

impl Extend<ColumnIndex> for ColumnSet {
    fn extend<I: IntoIterator<Item = ColumnIndex>>(&mut self, iter: I) {
        self.0.extend(iter)
    }
}

impl fmt::Display for ColumnSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, c) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("}")
    }
}

/// Comma-separated labels, e.g. `K11,K12,K24`. Braces and spaces are ignored.
impl FromStr for ColumnSet {
    type Err = ColumnParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim()
            .trim_start_matches('{')
            .trim_end_matches('}')
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect()
    }
}

/// Serialized as `[["1","1"],["1","2"],...]`.
impl Serialize for ColumnSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Stable 64-bit fingerprint of a graph's node count and edge list.
pub fn graph_hash(g: &Digraph) -> u64 {
    let mut h = splitmix64(g.node_count() as u64);
    for &(k, l) in g.edges() {
        h = splitmix64(h ^ ((k as u64) << 32 | l as u64));
    }
    h
}

/// Seed of the random point for one trial on one graph.
pub fn trial_seed(master: u64, graph: u64, trial: u32) -> u64 {
    splitmix64(splitmix64(master ^ splitmix64(graph)) ^ trial as u64)
}

/// One random point of `F_q` per trial for the parameters of `g` (edge weights
/// in edge order, then `s`, which is never zero).
pub fn random_points(g: &Digraph, cfg: &RankOracleConfig) -> Vec<Vec<u64>> {
    let hash = graph_hash(g);
    (0..cfg.trials)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, hash, t));
            let mut point: Vec<u64> = g.edges().iter().map(|_| rng.random_range(0..cfg.prime)).collect();
            let s = loop {
                let v = rng.random_range(0..cfg.prime);
                if v != 0 {
                    break v;
                }
            };
            point.push(s);
            point
        })
        .collect()
}

fn eval_fq(p: &Polynomial, field: PrimeField, value: &dyn Fn(Variable) -> u64) -> u64 {
    p.terms().fold(0, |acc, (m, c)| {
        let coef = field.from_rational(c).expect("Jacobian coefficients are integers");
        let term = m.powers().iter().fold(coef, |t, &(v, e)| field.mul(t, field.pow(value(v), e as u64)));
        field.add(acc, term)
    })
}

/// The Jacobian of one graph evaluated at the configured random points.
#[derive(Debug, Clone)]
pub struct RankOracle {
    jacobian: Jacobian,
    config: RankOracleConfig,
    field: PrimeField,
    /// `columns[trial][c]` is column `c` evaluated at the trial's point.
    columns: Vec<Vec<Vec<u64>>>,
}

impl RankOracle {
    pub fn new(g: &Digraph, cfg: &RankOracleConfig) -> Result<Self, MatroidError> {
        RankOracle::from_jacobian(build_jacobian(g), cfg)
    }

    /// Oracle for an arbitrary matrix with the Jacobian's labels, e.g. one with
    /// a simplified `s` row. Points depend only on the graph, so two matrices
    /// of the same graph are evaluated at the same points.
    pub fn from_jacobian(jacobian: Jacobian, cfg: &RankOracleConfig) -> Result<Self, MatroidError> {
        let g = jacobian.graph();
        let bound = degree_bound(g.edge_count());
        if cfg.prime <= 2 * bound {
            return Err(MatroidError::PrimeTooSmall { prime: cfg.prime, degree_bound: bound });
        }
        let cols = jacobian.column_labels().len();
        if cols > 64 {
            return Err(MatroidError::TooManyColumns { columns: cols });
        }
        let field = cfg.field();
        let rows = jacobian.row_labels().to_vec();
        let matrix = jacobian.matrix();
        let columns = random_points(g, cfg)
            .into_iter()
            .map(|point| {
                let value = |v: Variable| point[rows.iter().position(|&r| r == v).expect("row variable")];
                (0..cols)
                    .map(|c| matrix.column(c).map(|p| eval_fq(p, field, &value)).collect())
                    .collect()
            })
            .collect();
        Ok(RankOracle { jacobian, config: *cfg, field, columns })
    }

    pub fn jacobian(&self) -> &Jacobian {
        &self.jacobian
    }

    pub fn graph(&self) -> &Digraph {
        self.jacobian.graph()
    }

    pub fn config(&self) -> &RankOracleConfig {
        &self.config
    }

    pub fn columns(&self) -> &[ColumnIndex] {
        self.jacobian.column_labels()
    }

    pub fn failure_bound(&self) -> f64 {
        self.config.failure_bound(self.graph().edge_count())
    }

    /// The evaluated matrix of one trial, parameters as rows.
    pub fn evaluated_rows(&self, trial: usize) -> Vec<Vec<u64>> {
        let cols = &self.columns[trial];
        let height = self.jacobian.row_labels().len();
        (0..height).map(|r| cols.iter().map(|col| col[r]).collect()).collect()
    }

    fn mask_of(&self, s: &ColumnSet) -> Result<u64, MatroidError> {
        s.iter().try_fold(0u64, |mask, c| {
            let pos = self.jacobian.column_position(c).ok_or(MatroidError::UnknownColumn(c))?;
            Ok(mask | 1 << pos)
        })
    }

    fn set_of(&self, mask: u64) -> ColumnSet {
        bits(mask).map(|pos| self.columns()[pos]).collect()
    }

    fn height(&self) -> usize {
        self.jacobian.row_labels().len()
    }

    fn rank_mask(&self, mask: u64) -> usize {
        self.columns
            .iter()
            .map(|cols| {
                let mut e = Echelon::new(self.field, self.height());
                for pos in bits(mask) {
                    e.insert(cols[pos].clone());
                }
                e.rank()
            })
            .max()
            .unwrap_or(0)
    }

    fn independent_mask(&self, mask: u64) -> bool {
        self.rank_mask(mask) == mask.count_ones() as usize
    }

    /// Generic rank of the columns in `s`.
    pub fn rank(&self, s: &ColumnSet) -> Result<usize, MatroidError> {
        Ok(self.rank_mask(self.mask_of(s)?))
    }

    pub fn is_independent(&self, s: &ColumnSet) -> Result<bool, MatroidError> {
        Ok(self.independent_mask(self.mask_of(s)?))
    }

    /// Rank of the whole matroid.
    pub fn full_rank(&self) -> usize {
        self.rank_mask(full_mask(self.columns().len()))
    }

    /// The lexicographically first basis (greedy over the column order).
    pub fn first_basis(&self) -> ColumnSet {
        let best = self
            .columns
            .iter()
            .map(|cols| {
                let mut e = Echelon::new(self.field, self.height());
                (0..cols.len()).filter(|&pos| e.insert(cols[pos].clone())).fold(0u64, |m, pos| m | 1 << pos)
            })
            .max_by_key(|m| m.count_ones())
            .unwrap_or(0);
        self.set_of(best)
    }

    /// Every basis, in lexicographic order.
    pub fn bases(&self) -> Result<Vec<ColumnSet>, MatroidError> {
        let r = self.full_rank();
        check_combinations(self.columns().len(), r, &self.config)?;
        let mut out = Vec::new();
        let _ = SubsetSearch::new(&[self]).run(r, |_| false, |mask, status| {
            if status[0] {
                out.push(self.set_of(mask));
            }
            ControlFlow::Continue(())
        });
        Ok(out)
    }
}

fn full_mask(m: usize) -> u64 {
    if m == 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (mask != 0).then(|| {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            b
        })
    })
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn check_combinations(columns: usize, size: usize, cfg: &RankOracleConfig) -> Result<(), MatroidError> {
    let count = binomial(columns, size);
    if count > cfg.max_combinations as u128 {
        return Err(MatroidError::TooManyCombinations { columns, size, count, cap: cfg.max_combinations });
    }
    Ok(())
}

/// Depth-first walk over the `k`-subsets of the columns in lexicographic order,
/// tracking for each oracle whether the current prefix is independent in some
/// trial. Dependent prefixes stay dependent, so `prune` may cut a branch based
/// on the per-oracle status of its prefix.
struct SubsetSearch<'a> {
    oracles: Vec<&'a RankOracle>,
    echelons: Vec<Vec<Echelon>>,
    alive: Vec<u64>,
    width: usize,
}

impl<'a> SubsetSearch<'a> {
    fn new(oracles: &[&'a RankOracle]) -> Self {
        let width = oracles[0].columns().len();
        debug_assert!(oracles.iter().all(|o| o.columns().len() == width));
        SubsetSearch {
            echelons: oracles
                .iter()
                .map(|o| o.columns.iter().map(|_| Echelon::new(o.field, o.height())).collect())
                .collect(),
            alive: oracles.iter().map(|o| full_mask(o.columns.len())).collect(),
            oracles: oracles.to_vec(),
            width,
        }
    }

    fn status(&self) -> Vec<bool> {
        self.alive.iter().map(|&a| a != 0).collect()
    }

    fn run(
        &mut self,
        k: usize,
        mut prune: impl FnMut(&[bool]) -> bool,
        mut visit: impl FnMut(u64, &[bool]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        self.descend(0, k, 0, &mut prune, &mut visit)
    }

    fn descend(
        &mut self,
        start: usize,
        remaining: usize,
        mask: u64,
        prune: &mut impl FnMut(&[bool]) -> bool,
        visit: &mut impl FnMut(u64, &[bool]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if remaining == 0 {
            return visit(mask, &self.status());
        }
        if self.width < remaining {
            return ControlFlow::Continue(());
        }
        for c in start..=self.width - remaining {
            let saved_alive = self.alive.clone();
            let saved_len: Vec<Vec<usize>> =
                self.echelons.iter().map(|es| es.iter().map(Echelon::rank).collect()).collect();
            for (o, oracle) in self.oracles.iter().enumerate() {
                for (t, e) in self.echelons[o].iter_mut().enumerate() {
                    if self.alive[o] >> t & 1 == 1 && !e.insert(oracle.columns[t][c].clone()) {
                        self.alive[o] &= !(1 << t);
                    }
                }
            }
            let flow = if prune(&self.status()) {
                ControlFlow::Continue(())
            } else {
                self.descend(c + 1, remaining - 1, mask | 1 << c, prune, visit)
            };
            self.alive = saved_alive;
            for (es, lens) in self.echelons.iter_mut().zip(&saved_len) {
                for (e, &len) in es.iter_mut().zip(lens) {
                    e.truncate(len);
                }
            }
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// Verdict of a matroid comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Equal,
    Different,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Equal => "Equal",
            Verdict::Different => "Different",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatroidComparison {
    pub verdict: Verdict,
    /// Independent in exactly one of the two matroids; present iff `Different`.
    pub witness: Option<ColumnSet>,
    pub ranks: (usize, usize),
    pub failure_bound: f64,
}

fn check_node_counts(g1: &Digraph, g2: &Digraph) -> Result<(), MatroidError> {
    if g1.node_count() != g2.node_count() {
        return Err(MatroidError::NodeCountMismatch { left: g1.node_count(), right: g2.node_count() });
    }
    Ok(())
}

fn pair_failure_bound(a: &RankOracle, b: &RankOracle) -> f64 {
    a.failure_bound().max(b.failure_bound())
}

/// First `k`-subset (lexicographically) independent in exactly one matroid.
fn first_disagreement(a: &RankOracle, b: &RankOracle, k: usize) -> Result<Option<u64>, MatroidError> {
    check_combinations(a.columns().len(), k, &a.config)?;
    let mut found = None;
    let _ = SubsetSearch::new(&[a, b]).run(
        k,
        |status| !status[0] && !status[1],
        |mask, status| {
            if status[0] != status[1] {
                found = Some(mask);
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        },
    );
    Ok(found)
}

/// Greedily drop columns, largest label first, while the set still disagrees.
fn minimize(a: &RankOracle, b: &RankOracle, mut mask: u64) -> u64 {
    let disagrees = |m: u64| a.independent_mask(m) != b.independent_mask(m);
    loop {
        let mut changed = false;
        let members: Vec<usize> = bits(mask).collect();
        for &pos in members.iter().rev() {
            let smaller = mask & !(1 << pos);
            if disagrees(smaller) {
                mask = smaller;
                changed = true;
            }
        }
        if !changed {
            return mask;
        }
    }
}

/// Compare two prepared oracles; see [`matroids_equal`].
pub fn compare_oracles(a: &RankOracle, b: &RankOracle) -> Result<MatroidComparison, MatroidError> {
    check_node_counts(a.graph(), b.graph())?;
    let ranks = (a.full_rank(), b.full_rank());
    let failure_bound = pair_failure_bound(a, b);
    if ranks.0 != ranks.1 {
        let larger = if ranks.0 > ranks.1 { a } else { b };
        return Ok(MatroidComparison {
            verdict: Verdict::Different,
            witness: Some(larger.first_basis()),
            ranks,
            failure_bound,
        });
    }
    let witness = first_disagreement(a, b, ranks.0)?.map(|mask| a.set_of(minimize(a, b, mask)));
    Ok(MatroidComparison {
        verdict: if witness.is_some() { Verdict::Different } else { Verdict::Equal },
        witness,
        ranks,
        failure_bound,
    })
}

/// Decide whether two graphs have the same Jacobian matroid by comparing the
/// independence of every set of the common rank's size.
pub fn matroids_equal(g1: &Digraph, g2: &Digraph, cfg: &RankOracleConfig) -> Result<MatroidComparison, MatroidError> {
    check_node_counts(g1, g2)?;
    compare_oracles(&RankOracle::new(g1, cfg)?, &RankOracle::new(g2, cfg)?)
}

/// A smallest column set independent in exactly one matroid, searched by
/// increasing size; when the ranks differ, the first basis of the larger one.
pub fn find_distinguishing_set(
    g1: &Digraph,
    g2: &Digraph,
    cfg: &RankOracleConfig,
) -> Result<Option<ColumnSet>, MatroidError> {
    check_node_counts(g1, g2)?;
    let (a, b) = (RankOracle::new(g1, cfg)?, RankOracle::new(g2, cfg)?);
    let (r1, r2) = (a.full_rank(), b.full_rank());
    if r1 != r2 {
        return Ok(Some(if r1 > r2 { a.first_basis() } else { b.first_basis() }));
    }
    for k in 1..=r1 {
        if let Some(mask) = first_disagreement(&a, &b, k)? {
            return Ok(Some(a.set_of(mask)));
        }
    }
    Ok(None)
}

/// Generic rank of the columns `s` of `jac`.
pub fn generic_rank(jac: &Jacobian, s: &ColumnSet, cfg: &RankOracleConfig) -> Result<usize, MatroidError> {
    RankOracle::from_jacobian(jac.clone(), cfg)?.rank(s)
}

pub fn is_independent(jac: &Jacobian, s: &ColumnSet, cfg: &RankOracleConfig) -> Result<bool, MatroidError> {
    Ok(generic_rank(jac, s, cfg)? == s.len())
}

/// Rank of the Jacobian matroid of `g`.
pub fn matroid_rank(g: &Digraph, cfg: &RankOracleConfig) -> Result<usize, MatroidError> {
    Ok(RankOracle::new(g, cfg)?.full_rank())
}

/// Rank over the fraction field by fraction-free elimination on the
/// polynomial entries themselves.
pub fn exact_rank(jac: &Jacobian, s: &ColumnSet) -> Result<usize, MatroidError> {
    let height = jac.row_labels().len();
    let entries = s.len() * height;
    if entries > EXACT_RANK_MAX_ENTRIES {
        return Err(MatroidError::ExactRankTooLarge { entries, cap: EXACT_RANK_MAX_ENTRIES });
    }
    let positions = s
        .iter()
        .map(|c| jac.column_position(c).ok_or(MatroidError::UnknownColumn(c)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut m: Vec<Vec<Polynomial>> =
        (0..height).map(|r| positions.iter().map(|&c| jac.matrix().get(r, c).clone()).collect()).collect();
    Ok(bareiss_rank(&mut m))
}

/// Rank of a polynomial matrix by Bareiss elimination with column skipping;
/// every division is exact.
pub fn bareiss_rank(m: &mut [Vec<Polynomial>]) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev = Polynomial::one();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let (top, rest) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in rest.iter_mut() {
            for k in c + 1..cols {
                let num = &(&pivot_row[c] * &row[k]) - &(&row[c] * &pivot_row[k]);
                row[k] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
            row[c] = Polynomial::zero();
        }
        prev = m[rank][c].clone();
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::jacobian::precision_columns;

    fn cols(s: &str) -> ColumnSet {
        s.parse().unwrap()
    }

    fn cfg() -> RankOracleConfig {
        RankOracleConfig::default()
    }

    #[test]
    fn config_validation() {
        assert_eq!(RankOracleConfig::new(15, 3, 0), Err(MatroidError::NotPrime(15)));
        assert_eq!(RankOracleConfig::new(101, 0, 0), Err(MatroidError::NoTrials));
        let tiny = RankOracleConfig::new(11, 1, 0).unwrap();
        assert!(matches!(RankOracle::new(&gallery::diamond(), &tiny), Err(MatroidError::PrimeTooSmall { .. })));
        assert!(cfg().failure_bound(12) < 1e-45);
    }

    #[test]
    fn column_set_parsing() {
        let s = cols("K24, K11,K12");
        assert_eq!(s.to_string(), "{K11, K12, K24}");
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"[["1","1"],["1","2"],["2","4"]]"#);
        assert!("K11,Q2".parse::<ColumnSet>().is_err());
        assert!(cols("").is_empty());
    }

    #[test]
    fn four_cycle_rank_example() {
        let jac = build_jacobian(&gallery::four_cycle());
        assert_eq!(generic_rank(&jac, &cols("K11,K22,K44,K12,K24"), &cfg()).unwrap(), 4);
        assert_eq!(exact_rank(&jac, &cols("K11,K22,K44,K12,K24")).unwrap(), 4);
        assert_eq!(generic_rank(&jac, &ColumnSet::new(), &cfg()).unwrap(), 0);
        assert!(matches!(generic_rank(&jac, &cols("K15"), &cfg()), Err(MatroidError::UnknownColumn(_))));
    }

    #[test]
    fn full_rank_examples() {
        assert_eq!(matroid_rank(&gallery::diamond(), &cfg()).unwrap(), 5);
        assert_eq!(matroid_rank(&Digraph::edgeless(3).unwrap(), &cfg()).unwrap(), 1);
        let jac = build_jacobian(&gallery::diamond());
        let all: ColumnSet = precision_columns(4).into_iter().collect();
        assert_eq!(exact_rank(&jac, &all).unwrap(), 5);
        assert!(!is_independent(&jac, &all, &cfg()).unwrap());
        assert!(is_independent(&jac, &ColumnSet::new(), &cfg()).unwrap());
        // K14 is identically zero in the diamond: 1 and 4 are nonadjacent with no common child.
        assert_eq!(exact_rank(&jac, &cols("K14")).unwrap(), 0);
        assert!(!is_independent(&jac, &cols("K14"), &cfg()).unwrap());
        assert!(is_independent(&jac, &cols("K23"), &cfg()).unwrap());
    }

    #[test]
    fn ttf_example_ranks() {
        let (g1, g2) = gallery::ttf_pair();
        let s = cols("K11,K12,K66,K14,K15,K16,K35,K36");
        assert_eq!(exact_rank(&build_jacobian(&g2), &s).unwrap(), 8);
        assert_eq!(exact_rank(&build_jacobian(&g1), &s).unwrap(), 7);
        assert_eq!(generic_rank(&build_jacobian(&g2), &s, &cfg()).unwrap(), 8);
        assert_eq!(generic_rank(&build_jacobian(&g1), &s, &cfg()).unwrap(), 7);
    }

    #[test]
    fn exact_rank_guard() {
        // 16 rows by 28 columns.
        let g = Digraph::new(7, crate::digraph::unordered_pairs(7).take(15)).unwrap();
        let all: ColumnSet = precision_columns(7).into_iter().collect();
        assert!(matches!(exact_rank(&build_jacobian(&g), &all), Err(MatroidError::ExactRankTooLarge { .. })));
    }

    #[test]
    fn comparisons() {
        let d = gallery::diamond();
        let same = matroids_equal(&d, &d, &cfg()).unwrap();
        assert_eq!(same.verdict, Verdict::Equal);
        assert_eq!(same.witness, None);

        let (c1, c2) = gallery::complete5_pair();
        assert_eq!(matroids_equal(&c1, &c2, &cfg()).unwrap().verdict, Verdict::Equal);

        let (s1, s2) = gallery::same_scc_pair();
        let diff = matroids_equal(&s1, &s2, &cfg()).unwrap();
        assert_eq!(diff.verdict, Verdict::Different);
        let w = diff.witness.unwrap();
        let (o1, o2) = (RankOracle::new(&s1, &cfg()).unwrap(), RankOracle::new(&s2, &cfg()).unwrap());
        assert_ne!(o1.is_independent(&w).unwrap(), o2.is_independent(&w).unwrap());

        let err = matroids_equal(&d, &Digraph::edgeless(3).unwrap(), &cfg()).unwrap_err();
        assert_eq!(err, MatroidError::NodeCountMismatch { left: 4, right: 3 });
    }

    #[test]
    fn combination_guard() {
        let (c1, c2) = gallery::complete5_pair();
        let capped = cfg().with_max_combinations(100);
        assert!(matches!(matroids_equal(&c1, &c2, &capped), Err(MatroidError::TooManyCombinations { .. })));
    }

    #[test]
    fn distinguishing_sets() {
        let (g1, g2) = gallery::ttf_pair();
        let s = find_distinguishing_set(&g1, &g2, &cfg()).unwrap().unwrap();
        assert!(s.len() <= 8);
        let (o1, o2) = (RankOracle::new(&g1, &cfg()).unwrap(), RankOracle::new(&g2, &cfg()).unwrap());
        assert_ne!(o1.is_independent(&s).unwrap(), o2.is_independent(&s).unwrap());
        let stated_set = cols("K11,K12,K66,K14,K15,K16,K35,K36");
        assert!(o2.is_independent(&stated_set).unwrap());
        assert!(!o1.is_independent(&stated_set).unwrap());

        let d = gallery::diamond();
        assert_eq!(find_distinguishing_set(&d, &d, &cfg()).unwrap(), None);

        let sparse = Digraph::new(4, [(1, 2)]).unwrap();
        let basis = find_distinguishing_set(&sparse, &d, &cfg()).unwrap().unwrap();
        assert_eq!(basis.len(), 5);
        assert_eq!(basis, RankOracle::new(&d, &cfg()).unwrap().first_basis());
    }

    #[test]
    fn bases_of_small_graph() {
        // One edge 1 -> 2: rows λ12 and s over columns K11, K22, K12.
        let g = Digraph::new(2, [(1, 2)]).unwrap();
        let oracle = RankOracle::new(&g, &cfg()).unwrap();
        let bases: Vec<String> = oracle.bases().unwrap().iter().map(ToString::to_string).collect();
        assert_eq!(bases, ["{K11, K22}", "{K11, K12}", "{K22, K12}"]);
    }

    #[test]
    fn deterministic_points() {
        let g = gallery::diamond();
        assert_eq!(random_points(&g, &cfg()), random_points(&g, &cfg()));
        assert_ne!(random_points(&g, &cfg()), random_points(&g, &cfg().with_seed(7)));
        assert!(random_points(&g, &cfg()).iter().all(|p| p.len() == 5 && p[4] != 0));
    }
}
