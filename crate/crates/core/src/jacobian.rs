//! The symbolic Jacobian of the precision-matrix parameterization
//! `(Λ, s) ↦ K = s(I − Λ)(I − Λ)ᵀ`.
//!
//! Following the matroid convention the matrix is stored transposed: one row
//! per parameter (edge weights in lexicographic edge order, then `s`) and one
//! column per precision entry `K_ij`, `i ≤ j` (diagonals first, then the
//! off-diagonal entries in lexicographic order).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digraph::Digraph;
use crate::poly::{rat, Polynomial, Scalar, Variable};

/// Names the precision entry `K_ij` with `i ≤ j`. Ordered like the Jacobian's
/// columns: diagonals first, then off-diagonal entries lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ColumnIndex {
    i: usize,
    j: usize,
}

impl Ord for ColumnIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (!self.is_diagonal(), self.i, self.j).cmp(&(!other.is_diagonal(), other.i, other.j))
    }
}

impl PartialOrd for ColumnIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl ColumnIndex {
    /// `K_ij`; the pair is stored sorted so `new(3, 1) == new(1, 3)`.
    pub fn new(i: usize, j: usize) -> Self {
        ColumnIndex { i: i.min(j), j: i.max(j) }
    }

    pub fn diagonal(i: usize) -> Self {
        ColumnIndex { i, j: i }
    }

    pub fn i(self) -> usize {
        self.i
    }

    pub fn j(self) -> usize {
        self.j
    }

    pub fn is_diagonal(self) -> bool {
        self.i == self.j
    }

    /// True when `node` is one of the two indices.
    pub fn touches(self, node: usize) -> bool {
        self.i == node || self.j == node
    }
}

impl fmt::Display for ColumnIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.i < 10 && self.j < 10 {
            write!(f, "K{}{}", self.i, self.j)
        } else {
            write!(f, "K{}_{}", self.i, self.j)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad column label `{0}` (expected e.g. K12 or K10_11)")]
pub struct ColumnParseError(pub String);

impl FromStr for ColumnIndex {
    type Err = ColumnParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ColumnParseError(s.to_string());
        let body = s.trim().strip_prefix('K').ok_or_else(err)?;
        let body = body.strip_prefix('_').unwrap_or(body);
        let (i, j) = match body.split_once('_') {
            Some((a, b)) => (a.parse().map_err(|_| err())?, b.parse().map_err(|_| err())?),
            None if body.len() == 2 && body.chars().all(|c| c.is_ascii_digit()) => {
                (body[..1].parse().map_err(|_| err())?, body[1..].parse().map_err(|_| err())?)
            }
            None => return Err(err()),
        };
        if i == 0 || j == 0 {
            return Err(err());
        }
        Ok(ColumnIndex::new(i, j))
    }
}

impl Serialize for ColumnIndex {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq([self.i.to_string(), self.j.to_string()])
    }
}

/// All precision entries of an `n`-node model in global column order.
pub fn precision_columns(n: usize) -> Vec<ColumnIndex> {
    let mut cols: Vec<ColumnIndex> = (1..=n).map(ColumnIndex::diagonal).collect();
    cols.extend(crate::digraph::unordered_pairs(n).map(|(i, j)| ColumnIndex::new(i, j)));
    cols
}

/// Dense row-major matrix of polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix { rows, cols, entries: vec![Polynomial::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<Polynomial>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        PolyMatrix { rows: rows.len(), cols, entries: rows.into_iter().flatten().collect() }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &Polynomial {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Polynomial) {
        self.entries[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[Polynomial] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> impl Iterator<Item = &Polynomial> {
        (0..self.rows).map(move |r| self.get(r, c))
    }

    /// Largest total degree of any entry.
    pub fn max_degree(&self) -> u32 {
        self.entries.iter().map(Polynomial::total_degree).max().unwrap_or(0)
    }

    /// Every distinct variable occurring in some entry, in variable order.
    pub fn variables(&self) -> Vec<Variable> {
        let mut vars: Vec<Variable> = self.entries.iter().flat_map(Polynomial::variables).collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    /// Entrywise evaluation.
    pub fn evaluate<T: Scalar>(&self, point: &ParamPoint<T>) -> Result<Vec<Vec<T>>, EvalError> {
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .map(|p| p.eval(|v| point.get(v).cloned()).map_err(EvalError::Unassigned))
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no value assigned to {0}")]
    Unassigned(Variable),
    #[error("s must be nonzero")]
    ZeroS,
}

/// Values for the parameters of a model. `s` must be nonzero; invertibility of
/// `I − Λ` is not required.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPoint<T> {
    values: BTreeMap<Variable, T>,
}

impl<T: Scalar> ParamPoint<T> {
    pub fn new(s: T) -> Result<Self, EvalError> {
        if s.vanishes() {
            return Err(EvalError::ZeroS);
        }
        Ok(ParamPoint { values: BTreeMap::from([(Variable::S, s)]) })
    }

    /// A point assigning `weight(k, l)` to every edge `k -> l` of `g`.
    pub fn for_graph(g: &Digraph, s: T, mut weight: impl FnMut(usize, usize) -> T) -> Result<Self, EvalError> {
        let mut point = ParamPoint::new(s)?;
        for &(k, l) in g.edges() {
            point.values.insert(Variable::Lambda(k, l), weight(k, l));
        }
        Ok(point)
    }

    pub fn with_lambda(mut self, k: usize, l: usize, value: T) -> Self {
        self.values.insert(Variable::Lambda(k, l), value);
        self
    }

    pub fn get(&self, v: Variable) -> Option<&T> {
        self.values.get(&v)
    }

    pub fn s(&self) -> &T {
        &self.values[&Variable::S]
    }

    /// Weight of `k -> l`, zero when unassigned.
    fn weight(&self, k: usize, l: usize) -> T {
        self.values.get(&Variable::Lambda(k, l)).cloned().unwrap_or_else(T::zero)
    }
}

/// The transposed Jacobian `J(ψ_G)` with its row and column labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Jacobian {
    graph: Digraph,
    rows: Vec<Variable>,
    cols: Vec<ColumnIndex>,
    matrix: PolyMatrix,
}

impl Jacobian {
    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    /// Row labels: edge weights in edge order, then `s`.
    pub fn row_labels(&self) -> &[Variable] {
        &self.rows
    }

    pub fn column_labels(&self) -> &[ColumnIndex] {
        &self.cols
    }

    pub fn matrix(&self) -> &PolyMatrix {
        &self.matrix
    }

    pub fn row_position(&self, v: Variable) -> Option<usize> {
        self.rows.iter().position(|&r| r == v)
    }

    pub fn column_position(&self, c: ColumnIndex) -> Option<usize> {
        self.cols.iter().position(|&k| k == c)
    }

    pub fn s_row(&self) -> &[Polynomial] {
        self.matrix.row(self.rows.len() - 1)
    }

    /// Entry at row `v`, column `c`; `None` if either label is absent.
    pub fn entry(&self, v: Variable, c: ColumnIndex) -> Option<&Polynomial> {
        Some(self.matrix.get(self.row_position(v)?, self.column_position(c)?))
    }

    pub fn evaluate<T: Scalar>(&self, point: &ParamPoint<T>) -> Result<Vec<Vec<T>>, EvalError> {
        self.matrix.evaluate(point)
    }

    pub fn to_json(&self) -> JacobianJson {
        JacobianJson {
            rows: self.rows.iter().map(ToString::to_string).collect(),
            cols: self.cols.iter().map(ToString::to_string).collect(),
            entries: (0..self.rows.len())
                .map(|r| self.matrix.row(r).iter().map(ToString::to_string).collect())
                .collect(),
        }
    }

    /// Aligned text table with row and column labels.
    pub fn to_pretty(&self) -> String {
        let json = self.to_json();
        let row_width = json.rows.iter().map(String::len).max().unwrap_or(0);
        let widths: Vec<usize> = (0..json.cols.len())
            .map(|c| {
                json.entries.iter().map(|row| row[c].len()).chain([json.cols[c].len()]).max().unwrap_or(0)
            })
            .collect();
        let mut out = format!("{:row_width$}", "");
        for (c, label) in json.cols.iter().enumerate() {
            out.push_str(&format!("  {:>w$}", label, w = widths[c]));
        }
        out.push('\n');
        for (r, label) in json.rows.iter().enumerate() {
            out.push_str(&format!("{label:row_width$}"));
            for (c, cell) in json.entries[r].iter().enumerate() {
                out.push_str(&format!("  {:>w$}", cell, w = widths[c]));
            }
            out.push('\n');
        }
        out
    }
}

/// Wire form of a symbolic matrix: labels plus canonically rendered entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JacobianJson {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub entries: Vec<Vec<String>>,
}

fn edge_weight(g: &Digraph, k: usize, l: usize) -> Polynomial {
    if g.has_edge(k, l) {
        Polynomial::lambda(k, l)
    } else {
        Polynomial::zero()
    }
}

/// Build `J(ψ_G)` from the closed-form entry formulas.
pub fn build_jacobian(g: &Digraph) -> Jacobian {
    let n = g.node_count();
    let cols = precision_columns(n);
    let mut rows: Vec<Variable> = g.edges().iter().map(|&(k, l)| Variable::Lambda(k, l)).collect();
    rows.push(Variable::S);
    let s = Polynomial::s();
    let mut matrix = PolyMatrix::zeros(rows.len(), cols.len());

    for (r, &(k, l)) in g.edges().iter().enumerate() {
        for (c, col) in cols.iter().enumerate() {
            let (i, j) = (col.i(), col.j());
            let entry = if col.is_diagonal() {
                if k == i {
                    (&s * &Polynomial::lambda(i, l)).scale(&rat(2))
                } else {
                    continue;
                }
            } else if (k, l) == (i, j) || (k, l) == (j, i) {
                -&s
            } else if k == i && g.has_edge(j, l) {
                &s * &Polynomial::lambda(j, l)
            } else if k == j && g.has_edge(i, l) {
                &s * &Polynomial::lambda(i, l)
            } else {
                continue;
            };
            matrix.set(r, c, entry);
        }
    }

    let s_row = rows.len() - 1;
    for (c, col) in cols.iter().enumerate() {
        let (i, j) = (col.i(), col.j());
        let entry = if col.is_diagonal() {
            g.ch(i).iter().fold(Polynomial::one(), |acc, l| &acc + &Polynomial::lambda(i, l).pow(2))
        } else {
            let common = g.ch(i).intersection(g.ch(j));
            let shared = common.iter().fold(Polynomial::zero(), |acc, l| {
                &acc + &(Polynomial::lambda(i, l) * Polynomial::lambda(j, l))
            });
            &shared - &(&edge_weight(g, i, j) + &edge_weight(g, j, i))
        };
        matrix.set(s_row, c, entry);
    }

    Jacobian { graph: g.clone(), rows, cols, matrix }
}

/// The `s` row after `R_s ← 2(R_s − Σ_(i,j)∈D (λ_ij / 2s) R_λij)`, computed
/// literally: every edge row is divisible by `s`, so the result is
/// `2 R_s − Σ λ_ij (R_λij / s)`.
pub fn s_row_by_row_operation(jac: &Jacobian) -> Vec<Polynomial> {
    let s = Polynomial::s();
    let mut row: Vec<Polynomial> = jac.s_row().iter().map(|p| p.scale(&rat(2))).collect();
    for (r, var) in jac.row_labels().iter().enumerate() {
        let Variable::Lambda(k, l) = *var else { continue };
        let weight = Polynomial::lambda(k, l);
        for (c, entry) in jac.matrix.row(r).iter().enumerate() {
            if entry.is_zero() {
                continue;
            }
            let reduced = entry.div_exact(&s).expect("edge rows are divisible by s");
            row[c] -= &(&weight * &reduced);
        }
    }
    row
}

/// `J` with the `s` row replaced by its simplified form: `2` on `K_ii`, `−λ`
/// of the edge between `i` and `j` on `K_ij`, zero elsewhere.
pub fn simplify_s_row(jac: &Jacobian) -> Jacobian {
    let g = &jac.graph;
    let closed_form: Vec<Polynomial> = jac
        .cols
        .iter()
        .map(|col| {
            if col.is_diagonal() {
                Polynomial::from(2)
            } else {
                -&(&edge_weight(g, col.i(), col.j()) + &edge_weight(g, col.j(), col.i()))
            }
        })
        .collect();
    debug_assert_eq!(closed_form, s_row_by_row_operation(jac));
    let mut out = jac.clone();
    let s_row = out.rows.len() - 1;
    for (c, p) in closed_form.into_iter().enumerate() {
        out.matrix.set(s_row, c, p);
    }
    out
}

fn precision_with<T: Scalar>(g: &Digraph, s: &T, weight: impl Fn(usize, usize) -> T) -> Vec<Vec<T>> {
    let n = g.node_count();
    // (I − Λ) with Λ supported on the edges.
    let a: Vec<Vec<T>> = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| {
                    if i == j {
                        T::one()
                    } else if g.has_edge(i, j) {
                        weight(i, j).negated()
                    } else {
                        T::zero()
                    }
                })
                .collect()
        })
        .collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let dot = (0..n).fold(T::zero(), |acc, m| acc.plus(&a[i][m].times(&a[j][m])));
                    s.times(&dot)
                })
                .collect()
        })
        .collect()
}

/// `K = s(I − Λ)(I − Λ)ᵀ` at a point; edge weights missing from the point are zero.
pub fn precision_matrix<T: Scalar>(g: &Digraph, point: &ParamPoint<T>) -> Vec<Vec<T>> {
    precision_with(g, point.s(), |k, l| point.weight(k, l))
}

/// `K` with symbolic entries.
pub fn precision_matrix_symbolic(g: &Digraph) -> Vec<Vec<Polynomial>> {
    precision_with(g, &Polynomial::s(), Polynomial::lambda)
}

/// Central finite differences of `(Λ, s) ↦ upper triangle of K`, laid out like
/// [`build_jacobian`] (parameters as rows, precision entries as columns).
pub fn numeric_jacobian_fd(g: &Digraph, point: &ParamPoint<f64>, h: f64) -> Result<Vec<Vec<f64>>, EvalError> {
    assert!(h > 0.0, "step must be positive");
    let mut params: Vec<Variable> = g.edges().iter().map(|&(k, l)| Variable::Lambda(k, l)).collect();
    params.push(Variable::S);
    for &v in &params {
        point.get(v).ok_or(EvalError::Unassigned(v))?;
    }
    let cols = precision_columns(g.node_count());
    let upper = |p: &ParamPoint<f64>| -> Vec<f64> {
        let k = precision_matrix(g, p);
        cols.iter().map(|c| k[c.i() - 1][c.j() - 1]).collect()
    };
    let shifted = |v: Variable, delta: f64| -> ParamPoint<f64> {
        let mut p = point.clone();
        *p.values.get_mut(&v).expect("checked above") += delta;
        p
    };
    Ok(params
        .iter()
        .map(|&v| {
            let plus = upper(&shifted(v, h));
            let minus = upper(&shifted(v, -h));
            plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * h)).collect()
        })
        .collect())
}

/// A uniformly random rational with small numerator and denominator, for tests
/// and examples that need generic-looking exact points.
pub fn small_rational(rng: &mut impl rand::Rng) -> BigRational {
    let n: i64 = rng.random_range(-9..=9);
    let d: i64 = rng.random_range(1..=7);
    crate::poly::ratio(n, d)
}
