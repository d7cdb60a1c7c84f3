//! Verification campaigns: the parentally-closed-set sweep over same
//! out-degree pairs, the complete-graph edge-flip sweep, family
//! classification, and the criterion soundness sweep.
//!
//! Long sweeps run as a work queue over pair indices in fixed-size chunks.
//! Results are merged in index order by a single writer, so the worker count
//! never changes the output. After each chunk an optional checkpoint records
//! the partial result, and a rerun with the same configuration resumes from it.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::criteria::{
    criterion_witnesses, necessary_condition_checks, pc_criterion, CriterionError, CriterionKind, CriterionWitness,
    DistinguishReport, STAGE_PC,
};
use crate::digraph::{simple_digraph_count, unordered_pairs, Digraph, GraphError, OutDegreeSequence};
use crate::matroid::{compare_oracles, ColumnSet, MatroidError, RankOracle, RankOracleConfig, Verdict};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Default number of pairs sampled per out-degree class.
pub const DEFAULT_SAMPLE_SIZE: u64 = 100_000;
/// Pairs per work chunk (and per checkpoint).
pub const DEFAULT_CHUNK_SIZE: u64 = 10_000;
/// Largest node count swept exhaustively without an explicit override.
pub const EXHAUSTIVE_NODE_LIMIT: usize = 5;
/// Largest node count whose graphs can be bucketed by out-degree sequence.
pub const SAMPLED_NODE_LIMIT: usize = 6;
/// Orientations sampled for large complete-graph sweeps without `--full`.
pub const COMPLETE_SAMPLE_SIZE: usize = 1000;
const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("graphs have different node counts ({left} and {right})")]
    NodeCountMismatch { left: usize, right: usize },
    #[error("checkpoint {path} belongs to a different configuration")]
    CheckpointMismatch { path: PathBuf },
    #[error("bad checkpoint {path}: {reason}")]
    BadCheckpoint { path: PathBuf, reason: String },
    #[error("sweep stopped before completion; resume from pair index {next_index}")]
    Interrupted { next_index: u64 },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Criterion(#[from] CriterionError),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
}

/// Fields every JSON report carries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub tool_version: String,
    pub seed: u64,
    pub prime: u64,
    pub trials: u32,
}

impl ReportMeta {
    pub fn new(cfg: &RankOracleConfig) -> Self {
        ReportMeta { tool_version: TOOL_VERSION.to_string(), seed: cfg.seed(), prime: cfg.prime(), trials: cfg.trials() }
    }
}

/// Wall-clock information, kept apart so the rest of a report is reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_seconds: f64,
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool, HarnessError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start {workers} workers: {e}")))
}

/// Labeled simple digraphs on `n` nodes grouped by out-degree sequence, as
/// enumeration indices. Complete graphs are left out unless requested.
pub fn out_degree_classes(n: usize, include_complete: bool) -> Result<Vec<(OutDegreeSequence, Vec<u32>)>, HarnessError> {
    if n == 0 || n > SAMPLED_NODE_LIMIT {
        return Err(HarnessError::Config(format!("out-degree bucketing supports 1..={SAMPLED_NODE_LIMIT} nodes, got {n}")));
    }
    let pairs: Vec<(usize, usize)> = unordered_pairs(n).collect();
    let total = simple_digraph_count(n);
    let chunks: Vec<BTreeMap<u64, Vec<u32>>> = (0..total)
        .into_par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<u64, Vec<u32>>, index| {
            let mut degrees = [0u8; SAMPLED_NODE_LIMIT];
            let mut rest = index;
            let mut complete = true;
            for &(u, v) in &pairs {
                match rest % 3 {
                    0 => complete = false,
                    1 => degrees[u - 1] += 1,
                    _ => degrees[v - 1] += 1,
                }
                rest /= 3;
            }
            if include_complete || !complete {
                let mut sorted = degrees[..n].to_vec();
                sorted.sort_unstable_by(|a, b| b.cmp(a));
                let key = sorted.iter().fold(0u64, |k, &d| k * 8 + d as u64);
                acc.entry(key).or_default().push(index as u32);
            }
            acc
        })
        .collect();
    let mut merged: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for chunk in chunks {
        for (key, mut members) in chunk {
            merged.entry(key).or_default().append(&mut members);
        }
    }
    Ok(merged
        .into_values()
        .map(|mut members| {
            members.sort_unstable();
            let g = Digraph::from_enumeration_index(n, members[0] as u64).expect("enumerated index");
            (g.out_degree_sequence(), members)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum SweepMode {
    Exhaustive,
    /// Up to `per_class` pairs per class: every pair when a class has no more
    /// than that, otherwise unordered pairs drawn uniformly with replacement.
    Sampled { per_class: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub n: usize,
    pub mode: SweepMode,
    pub seed: u64,
    pub workers: usize,
    /// Report destination; the pair stream and checkpoint live next to it.
    pub output: Option<PathBuf>,
    /// Permit exhaustive sweeps above [`EXHAUSTIVE_NODE_LIMIT`] nodes.
    pub allow_large_exhaustive: bool,
    pub chunk_size: u64,
    /// Stop (as if interrupted) after this many chunks; for resumption tests.
    pub stop_after_chunks: Option<u64>,
}

impl SweepConfig {
    pub fn exhaustive(n: usize) -> Self {
        SweepConfig {
            n,
            mode: SweepMode::Exhaustive,
            seed: crate::matroid::DEFAULT_SEED,
            workers: default_workers(),
            output: None,
            allow_large_exhaustive: false,
            chunk_size: DEFAULT_CHUNK_SIZE,
            stop_after_chunks: None,
        }
    }

    pub fn sampled(n: usize, per_class: u64) -> Self {
        SweepConfig { mode: SweepMode::Sampled { per_class }, ..SweepConfig::exhaustive(n) }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n < 2 || self.n > SAMPLED_NODE_LIMIT {
            return Err(HarnessError::Config(format!("node count must be in 2..={SAMPLED_NODE_LIMIT}, got {}", self.n)));
        }
        match self.mode {
            SweepMode::Exhaustive if self.n > EXHAUSTIVE_NODE_LIMIT && !self.allow_large_exhaustive => {
                return Err(HarnessError::Config(format!(
                    "exhaustive sweeps are limited to {EXHAUSTIVE_NODE_LIMIT} nodes without an override"
                )))
            }
            SweepMode::Sampled { per_class: 0 } => {
                return Err(HarnessError::Config("sample size must be at least 1".into()))
            }
            _ => {}
        }
        if self.workers == 0 || self.chunk_size == 0 {
            return Err(HarnessError::Config("workers and chunk size must be positive".into()));
        }
        Ok(())
    }

    fn echo(&self) -> ConfigEcho {
        ConfigEcho { n: self.n, mode: self.mode, seed: self.seed, chunk_size: self.chunk_size }
    }

    /// SHA-256 of the settings that determine the result.
    pub fn config_hash(&self) -> String {
        let bytes = serde_json::to_vec(&self.echo()).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }

    pub fn stream_path(&self) -> Option<PathBuf> {
        self.output.as_ref().map(|p| sibling(p, "pairs.jsonl"))
    }

    pub fn checkpoint_path(&self) -> Option<PathBuf> {
        self.output.as_ref().map(|p| sibling(p, "checkpoint"))
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".");
    name.push(suffix);
    path.with_file_name(name)
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub n: usize,
    #[serde(flatten)]
    pub mode: SweepMode,
    pub seed: u64,
    pub chunk_size: u64,
}

/// A same-sequence pair without a parentally closed witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub g1: Digraph,
    pub g2: Digraph,
    pub same_scc: bool,
}

impl PairRecord {
    /// Different strongly connected components: the conjecture is violated.
    pub fn is_counterexample(&self) -> bool {
        !self.same_scc
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassResult {
    pub sequence: Vec<usize>,
    pub graphs: u64,
    pub pairs_tested: u64,
    pub witnesses: u64,
    pub witnessless: Vec<PairRecord>,
}

impl ClassResult {
    pub fn counterexamples(&self) -> usize {
        self.witnessless.iter().filter(|r| r.is_counterexample()).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    #[serde(flatten)]
    pub meta: ReportMeta,
    pub config: ConfigEcho,
    pub classes: Vec<ClassResult>,
    pub pairs_tested: u64,
    pub witnesses: u64,
    pub witnessless: u64,
    pub counterexamples: u64,
    pub timing: Timing,
}

impl SweepResult {
    /// The report with the timing block removed; identical across reruns.
    pub fn reproducible_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().expect("object").remove("timing");
        v
    }
}

/// Outcome of the parentally-closed-set check for one pair.
pub fn check_pc_pair(g1: &Digraph, g2: &Digraph) -> Option<PairRecord> {
    match pc_criterion(g1, g2) {
        Some(_) => None,
        None => Some(PairRecord {
            g1: g1.clone(),
            g2: g2.clone(),
            same_scc: g1.strongly_connected_components() == g2.strongly_connected_components(),
        }),
    }
}

/// `(a, b)` with `a < b` at position `p` of the lexicographic list of pairs from `0..m`.
fn unrank_pair(m: u64, p: u64) -> (u64, u64) {
    let before = |a: u64| a * (2 * m - a - 1) / 2;
    let (mut lo, mut hi) = (0, m - 1);
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if before(mid) <= p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = if before(hi) <= p && hi < m - 1 { hi } else { lo };
    (a, a + 1 + (p - before(a)))
}

struct ClassPlan {
    members: Vec<u32>,
    pairs: u64,
    exhaustive: bool,
}

fn plan_classes(classes: &[(OutDegreeSequence, Vec<u32>)], mode: SweepMode) -> Vec<ClassPlan> {
    classes
        .iter()
        .map(|(_, members)| {
            let m = members.len() as u64;
            let all = m * m.saturating_sub(1) / 2;
            let (pairs, exhaustive) = match mode {
                SweepMode::Exhaustive => (all, true),
                SweepMode::Sampled { per_class } if all <= per_class => (all, true),
                SweepMode::Sampled { per_class } => (per_class, false),
            };
            ClassPlan { members: members.clone(), pairs, exhaustive }
        })
        .collect()
}

fn pair_for(plan: &ClassPlan, class: usize, p: u64, seed: u64) -> (u32, u32) {
    let m = plan.members.len() as u64;
    let (a, b) = if plan.exhaustive {
        unrank_pair(m, p)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(crate::matroid::trial_seed(seed, class as u64, p as u32) ^ (p >> 32));
        let a = rng.random_range(0..m);
        let mut b = rng.random_range(0..m - 1);
        if b >= a {
            b += 1;
        }
        (a.min(b), a.max(b))
    };
    (plan.members[a as usize], plan.members[b as usize])
}

#[derive(Debug, Serialize, Deserialize)]
struct Checkpoint {
    version: u32,
    config_hash: String,
    next_index: u64,
    stream_len: u64,
    classes: Vec<ClassResult>,
}

fn read_checkpoint(path: &Path, hash: &str) -> Result<Option<Checkpoint>, HarnessError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let cp: Checkpoint = serde_json::from_str(&text)
        .map_err(|e| HarnessError::BadCheckpoint { path: path.to_path_buf(), reason: e.to_string() })?;
    if cp.version != CHECKPOINT_VERSION {
        return Err(HarnessError::BadCheckpoint {
            path: path.to_path_buf(),
            reason: format!("unsupported version {}", cp.version),
        });
    }
    if cp.config_hash != hash {
        return Err(HarnessError::CheckpointMismatch { path: path.to_path_buf() });
    }
    Ok(Some(cp))
}

fn write_atomically(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = sibling(path, "tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(tmp, path)
}

/// Check every (or a sample of) same-out-degree-sequence pair for a
/// parentally closed witness, recording the pairs without one.
pub fn verify_pc_conjecture(cfg: &SweepConfig) -> Result<SweepResult, HarnessError> {
    cfg.validate()?;
    let started = Instant::now();
    let classes = out_degree_classes(cfg.n, false)?;
    let plans = plan_classes(&classes, cfg.mode);
    let offsets: Vec<u64> = plans
        .iter()
        .scan(0u64, |acc, p| {
            let start = *acc;
            *acc += p.pairs;
            Some(start)
        })
        .collect();
    let total: u64 = plans.iter().map(|p| p.pairs).sum();

    let mut results: Vec<ClassResult> = classes
        .iter()
        .zip(&plans)
        .map(|((seq, members), _)| ClassResult {
            sequence: seq.as_slice().to_vec(),
            graphs: members.len() as u64,
            pairs_tested: 0,
            witnesses: 0,
            witnessless: Vec::new(),
        })
        .collect();

    let hash = cfg.config_hash();
    let checkpoint_path = cfg.checkpoint_path();
    let mut next_index = 0;
    let mut stream: Option<File> = None;
    let mut stream_len = 0u64;
    if let Some(cp_path) = &checkpoint_path {
        let stream_path = cfg.stream_path().expect("output set");
        match read_checkpoint(cp_path, &hash)? {
            Some(cp) => {
                next_index = cp.next_index;
                stream_len = cp.stream_len;
                results = cp.classes;
                let f = OpenOptions::new().write(true).create(true).truncate(false).open(&stream_path)?;
                f.set_len(stream_len)?;
                drop(f);
                stream = Some(OpenOptions::new().append(true).open(&stream_path)?);
            }
            None => stream = Some(File::create(&stream_path)?),
        }
    }

    let pool = thread_pool(cfg.workers)?;
    let mut chunks_done = 0u64;
    while next_index < total {
        if cfg.stop_after_chunks.is_some_and(|limit| chunks_done >= limit) {
            return Err(HarnessError::Interrupted { next_index });
        }
        let end = (next_index + cfg.chunk_size).min(total);
        let outcomes: Vec<(usize, Option<PairRecord>)> = pool.install(|| {
            (next_index..end)
                .into_par_iter()
                .map(|index| {
                    let class = offsets.partition_point(|&o| o <= index) - 1;
                    let (a, b) = pair_for(&plans[class], class, index - offsets[class], cfg.seed);
                    let g1 = Digraph::from_enumeration_index(cfg.n, a as u64).expect("enumerated index");
                    let g2 = Digraph::from_enumeration_index(cfg.n, b as u64).expect("enumerated index");
                    (class, check_pc_pair(&g1, &g2))
                })
                .collect()
        });
        for (class, outcome) in outcomes {
            let r = &mut results[class];
            r.pairs_tested += 1;
            match outcome {
                None => r.witnesses += 1,
                Some(record) => {
                    if let Some(f) = stream.as_mut() {
                        let mut line = serde_json::to_vec(&record)?;
                        line.push(b'\n');
                        f.write_all(&line)?;
                        stream_len += line.len() as u64;
                    }
                    r.witnessless.push(record);
                }
            }
        }
        next_index = end;
        chunks_done += 1;
        if let (Some(cp_path), Some(f)) = (&checkpoint_path, stream.as_mut()) {
            f.flush()?;
            let cp = Checkpoint {
                version: CHECKPOINT_VERSION,
                config_hash: hash.clone(),
                next_index,
                stream_len,
                classes: results.clone(),
            };
            write_atomically(cp_path, &serde_json::to_vec(&cp)?)?;
        }
    }

    let witnessless: u64 = results.iter().map(|r| r.witnessless.len() as u64).sum();
    let report = SweepResult {
        meta: ReportMeta { seed: cfg.seed, ..ReportMeta::new(&RankOracleConfig::default()) },
        config: cfg.echo(),
        pairs_tested: results.iter().map(|r| r.pairs_tested).sum(),
        witnesses: results.iter().map(|r| r.witnesses).sum(),
        witnessless,
        counterexamples: results.iter().map(|r| r.counterexamples() as u64).sum(),
        classes: results,
        timing: Timing { elapsed_seconds: started.elapsed().as_secs_f64() },
    };
    if let Some(out) = &cfg.output {
        write_atomically(out, &serde_json::to_vec_pretty(&report)?)?;
        if let Some(cp_path) = &checkpoint_path {
            fs::remove_file(cp_path)?;
        }
    }
    Ok(report)
}

/// Which complete digraphs the edge-flip sweep covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlipScope {
    /// Every node other than `p−1` and `p` is a parent of both; the edges
    /// among the remaining nodes are oriented every possible way.
    SharedParents,
    /// Every orientation of every edge other than `{p−1, p}`.
    AllOrientations,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompleteSweepConfig {
    pub p: usize,
    pub scope: FlipScope,
    /// Sweep every orientation at `p = 6` instead of sampling.
    pub full: bool,
    pub workers: usize,
    pub rank: RankOracleConfig,
}

impl CompleteSweepConfig {
    pub fn new(p: usize) -> Self {
        CompleteSweepConfig {
            p,
            scope: FlipScope::SharedParents,
            full: false,
            workers: default_workers(),
            rank: RankOracleConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlipOutcome {
    /// Bit `k` orients the `k`-th free unordered pair from its larger to its
    /// smaller node.
    pub orientation: u64,
    pub verdict: Verdict,
    pub witness: Option<ColumnSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompleteSweepReport {
    #[serde(flatten)]
    pub meta: ReportMeta,
    pub p: usize,
    pub scope: FlipScope,
    pub orientations_total: u64,
    pub sampled: bool,
    pub checked: usize,
    pub equal: usize,
    pub different: usize,
    pub pairs: Vec<FlipOutcome>,
    pub timing: Timing,
}

fn free_pairs(p: usize, scope: FlipScope) -> Vec<(usize, usize)> {
    match scope {
        FlipScope::SharedParents => unordered_pairs(p).filter(|&(_, j)| j < p - 1).collect(),
        FlipScope::AllOrientations => unordered_pairs(p).filter(|&pair| pair != (p - 1, p)).collect(),
    }
}

/// The two complete digraphs sharing `orientation` on the free pairs of
/// `scope`, with `p−1 -> p` in the first and `p -> p−1` in the second.
pub fn flip_pair(p: usize, scope: FlipScope, orientation: u64) -> Result<(Digraph, Digraph), GraphError> {
    let mut edges: Vec<(usize, usize)> = free_pairs(p, scope)
        .into_iter()
        .enumerate()
        .map(|(k, (i, j))| if orientation >> k & 1 == 0 { (i, j) } else { (j, i) })
        .collect();
    if scope == FlipScope::SharedParents {
        edges.extend((1..p.saturating_sub(1)).flat_map(|k| [(k, p - 1), (k, p)]));
    }
    edges.push((p - 1, p));
    let g1 = Digraph::new(p, edges.iter().copied())?;
    edges.pop();
    edges.push((p, p - 1));
    Ok((g1, Digraph::new(p, edges)?))
}

/// Compare the matroids of every edge-flip pair of complete digraphs on `p` nodes.
pub fn verify_complete_conjecture(cfg: &CompleteSweepConfig) -> Result<CompleteSweepReport, HarnessError> {
    if !(2..=6).contains(&cfg.p) {
        return Err(HarnessError::Config(format!("complete-graph sweep supports 2..=6 nodes, got {}", cfg.p)));
    }
    let started = Instant::now();
    let total = 1u64 << free_pairs(cfg.p, cfg.scope).len();
    let sampled = !cfg.full && total > COMPLETE_SAMPLE_SIZE as u64 * 4;
    let orientations: Vec<u64> = if sampled {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rank.seed());
        let mut picked: Vec<u64> =
            sample_indices(&mut rng, total as usize, COMPLETE_SAMPLE_SIZE).into_iter().map(|i| i as u64).collect();
        picked.sort_unstable();
        picked
    } else {
        (0..total).collect()
    };
    let pool = thread_pool(cfg.workers)?;
    let pairs = pool.install(|| {
        orientations
            .par_iter()
            .map(|&orientation| {
                let (g1, g2) = flip_pair(cfg.p, cfg.scope, orientation)?;
                let c = compare_oracles(&RankOracle::new(&g1, &cfg.rank)?, &RankOracle::new(&g2, &cfg.rank)?)?;
                Ok(FlipOutcome { orientation, verdict: c.verdict, witness: c.witness })
            })
            .collect::<Result<Vec<_>, HarnessError>>()
    })?;
    let equal = pairs.iter().filter(|o| o.verdict == Verdict::Equal).count();
    Ok(CompleteSweepReport {
        meta: ReportMeta::new(&cfg.rank),
        p: cfg.p,
        scope: cfg.scope,
        orientations_total: total,
        sampled,
        checked: pairs.len(),
        equal,
        different: pairs.len() - equal,
        pairs,
        timing: Timing { elapsed_seconds: started.elapsed().as_secs_f64() },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyConditions {
    pub all_non_complete: bool,
    pub unique_out_degree_sequences: bool,
    pub all_transitive_triangle_free: bool,
    pub pairwise_pc_witnesses: bool,
}

impl FamilyConditions {
    /// Whether the family is certified by one of the three graphical conditions.
    pub fn certified(&self) -> bool {
        self.all_non_complete
            && (self.unique_out_degree_sequences || self.all_transitive_triangle_free || self.pairwise_pc_witnesses)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyPair {
    pub first: String,
    pub second: String,
    pub report: DistinguishReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyReport {
    #[serde(flatten)]
    pub meta: ReportMeta,
    pub graphs: Vec<String>,
    pub pairs: Vec<FamilyPair>,
    /// Every pair has different Jacobian matroids.
    pub identifiable: bool,
    pub conditions: FamilyConditions,
}

/// Distinguish every unordered pair of a family of named graphs.
pub fn classify_family(family: &[(String, Digraph)], cfg: &RankOracleConfig) -> Result<FamilyReport, HarnessError> {
    if let Some((_, first)) = family.first() {
        if let Some((_, bad)) = family.iter().find(|(_, g)| g.node_count() != first.node_count()) {
            return Err(HarnessError::NodeCountMismatch { left: first.node_count(), right: bad.node_count() });
        }
    }
    let oracles = family.iter().map(|(_, g)| RankOracle::new(g, cfg)).collect::<Result<Vec<_>, _>>()?;
    let index_pairs: Vec<(usize, usize)> =
        (0..family.len()).flat_map(|a| (a + 1..family.len()).map(move |b| (a, b))).collect();
    let pairs = index_pairs
        .par_iter()
        .map(|&(a, b)| {
            Ok(FamilyPair {
                first: family[a].0.clone(),
                second: family[b].0.clone(),
                report: crate::criteria::distinguish_with_oracles(&oracles[a], &oracles[b])?,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let identifiable = pairs
        .iter()
        .all(|p| p.report.matroid.as_ref().is_some_and(|m| m.verdict == Verdict::Different));
    let mut sequences: Vec<OutDegreeSequence> = family.iter().map(|(_, g)| g.out_degree_sequence()).collect();
    sequences.sort();
    let conditions = FamilyConditions {
        all_non_complete: family.iter().all(|(_, g)| !g.is_complete()),
        unique_out_degree_sequences: sequences.windows(2).all(|w| w[0] != w[1]),
        all_transitive_triangle_free: family.iter().all(|(_, g)| g.is_transitive_triangle_free()),
        pairwise_pc_witnesses: pairs.iter().all(|p| p.report.stage(STAGE_PC).is_some_and(|s| s.fired)),
    };
    Ok(FamilyReport {
        meta: ReportMeta::new(cfg),
        graphs: family.iter().map(|(name, _)| name.clone()).collect(),
        pairs,
        identifiable,
        conditions,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SoundnessViolation {
    pub g1: Digraph,
    pub g2: Digraph,
    pub reason: String,
}

/// A criterion witness whose column set has equal rank in both graphs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstructionGap {
    pub g1: Digraph,
    pub g2: Digraph,
    pub witness: CriterionWitness,
    pub ranks: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SoundnessReport {
    #[serde(flatten)]
    pub meta: ReportMeta,
    pub n: usize,
    pub pairs: u64,
    pub criterion_fired: u64,
    pub equal: u64,
    pub different: u64,
    pub necessary_violations: u64,
    pub witnesses_checked: u64,
    /// A criterion fired on equal matroids, or equal matroids broke a
    /// necessary condition.
    pub violations: Vec<SoundnessViolation>,
    pub construction_gaps: Vec<ConstructionGap>,
    pub timing: Timing,
}

impl SoundnessReport {
    pub fn gaps_of(&self, kind: CriterionKind) -> usize {
        self.construction_gaps.iter().filter(|g| g.witness.kind == kind).count()
    }
}

struct PairAudit {
    fired: bool,
    verdict: Verdict,
    necessary_violated: bool,
    witnesses: u64,
    reasons: Vec<String>,
    gaps: Vec<(CriterionWitness, (usize, usize))>,
}

fn audit_pair(a: &RankOracle, b: &RankOracle) -> Result<PairAudit, HarnessError> {
    let (g1, g2) = (a.graph(), b.graph());
    let comparison = compare_oracles(a, b)?;
    let necessary = necessary_condition_checks(g1, g2)?;
    let witnesses = criterion_witnesses(g1, g2)?;
    let fired = g1.edge_count() != g2.edge_count() || witnesses.iter().any(Option::is_some);
    let mut reasons = Vec::new();
    if comparison.verdict == Verdict::Equal {
        if fired {
            reasons.push("a criterion fired on equal matroids".to_string());
        }
        if necessary.violated() {
            reasons.push("equal matroids but necessary conditions differ".to_string());
        }
    }
    let mut gaps = Vec::new();
    let mut checked = 0;
    for w in witnesses.into_iter().flatten() {
        let Some(columns) = &w.columns else { continue };
        checked += 1;
        let ranks = (a.rank(columns)?, b.rank(columns)?);
        let (high, low) = if w.higher_rank_graph() == 1 { ranks } else { (ranks.1, ranks.0) };
        if high <= low {
            gaps.push((w, ranks));
        }
    }
    Ok(PairAudit {
        fired,
        verdict: comparison.verdict,
        necessary_violated: necessary.violated(),
        witnesses: checked,
        reasons,
        gaps,
    })
}

/// Every unordered pair of distinct `n`-node graphs with equal edge counts:
/// whenever a criterion fires the matroids must differ, and whenever the
/// matroids agree the necessary conditions must hold. Witness column sets
/// without a rank gap are collected separately.
pub fn criterion_soundness_sweep(n: usize, cfg: &RankOracleConfig, workers: usize) -> Result<SoundnessReport, HarnessError> {
    if !(2..=4).contains(&n) {
        return Err(HarnessError::Config(format!("soundness sweep supports 2..=4 nodes, got {n}")));
    }
    let started = Instant::now();
    let graphs: Vec<Digraph> = crate::digraph::SimpleDigraphs::new(n)?.collect();
    let pool = thread_pool(workers)?;
    let oracles = pool.install(|| graphs.par_iter().map(|g| RankOracle::new(g, cfg)).collect::<Result<Vec<_>, _>>())?;
    let pairs: Vec<(usize, usize)> = (0..graphs.len())
        .flat_map(|a| (a + 1..graphs.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| graphs[a].edge_count() == graphs[b].edge_count())
        .collect();
    let audits = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(a, b)| audit_pair(&oracles[a], &oracles[b]).map(|o| (a, b, o)))
            .collect::<Result<Vec<_>, HarnessError>>()
    })?;
    let mut report = SoundnessReport {
        meta: ReportMeta::new(cfg),
        n,
        pairs: audits.len() as u64,
        criterion_fired: 0,
        equal: 0,
        different: 0,
        necessary_violations: 0,
        witnesses_checked: 0,
        violations: Vec::new(),
        construction_gaps: Vec::new(),
        timing: Timing { elapsed_seconds: 0.0 },
    };
    for (a, b, audit) in audits {
        report.criterion_fired += audit.fired as u64;
        report.necessary_violations += audit.necessary_violated as u64;
        report.witnesses_checked += audit.witnesses;
        match audit.verdict {
            Verdict::Equal => report.equal += 1,
            Verdict::Different => report.different += 1,
        }
        let (g1, g2) = (&graphs[a], &graphs[b]);
        for reason in audit.reasons {
            report.violations.push(SoundnessViolation { g1: g1.clone(), g2: g2.clone(), reason });
        }
        for (witness, ranks) in audit.gaps {
            report.construction_gaps.push(ConstructionGap { g1: g1.clone(), g2: g2.clone(), witness, ranks });
        }
    }
    report.timing.elapsed_seconds = started.elapsed().as_secs_f64();
    Ok(report)
}
