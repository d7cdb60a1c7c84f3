//! The `sem-matroid` command line.
//!
//! Exit codes: 0 on success, 1 when a command fails on its input (unreadable
//! graph, mismatched node counts, an interrupted sweep), 2 on usage errors.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use sem_matroid::criteria::{distinguish_without_matroid, pc_sets, DistinguishReport};
use sem_matroid::digraph::parse_graph;
use sem_matroid::harness::{
    classify_family, criterion_soundness_sweep, default_workers, verify_complete_conjecture, verify_pc_conjecture,
    CompleteSweepConfig, FlipScope, SweepConfig, SweepMode,
};
use sem_matroid::matroid::{DEFAULT_SEED, MatroidComparison};
use sem_matroid::{
    build_jacobian, distinguish, matroids_equal, simplify_s_row, ColumnSet, Digraph, RankOracle,
    RankOracleConfig, ReportMeta,
};
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(name = "sem-matroid", version, about = "Jacobian matroids of homoscedastic linear SEMs on directed graphs")]
struct Cli {
    /// Worker threads for sweeps (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Master seed for the randomized rank oracle and sampling.
    #[arg(long, global = true, env = "SEM_MATROID_SEED")]
    seed: Option<u64>,
    /// Prime modulus for the rank oracle.
    #[arg(long, global = true)]
    prime: Option<u64>,
    /// Independent random evaluation points per rank query.
    #[arg(long, global = true)]
    trials: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Pretty,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the symbolic Jacobian of the parameterization.
    Jacobian {
        graph: PathBuf,
        /// Replace the `s` row by its simplified form.
        #[arg(long)]
        simplify_s_row: bool,
        #[arg(long, value_enum, default_value = "pretty")]
        format: Format,
    },
    /// Generic rank of a column set (all columns by default).
    Rank {
        graph: PathBuf,
        /// Comma-separated columns, e.g. K11,K12,K24.
        #[arg(long)]
        columns: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Compare the Jacobian matroids of two graphs.
    Compare {
        graph1: PathBuf,
        graph2: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run the graphical criteria only.
    Criteria {
        graph1: PathBuf,
        graph2: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// List the parentally closed sets of a node.
    PcSets {
        graph: PathBuf,
        #[arg(long)]
        node: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run every criterion, then the matroid comparison.
    Distinguish {
        graph1: PathBuf,
        graph2: PathBuf,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        skip_matroid: bool,
    },
    /// Look for same-out-degree-sequence pairs without a parentally closed witness.
    VerifyPcConjecture {
        #[arg(long)]
        n: usize,
        /// Pairs per out-degree class; exhaustive when absent.
        #[arg(long)]
        sample: Option<u64>,
        /// Report file; the pair stream and checkpoint are written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Allow exhaustive sweeps above 5 nodes.
        #[arg(long)]
        allow_large_exhaustive: bool,
        #[arg(long, default_value_t = sem_matroid::harness::DEFAULT_CHUNK_SIZE)]
        chunk_size: u64,
        #[arg(long)]
        json: bool,
    },
    /// Compare matroids of complete digraphs that differ in the edge between p−1 and p.
    VerifyCompleteConjecture {
        #[arg(long)]
        p: usize,
        /// Orient every other edge every way, not only with p−1 and p below all other nodes.
        #[arg(long)]
        all_orientations: bool,
        /// Never sample orientations.
        #[arg(long)]
        full: bool,
        #[arg(long)]
        json: bool,
    },
    /// Distinguish every pair of a family of graphs.
    Classify {
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Check the criteria against the matroid oracle on all equal-edge-count pairs.
    SoundnessSweep {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long)]
        json: bool,
    },
}

/// Parse `args` (program name first) and run the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match execute(&cli, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn read_graph(path: &Path) -> Result<Digraph> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_graph(&text).with_context(|| format!("cannot parse {}", path.display()))
}

fn rank_config(cli: &Cli) -> Result<RankOracleConfig> {
    let default = RankOracleConfig::default();
    Ok(RankOracleConfig::new(
        cli.prime.unwrap_or(default.prime()),
        cli.trials.unwrap_or(default.trials()),
        cli.seed.unwrap_or(DEFAULT_SEED),
    )?)
}

fn workers(cli: &Cli) -> usize {
    cli.workers.unwrap_or_else(default_workers)
}

/// `value` (an object) with the report metadata fields added.
fn with_meta(mut value: Value, meta: &ReportMeta) -> Value {
    if let (Some(obj), Value::Object(extra)) = (value.as_object_mut(), json!(meta)) {
        obj.extend(extra);
    }
    value
}

fn print_json(out: &mut impl Write, value: &Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn comparison_text(c: &MatroidComparison) -> String {
    let mut text = format!("{} (ranks {}, {})", c.verdict, c.ranks.0, c.ranks.1);
    if let Some(w) = &c.witness {
        text.push_str(&format!("\nwitness {w}"));
    }
    text.push_str(&format!("\nfailure bound {:.3e}", c.failure_bound));
    text
}

fn report_text(r: &DistinguishReport) -> String {
    let mut lines: Vec<String> = r
        .stages
        .iter()
        .map(|s| match &s.witness {
            Some(w) if s.fired => format!("{}: fired {w}", s.name),
            _ => format!("{}: {}", s.name, if s.fired { "fired" } else { "no" }),
        })
        .collect();
    if let Some(m) = &r.matroid {
        let witness = m.witness.as_ref().map(|w| format!(" on {w}")).unwrap_or_default();
        lines.push(format!("matroid: {}{witness}", m.verdict));
    }
    if r.pc_search_truncated {
        lines.push("note: some neighborhoods were too large for the parentally closed search".into());
    }
    lines.push(format!("decided by: {}", r.decided_by.unwrap_or("nothing")));
    lines.join("\n")
}

fn execute(cli: &Cli, out: &mut impl Write) -> Result<()> {
    let cfg = rank_config(cli)?;
    let meta = ReportMeta::new(&cfg);
    match &cli.command {
        Command::Jacobian { graph, simplify_s_row: simplify, format } => {
            let mut jac = build_jacobian(&read_graph(graph)?);
            if *simplify {
                jac = simplify_s_row(&jac);
            }
            match format {
                Format::Pretty => write!(out, "{}", jac.to_pretty())?,
                Format::Json => print_json(out, &json!(jac.to_json()))?,
            }
        }
        Command::Rank { graph, columns, json } => {
            let g = read_graph(graph)?;
            let oracle = RankOracle::new(&g, &cfg)?;
            let set: ColumnSet = match columns {
                Some(list) => list.parse()?,
                None => oracle.columns().iter().copied().collect(),
            };
            let rank = oracle.rank(&set)?;
            if *json {
                let v = json!({"columns": set, "rank": rank, "independent": rank == set.len(), "failure_bound": oracle.failure_bound()});
                print_json(out, &with_meta(v, &meta))?;
            } else {
                writeln!(out, "{rank}")?;
            }
        }
        Command::Compare { graph1, graph2, json } => {
            let c = matroids_equal(&read_graph(graph1)?, &read_graph(graph2)?, &cfg)?;
            if *json {
                print_json(out, &with_meta(json!(c), &meta))?;
            } else {
                writeln!(out, "{}", comparison_text(&c))?;
            }
        }
        Command::Criteria { graph1, graph2, json } => {
            let r = distinguish_without_matroid(&read_graph(graph1)?, &read_graph(graph2)?)?;
            if *json {
                print_json(out, &with_meta(json!(r), &meta))?;
            } else {
                writeln!(out, "{}", report_text(&r))?;
            }
        }
        Command::PcSets { graph, node, json } => {
            let g = read_graph(graph)?;
            let sets: Vec<_> = pc_sets(&g, *node)?.map(|s| s.members().to_vec()).collect();
            if *json {
                print_json(out, &json!({"node": node, "sets": sets}))?;
            } else {
                for s in sets {
                    let items: Vec<String> = s.iter().map(ToString::to_string).collect();
                    writeln!(out, "{{{}}}", items.join(", "))?;
                }
            }
        }
        Command::Distinguish { graph1, graph2, json, skip_matroid } => {
            let (g1, g2) = (read_graph(graph1)?, read_graph(graph2)?);
            let r = if *skip_matroid { distinguish_without_matroid(&g1, &g2)? } else { distinguish(&g1, &g2, &cfg)? };
            if *json {
                print_json(out, &with_meta(json!(r), &meta))?;
            } else {
                writeln!(out, "{}", report_text(&r))?;
            }
        }
        Command::VerifyPcConjecture { n, sample, out: report, allow_large_exhaustive, chunk_size, json } => {
            let sweep = SweepConfig {
                n: *n,
                mode: sample.map_or(SweepMode::Exhaustive, |per_class| SweepMode::Sampled { per_class }),
                seed: cfg.seed(),
                workers: workers(cli),
                output: report.clone(),
                allow_large_exhaustive: *allow_large_exhaustive,
                chunk_size: *chunk_size,
                stop_after_chunks: None,
            };
            let r = verify_pc_conjecture(&sweep)?;
            if *json {
                print_json(out, &json!(r))?;
            } else {
                writeln!(
                    out,
                    "n={} classes={} pairs={} witnesses={} witness-less={} counterexamples={}",
                    n,
                    r.classes.len(),
                    r.pairs_tested,
                    r.witnesses,
                    r.witnessless,
                    r.counterexamples
                )?;
                for record in r.classes.iter().flat_map(|c| &c.witnessless) {
                    let kind = if record.is_counterexample() { "counterexample" } else { "same components" };
                    writeln!(out, "witness-less ({kind}): {:?} | {:?}", record.g1.edges(), record.g2.edges())?;
                }
                writeln!(out, "elapsed {:.2}s", r.timing.elapsed_seconds)?;
            }
        }
        Command::VerifyCompleteConjecture { p, all_orientations, full, json } => {
            let sweep = CompleteSweepConfig {
                p: *p,
                scope: if *all_orientations { FlipScope::AllOrientations } else { FlipScope::SharedParents },
                full: *full,
                workers: workers(cli),
                rank: cfg.clone(),
            };
            let r = verify_complete_conjecture(&sweep)?;
            if *json {
                print_json(out, &json!(r))?;
            } else {
                let sampled = if r.sampled { " (sampled)" } else { "" };
                writeln!(
                    out,
                    "p={} orientations={} checked={}{sampled} equal={} different={}",
                    p, r.orientations_total, r.checked, r.equal, r.different
                )?;
            }
        }
        Command::Classify { graphs, json } => {
            let family = graphs
                .iter()
                .map(|p| Ok((p.display().to_string(), read_graph(p)?)))
                .collect::<Result<Vec<_>>>()?;
            let r = classify_family(&family, &cfg)?;
            if *json {
                print_json(out, &json!(r))?;
            } else {
                for pair in &r.pairs {
                    let verdict = pair.report.matroid.as_ref().map(|m| m.verdict.to_string()).unwrap_or_default();
                    let by = pair.report.decided_by.unwrap_or("nothing");
                    writeln!(out, "{} vs {}: {verdict} (decided by {by})", pair.first, pair.second)?;
                }
                let c = &r.conditions;
                writeln!(out, "identifiable: {}", r.identifiable)?;
                writeln!(
                    out,
                    "non-complete: {}, unique out-degree sequences: {}, transitive-triangle-free: {}, pairwise parentally closed witnesses: {}",
                    c.all_non_complete,
                    c.unique_out_degree_sequences,
                    c.all_transitive_triangle_free,
                    c.pairwise_pc_witnesses
                )?;
            }
        }
        Command::SoundnessSweep { n, json } => {
            let r = criterion_soundness_sweep(*n, &cfg, workers(cli))?;
            if *json {
                print_json(out, &json!(r))?;
            } else {
                writeln!(
                    out,
                    "n={} pairs={} criterion-fired={} equal={} violations={} witness sets without rank gap={}",
                    n,
                    r.pairs,
                    r.criterion_fired,
                    r.equal,
                    r.violations.len(),
                    r.construction_gaps.len()
                )?;
            }
            if !r.violations.is_empty() {
                bail!("{} soundness violations", r.violations.len());
            }
        }
    }
    Ok(())
}
