//! Acceptance run: one pass/fail line per criterion, nonzero exit on failure.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sem_matroid::criteria::pc_criterion;
use sem_matroid::digraph::SimpleDigraphs;
use sem_matroid::field::PrimeField;
use sem_matroid::gallery;
use sem_matroid::harness::{
    criterion_soundness_sweep, verify_complete_conjecture, verify_pc_conjecture, CompleteSweepConfig, SweepConfig,
};
use sem_matroid::jacobian::numeric_jacobian_fd;
use sem_matroid::*;

type Outcome = Result<String, String>;

fn cfg() -> RankOracleConfig {
    RankOracleConfig::default()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_graph(rng: &mut ChaCha8Rng, min_n: usize, max_n: usize) -> Digraph {
    let n = rng.random_range(min_n..=max_n);
    Digraph::from_enumeration_index(n, rng.random_range(0..sem_matroid::digraph::simple_digraph_count(n))).unwrap()
}

fn cols(list: &str) -> ColumnSet {
    list.parse().unwrap()
}

/// Rows of a displayed Jacobian: parameter label, then entries under `header`.
fn compare_golden(g: &Digraph, header: &[&str], rows: &[(&str, &[&str])]) -> Result<(), String> {
    let jac = build_jacobian(g);
    check(jac.matrix().shape() == (rows.len(), header.len()), || format!("shape {:?}", jac.matrix().shape()))?;
    for (label, entries) in rows {
        let var = match label.strip_prefix("l_").and_then(|rest| rest.split_once('_')) {
            Some((k, l)) => Variable::Lambda(k.parse().unwrap(), l.parse().unwrap()),
            None => Variable::S,
        };
        for (col, text) in header.iter().zip(entries.iter()) {
            let c: ColumnIndex = col.parse().unwrap();
            let expected: Polynomial = text.parse().unwrap();
            let got = jac.entry(var, c).ok_or_else(|| format!("no entry {label},{col}"))?;
            check(*got == expected, || format!("{label},{col}: got {got}, expected {expected}"))?;
        }
    }
    Ok(())
}

const HEADER: [&str; 10] = ["K11", "K22", "K33", "K44", "K12", "K23", "K34", "K13", "K24", "K14"];

fn golden_jacobians() -> Outcome {
    compare_golden(
        &gallery::diamond(),
        &HEADER,
        &[
            ("l_1_2", &["2*s*l_1_2", "0", "0", "0", "-s", "0", "0", "0", "0", "0"]),
            ("l_1_3", &["2*s*l_1_3", "0", "0", "0", "0", "0", "0", "-s", "0", "0"]),
            ("l_2_4", &["0", "2*s*l_2_4", "0", "0", "0", "s*l_3_4", "0", "0", "-s", "0"]),
            ("l_3_4", &["0", "0", "2*s*l_3_4", "0", "0", "s*l_2_4", "-s", "0", "0", "0"]),
            (
                "s",
                &["1+l_1_2^2+l_1_3^2", "1+l_2_4^2", "1+l_3_4^2", "1", "-l_1_2", "l_2_4*l_3_4", "-l_3_4", "-l_1_3", "-l_2_4", "0"],
            ),
        ],
    )
    .map_err(|e| format!("diamond: {e}"))?;
    compare_golden(
        &gallery::rank_bound_example(),
        &HEADER,
        &[
            ("l_1_2", &["2*s*l_1_2", "0", "0", "0", "-s", "0", "0", "0", "0", "0"]),
            ("l_2_3", &["0", "2*s*l_2_3", "0", "0", "0", "-s", "0", "0", "0", "0"]),
            ("l_2_4", &["0", "2*s*l_2_4", "0", "0", "0", "s*l_3_4", "0", "0", "-s", "0"]),
            ("l_3_4", &["0", "0", "2*s*l_3_4", "0", "0", "s*l_2_4", "-s", "0", "0", "0"]),
            (
                "s",
                &["1+l_1_2^2", "1+l_2_3^2+l_2_4^2", "1+l_3_4^2", "1", "-l_1_2", "-l_2_3+l_2_4*l_3_4", "-l_3_4", "0", "-l_2_4", "0"],
            ),
        ],
    )
    .map_err(|e| format!("rank-bound example: {e}"))?;
    // Partial derivatives of the displayed precision matrix of the 4-cycle graph.
    compare_golden(
        &gallery::four_cycle(),
        &HEADER,
        &[
            ("l_1_2", &["2*s*l_1_2", "0", "0", "0", "-s", "0", "0", "0", "0", "s*l_4_2"]),
            ("l_2_3", &["0", "2*s*l_2_3", "0", "0", "0", "-s", "0", "0", "0", "0"]),
            ("l_3_4", &["0", "0", "2*s*l_3_4", "0", "0", "0", "-s", "0", "0", "0"]),
            ("l_4_2", &["0", "0", "0", "2*s*l_4_2", "0", "0", "0", "0", "-s", "s*l_1_2"]),
            (
                "s",
                &["1+l_1_2^2", "1+l_2_3^2", "1+l_3_4^2", "1+l_4_2^2", "-l_1_2", "-l_2_3", "-l_3_4", "0", "-l_4_2", "l_1_2*l_4_2"],
            ),
        ],
    )
    .map_err(|e| format!("4-cycle: {e}"))?;
    Ok("diamond, rank-bound example and 4-cycle match entry for entry".into())
}

fn s_row_lemma() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let points = RankOracleConfig::new(sem_matroid::field::MERSENNE_61, 5, 99).unwrap();
    let field = PrimeField::new(points.prime()).unwrap();
    for _ in 0..200 {
        let g = random_graph(&mut rng, 2, 5);
        let jac = build_jacobian(&g);
        let simple = simplify_s_row(&jac);
        for (c, entry) in simple.column_labels().iter().zip(simple.s_row()) {
            let expected = if c.is_diagonal() {
                Polynomial::from(2)
            } else if g.has_edge(c.i(), c.j()) {
                -Polynomial::lambda(c.i(), c.j())
            } else if g.has_edge(c.j(), c.i()) {
                -Polynomial::lambda(c.j(), c.i())
            } else {
                Polynomial::zero()
            };
            check(*entry == expected, || format!("{g:?} {c}: got {entry}, expected {expected}"))?;
        }
        let a = RankOracle::from_jacobian(jac, &points).map_err(|e| e.to_string())?;
        let b = RankOracle::from_jacobian(simple, &points).map_err(|e| e.to_string())?;
        for t in 0..5 {
            let (ra, rb) = (a.evaluated_rows(t), b.evaluated_rows(t));
            let stacked: Vec<Vec<u64>> = ra.iter().chain(&rb).cloned().collect();
            let ranks = (field.rank(&ra), field.rank(&rb), field.rank(&stacked));
            check(ranks.0 == ranks.1 && ranks.1 == ranks.2, || format!("{g:?}: row ranks {ranks:?}"))?;
        }
    }
    Ok("200 graphs: exact row pattern and equal row spaces at 5 points".into())
}

fn full_rank_theorem() -> Outcome {
    let all4: Vec<Digraph> = SimpleDigraphs::new(4).unwrap().collect();
    for g in &all4 {
        let r = matroid_rank(g, &cfg()).map_err(|e| e.to_string())?;
        check(r == g.edge_count() + 1, || format!("{g:?}: rank {r}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..500 {
        let g = random_graph(&mut rng, 5, 5);
        let r = matroid_rank(&g, &cfg()).map_err(|e| e.to_string())?;
        check(r == g.edge_count() + 1, || format!("{g:?}: rank {r}"))?;
    }
    for k in 0..30 {
        let g = &all4[(k * 24 + 7) % all4.len()];
        let jac = build_jacobian(g);
        let all: ColumnSet = jac.column_labels().iter().copied().collect();
        let r = exact_rank(&jac, &all).map_err(|e| e.to_string())?;
        check(r == g.edge_count() + 1, || format!("{g:?}: exact rank {r}"))?;
    }
    Ok(format!("{} four-node graphs, 500 five-node graphs, 30 exact cross-checks", all4.len()))
}

fn rank_examples() -> Outcome {
    let cycle = generic_rank(&build_jacobian(&gallery::four_cycle()), &cols("K11,K22,K44,K12,K24"), &cfg())
        .map_err(|e| e.to_string())?;
    check(cycle == 4, || format!("4-cycle rank {cycle}"))?;
    let (g1, g2) = gallery::ttf_pair();
    let s = cols("K11,K12,K66,K14,K15,K16,K35,K36");
    let r2 = generic_rank(&build_jacobian(&g2), &s, &cfg()).map_err(|e| e.to_string())?;
    let r1 = generic_rank(&build_jacobian(&g1), &s, &cfg()).map_err(|e| e.to_string())?;
    check((r2, r1) == (8, 7), || format!("S' ranks {r2} on G2, {r1} on G1"))?;
    Ok("4-cycle rank 4; S' rank 8 on G2 and 7 on G1".into())
}

fn soundness_and_necessary() -> (Outcome, Outcome) {
    let report = match criterion_soundness_sweep(4, &cfg(), 4) {
        Ok(r) => r,
        Err(e) => return (Err(e.to_string()), Err(e.to_string())),
    };
    let fired_equal: Vec<_> = report.violations.iter().filter(|v| v.reason.contains("fired")).collect();
    let necessary: Vec<_> = report.violations.iter().filter(|v| v.reason.contains("necessary")).collect();
    let soundness = if fired_equal.is_empty() {
        Ok(format!(
            "{} pairs, {} with a criterion firing, {} equal; {} witness sets lack a rank gap",
            report.pairs,
            report.criterion_fired,
            report.equal,
            report.construction_gaps.len()
        ))
    } else {
        Err(format!("{} pairs where a criterion fired on equal matroids, e.g. {:?}", fired_equal.len(), fired_equal[0]))
    };
    let lemmas = if necessary.is_empty() {
        Ok(format!("{} equal pairs share adjacency/common-child patterns and sink parents", report.equal))
    } else {
        Err(format!("{} violations, e.g. {:?}", necessary.len(), necessary[0]))
    };
    (soundness, lemmas)
}

fn pc_conjecture_small() -> Outcome {
    let exhaustive = verify_pc_conjecture(&SweepConfig::exhaustive(4)).map_err(|e| e.to_string())?;
    check(exhaustive.witnessless == 0, || format!("n=4: {} witness-less pairs", exhaustive.witnessless))?;
    let sampled = verify_pc_conjecture(&SweepConfig::sampled(5, 10_000)).map_err(|e| e.to_string())?;
    check(sampled.witnessless == 0, || format!("n=5: {} witness-less pairs", sampled.witnessless))?;
    Ok(format!(
        "n=4 exhaustive: {} pairs; n=5 sampled: {} pairs over {} classes; no witness-less pair",
        exhaustive.pairs_tested,
        sampled.pairs_tested,
        sampled.classes.len()
    ))
}

fn same_scc_pair() -> Outcome {
    let (g1, g2) = gallery::same_scc_pair();
    check(pc_criterion(&g1, &g2).is_none(), || "a parentally closed witness exists".into())?;
    let expected = vec![vec![1, 2, 3, 4, 5], vec![6]];
    check(g1.strongly_connected_components() == expected && g2.strongly_connected_components() == expected, || {
        "components differ from {1..5},{6}".into()
    })?;
    let c = matroids_equal(&g1, &g2, &cfg()).map_err(|e| e.to_string())?;
    check(c.verdict == Verdict::Different, || "matroids compare equal".into())?;
    let w = c.witness.expect("different verdict carries a witness");
    Ok(format!("witness-less, components {{1..5}},{{6}}, matroids differ on {w}"))
}

fn complete_graphs() -> Outcome {
    let (f1, f2) = gallery::complete5_pair();
    let c = matroids_equal(&f1, &f2, &cfg()).map_err(|e| e.to_string())?;
    check(c.verdict == Verdict::Equal, || format!("5-node pair differs on {:?}", c.witness))?;
    let mut checked = 0;
    for p in [4, 5, 6] {
        let r = verify_complete_conjecture(&CompleteSweepConfig::new(p)).map_err(|e| e.to_string())?;
        check(r.different == 0 && r.checked as u64 == r.orientations_total, || {
            format!("p={p}: {} of {} flip pairs differ", r.different, r.checked)
        })?;
        checked += r.checked;
    }
    Ok(format!("5-node pair equal; {checked} shared-parent flip pairs at p=4,5,6 all equal"))
}

fn finite_differences() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0f64;
    for _ in 0..20 {
        let g = random_graph(&mut rng, 2, 5);
        let jac = build_jacobian(&g);
        for _ in 0..10 {
            let point = ParamPoint::for_graph(&g, rng.random_range(0.5..2.0), |_, _| rng.random_range(-1.5..1.5)).unwrap();
            let symbolic = jac.evaluate(&point).map_err(|e| format!("{e:?}"))?;
            let numeric = numeric_jacobian_fd(&g, &point, 1e-5).map_err(|e| format!("{e:?}"))?;
            for (x, y) in symbolic.iter().flatten().zip(numeric.iter().flatten()) {
                worst = worst.max((x - y).abs() / x.abs().max(1.0));
            }
        }
    }
    check(worst < 1e-6, || format!("relative error {worst:e}"))?;
    Ok(format!("200 evaluations, worst relative error {worst:.1e}"))
}

fn pc_conjecture_six() -> Outcome {
    let r = verify_pc_conjecture(&SweepConfig::sampled(6, 1000)).map_err(|e| e.to_string())?;
    check(r.counterexamples == 0, || format!("{} counterexamples", r.counterexamples))?;
    Ok(format!(
        "{} pairs over {} classes, {} witness-less (all with equal components), no counterexample",
        r.pairs_tested,
        r.classes.len(),
        r.witnessless
    ))
}

fn main() {
    let mut failed = 0;
    let mut report = |id: &str, limit: Duration, started: Instant, outcome: Outcome| {
        let elapsed = started.elapsed();
        let outcome = outcome.and_then(|msg| {
            if elapsed <= limit {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {elapsed:.1?}, limit {limit:?}"))
            }
        });
        match outcome {
            Ok(msg) => println!("PASS criterion {id}: {msg} [{elapsed:.2?}]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {id}: {msg} [{elapsed:.2?}]");
            }
        }
    };
    let minutes = |m: u64| Duration::from_secs(60 * m);

    let t = Instant::now();
    report("1 (golden Jacobians)", Duration::from_secs(1), t, golden_jacobians());
    let t = Instant::now();
    report("2 (simplified s row)", Duration::from_secs(30), t, s_row_lemma());
    let t = Instant::now();
    report("3 (full rank)", minutes(5), t, full_rank_theorem());
    let t = Instant::now();
    report("4 (rank examples)", Duration::from_secs(1), t, rank_examples());
    let t = Instant::now();
    let (soundness, lemmas) = soundness_and_necessary();
    report("5 (criterion soundness, n=4)", minutes(60), t, soundness);
    let t = Instant::now();
    report("6 (parentally closed conjecture, n=4 and n=5)", minutes(30), t, pc_conjecture_small());
    let t = Instant::now();
    report("7 (same-component pair)", minutes(5), t, same_scc_pair());
    let t = Instant::now();
    report("8 (complete graphs)", minutes(15), t, complete_graphs());
    let t = Instant::now();
    report("9 (finite differences)", Duration::from_secs(10), t, finite_differences());
    let t = Instant::now();
    report("10 (necessary conditions, n=4)", minutes(60), t, lemmas);
    let t = Instant::now();
    report("n=6 sampled (1000 pairs per class)", minutes(60), t, pc_conjecture_six());

    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
