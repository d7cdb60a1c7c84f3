use proptest::prelude::*;
use sem_matroid::criteria::{acyclic_pc_witness, acyclic_witness_applies, pc_criterion, ttf_criterion};
use sem_matroid::digraph::{parse_graph, serialize_graph, simple_digraph_count};
use sem_matroid::jacobian::numeric_jacobian_fd;
use sem_matroid::*;

fn graph(max_n: usize) -> impl Strategy<Value = Digraph> {
    (2..=max_n)
        .prop_flat_map(|n| (Just(n), 0..simple_digraph_count(n)))
        .prop_map(|(n, idx)| Digraph::from_enumeration_index(n, idx).unwrap())
}

fn graph_pair(max_n: usize) -> impl Strategy<Value = (Digraph, Digraph)> {
    (2..=max_n).prop_flat_map(|n| {
        let count = simple_digraph_count(n);
        (0..count, 0..count).prop_map(move |(a, b)| {
            (Digraph::from_enumeration_index(n, a).unwrap(), Digraph::from_enumeration_index(n, b).unwrap())
        })
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((1..=n).collect::<Vec<_>>()).prop_shuffle()
}

fn subset(oracle: &RankOracle, mask: u64) -> ColumnSet {
    oracle.columns().iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &c)| c).collect()
}

fn cfg() -> RankOracleConfig {
    RankOracleConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialize_then_parse_is_identity(g in graph(7)) {
        prop_assert_eq!(parse_graph(&serialize_graph(&g)).unwrap(), g);
    }

    #[test]
    fn enumeration_index_round_trips(g in graph(6)) {
        prop_assert_eq!(Digraph::from_enumeration_index(g.node_count(), g.enumeration_index()).unwrap(), g);
    }

    #[test]
    fn acyclicity_agrees_three_ways(g in graph(6)) {
        let order = g.topological_order();
        prop_assert_eq!(g.is_acyclic(), order.is_some());
        prop_assert_eq!(g.is_acyclic(), g.strongly_connected_components().iter().all(|c| c.len() == 1));
        if let Some(order) = order {
            let pos = |v: usize| order.iter().position(|&x| x == v).unwrap();
            for &(u, v) in g.edges() {
                prop_assert!(pos(u) < pos(v));
            }
        }
    }

    #[test]
    fn ranks_follow_relabeling((g, perm, mask) in graph(4).prop_flat_map(|g| {
        let n = g.node_count();
        (Just(g), permutation(n), any::<u64>())
    })) {
        let h = g.relabel(&perm).unwrap();
        let (a, b) = (RankOracle::new(&g, &cfg()).unwrap(), RankOracle::new(&h, &cfg()).unwrap());
        let s = subset(&a, mask);
        let moved: ColumnSet = s.iter().map(|c| ColumnIndex::new(perm[c.i() - 1], perm[c.j() - 1])).collect();
        prop_assert_eq!(a.rank(&s).unwrap(), b.rank(&moved).unwrap());
    }

    #[test]
    fn rank_is_monotone_and_submodular((g, x, y) in (graph(4), any::<u64>(), any::<u64>())) {
        let o = RankOracle::new(&g, &cfg()).unwrap();
        let (s, t) = (subset(&o, x), subset(&o, y));
        let union = subset(&o, x | y);
        let meet = subset(&o, x & y);
        let r = |c: &ColumnSet| o.rank(c).unwrap();
        prop_assert!(r(&s) <= s.len());
        prop_assert!(r(&meet) <= r(&s) && r(&s) <= r(&union));
        prop_assert!(r(&union) + r(&meet) <= r(&s) + r(&t));
    }

    #[test]
    fn independent_sets_exchange((g, x, y) in (graph(4), any::<u64>(), any::<u64>())) {
        let o = RankOracle::new(&g, &cfg()).unwrap();
        // Shrink both masks to independent sets by dropping dependent columns.
        let shrink = |mask: u64| {
            let mut kept = ColumnSet::new();
            for c in subset(&o, mask).iter() {
                kept.insert(c);
                if !o.is_independent(&kept).unwrap() {
                    kept.remove(c);
                }
            }
            kept
        };
        let (i, j) = (shrink(x), shrink(y));
        let (small, large) = if i.len() <= j.len() { (i, j) } else { (j, i) };
        if small.len() < large.len() {
            let grows = large.iter().filter(|c| !small.contains(*c)).any(|c| {
                let mut bigger = small.clone();
                bigger.insert(c);
                o.is_independent(&bigger).unwrap()
            });
            prop_assert!(grows);
        }
    }

    #[test]
    fn closure_is_idempotent((g, x) in (graph(4), any::<u64>())) {
        let o = RankOracle::new(&g, &cfg()).unwrap();
        let closure = |s: &ColumnSet| -> ColumnSet {
            let r = o.rank(s).unwrap();
            o.columns().iter().copied().filter(|&c| {
                let mut t = s.clone();
                t.insert(c);
                o.rank(&t).unwrap() == r
            }).collect()
        };
        let s = subset(&o, x);
        let once = closure(&s);
        prop_assert!(s.iter().all(|c| once.contains(c)));
        prop_assert_eq!(o.rank(&once).unwrap(), o.rank(&s).unwrap());
        prop_assert_eq!(closure(&once), once);
    }

    #[test]
    fn comparison_is_reflexive_and_symmetric((g1, g2) in graph_pair(4)) {
        let (a, b) = (RankOracle::new(&g1, &cfg()).unwrap(), RankOracle::new(&g2, &cfg()).unwrap());
        prop_assert_eq!(compare_oracles(&a, &a).unwrap().verdict, Verdict::Equal);
        let ab = compare_oracles(&a, &b).unwrap();
        let ba = compare_oracles(&b, &a).unwrap();
        prop_assert_eq!(ab.verdict, ba.verdict);
        prop_assert_eq!(ab.verdict == Verdict::Different, ab.witness.is_some());
        if g1 == g2 {
            prop_assert_eq!(ab.verdict, Verdict::Equal);
        }
        if let Some(w) = ab.witness {
            prop_assert_ne!(a.is_independent(&w).unwrap(), b.is_independent(&w).unwrap());
        }
    }

    #[test]
    fn simplified_s_row_keeps_bases(g in graph(4)) {
        let jac = build_jacobian(&g);
        let original = RankOracle::from_jacobian(jac.clone(), &cfg()).unwrap();
        let simplified = RankOracle::from_jacobian(simplify_s_row(&jac), &cfg()).unwrap();
        prop_assert_eq!(original.bases().unwrap(), simplified.bases().unwrap());
    }

    #[test]
    fn outdegree_witness_implies_pc_witness((g1, g2) in graph_pair(5)) {
        if !g1.is_complete() && !g2.is_complete() && outdegree_criterion(&g1, &g2).is_some() {
            prop_assert!(pc_criterion(&g1, &g2).is_some());
        }
    }

    #[test]
    fn ttf_witness_implies_pc_witness((g1, g2) in graph_pair(5)) {
        if ttf_criterion(&g1, &g2).is_some() {
            prop_assert!(pc_criterion(&g1, &g2).is_some());
        }
    }

    #[test]
    fn acyclic_witness_is_valid((g1, g2) in graph_pair(5)) {
        if acyclic_witness_applies(&g1, &g2) {
            let w = acyclic_pc_witness(&g1, &g2).unwrap();
            let (mine, other) = if w.direction == 1 { (&g1, &g2) } else { (&g2, &g1) };
            let (i, l) = (w.pc_set.anchor(), w.pc_set.members());
            prop_assert!(sem_matroid::criteria::is_parentally_closed(mine, i, l));
            prop_assert!(mine.ch(i).intersection(l).len() > other.ch(i).intersection(l).len());
        }
    }

    #[test]
    fn finite_differences_match((g, seed) in (graph(5), any::<u64>())) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let point = ParamPoint::for_graph(&g, rng.random_range(0.5..2.0), |_, _| rng.random_range(-1.5..1.5)).unwrap();
        let symbolic = build_jacobian(&g).evaluate(&point).unwrap();
        let numeric = numeric_jacobian_fd(&g, &point, 1e-5).unwrap();
        for (r1, r2) in symbolic.iter().zip(&numeric) {
            for (x, y) in r1.iter().zip(r2) {
                prop_assert!((x - y).abs() <= 1e-6 * x.abs().max(1.0), "{} vs {}", x, y);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn randomized_rank_matches_exact_rank((g, mask) in (graph(4), any::<u64>())) {
        let o = RankOracle::new(&g, &cfg()).unwrap();
        let s = subset(&o, mask);
        prop_assert_eq!(o.rank(&s).unwrap(), exact_rank(o.jacobian(), &s).unwrap());
    }
}

#[test]
fn small_prime_is_rejected_for_large_degree() {
    let g = sem_matroid::gallery::diamond();
    let tiny = RankOracleConfig::new(3, 3, 1).unwrap();
    assert!(matches!(RankOracle::new(&g, &tiny), Err(MatroidError::PrimeTooSmall { .. })));
    assert!(matches!(RankOracleConfig::new(15, 3, 1), Err(MatroidError::NotPrime(15))));
}

#[test]
fn failure_bound_shrinks_with_trials() {
    let one = RankOracleConfig::new(sem_matroid::field::MERSENNE_61, 1, 7).unwrap();
    let three = RankOracleConfig::default();
    assert!(three.failure_bound(10) < one.failure_bound(10));
    assert!(three.failure_bound(10) < 1e-40);
}
