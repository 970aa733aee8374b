mod common;

use common::*;
use ctrlset::explicit::{exact_identifying, greedy_identifying, verify_explicit_identifying, SolutionList};
use ctrlset::flow::{min_weight_flow_identifying, verify_flow_identifying};
use ctrlset::graph::{topological_order, TopologicalOrder};
use ctrlset::matroid::{min_weight_matroid_identifying, verify_matroid_identifying, BuiltinMatroid};
use ctrlset::path::verify_path_identifying_dag;
use ctrlset::rational::{format, int, parse, ratio};
use ctrlset::tolls::{discrete_tolls, tolled_minimizers, LinearCost, TollOptions};
use ctrlset::{Digraph, ElementSet, Rational, StPair, WeightedGroundSet};
use proptest::prelude::*;

fn digraph(max_nodes: usize, max_arcs: usize) -> impl Strategy<Value = Digraph> {
    (2..=max_nodes).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n), 1..=max_arcs).prop_map(move |pairs| {
            let arcs = pairs.into_iter().filter(|(u, v)| u != v).collect();
            Digraph::new(n, arcs).unwrap()
        })
    })
}

fn dag(max_nodes: usize, max_arcs: usize) -> impl Strategy<Value = Digraph> {
    (2..=max_nodes).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n), 1..=max_arcs).prop_map(move |pairs| {
            let arcs = pairs
                .into_iter()
                .filter(|(u, v)| u != v)
                .map(|(u, v)| (u.min(v), u.max(v)))
                .collect();
            Digraph::new(n, arcs).unwrap()
        })
    })
}

fn weights(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((0i64..20, 1i64..4), n).prop_map(|v| v.into_iter().map(|(a, b)| ratio(a, b)).collect())
}

fn solutions() -> impl Strategy<Value = SolutionList> {
    (1usize..=7).prop_flat_map(|dim| {
        prop::collection::vec(prop::collection::vec(any::<bool>(), dim), 1..=8)
            .prop_map(move |rows| SolutionList::new(dim, rows).unwrap())
    })
}

fn subset_weight(w: &[Rational], s: u64) -> Rational {
    (0..w.len()).filter(|e| s >> e & 1 == 1).map(|e| &w[e]).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn flow_forest_complement_is_minimum((g, w) in digraph(5, 8).prop_flat_map(|g| {
        let m = g.arc_count();
        (Just(g), weights(m))
    })) {
        let t = g.node_count() - 1;
        prop_assume!(!st_paths(&g, 0, t).is_empty());
        let st = StPair::new(&g, 0, t).unwrap();
        let m = g.arc_count();
        let ws = WeightedGroundSet::new(w.clone()).unwrap();
        let got = min_weight_flow_identifying(&g, st, &ws).unwrap();
        let verdict = verify_flow_identifying(&g, st, &got.identifying_set).unwrap();
        prop_assert!(verdict.identifying);
        let best = (0u64..1 << m)
            .filter(|&s| {
                let set: Vec<usize> = (0..m).filter(|a| s >> a & 1 == 1).collect();
                verify_flow_identifying(&g, st, &set).unwrap().identifying
            })
            .map(|s| subset_weight(&w, s))
            .min()
            .unwrap();
        prop_assert_eq!(got.total_weight, best);
    }

    #[test]
    fn flow_identifying_is_upward_closed(g in digraph(5, 8), extra in 0usize..8) {
        let t = g.node_count() - 1;
        prop_assume!(!st_paths(&g, 0, t).is_empty());
        let st = StPair::new(&g, 0, t).unwrap();
        let set = min_weight_flow_identifying(&g, st, &WeightedGroundSet::unit(g.arc_count()))
            .unwrap()
            .identifying_set;
        let mut bigger = set.clone();
        let a = extra % g.arc_count();
        if !bigger.contains(&a) {
            bigger.push(a);
        }
        prop_assert!(verify_flow_identifying(&g, st, &bigger).unwrap().identifying);
    }

    #[test]
    fn dag_verifier_matches_projection_oracle(g in dag(6, 11), s in any::<u64>()) {
        let t = g.node_count() - 1;
        let paths: Vec<u64> = st_paths(&g, 0, t).iter().map(|p| mask_of(p)).collect();
        prop_assume!(!paths.is_empty());
        let st = StPair::new(&g, 0, t).unwrap();
        let m = g.arc_count();
        let s = s & ((1u64 << m) - 1);
        let set: Vec<usize> = (0..m).filter(|a| s >> a & 1 == 1).collect();
        let v = verify_path_identifying_dag(&g, st, &set).unwrap();
        prop_assert_eq!(v.identifying, projections_distinct(&paths, s));
    }

    #[test]
    fn topological_order_or_cycle(g in digraph(6, 10)) {
        match topological_order(&g) {
            TopologicalOrder::Ranks(rank) => {
                let mut sorted = rank.clone();
                sorted.sort_unstable();
                prop_assert_eq!(sorted, (0..g.node_count()).collect::<Vec<_>>());
                for &(u, v) in g.arcs() {
                    prop_assert!(rank[u] < rank[v]);
                }
            }
            TopologicalOrder::Cycle(cycle) => {
                prop_assert!(!cycle.is_empty());
                for i in 0..cycle.len() {
                    let next = cycle[(i + 1) % cycle.len()];
                    prop_assert_eq!(g.head(cycle[i]), g.tail(next));
                }
            }
        }
    }

    #[test]
    fn matroid_greedy_is_minimum((k, n, w) in (1usize..=6).prop_flat_map(|n| (0..=n, Just(n), weights(n)))) {
        let m = BuiltinMatroid::uniform(k, n).unwrap();
        let ws = WeightedGroundSet::new(w.clone()).unwrap();
        let got = min_weight_matroid_identifying(&m, &ws).unwrap().total_weight;
        let best = (0u64..1 << n)
            .filter(|&s| verify_matroid_identifying(&m, ElementSet(s), 20).unwrap().identifying)
            .map(|s| subset_weight(&w, s))
            .min()
            .unwrap();
        prop_assert_eq!(got, best);
    }

    #[test]
    fn explicit_greedy_identifies_and_exact_is_no_worse(x in solutions(), seed in any::<u64>()) {
        let w = WeightedGroundSet::new(random_weights(&mut rng(seed), x.dim())).unwrap();
        let greedy = greedy_identifying(&x, &w).unwrap();
        let exact = exact_identifying(&x, &w, 1 << 10).unwrap();
        prop_assert!(verify_explicit_identifying(&x, &greedy.identifying_set).unwrap().identifying);
        prop_assert!(verify_explicit_identifying(&x, &exact.identifying_set).unwrap().identifying);
        prop_assert!(exact.total_weight <= greedy.total_weight);
    }

    #[test]
    fn discrete_tolls_make_target_a_minimizer(
        x in solutions(),
        c in prop::collection::vec(-9i64..=9, 7),
        pick in any::<usize>(),
    ) {
        let set = greedy_identifying(&x, &WeightedGroundSet::unit(x.dim())).unwrap().identifying_set;
        let cost = LinearCost(c[..x.dim()].iter().map(|&v| int(v)).collect());
        let t = pick % x.len();
        let target = x.vector(t);
        let tolls = discrete_tolls(&x, &set, &cost, &target, &TollOptions::default()).unwrap();
        prop_assert!(tolled_minimizers(&x, &cost, &tolls).unwrap().contains(&t));
        for (e, g) in tolls.gamma.iter().enumerate() {
            prop_assert!(set.contains(&e) || *g == int(0));
        }
    }

    #[test]
    fn rationals_round_trip(n in -1000i64..1000, d in 1i64..1000) {
        let r = ratio(n, d);
        prop_assert_eq!(parse(&format(&r)).unwrap(), r);
    }

    #[test]
    fn element_set_subsets_are_exhaustive(bits in 0u64..256) {
        let s = ElementSet(bits);
        let subs: Vec<ElementSet> = s.subsets().collect();
        prop_assert_eq!(subs.len(), 1usize << s.len());
        prop_assert!(subs.iter().all(|t| t.is_subset(s)));
    }
}
