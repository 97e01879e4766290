//! Cross-module properties through the public API.

use ednce_core::disambiguation::enumerate_derivations;
use ednce_core::grammar::{derive_trace, nonterminal_nodes};
use ednce_core::induction::{grammar_induction, InductionConfig};
use ednce_core::sample::sample;
use ednce_core::{
    canonical_key, composite_graph, derive, induced_subgraph, is_dag, is_isomorphic,
    is_weakly_connected, DagDataset, Grammar, LabelVocabulary, LabeledDigraph,
};
use proptest::prelude::*;

/// Connected DAG: node `i > 0` gets an edge from a random earlier node, plus
/// random extra forward edges.
fn arb_connected_dag(max_nodes: usize, labels: usize) -> impl Strategy<Value = LabeledDigraph> {
    (1..=max_nodes).prop_flat_map(move |n| {
        (
            proptest::collection::vec(0..labels, n),
            proptest::collection::vec(any::<prop::sample::Index>(), n),
            proptest::collection::vec(proptest::bool::weighted(0.2), n * n),
        )
            .prop_map(move |(ls, parents, extra)| {
                let mut g = LabeledDigraph::new();
                for (i, l) in ls.iter().enumerate() {
                    g.add_node(i.to_string(), format!("L{l}")).unwrap();
                }
                for (i, p) in parents.iter().enumerate().skip(1) {
                    let p = p.index(i);
                    g.add_edge(p.to_string(), "black", i.to_string()).unwrap();
                }
                for i in 0..n {
                    for j in i + 1..n {
                        if extra[i * n + j] {
                            g.add_edge(i.to_string(), "black", j.to_string()).unwrap();
                        }
                    }
                }
                g
            })
    })
}

fn arb_dataset(graphs: usize, nodes: usize) -> impl Strategy<Value = DagDataset> {
    proptest::collection::vec(arb_connected_dag(nodes, 2), 1..=graphs)
        .prop_map(|gs| DagDataset::new(gs, LabelVocabulary::for_terminals(["L0", "L1"])).unwrap())
}

fn intermediates_are_valid(g: &Grammar, steps: &[LabeledDigraph]) -> bool {
    steps
        .iter()
        .all(|h| is_dag(h) && is_weakly_connected(h) && nonterminal_nodes(h, &g.vocab).len() <= 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn induced_subgraphs_of_dags_are_dags(
        h in arb_connected_dag(8, 3),
        keep in proptest::collection::vec(any::<bool>(), 8),
    ) {
        let vs: Vec<String> = h
            .node_ids()
            .zip(&keep)
            .filter(|(_, k)| **k)
            .map(|(v, _)| v.clone())
            .collect();
        let sub = induced_subgraph(&h, vs.iter()).unwrap();
        prop_assert!(is_dag(&sub));
        prop_assert_eq!(sub.node_count(), vs.len());
    }

    #[test]
    fn composite_graph_preserves_component_keys(d in arb_dataset(4, 6)) {
        let (h, component) = composite_graph(&d).unwrap();
        prop_assert_eq!(h.node_count(), d.graphs().iter().map(LabeledDigraph::node_count).sum::<usize>());
        for (i, g) in d.graphs().iter().enumerate() {
            let part = induced_subgraph(&h, component.iter().filter(|(_, &c)| c == i).map(|(v, _)| v)).unwrap();
            prop_assert_eq!(canonical_key(&part).unwrap(), canonical_key(g).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn induction_is_lossless_and_unambiguous(d in arb_dataset(5, 6)) {
        let cfg = InductionConfig::default();
        let r = grammar_induction(&d, &cfg).unwrap();
        prop_assert!(r.lost.is_empty());
        prop_assert_eq!(r.parses.len(), d.len());
        for (&i, p) in &r.parses {
            let steps = derive_trace(&r.grammar, p).unwrap();
            prop_assert!(intermediates_are_valid(&r.grammar, &steps));
            prop_assert!(is_isomorphic(steps.last().unwrap(), &d.graphs()[i]));
            let all = enumerate_derivations(&r.grammar, &d.graphs()[i], &cfg.enumeration).unwrap();
            prop_assert_eq!(all, vec![p.clone()]);
        }
        let again = grammar_induction(&d, &cfg).unwrap();
        prop_assert_eq!(again.grammar, r.grammar);
        prop_assert_eq!(again.parses, r.parses);
    }

    #[test]
    fn samples_replay_through_valid_intermediates(d in arb_dataset(4, 6), seed in any::<u64>()) {
        let g = grammar_induction(&d, &InductionConfig::default()).unwrap().grammar;
        let s = sample(&g, seed, 1000, None).unwrap();
        let steps = derive_trace(&g, &s).unwrap();
        prop_assert!(intermediates_are_valid(&g, &steps));
        let last = steps.last().unwrap();
        prop_assert!(nonterminal_nodes(last, &g.vocab).is_empty());
        // Replay is deterministic down to node ids.
        prop_assert_eq!(&derive(&g, &s).unwrap(), last);
    }
}
