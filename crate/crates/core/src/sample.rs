//! Masked random derivations.
//!
//! At each step the candidate rules are those rewriting the current
//! nonterminal (the start symbol first). A rule is masked when its application
//! would leave a cyclic or disconnected intermediate, or when the optional
//! validity predicate rejects the nodes and edges it adds. The choice among
//! unmasked rules is uniform.

use alloc::vec::Vec;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::grammar::{apply_rule_at, unique_nonterminal, Derivation, Grammar};
use crate::graph::{is_dag, is_weakly_connected, Edge, LabeledDigraph, NodeId};
use crate::rng::{self, Rng};

/// One candidate rewriting step, as seen by a [`ValidityPredicate`].
#[derive(Debug)]
pub struct Expansion<'a> {
    pub result: &'a LabeledDigraph,
    pub new_nodes: Vec<NodeId>,
    /// Daughter edges and instruction-created edges.
    pub new_edges: Vec<Edge>,
}

pub trait ValidityPredicate {
    fn allows(&self, step: &Expansion<'_>) -> bool;
}

/// Keeps every intermediate, and so the final graph, at or below the given
/// node count. Node counts never decrease along a derivation.
#[derive(Debug, Clone, Copy)]
pub struct NodeBudget(pub usize);

impl ValidityPredicate for NodeBudget {
    fn allows(&self, step: &Expansion<'_>) -> bool {
        step.result.node_count() <= self.0
    }
}

impl<F: Fn(&Expansion<'_>) -> bool> ValidityPredicate for F {
    fn allows(&self, step: &Expansion<'_>) -> bool {
        self(step)
    }
}

/// Samples one complete derivation with a fresh generator seeded by `seed`.
pub fn sample(
    g: &Grammar,
    seed: u64,
    max_steps: usize,
    validity: Option<&dyn ValidityPredicate>,
) -> Result<Derivation> {
    sample_with(g, &mut rng::rng(seed), max_steps, validity).map(|(d, _)| d)
}

/// Like [`sample`], drawing from `rng`; also returns the final graph.
pub fn sample_with(
    g: &Grammar,
    rng: &mut Rng,
    max_steps: usize,
    validity: Option<&dyn ValidityPredicate>,
) -> Result<(Derivation, LabeledDigraph)> {
    if g.is_empty() {
        return Err(Error::InvalidGrammar("grammar has no rules".into()));
    }
    let mut h = g.start_graph();
    let mut ids = Vec::new();
    for step in 0.. {
        let Some(n) = unique_nonterminal(&h, &g.vocab, step)?.cloned() else {
            break;
        };
        if step >= max_steps {
            return Err(Error::StepLimit(max_steps));
        }
        let label = h.label(&n).expect("nonterminal is a node").clone();
        let mut options = Vec::new();
        for r in g.rules_for(&label) {
            let app = apply_rule_at(&h, &n, r, step)?;
            if !is_dag(&app.graph) || !is_weakly_connected(&app.graph) {
                continue;
            }
            let nts = app
                .graph
                .nodes()
                .filter(|(_, l)| g.vocab.is_nonterminal(l))
                .count();
            if nts > 1 {
                continue;
            }
            if let Some(p) = validity {
                let new_nodes: Vec<NodeId> = app.fresh.values().cloned().collect();
                let new_edges = app
                    .graph
                    .edges()
                    .filter(|e| app.fresh.values().any(|v| *v == e.src || *v == e.dst))
                    .collect();
                let exp = Expansion {
                    result: &app.graph,
                    new_nodes,
                    new_edges,
                };
                if !p.allows(&exp) {
                    continue;
                }
            }
            options.push((r.id, app.graph));
        }
        if options.is_empty() {
            return Err(Error::DeadEnd { step });
        }
        let (id, next) = options.swap_remove(rng.gen_range(0..options.len()));
        ids.push(id);
        h = next;
    }
    Ok((Derivation::new(ids), h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{derive, Rule};
    use crate::graph::graph_from;
    use crate::vocab::LabelVocabulary;
    use alloc::collections::BTreeSet;
    use alloc::vec;

    fn rule(id: usize, lhs: &str, nodes: &[(&str, &str)], edges: &[(&str, &str)]) -> Rule {
        Rule {
            id,
            lhs: lhs.into(),
            daughter: graph_from(nodes, edges).unwrap(),
            instructions: BTreeSet::new(),
        }
    }

    #[test]
    fn single_choice_grammar_is_seed_independent() {
        let vocab = LabelVocabulary::new(
            ["black", "black:0", "A"],
            ["black", "black:0"],
            ["black"],
            "black",
        )
        .unwrap();
        let g = Grammar::new(
            vocab,
            vec![
                rule(0, "black", &[("0", "black:0")], &[]),
                rule(1, "black:0", &[("0", "A"), ("1", "A")], &[("0", "1")]),
            ],
        )
        .unwrap();
        for seed in 0..20 {
            assert_eq!(
                sample(&g, seed, 10, None).unwrap(),
                Derivation::new(vec![0, 1])
            );
        }
    }

    // S -> A S' chains of any length, or a single terminal.
    fn growing_grammar() -> Grammar {
        use crate::grammar::{Direction, Instruction};
        let vocab = LabelVocabulary::new(["S", "A"], ["S"], ["black"], "S").unwrap();
        let link = Instruction {
            sigma: "A".into(),
            beta: "black".into(),
            gamma: "black".into(),
            x: "a".into(),
            d: Direction::In,
            d_prime: Direction::In,
        };
        let mut grow = rule(0, "S", &[("a", "A"), ("s", "S")], &[("a", "s")]);
        grow.instructions.insert(link.clone());
        let mut stop = rule(1, "S", &[("a", "A")], &[]);
        stop.instructions.insert(link);
        Grammar::new(vocab, vec![grow, stop]).unwrap()
    }

    #[test]
    fn node_budget_is_respected_exhaustively() {
        let g = growing_grammar();
        let budget = NodeBudget(5);
        let mut lengths = BTreeSet::new();
        for seed in 0..300 {
            match sample(&g, seed, 50, Some(&budget)) {
                Ok(d) => {
                    let h = derive(&g, &d).unwrap();
                    assert!(h.node_count() <= 5);
                    lengths.insert(d.len());
                }
                Err(Error::DeadEnd { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
        assert!(lengths.contains(&5), "{lengths:?}");
        assert!(lengths.iter().all(|&l| l <= 5));
    }

    #[test]
    fn step_limit_and_closure_predicates() {
        let g = growing_grammar();
        let never_stop = |e: &Expansion<'_>| e.result.nodes().any(|(_, l)| l == "S");
        assert_eq!(
            sample(&g, 1, 4, Some(&never_stop)),
            Err(Error::StepLimit(4))
        );
        let nothing = |_: &Expansion<'_>| false;
        assert_eq!(
            sample(&g, 1, 4, Some(&nothing)),
            Err(Error::DeadEnd { step: 0 })
        );
    }
}
