//! Description-length driven grammar induction.
//!
//! One iteration ([`learn_grammar`]) works on the disjoint union of its
//! graphs. It alternates between re-applying rules it already has and mining
//! new motifs; each accepted step contracts one occurrence per component to a
//! fresh nonterminal node and saves `|C| (|D| - 1)` nodes. When no motif has
//! a clique of two or more, every remaining component becomes an initial
//! rule, and each graph's parse is its initial rule followed by its
//! contractions in reverse.
//!
//! [`grammar_induction`] disambiguates each iteration's grammar, queues the
//! graphs it could not resolve for the next iteration, and joins the
//! sub-grammars under the start symbol with one bridge rule per iteration.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::canon::{canonical_key, CanonicalKey};
use crate::clique::{self, BitGraph, CliqueConfig, CliqueTier};
use crate::compat::{build_compat_graph, or_reduce, CompatConfig, CompatNode};
use crate::disambiguation::{disambiguate, DisambiguationConfig, EnumConfig};
use crate::error::{Error, Result};
use crate::grammar::{derive, Derivation, Direction, Grammar, Instruction, Rule, RuleId};
use crate::graph::{composite_of, induced_subgraph, is_dag, Label, LabeledDigraph, NodeId};
use crate::hitting::HittingTier;
use crate::matching::is_isomorphic;
use crate::mining::{ground_occurrences, mine_motifs, Host, MiningConfig};
use crate::par;
use crate::rng::{self, stream};
use crate::vocab::{DagDataset, LabelVocabulary, CONTRACTION_LABEL, START_LABEL};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InductionConfig {
    pub mining: MiningConfig,
    /// With the exact tier, compatibility graphs above `exact_cap` nodes are
    /// solved with the approximate tier.
    pub clique: CliqueConfig,
    pub redirection_cap: usize,
    pub hitting: HittingTier,
    pub enumeration: EnumConfig,
    pub max_iters: usize,
    /// One iteration, every graph kept with its induced parse.
    pub skip_disambiguation: bool,
    /// Induce separately on consecutive chunks of this many graphs. Parses
    /// are then unique only within each chunk.
    pub partition_by: Option<usize>,
    pub seed: u64,
}

impl Default for InductionConfig {
    fn default() -> Self {
        InductionConfig {
            mining: MiningConfig::default(),
            clique: CliqueConfig::default(),
            redirection_cap: 10,
            hitting: HittingTier::Exact,
            enumeration: EnumConfig::default(),
            max_iters: 10,
            skip_disambiguation: false,
            partition_by: None,
            seed: 0,
        }
    }
}

/// One accepted contraction. `rule_id` is the id in the iteration's grammar
/// before disambiguation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContractionEvent {
    pub iteration: usize,
    pub step: usize,
    pub rule_id: RuleId,
    pub clique_size: usize,
    pub motif_size: usize,
    pub size_before: usize,
    pub size_after: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationSummary {
    pub iteration: usize,
    /// Dataset indices the iteration worked on.
    pub graphs: Vec<usize>,
    pub initial_size: usize,
    /// `|H|` when mining stopped.
    pub pre_termination_size: usize,
    /// `|H|` after every component became an initial rule.
    pub post_termination_size: usize,
    pub rules_learned: usize,
    pub rules_removed: usize,
    pub retained: Vec<usize>,
    pub lost: Vec<usize>,
    /// Best clique size of every motif in the last mining round.
    pub final_round_cliques: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InductionResult {
    pub grammar: Grammar,
    pub parses: BTreeMap<usize, Derivation>,
    pub lost: Vec<usize>,
    pub trace: Vec<ContractionEvent>,
    pub iterations: Vec<IterationSummary>,
}

/// `|C| (|D| - 1)`: nodes saved by contracting `|C|` occurrences of a
/// `|D|`-node motif.
pub fn mdl_gain(clique_size: usize, motif_node_count: usize) -> usize {
    clique_size * motif_node_count.saturating_sub(1)
}

/// Where one occurrence was contracted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Site {
    pub component: usize,
    pub node: NodeId,
    pub image: Vec<NodeId>,
}

/// Replaces each member's occurrence by one node labeled `nt_label` with id
/// `"{id_prefix}{component}"`, joined to each boundary neighbour by the
/// edge the member's redirection assigns. Members must lie in distinct
/// components.
pub fn contract(
    h: &LabeledDigraph,
    clique: &[CompatNode],
    nt_label: &str,
    id_prefix: &str,
) -> Result<(LabeledDigraph, Vec<Site>)> {
    let mut g = h.clone();
    let mut sites = Vec::with_capacity(clique.len());
    let mut seen = BTreeSet::new();
    for m in clique {
        let c = m.occurrence.component;
        if !seen.insert(c) {
            return Err(Error::invariant(format!(
                "two clique members in component {c}"
            )));
        }
        let image: Vec<NodeId> = m.occurrence.node_map.values().cloned().collect();
        for v in &image {
            g.remove_node(v)?;
        }
        let n = format!("{id_prefix}{c}");
        g.add_node(n.clone(), nt_label)?;
        for (y, (d, beta)) in &m.dirs {
            match d {
                Direction::In => g.add_edge(y.clone(), beta.clone(), n.clone())?,
                Direction::Out => g.add_edge(n.clone(), beta.clone(), y.clone())?,
            };
        }
        sites.push(Site {
            component: c,
            node: n,
            image,
        });
    }
    if !is_dag(&g) {
        return Err(Error::invariant("contraction created a cycle"));
    }
    Ok((g, sites))
}

fn solve_clique(g: &BitGraph, cfg: &CliqueConfig, seed: u64) -> Result<Vec<usize>> {
    if cfg.tier == CliqueTier::Exact && g.len() > cfg.exact_cap {
        let c = clique::approx(g);
        if !g.is_clique(&c) {
            return Err(Error::invariant("clique solver returned a non-clique"));
        }
        return Ok(c);
    }
    clique::max_clique(g, cfg, seed)
}

struct Choice {
    clique: Vec<CompatNode>,
    instructions: BTreeSet<Instruction>,
}

/// Best clique of realizations of `pattern`, with the instruction set it
/// implies (or `existing`).
fn evaluate(
    host: &Host,
    pattern: &LabeledDigraph,
    existing: Option<&BTreeSet<Instruction>>,
    compat: &CompatConfig,
    clique_cfg: &CliqueConfig,
    seed: u64,
) -> Result<Choice> {
    let occs = ground_occurrences(host, pattern);
    let cg = build_compat_graph(host, &occs, existing, compat);
    let picked = solve_clique(&cg.adjacency, clique_cfg, seed)?;
    let clique: Vec<CompatNode> = picked.into_iter().map(|i| cg.nodes[i].clone()).collect();
    let instructions = match existing {
        Some(i) => i.clone(),
        None => or_reduce(&clique)?.0,
    };
    Ok(Choice {
        clique,
        instructions,
    })
}

fn contraction_label(iteration: usize) -> Label {
    format!("{CONTRACTION_LABEL}:{iteration}")
}

fn start_label(iteration: usize) -> Label {
    format!("{START_LABEL}:{iteration}")
}

fn is_reserved(label: &str) -> bool {
    label == START_LABEL
        || label == CONTRACTION_LABEL
        || label.starts_with(&format!("{START_LABEL}:"))
        || label.starts_with(&format!("{CONTRACTION_LABEL}:"))
}

fn check_dataset(d: &DagDataset) -> Result<()> {
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let vocab = d.vocab();
    if let Some(l) = vocab.terminals().find(|l| is_reserved(l)) {
        return Err(Error::InvalidVocabulary(format!(
            "terminal label `{l}` is reserved for nonterminals"
        )));
    }
    Ok(())
}

/// Output of one iteration, over the graphs it was given (local indices).
struct Learned {
    grammar: Grammar,
    parses: BTreeMap<usize, Derivation>,
    trace: Vec<ContractionEvent>,
    initial_size: usize,
    pre_termination_size: usize,
    post_termination_size: usize,
    final_round_cliques: Vec<usize>,
}

fn learn_iteration(
    graphs: &[&LabeledDigraph],
    vocab: &LabelVocabulary,
    cfg: &InductionConfig,
    iteration: usize,
) -> Result<Learned> {
    let nt = contraction_label(iteration);
    let terminals: Vec<Label> = vocab.terminals().cloned().collect();
    let it_vocab = LabelVocabulary::new(
        terminals
            .iter()
            .cloned()
            .chain([START_LABEL.into(), nt.clone()]),
        [String::from(START_LABEL), nt.clone()],
        vocab.edge_labels.iter().cloned(),
        START_LABEL,
    )?;
    let compat = CompatConfig {
        redirection_cap: cfg.redirection_cap,
        collapse_twins: true,
        ..CompatConfig::new(vocab.edge_labels.clone())
    };

    let (h, component) = composite_of(graphs.iter().copied())?;
    let mut host = Host::with_components(h, component, |l| l == nt);
    let initial_size = host.graph.node_count();
    let mut rules: Vec<Rule> = Vec::new();
    let mut history: Vec<Vec<RuleId>> = alloc::vec![Vec::new(); graphs.len()];
    let mut trace = Vec::new();
    let mut step = 0usize;
    let final_round_cliques;

    let mut apply =
        |host: &mut Host, rule: &Rule, clique: &[CompatNode], step: &mut usize| -> Result<()> {
            let before = host.graph.node_count();
            let (g, sites) = contract(
                &host.graph,
                clique,
                &nt,
                &format!("~{iteration}.{}.", *step),
            )?;
            let mut component = host.component.clone();
            for s in &sites {
                for v in &s.image {
                    component.remove(v);
                }
                component.insert(s.node.clone(), s.component);
                history[s.component].push(rule.id);
            }
            *host = Host::with_components(g, component, |l| l == nt);
            let after = host.graph.node_count();
            let ev = ContractionEvent {
                iteration,
                step: *step,
                rule_id: rule.id,
                clique_size: clique.len(),
                motif_size: rule.daughter.node_count(),
                size_before: before,
                size_after: after,
            };
            if after != before - mdl_gain(ev.clique_size, ev.motif_size) {
                return Err(Error::invariant("contraction size bookkeeping is off"));
            }
            trace.push(ev);
            *step += 1;
            Ok(())
        };

    loop {
        // Reuse rules while any applies.
        loop {
            let evals = par::map(&rules, |r| {
                let seed = rng::fork(
                    cfg.seed,
                    &[stream::CLIQUE, iteration as u64, step as u64, r.id as u64],
                );
                evaluate(
                    &host,
                    &r.daughter,
                    Some(&r.instructions),
                    &compat,
                    &cfg.clique,
                    seed,
                )
            });
            let mut best: Option<(usize, &Rule, Choice)> = None;
            for (r, e) in rules.iter().zip(evals) {
                let e = e?;
                if e.clique.is_empty() {
                    continue;
                }
                let gain = mdl_gain(e.clique.len(), r.daughter.node_count());
                let better = best.as_ref().is_none_or(|(g, b, _)| {
                    (gain, r.daughter.node_count()) > (*g, b.daughter.node_count())
                });
                if better {
                    best = Some((gain, r, e));
                }
            }
            let Some((_, r, e)) = best else {
                break;
            };
            let r = r.clone();
            apply(&mut host, &r, &e.clique, &mut step)?;
        }

        // One mining round.
        let motifs = mine_motifs(&host, &cfg.mining);
        let indexed: Vec<(usize, &crate::mining::Motif)> = motifs.iter().enumerate().collect();
        let evals = par::map(&indexed, |(k, m)| {
            let seed = rng::fork(
                cfg.seed,
                &[
                    stream::CLIQUE,
                    iteration as u64,
                    step as u64,
                    1 << 32 | *k as u64,
                ],
            );
            evaluate(&host, &m.pattern, None, &compat, &cfg.clique, seed)
        });
        let mut best: Option<(usize, usize, &CanonicalKey, usize, Choice)> = None;
        let mut sizes = Vec::with_capacity(motifs.len());
        for (k, (m, e)) in motifs.iter().zip(evals).enumerate() {
            let e = e?;
            sizes.push(e.clique.len());
            // A rule used once never pays for itself; mining stops only when
            // no motif reaches a clique of 2.
            if e.clique.len() < 2 {
                continue;
            }
            let gain = mdl_gain(e.clique.len(), m.size());
            let rank = (Reverse(gain), Reverse(m.size()), &m.key);
            let better = best
                .as_ref()
                .is_none_or(|(g, s, key, _, _)| rank < (Reverse(*g), Reverse(*s), *key));
            if better {
                best = Some((gain, m.size(), &m.key, k, e));
            }
        }
        match best {
            Some((_, _, _, k, e)) => {
                let rule = Rule {
                    id: rules.len(),
                    lhs: nt.clone(),
                    daughter: motifs[k].pattern.clone(),
                    instructions: e.instructions,
                };
                apply(&mut host, &rule, &e.clique, &mut step)?;
                rules.push(rule);
            }
            None => {
                final_round_cliques = sizes;
                break;
            }
        }
    }
    let pre_termination_size = host.graph.node_count();

    // Each remaining component becomes an initial rule.
    let mut by_component: Vec<Vec<&NodeId>> = alloc::vec![Vec::new(); graphs.len()];
    for (v, &c) in &host.component {
        by_component[c].push(v);
    }
    let mut initial: BTreeMap<CanonicalKey, Vec<RuleId>> = BTreeMap::new();
    let mut parses = BTreeMap::new();
    for (c, nodes) in by_component.into_iter().enumerate() {
        let d = induced_subgraph(&host.graph, nodes)?.with_dense_ids();
        let key = canonical_key(&d)?;
        let bucket = initial.entry(key).or_default();
        let id = match bucket
            .iter()
            .find(|&&id| is_isomorphic(&rules[id].daughter, &d))
        {
            Some(&id) => id,
            None => {
                let id = rules.len();
                rules.push(Rule {
                    id,
                    lhs: START_LABEL.into(),
                    daughter: d,
                    instructions: BTreeSet::new(),
                });
                bucket.push(id);
                id
            }
        };
        let mut seq = alloc::vec![id];
        seq.extend(history[c].iter().rev());
        parses.insert(c, Derivation::new(seq));
    }
    let grammar = Grammar::new(it_vocab, rules)?;
    Ok(Learned {
        grammar,
        parses,
        trace,
        initial_size,
        pre_termination_size,
        post_termination_size: graphs.len(),
        final_round_cliques,
    })
}

/// One iteration over the whole dataset, before disambiguation. Rules are
/// tagged with iteration 0.
pub fn learn_grammar(d: &DagDataset, cfg: &InductionConfig) -> Result<InductionResult> {
    check_dataset(d)?;
    let graphs: Vec<&LabeledDigraph> = d.graphs().iter().collect();
    let l = learn_iteration(&graphs, d.vocab(), cfg, 0)?;
    let summary = IterationSummary {
        iteration: 0,
        graphs: (0..graphs.len()).collect(),
        initial_size: l.initial_size,
        pre_termination_size: l.pre_termination_size,
        post_termination_size: l.post_termination_size,
        rules_learned: l.grammar.len(),
        rules_removed: 0,
        retained: (0..graphs.len()).collect(),
        lost: Vec::new(),
        final_round_cliques: l.final_round_cliques,
    };
    Ok(InductionResult {
        grammar: l.grammar,
        parses: l.parses,
        lost: Vec::new(),
        trace: l.trace,
        iterations: alloc::vec![summary],
    })
}

/// Iterated induction and disambiguation. Every dataset graph ends with
/// exactly one derivation in the returned grammar (within its chunk when
/// `partition_by` is set).
pub fn grammar_induction(d: &DagDataset, cfg: &InductionConfig) -> Result<InductionResult> {
    check_dataset(d)?;
    let n = d.len();
    let chunks: Vec<Vec<usize>> = match cfg.partition_by {
        Some(k) if k > 0 => (0..n)
            .collect::<Vec<_>>()
            .chunks(k)
            .map(<[usize]>::to_vec)
            .collect(),
        _ => alloc::vec![(0..n).collect()],
    };

    // (iteration, disambiguated grammar, global index -> parse in that grammar)
    let mut subs: Vec<(usize, Grammar, BTreeMap<usize, Derivation>)> = Vec::new();
    let mut trace = Vec::new();
    let mut summaries = Vec::new();
    let mut iteration = 0usize;
    let dis_cfg = DisambiguationConfig {
        enumeration: cfg.enumeration.clone(),
        hitting: cfg.hitting,
    };

    for chunk in &chunks {
        let local: Vec<LabeledDigraph> = chunk.iter().map(|&i| d.graphs()[i].clone()).collect();
        let mut unresolved: Vec<usize> = (0..chunk.len()).collect();
        let mut batch_len = unresolved.len();
        let mut rounds = 0;
        while !unresolved.is_empty() {
            if rounds >= cfg.max_iters {
                return Err(Error::IterationBudget {
                    unresolved: unresolved.iter().map(|&i| chunk[i]).collect(),
                });
            }
            rounds += 1;
            let batch: Vec<usize> = unresolved[..batch_len.min(unresolved.len())].to_vec();
            let graphs: Vec<&LabeledDigraph> = batch.iter().map(|&i| &local[i]).collect();
            let learned = learn_iteration(&graphs, d.vocab(), cfg, iteration)?;
            let parses: BTreeMap<usize, Derivation> = learned
                .parses
                .iter()
                .map(|(&k, p)| (batch[k], p.clone()))
                .collect();

            let (grammar, retained, lost, removed) = if cfg.skip_disambiguation {
                (learned.grammar.clone(), parses, Vec::new(), 0)
            } else {
                let res = disambiguate(&learned.grammar, &local, &parses, &dis_cfg)?;
                (res.grammar, res.parses, res.lost, res.removed.len())
            };
            trace.extend(learned.trace.iter().copied());
            summaries.push(IterationSummary {
                iteration,
                graphs: batch.iter().map(|&i| chunk[i]).collect(),
                initial_size: learned.initial_size,
                pre_termination_size: learned.pre_termination_size,
                post_termination_size: learned.post_termination_size,
                rules_learned: learned.grammar.len(),
                rules_removed: removed,
                retained: retained.keys().map(|&i| chunk[i]).collect(),
                lost: lost.iter().map(|&i| chunk[i]).collect(),
                final_round_cliques: learned.final_round_cliques,
            });
            if retained.is_empty() {
                batch_len = batch.len().div_ceil(2);
            } else {
                unresolved.retain(|i| !retained.contains_key(i));
                batch_len = unresolved.len();
                subs.push((
                    iteration,
                    grammar,
                    retained.into_iter().map(|(i, p)| (chunk[i], p)).collect(),
                ));
            }
            iteration += 1;
            if cfg.skip_disambiguation {
                break;
            }
        }
    }

    let (grammar, parses) = compound(d.vocab(), &subs)?;
    for (&i, p) in &parses {
        if !is_isomorphic(&derive(&grammar, p)?, &d.graphs()[i]) {
            return Err(Error::invariant(format!(
                "graph {i}: parse does not replay to the graph"
            )));
        }
    }
    Ok(InductionResult {
        grammar,
        parses,
        lost: Vec::new(),
        trace,
        iterations: summaries,
    })
}

/// Joins sub-grammars: each iteration's start rules move to `black:iter`,
/// and bridge rules `black -> black:iter` follow in reverse iteration order.
fn compound(
    vocab: &LabelVocabulary,
    subs: &[(usize, Grammar, BTreeMap<usize, Derivation>)],
) -> Result<(Grammar, BTreeMap<usize, Derivation>)> {
    let mut nts: Vec<Label> = alloc::vec![START_LABEL.into()];
    for (it, _, _) in subs {
        nts.push(start_label(*it));
        nts.push(contraction_label(*it));
    }
    let sigma = vocab.terminals().cloned().chain(nts.iter().cloned());
    let cvocab = LabelVocabulary::new(
        sigma,
        nts.iter().cloned(),
        vocab.edge_labels.iter().cloned(),
        START_LABEL,
    )?;

    let mut rules: Vec<Rule> = Vec::new();
    let mut offsets = Vec::with_capacity(subs.len());
    for (it, g, _) in subs {
        offsets.push(rules.len());
        for r in &g.rules {
            let lhs = if r.lhs == START_LABEL {
                start_label(*it)
            } else {
                r.lhs.clone()
            };
            rules.push(Rule {
                id: rules.len(),
                lhs,
                daughter: r.daughter.clone(),
                instructions: r.instructions.clone(),
            });
        }
    }
    let mut bridges = BTreeMap::new();
    for (k, (it, _, _)) in subs.iter().enumerate().rev() {
        let mut daughter = LabeledDigraph::new();
        daughter.add_node("0", start_label(*it))?;
        bridges.insert(k, rules.len());
        rules.push(Rule {
            id: rules.len(),
            lhs: START_LABEL.into(),
            daughter,
            instructions: BTreeSet::new(),
        });
    }
    let mut parses = BTreeMap::new();
    for (k, (_, _, ps)) in subs.iter().enumerate() {
        for (&i, p) in ps {
            let mut seq = alloc::vec![bridges[&k]];
            seq.extend(p.rule_ids.iter().map(|r| r + offsets[k]));
            parses.insert(i, Derivation::new(seq));
        }
    }
    Ok((Grammar::new(cvocab, rules)?, parses))
}

/// `(k / total, size_k / size_0)` over the events of the first iteration in
/// `trace`, starting at `(0, 1)`.
pub fn compression_curve(trace: &[ContractionEvent]) -> Vec<(f64, f64)> {
    let Some(first) = trace.first() else {
        return alloc::vec![(0.0, 1.0)];
    };
    let events: Vec<&ContractionEvent> = trace
        .iter()
        .filter(|e| e.iteration == first.iteration)
        .collect();
    let total = events.len() as f64;
    let size0 = first.size_before as f64;
    let mut out = alloc::vec![(0.0, 1.0)];
    for (k, e) in events.iter().enumerate() {
        out.push(((k + 1) as f64 / total, e.size_after as f64 / size0));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compat::{enumerate_redirections, insets_and_outsets, signature};
    use crate::disambiguation::enumerate_derivations;
    use crate::grammar::{apply_rule, derive_trace};
    use crate::graph::{graph_from, is_weakly_connected};
    use crate::mining::Occurrence;
    use crate::vocab::DEFAULT_EDGE_LABEL;
    use alloc::string::ToString;
    use alloc::vec;
    use proptest::prelude::*;

    fn dataset(graphs: Vec<LabeledDigraph>) -> DagDataset {
        let labels: BTreeSet<Label> = graphs
            .iter()
            .flat_map(|g| g.nodes().map(|(_, l)| l.clone()))
            .collect();
        DagDataset::new(graphs, LabelVocabulary::for_terminals(labels)).unwrap()
    }

    fn chain(labels: &[&str]) -> LabeledDigraph {
        let mut g = LabeledDigraph::new();
        for (i, l) in labels.iter().enumerate() {
            g.add_node(format!("v{i}"), *l).unwrap();
            if i > 0 {
                g.add_edge(format!("v{}", i - 1), DEFAULT_EDGE_LABEL, format!("v{i}"))
                    .unwrap();
            }
        }
        g
    }

    fn replays(g: &Grammar, p: &Derivation, h: &LabeledDigraph) -> bool {
        is_isomorphic(&derive(g, p).unwrap(), h)
    }

    #[test]
    fn gain_formula() {
        assert_eq!(mdl_gain(3, 2), 3);
        assert_eq!(mdl_gain(1, 5), 4);
        assert_eq!(mdl_gain(0, 7), 0);
    }

    fn node(h: &LabeledDigraph, component: usize, pairs: &[(&str, &str)]) -> CompatNode {
        let occurrence = Occurrence {
            component,
            node_map: pairs
                .iter()
                .map(|(p, v)| (p.to_string(), v.to_string()))
                .collect(),
        };
        let labels = BTreeSet::from([DEFAULT_EDGE_LABEL.to_string()]);
        let dirs = enumerate_redirections(h, &occurrence, 10, &labels).remove(0);
        let bounds = insets_and_outsets(h, &occurrence, &dirs, &labels);
        let signature = signature(h, &occurrence, &dirs).unwrap();
        CompatNode {
            occurrence,
            dirs,
            bounds,
            signature,
        }
    }

    #[test]
    fn contraction_examples() {
        let h = graph_from(&[("a", "X"), ("b", "Y")], &[("a", "b")]).unwrap();
        let (g, sites) =
            contract(&h, &[node(&h, 0, &[("0", "a"), ("1", "b")])], "gray", "n").unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.label("n0").map(String::as_str), Some("gray"));
        assert_eq!(sites[0].image, vec!["a".to_string(), "b".to_string()]);

        let h = graph_from(
            &[
                ("a0", "X"),
                ("b0", "Y"),
                ("a1", "X"),
                ("b1", "Y"),
                ("a2", "X"),
                ("b2", "Y"),
            ],
            &[("a0", "b0"), ("a1", "b1"), ("a2", "b2")],
        )
        .unwrap();
        let members: Vec<CompatNode> = (0..3)
            .map(|c| node(&h, c, &[("0", &format!("a{c}")), ("1", &format!("b{c}"))]))
            .collect();
        let (g, _) = contract(&h, &members, "gray", "n").unwrap();
        assert_eq!((h.node_count(), g.node_count(), g.edge_count()), (6, 3, 0));
        assert!(contract(&h, &[members[0].clone(), members[0].clone()], "gray", "n").is_err());
    }

    fn arb_dag() -> impl Strategy<Value = LabeledDigraph> {
        (3usize..8).prop_flat_map(|n| {
            (
                proptest::collection::vec(0u8..3, n),
                proptest::collection::vec(any::<bool>(), n * (n - 1) / 2),
            )
                .prop_map(move |(labels, bits)| {
                    let mut g = LabeledDigraph::new();
                    for (i, l) in labels.iter().enumerate() {
                        g.add_node(format!("{i}"), ["A", "B", "C"][*l as usize])
                            .unwrap();
                    }
                    let mut k = 0;
                    for j in 1..n {
                        for i in 0..j {
                            if bits[k] || i + 1 == j {
                                g.add_edge(format!("{i}"), DEFAULT_EDGE_LABEL, format!("{j}"))
                                    .unwrap();
                            }
                            k += 1;
                        }
                    }
                    g
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(150))]

        // Applying the induced rule at the contracted node restores the host.
        #[test]
        fn contraction_is_inverted_by_the_rule(h in arb_dag(), start in 0usize..8, extra in 0usize..3) {
            let n = h.node_count();
            let start = format!("{}", start % n);
            // A connected node set grown from `start`.
            let mut set = vec![start.clone()];
            for _ in 0..extra {
                let next = set.iter().flat_map(|v| h.neighbors(v)).find(|w| !set.contains(w)).cloned();
                if let Some(w) = next {
                    set.push(w);
                }
            }
            if set.len() == n {
                set.pop();
            }
            prop_assume!(!set.is_empty());
            let occurrence = Occurrence {
                component: 0,
                node_map: set.iter().enumerate().map(|(i, v)| (format!("{i}"), v.clone())).collect(),
            };
            let pattern = induced_subgraph(&h, &set).unwrap().relabel_ids(|v| {
                format!("{}", set.iter().position(|s| s == v).unwrap())
            }).unwrap();
            let labels = BTreeSet::from([DEFAULT_EDGE_LABEL.to_string()]);
            for dirs in enumerate_redirections(&h, &occurrence, 10, &labels) {
                let Some(signature) = signature(&h, &occurrence, &dirs) else { continue };
                let bounds = insets_and_outsets(&h, &occurrence, &dirs, &labels);
                let m = CompatNode { occurrence: occurrence.clone(), dirs, bounds: bounds.clone(), signature };
                let (g, sites) = contract(&h, &[m], "gray", "n").unwrap();
                prop_assert!(is_dag(&g) && is_weakly_connected(&g));
                let rule = Rule { id: 0, lhs: "gray".into(), daughter: pattern.clone(), instructions: bounds.inset };
                let back = apply_rule(&g, &sites[0].node, &rule).unwrap();
                prop_assert!(is_isomorphic(&back, &h));
            }
        }
    }

    #[test]
    fn identical_chains_share_one_motif_rule() {
        let d = dataset(vec![chain(&["X", "Y", "Z"]); 3]);
        let res = learn_grammar(&d, &InductionConfig::default()).unwrap();
        let motif_rules: Vec<&Rule> = res
            .grammar
            .rules
            .iter()
            .filter(|r| r.lhs != START_LABEL)
            .collect();
        let initial: Vec<&Rule> = res
            .grammar
            .rules
            .iter()
            .filter(|r| r.lhs == START_LABEL)
            .collect();
        assert_eq!(motif_rules.len(), 1);
        assert_eq!(initial.len(), 1);
        // The whole chain is one motif: gain 3 * 2.
        assert_eq!(res.trace.len(), 1);
        assert_eq!((res.trace[0].clique_size, res.trace[0].motif_size), (3, 3));
        let p0 = &res.parses[&0];
        assert!(p0.len() >= 2);
        for (i, p) in &res.parses {
            assert_eq!(p, p0);
            assert!(replays(&res.grammar, p, &d.graphs()[*i]));
        }
    }

    #[test]
    fn single_graph_gives_one_rule() {
        let d = dataset(vec![chain(&["X", "Y", "X", "Y"])]);
        let res = learn_grammar(&d, &InductionConfig::default()).unwrap();
        assert_eq!(res.grammar.len(), 1);
        assert_eq!(res.parses[&0], Derivation::new(vec![0]));
        assert!(res.trace.is_empty());
        assert!(res.iterations[0].final_round_cliques.iter().all(|&c| c < 2));
    }

    #[test]
    fn reserved_labels_are_rejected() {
        let vocab =
            LabelVocabulary::new(["black", "gray:3", "Y"], ["black"], ["black"], "black").unwrap();
        let d = DagDataset::new(vec![chain(&["gray:3", "Y"])], vocab).unwrap();
        assert!(matches!(
            learn_grammar(&d, &InductionConfig::default()),
            Err(Error::InvalidVocabulary(_))
        ));
    }

    fn random_dataset(seed: u64, count: usize) -> DagDataset {
        use rand::Rng as _;
        let mut r = rng::rng(seed);
        let graphs = (0..count)
            .map(|_| {
                let n = r.gen_range(4..8);
                let mut g = LabeledDigraph::new();
                for i in 0..n {
                    g.add_node(format!("{i}"), ["A", "B", "C"][r.gen_range(0..3)])
                        .unwrap();
                }
                for j in 1..n {
                    let i = r.gen_range(0..j);
                    g.add_edge(format!("{i}"), DEFAULT_EDGE_LABEL, format!("{j}"))
                        .unwrap();
                    if j >= 2 && r.gen_bool(0.3) {
                        let k = r.gen_range(0..j);
                        g.add_edge(format!("{k}"), DEFAULT_EDGE_LABEL, format!("{j}"))
                            .unwrap();
                    }
                }
                g
            })
            .collect();
        dataset(graphs)
    }

    #[test]
    fn trace_arithmetic_and_termination() {
        let d = random_dataset(7, 8);
        let res = learn_grammar(&d, &InductionConfig::default()).unwrap();
        let s = &res.iterations[0];
        let mut size = s.initial_size;
        for e in &res.trace {
            assert_eq!(e.size_before, size);
            assert_eq!(
                e.size_after,
                e.size_before - e.clique_size * (e.motif_size - 1)
            );
            assert!(e.size_after < e.size_before);
            size = e.size_after;
        }
        assert_eq!(size, s.pre_termination_size);
        assert_eq!(s.post_termination_size, d.len());
        assert!(s.final_round_cliques.iter().all(|&c| c < 2));
        for (i, p) in &res.parses {
            assert!(replays(&res.grammar, p, &d.graphs()[*i]));
            for h in derive_trace(&res.grammar, p).unwrap() {
                assert!(is_dag(&h) && is_weakly_connected(&h));
            }
        }
    }

    #[test]
    fn induced_grammars_are_unambiguous() {
        for seed in 0..4 {
            let d = random_dataset(seed, 10);
            let res = grammar_induction(&d, &InductionConfig::default()).unwrap();
            assert_eq!(res.parses.len(), d.len());
            for (i, p) in &res.parses {
                let all =
                    enumerate_derivations(&res.grammar, &d.graphs()[*i], &EnumConfig::default())
                        .unwrap();
                assert_eq!(all, vec![p.clone()], "graph {i}, seed {seed}");
            }
        }
    }

    #[test]
    fn duplicate_graphs_get_identical_parses() {
        let a = chain(&["A", "B", "C", "A"]);
        let b = a.relabel_ids(|v| format!("x{v}")).unwrap();
        let d = dataset(vec![a, chain(&["B", "C", "C"]), b]);
        let res = grammar_induction(&d, &InductionConfig::default()).unwrap();
        assert_eq!(res.parses[&0], res.parses[&2]);
    }

    #[test]
    fn partitions_and_skipping() {
        let d = random_dataset(3, 6);
        let cfg = InductionConfig {
            partition_by: Some(3),
            ..InductionConfig::default()
        };
        let res = grammar_induction(&d, &cfg).unwrap();
        assert_eq!(res.parses.len(), 6);
        let cfg = InductionConfig {
            skip_disambiguation: true,
            ..InductionConfig::default()
        };
        let res = grammar_induction(&d, &cfg).unwrap();
        assert_eq!(res.parses.len(), 6);
        assert_eq!(res.iterations.len(), 1);
    }

    #[test]
    fn curve_examples() {
        assert_eq!(compression_curve(&[]), vec![(0.0, 1.0)]);
        let e = ContractionEvent {
            iteration: 0,
            step: 0,
            rule_id: 0,
            clique_size: 2,
            motif_size: 3,
            size_before: 8,
            size_after: 4,
        };
        assert_eq!(compression_curve(&[e]), vec![(0.0, 1.0), (1.0, 0.5)]);
        let d = random_dataset(11, 8);
        let res = learn_grammar(&d, &InductionConfig::default()).unwrap();
        let c = compression_curve(&res.trace);
        assert!(c.windows(2).all(|w| w[1].1 < w[0].1 && w[1].0 > w[0].0));
    }
}
