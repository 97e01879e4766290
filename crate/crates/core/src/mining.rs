//! Beam-search frequent subgraph mining and occurrence grounding.
//!
//! Patterns grow one adjacent node at a time from single labeled nodes. An
//! instance is a node set of the host; its pattern is the induced subgraph,
//! so every instance is a node-induced occurrence. Instances are grouped into
//! patterns by canonical key with an isomorphism check inside each bucket.
//!
//! In a component that holds a nonterminal node only instances covering that
//! node are kept. Because every kept instance contains the nonterminal from
//! the first level on, growth from it still reaches every connected node set
//! through that node.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::ops::ControlFlow;

use crate::canon::{canonical_key, CanonicalKey};
use crate::graph::{induced_subgraph, LabeledDigraph, NodeId};
use crate::matching::{for_each_embedding, is_isomorphic, Indexed, Mode};
use crate::par;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiningConfig {
    /// Patterns kept per level; `usize::MAX` keeps all of them.
    pub beam_width: usize,
    pub max_motif_size: usize,
    pub top_n: usize,
}

impl Default for MiningConfig {
    fn default() -> Self {
        MiningConfig {
            beam_width: 4,
            max_motif_size: 8,
            top_n: 20,
        }
    }
}

/// A frequent pattern. Pattern node ids are dense (`"0"`, `"1"`, ...).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Motif {
    pub pattern: LabeledDigraph,
    /// Number of components holding at least one instance.
    pub support: usize,
    pub key: CanonicalKey,
}

impl Motif {
    pub fn size(&self) -> usize {
        self.pattern.node_count()
    }

    pub fn score(&self) -> usize {
        self.support * (self.size().saturating_sub(1))
    }
}

/// One node-induced embedding of a pattern.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occurrence {
    pub component: usize,
    /// Pattern node id to host node id.
    pub node_map: BTreeMap<NodeId, NodeId>,
}

impl Occurrence {
    /// Host nodes covered, sorted.
    pub fn image(&self) -> BTreeSet<&NodeId> {
        self.node_map.values().collect()
    }
}

/// Working graph with a component index per node and its nonterminal nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Host {
    pub graph: LabeledDigraph,
    pub component: BTreeMap<NodeId, usize>,
    pub nonterminals: BTreeSet<NodeId>,
}

impl Host {
    /// Numbers weak components in [`LabeledDigraph::weak_components`] order.
    pub fn new(graph: LabeledDigraph, is_nonterminal: impl Fn(&str) -> bool) -> Self {
        let mut component = BTreeMap::new();
        for (i, comp) in graph.weak_components().into_iter().enumerate() {
            for v in comp {
                component.insert(v, i);
            }
        }
        Self::with_components(graph, component, is_nonterminal)
    }

    pub fn with_components(
        graph: LabeledDigraph,
        component: BTreeMap<NodeId, usize>,
        is_nonterminal: impl Fn(&str) -> bool,
    ) -> Self {
        let nonterminals = graph
            .nodes()
            .filter(|(_, l)| is_nonterminal(l))
            .map(|(v, _)| v.clone())
            .collect();
        Host {
            graph,
            component,
            nonterminals,
        }
    }

    /// Component index to its nonterminal nodes.
    pub fn nonterminals_by_component(&self) -> BTreeMap<usize, Vec<&NodeId>> {
        let mut m: BTreeMap<usize, Vec<&NodeId>> = BTreeMap::new();
        for v in &self.nonterminals {
            m.entry(self.component[v]).or_default().push(v);
        }
        m
    }

    pub fn components(&self) -> BTreeSet<usize> {
        self.component.values().copied().collect()
    }
}

struct Candidate {
    pattern: LabeledDigraph,
    key: CanonicalKey,
    instances: BTreeSet<Vec<usize>>,
    support: usize,
}

impl Candidate {
    fn score(&self) -> usize {
        self.support * (self.pattern.node_count() - 1)
    }
}

fn rank(a: &Candidate, b: &Candidate) -> core::cmp::Ordering {
    (Reverse(a.score()), Reverse(a.pattern.node_count()), &a.key).cmp(&(
        Reverse(b.score()),
        Reverse(b.pattern.node_count()),
        &b.key,
    ))
}

/// Beam search over connected patterns. Returns up to `top_n` motifs with
/// support at least 2, best first by `support * (|V| - 1)`, then larger
/// patterns, then smaller key.
pub fn mine_motifs(host: &Host, cfg: &MiningConfig) -> Vec<Motif> {
    let g = &host.graph;
    let ix = Indexed::new(g);
    let comp: Vec<usize> = ix.ids.iter().map(|v| host.component[*v]).collect();
    let required: BTreeMap<usize, BTreeSet<usize>> = {
        let mut m: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for v in &host.nonterminals {
            let i = ix.index_of(v).expect("nonterminal is a node");
            m.entry(comp[i]).or_default().insert(i);
        }
        m
    };
    let admissible = |set: &[usize]| {
        required
            .get(&comp[set[0]])
            .is_none_or(|req| req.iter().all(|r| set.binary_search(r).is_ok()))
    };

    // Level 1: one pattern per label.
    let mut by_label: BTreeMap<&str, BTreeSet<Vec<usize>>> = BTreeMap::new();
    for i in 0..ix.len() {
        if admissible(&[i]) {
            by_label
                .entry(ix.labels[i].as_str())
                .or_default()
                .insert(vec![i]);
        }
    }
    let mut frontier: Vec<BTreeSet<Vec<usize>>> = by_label.into_values().collect();

    let mut pool: Vec<Candidate> = Vec::new();
    for _size in 2..=cfg.max_motif_size {
        let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
        for instances in &frontier {
            for inst in instances {
                for &u in inst {
                    for &(w, _) in ix.out[u].iter().chain(&ix.inc[u]) {
                        if inst.binary_search(&w).is_err() {
                            let mut s = inst.clone();
                            let pos = s.binary_search(&w).unwrap_err();
                            s.insert(pos, w);
                            sets.insert(s);
                        }
                    }
                }
            }
        }
        if sets.is_empty() {
            break;
        }
        let level = group(g, &ix, &comp, sets);
        let mut level: Vec<Candidate> = level.into_iter().filter(|c| c.support >= 2).collect();
        level.sort_by(rank);
        frontier = level
            .iter()
            .take(cfg.beam_width)
            .map(|c| c.instances.clone())
            .collect();
        pool.extend(level);
        if frontier.is_empty() {
            break;
        }
    }
    pool.sort_by(rank);
    pool.truncate(cfg.top_n);
    pool.into_iter()
        .map(|c| Motif {
            pattern: c.pattern,
            support: c.support,
            key: c.key,
        })
        .collect()
}

fn group(
    g: &LabeledDigraph,
    ix: &Indexed<'_>,
    comp: &[usize],
    sets: BTreeSet<Vec<usize>>,
) -> Vec<Candidate> {
    let sets: Vec<Vec<usize>> = sets.into_iter().collect();
    let keyed: Vec<(CanonicalKey, LabeledDigraph)> = par::map(&sets, |s| {
        let ids: Vec<&NodeId> = s.iter().map(|&i| ix.ids[i]).collect();
        let sub = induced_subgraph(g, ids)
            .expect("instance nodes exist")
            .with_dense_ids();
        let key = canonical_key(&sub).expect("subgraph of a DAG is a DAG");
        (key, sub)
    });
    let mut buckets: BTreeMap<CanonicalKey, Vec<Candidate>> = BTreeMap::new();
    for (set, (key, sub)) in sets.into_iter().zip(keyed) {
        let bucket = buckets.entry(key.clone()).or_default();
        let slot = match bucket.iter().position(|c| is_isomorphic(&c.pattern, &sub)) {
            Some(p) => p,
            None => {
                bucket.push(Candidate {
                    pattern: sub,
                    key,
                    instances: BTreeSet::new(),
                    support: 0,
                });
                bucket.len() - 1
            }
        };
        bucket[slot].instances.insert(set);
    }
    let mut out: Vec<Candidate> = buckets.into_values().flatten().collect();
    for c in &mut out {
        let comps: BTreeSet<usize> = c.instances.iter().map(|s| comp[s[0]]).collect();
        c.support = comps.len();
    }
    out
}

/// Every node-induced embedding of `pattern` in `host`, ordered by component
/// and then node map. In a component with nonterminal nodes only embeddings
/// covering all of them are kept.
pub fn ground_occurrences(host: &Host, pattern: &LabeledDigraph) -> Vec<Occurrence> {
    let g = &host.graph;
    let (pat, ix) = (Indexed::new(pattern), Indexed::new(g));
    let nts = host.nonterminals_by_component();
    let comps: Vec<usize> = host.components().into_iter().collect();
    let per_comp: Vec<Vec<Occurrence>> = par::map(&comps, |&c| {
        let allowed: Vec<bool> = ix.ids.iter().map(|v| host.component[*v] == c).collect();
        let req: Vec<usize> = nts
            .get(&c)
            .map(|vs| vs.iter().map(|v| ix.index_of(v).expect("node")).collect())
            .unwrap_or_default();
        let mut found = Vec::new();
        for_each_embedding(&pat, &ix, Mode::Induced, Some(&allowed), |m| {
            if req.iter().all(|r| m.contains(r)) {
                let node_map = m
                    .iter()
                    .enumerate()
                    .map(|(p, &h)| (pat.ids[p].clone(), ix.ids[h].clone()))
                    .collect();
                found.push(Occurrence {
                    component: c,
                    node_map,
                });
            }
            ControlFlow::Continue(())
        });
        found.sort();
        found
    });
    per_comp.into_iter().flatten().collect()
}
