//! Node-induced subgraph matching and isomorphism.
//!
//! A small VF2-style backtracking matcher over an index-based view of the
//! graphs. Pattern nodes are visited in BFS order so every node after the first
//! of its component is drawn from the neighbourhood of an already mapped node.
//! Feasibility compares labels, degrees and the edges towards the mapped part;
//! the latter is a count comparison, which is exact because pattern edges are
//! checked to exist in the host first.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use crate::graph::{Label, LabeledDigraph, NodeId};

const NONE: usize = usize::MAX;

/// Index view of a graph: node `i` is the `i`-th id in sorted order and
/// adjacency lists are sorted by `(neighbour index, edge label)`.
#[derive(Debug)]
pub(crate) struct Indexed<'a> {
    pub ids: Vec<&'a NodeId>,
    pub labels: Vec<&'a Label>,
    pub out: Vec<Vec<(usize, &'a Label)>>,
    pub inc: Vec<Vec<(usize, &'a Label)>>,
}

impl<'a> Indexed<'a> {
    pub fn new(g: &'a LabeledDigraph) -> Self {
        let ids: Vec<&NodeId> = g.node_ids().collect();
        let labels = g.nodes().map(|(_, l)| l).collect();
        let idx = |id: &NodeId| ids.binary_search(&id).expect("edge endpoint is a node");
        let out = ids
            .iter()
            .map(|v| g.out_edges(v).map(|(w, l)| (idx(w), l)).collect())
            .collect();
        let inc = ids
            .iter()
            .map(|v| g.in_edges(v).map(|(w, l)| (idx(w), l)).collect())
            .collect();
        Indexed {
            ids,
            labels,
            out,
            inc,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.binary_search_by(|v| v.as_str().cmp(id)).ok()
    }

    fn has_out(&self, u: usize, v: usize, label: &Label) -> bool {
        self.out[u]
            .binary_search_by(|(w, l)| (*w, *l).cmp(&(v, label)))
            .is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mode {
    /// Injective map whose image induces exactly the pattern's edges.
    Induced,
    /// Bijection; requires equal node counts.
    Isomorphism,
}

/// Enumerates embeddings of `pat` into `host`. `allowed` restricts the host
/// nodes that may be used. `f` receives the host index of every pattern node.
pub(crate) fn for_each_embedding(
    pat: &Indexed<'_>,
    host: &Indexed<'_>,
    mode: Mode,
    allowed: Option<&[bool]>,
    f: impl FnMut(&[usize]) -> ControlFlow<()>,
) {
    embed(pat, host, mode, allowed, None, f)
}

/// As [`for_each_embedding`]; pattern nodes flagged in `closed` must keep
/// their exact in- and out-degree in the host.
fn embed(
    pat: &Indexed<'_>,
    host: &Indexed<'_>,
    mode: Mode,
    allowed: Option<&[bool]>,
    closed: Option<&[bool]>,
    mut f: impl FnMut(&[usize]) -> ControlFlow<()>,
) {
    if pat.len() > host.len() || (mode == Mode::Isomorphism && pat.len() != host.len()) {
        return;
    }
    if pat.len() == 0 {
        let _ = f(&[]);
        return;
    }
    let plan = plan(pat, host);
    let mut st = State {
        pat,
        host,
        mode,
        allowed,
        closed,
        plan: &plan,
        core_p: vec![NONE; pat.len()],
        core_h: vec![NONE; host.len()],
    };
    let _ = st.search(0, &mut f);
}

struct Step {
    node: usize,
    /// Mapped neighbour to draw candidates from, and whether the edge goes
    /// from that neighbour to `node`.
    anchor: Option<(usize, bool)>,
}

// BFS order per pattern component; each component starts at its node with the
// rarest label in the host.
fn plan(pat: &Indexed<'_>, host: &Indexed<'_>) -> Vec<Step> {
    let mut freq: BTreeMap<&Label, usize> = BTreeMap::new();
    for l in &host.labels {
        *freq.entry(*l).or_default() += 1;
    }
    let rarity = |p: usize| freq.get(pat.labels[p]).copied().unwrap_or(0);
    let mut seen = vec![false; pat.len()];
    let mut steps = Vec::with_capacity(pat.len());
    while steps.len() < pat.len() {
        let start = (0..pat.len())
            .filter(|&p| !seen[p])
            .min_by_key(|&p| {
                (
                    rarity(p),
                    usize::MAX - pat.out[p].len() - pat.inc[p].len(),
                    p,
                )
            })
            .expect("unvisited node remains");
        seen[start] = true;
        steps.push(Step {
            node: start,
            anchor: None,
        });
        let mut head = steps.len() - 1;
        while head < steps.len() {
            let u = steps[head].node;
            head += 1;
            for &(w, _) in &pat.out[u] {
                if !seen[w] {
                    seen[w] = true;
                    steps.push(Step {
                        node: w,
                        anchor: Some((u, true)),
                    });
                }
            }
            for &(w, _) in &pat.inc[u] {
                if !seen[w] {
                    seen[w] = true;
                    steps.push(Step {
                        node: w,
                        anchor: Some((u, false)),
                    });
                }
            }
        }
    }
    steps
}

struct State<'s, 'a> {
    pat: &'s Indexed<'a>,
    host: &'s Indexed<'a>,
    mode: Mode,
    allowed: Option<&'s [bool]>,
    closed: Option<&'s [bool]>,
    plan: &'s [Step],
    core_p: Vec<usize>,
    core_h: Vec<usize>,
}

impl State<'_, '_> {
    fn search(
        &mut self,
        depth: usize,
        f: &mut impl FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if depth == self.plan.len() {
            return f(&self.core_p);
        }
        let step = &self.plan[depth];
        let p = step.node;
        let candidates: Vec<usize> = match step.anchor {
            Some((q, forward)) => {
                let hq = self.core_p[q];
                let adj = if forward {
                    &self.host.out[hq]
                } else {
                    &self.host.inc[hq]
                };
                let mut c: Vec<usize> = adj.iter().map(|&(w, _)| w).collect();
                c.dedup();
                c
            }
            None => (0..self.host.len()).collect(),
        };
        for h in candidates {
            if self.feasible(p, h) {
                self.core_p[p] = h;
                self.core_h[h] = p;
                let r = self.search(depth + 1, f);
                self.core_p[p] = NONE;
                self.core_h[h] = NONE;
                r?;
            }
        }
        ControlFlow::Continue(())
    }

    fn feasible(&self, p: usize, h: usize) -> bool {
        let (pat, host) = (self.pat, self.host);
        if self.core_h[h] != NONE || pat.labels[p] != host.labels[h] {
            return false;
        }
        if self.allowed.is_some_and(|a| !a[h]) {
            return false;
        }
        let (po, pi, ho, hi) = (
            pat.out[p].len(),
            pat.inc[p].len(),
            host.out[h].len(),
            host.inc[h].len(),
        );
        let degrees_ok = match self.mode {
            Mode::Induced if self.closed.is_some_and(|c| c[p]) => ho == po && hi == pi,
            Mode::Induced => ho >= po && hi >= pi,
            Mode::Isomorphism => ho == po && hi == pi,
        };
        if !degrees_ok {
            return false;
        }
        let mut mapped_edges = 0usize;
        for &(q, l) in &pat.out[p] {
            let hq = self.core_p[q];
            if hq != NONE {
                if !host.has_out(h, hq, l) {
                    return false;
                }
                mapped_edges += 1;
            }
        }
        for &(q, l) in &pat.inc[p] {
            let hq = self.core_p[q];
            if hq != NONE {
                if !host.has_out(hq, h, l) {
                    return false;
                }
                mapped_edges += 1;
            }
        }
        let host_edges = host.out[h]
            .iter()
            .chain(&host.inc[h])
            .filter(|(w, _)| self.core_h[*w] != NONE)
            .count();
        host_edges == mapped_edges
    }
}

fn to_id_map(pat: &Indexed<'_>, host: &Indexed<'_>, m: &[usize]) -> BTreeMap<NodeId, NodeId> {
    m.iter()
        .enumerate()
        .map(|(p, &h)| (pat.ids[p].clone(), host.ids[h].clone()))
        .collect()
}

/// Every node-induced embedding of `pattern` into `host`, as maps from pattern
/// ids to host ids, sorted.
pub fn induced_embeddings(
    pattern: &LabeledDigraph,
    host: &LabeledDigraph,
) -> Vec<BTreeMap<NodeId, NodeId>> {
    let (pat, h) = (Indexed::new(pattern), Indexed::new(host));
    let mut out = Vec::new();
    for_each_embedding(&pat, &h, Mode::Induced, None, |m| {
        out.push(to_id_map(&pat, &h, m));
        ControlFlow::Continue(())
    });
    out.sort();
    out
}

/// True iff `pattern` is isomorphic to some node-induced subgraph of `host`.
pub fn has_induced_embedding(pattern: &LabeledDigraph, host: &LabeledDigraph) -> bool {
    let (pat, h) = (Indexed::new(pattern), Indexed::new(host));
    let mut found = false;
    for_each_embedding(&pat, &h, Mode::Induced, None, |_| {
        found = true;
        ControlFlow::Break(())
    });
    found
}

/// Like [`has_induced_embedding`], except that pattern nodes for which
/// `closed` holds must be mapped to host nodes with no edges beyond the image
/// of their pattern edges.
pub fn has_closed_embedding(
    pattern: &LabeledDigraph,
    host: &LabeledDigraph,
    closed: impl Fn(&str) -> bool,
) -> bool {
    let (pat, h) = (Indexed::new(pattern), Indexed::new(host));
    let flags: Vec<bool> = pat.ids.iter().map(|id| closed(id)).collect();
    let mut found = false;
    embed(&pat, &h, Mode::Induced, None, Some(&flags), |_| {
        found = true;
        ControlFlow::Break(())
    });
    found
}

/// Some label-, edge-label- and direction-preserving bijection from `h1` to
/// `h2`, if one exists.
pub fn isomorphism(h1: &LabeledDigraph, h2: &LabeledDigraph) -> Option<BTreeMap<NodeId, NodeId>> {
    if h1.node_count() != h2.node_count() || h1.edge_count() != h2.edge_count() {
        return None;
    }
    let (a, b) = (Indexed::new(h1), Indexed::new(h2));
    let mut found = None;
    for_each_embedding(&a, &b, Mode::Isomorphism, None, |m| {
        found = Some(to_id_map(&a, &b, m));
        ControlFlow::Break(())
    });
    found
}

pub fn is_isomorphic(h1: &LabeledDigraph, h2: &LabeledDigraph) -> bool {
    isomorphism(h1, h2).is_some()
}
