//! Canonical hashing of DAGs.
//!
//! Each node is coloured by its label followed by the sorted colours of its
//! children (the string form of the unfolding tree below it); the digest is
//! SHA-256 over the `|`-joined sorted root colours. Unfolding-equivalent DAGs
//! (a shared sink versus a duplicated sink) get the same digest, so the key
//! also carries node/edge counts, a degree signature and a digest of a
//! canonical labelling found by individualization-refinement. With the
//! labelling present, key equality is equivalent to isomorphism. The
//! labelling search is budgeted; when it runs out the key is only a necessary
//! condition, which is why callers that need exactness still confirm buckets
//! with [`crate::matching::is_isomorphic`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{Label, LabeledDigraph, NodeId};
use crate::vocab::DEFAULT_EDGE_LABEL;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey {
    /// Lowercase hex SHA-256 of the root colour string.
    pub digest: String,
    pub node_count: usize,
    pub edge_count: usize,
    /// Sorted `(in-degree, out-degree, label)` triples.
    pub degree_signature: Vec<(usize, usize, Label)>,
    /// Hex SHA-256 of the canonical adjacency listing, `None` when the
    /// labelling search exceeded [`FORM_LEAF_BUDGET`].
    pub form: Option<String>,
}

/// Leaves of the individualization-refinement tree explored before
/// [`canonical_form`] gives up.
pub const FORM_LEAF_BUDGET: usize = 4096;

/// Colour string of every node.
pub fn node_colors(h: &LabeledDigraph) -> Result<BTreeMap<&NodeId, String>> {
    let order = h.topological_order().ok_or(Error::CyclicGraph)?;
    let mut colors: BTreeMap<&NodeId, String> = BTreeMap::new();
    for v in order.into_iter().rev() {
        let label = h.label(v).expect("node in graph");
        let mut children: Vec<String> = h
            .out_edges(v)
            .map(|(c, l)| {
                let c = &colors[c];
                if l == DEFAULT_EDGE_LABEL {
                    c.clone()
                } else {
                    format!("{l}>{c}")
                }
            })
            .collect();
        let color = if children.is_empty() {
            label.clone()
        } else {
            children.sort();
            format!("{label},{}", children.join(" "))
        };
        colors.insert(v, color);
    }
    Ok(colors)
}

/// The `|`-joined sorted colours of the roots; the digest input.
pub fn root_string(h: &LabeledDigraph) -> Result<String> {
    let colors = node_colors(h)?;
    let mut roots: Vec<&str> = h.roots().map(|r| colors[r].as_str()).collect();
    roots.sort_unstable();
    Ok(roots.join("|"))
}

fn sha256_hex(s: &str) -> String {
    let digest = Sha256::digest(s.as_bytes());
    let mut hex = String::with_capacity(64);
    for b in digest.iter() {
        write!(hex, "{b:02x}").expect("writing to a String");
    }
    hex
}

/// SHA-256 hex digest of [`root_string`].
pub fn wl_digest(h: &LabeledDigraph) -> Result<String> {
    Ok(sha256_hex(&root_string(h)?))
}

/// Own colour, then sorted (edge label, colour) of successors and predecessors.
type Signature = (usize, Vec<(usize, usize)>, Vec<(usize, usize)>);

/// Node and edge labels as ranks in their sorted order, adjacency by index.
struct Ranked {
    node: Vec<usize>,
    out: Vec<Vec<(usize, usize)>>,
    inc: Vec<Vec<(usize, usize)>>,
}

impl Ranked {
    fn new(h: &LabeledDigraph) -> (Ranked, Vec<&NodeId>, Vec<&Label>, Vec<Label>) {
        let ids: Vec<&NodeId> = h.node_ids().collect();
        let index: BTreeMap<&NodeId, usize> =
            ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut labels: Vec<&Label> = h.nodes().map(|(_, l)| l).collect();
        labels.sort_unstable();
        labels.dedup();
        let mut edge_labels: Vec<Label> = h.edges().map(|e| e.label).collect();
        edge_labels.sort_unstable();
        edge_labels.dedup();
        let rank = |l: &Label| edge_labels.binary_search(l).expect("listed");
        let mut r = Ranked {
            node: ids
                .iter()
                .map(|v| {
                    labels
                        .binary_search(&h.label(v).expect("node"))
                        .expect("listed")
                })
                .collect(),
            out: alloc::vec![Vec::new(); ids.len()],
            inc: alloc::vec![Vec::new(); ids.len()],
        };
        for e in h.edges() {
            let (s, d, l) = (index[&e.src], index[&e.dst], rank(&e.label));
            r.out[s].push((l, d));
            r.inc[d].push((l, s));
        }
        (r, ids, labels, edge_labels)
    }

    /// Colour refinement to the coarsest equitable partition finer than
    /// `col`. Colours are ranks of their signatures, so the order of cells is
    /// isomorphism-invariant.
    fn refine(&self, col: &mut [usize]) {
        let mut classes = distinct(col);
        loop {
            let sigs: Vec<Signature> = (0..col.len())
                .map(|v| {
                    let mut o: Vec<(usize, usize)> =
                        self.out[v].iter().map(|&(l, w)| (l, col[w])).collect();
                    let mut i: Vec<(usize, usize)> =
                        self.inc[v].iter().map(|&(l, w)| (l, col[w])).collect();
                    o.sort_unstable();
                    i.sort_unstable();
                    (col[v], o, i)
                })
                .collect();
            let mut sorted: Vec<&_> = sigs.iter().collect();
            sorted.sort_unstable();
            sorted.dedup();
            for (v, s) in sigs.iter().enumerate() {
                col[v] = sorted.binary_search(&s).expect("listed");
            }
            if sorted.len() == classes {
                return;
            }
            classes = sorted.len();
        }
    }

    /// Labels and edges listed by position; comparable only within one graph.
    fn certificate(&self, pos: &[usize]) -> Vec<usize> {
        let mut at = alloc::vec![0; pos.len()];
        for (v, &p) in pos.iter().enumerate() {
            at[p] = v;
        }
        let mut edges: Vec<(usize, usize, usize)> = Vec::new();
        for (s, out) in self.out.iter().enumerate() {
            edges.extend(out.iter().map(|&(l, d)| (pos[s], pos[d], l)));
        }
        edges.sort_unstable();
        let mut c: Vec<usize> = at.iter().map(|&v| self.node[v]).collect();
        c.extend(edges.into_iter().flat_map(|(s, d, l)| [s, d, l]));
        c
    }
}

fn distinct(col: &[usize]) -> usize {
    let mut c = col.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

struct FormSearch<'a> {
    graph: &'a Ranked,
    leaves: usize,
    budget: usize,
    exhausted: bool,
    /// Certificate, path and positions of the smallest leaf so far.
    best: Option<(Vec<usize>, Vec<usize>, Vec<usize>)>,
}

impl FormSearch<'_> {
    /// Returns the depth to jump back to after an automorphism is found.
    fn visit(&mut self, col: &[usize], path: &mut Vec<usize>) -> Option<usize> {
        if self.leaves >= self.budget {
            self.exhausted = true;
            return Some(0);
        }
        let mut size = alloc::vec![0usize; col.len()];
        for &c in col {
            size[c] += 1;
        }
        let Some(cell) = size.iter().position(|&k| k > 1) else {
            self.leaves += 1;
            let cert = self.graph.certificate(col);
            match &self.best {
                Some((b, bp, _)) if cert == *b => {
                    // The two leaves differ by an automorphism fixing their
                    // common prefix, so the rest of this subtree mirrors one
                    // already searched.
                    return Some(path.iter().zip(bp).take_while(|(a, b)| a == b).count());
                }
                Some((b, _, _)) if cert > *b => {}
                _ => self.best = Some((cert, path.clone(), col.to_vec())),
            }
            return None;
        };
        for v in (0..col.len()).filter(|&v| col[v] == cell) {
            let mut child: Vec<usize> = col.iter().map(|&c| 2 * c + 1).collect();
            child[v] -= 1;
            self.graph.refine(&mut child);
            path.push(v);
            let jump = self.visit(&child, path);
            path.pop();
            if self.exhausted {
                return Some(0);
            }
            match jump {
                Some(d) if d < path.len() => return Some(d),
                _ => {}
            }
        }
        None
    }
}

/// Hex SHA-256 of a canonical adjacency listing: equal for two DAGs exactly
/// when they are isomorphic. `None` when more than `budget` leaves of the
/// labelling search were needed.
pub fn canonical_form(h: &LabeledDigraph, budget: usize) -> Option<String> {
    let (graph, ids, labels, edge_labels) = Ranked::new(h);
    let mut col = graph.node.clone();
    graph.refine(&mut col);
    let mut search = FormSearch {
        graph: &graph,
        leaves: 0,
        budget: budget.max(1),
        exhausted: false,
        best: None,
    };
    search.visit(&col, &mut Vec::new());
    if search.exhausted {
        return None;
    }
    let (_, _, pos) = search.best?;
    let mut at = alloc::vec![0; ids.len()];
    for (v, &p) in pos.iter().enumerate() {
        at[p] = v;
    }
    let mut listing = String::new();
    for &v in &at {
        let l = labels[graph.node[v]];
        write!(listing, "{}:{l};", l.len()).expect("writing to a String");
    }
    let mut edges: Vec<(usize, usize, &Label)> = Vec::new();
    for (s, out) in graph.out.iter().enumerate() {
        edges.extend(out.iter().map(|&(l, d)| (pos[s], pos[d], &edge_labels[l])));
    }
    edges.sort_unstable();
    for (s, d, l) in edges {
        write!(listing, "{s}>{d}:{}:{l};", l.len()).expect("writing to a String");
    }
    Some(sha256_hex(&listing))
}

/// Relabel-invariant key of a DAG. Cyclic input is an error.
pub fn canonical_key(h: &LabeledDigraph) -> Result<CanonicalKey> {
    let digest = wl_digest(h)?;
    let mut degree_signature: Vec<(usize, usize, Label)> = h
        .nodes()
        .map(|(id, l)| (h.in_degree(id), h.out_degree(id), l.clone()))
        .collect();
    degree_signature.sort();
    Ok(CanonicalKey {
        digest,
        node_count: h.node_count(),
        edge_count: h.edge_count(),
        degree_signature,
        form: canonical_form(h, FORM_LEAF_BUDGET),
    })
}
