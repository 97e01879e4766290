//! Node-labeled, edge-labeled directed graphs.
//!
//! Node ids are opaque strings. Every container is ordered, so iteration
//! order (and therefore every algorithm built on top) is deterministic.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::vocab::DagDataset;

pub type NodeId = String;
pub type Label = String;

/// A directed, labeled edge `src -label-> dst`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub src: NodeId,
    pub label: Label,
    pub dst: NodeId,
}

/// Directed graph with labeled nodes and labeled edges.
///
/// Invariants: no self-loops, every edge endpoint is a node, and at most one
/// edge per `(src, label, dst)` triple.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabeledDigraph {
    nodes: BTreeMap<NodeId, Label>,
    // node -> {(neighbour, edge label)}
    succ: BTreeMap<NodeId, BTreeSet<(NodeId, Label)>>,
    pred: BTreeMap<NodeId, BTreeSet<(NodeId, Label)>>,
    edge_count: usize,
}

impl LabeledDigraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, id: impl Into<NodeId>, label: impl Into<Label>) -> Result<()> {
        let id = id.into();
        if self.nodes.contains_key(&id) {
            return Err(Error::DuplicateNode(id));
        }
        self.succ.insert(id.clone(), BTreeSet::new());
        self.pred.insert(id.clone(), BTreeSet::new());
        self.nodes.insert(id, label.into());
        Ok(())
    }

    /// Adds `src -label-> dst`. Returns `false` when the edge already existed.
    pub fn add_edge(
        &mut self,
        src: impl Into<NodeId>,
        label: impl Into<Label>,
        dst: impl Into<NodeId>,
    ) -> Result<bool> {
        let (src, label, dst) = (src.into(), label.into(), dst.into());
        if src == dst {
            return Err(Error::SelfLoop(src));
        }
        if !self.nodes.contains_key(&dst) {
            return Err(Error::UnknownNode(dst));
        }
        let Some(out) = self.succ.get_mut(&src) else {
            return Err(Error::UnknownNode(src));
        };
        if !out.insert((dst.clone(), label.clone())) {
            return Ok(false);
        }
        self.pred
            .get_mut(&dst)
            .expect("node present")
            .insert((src, label));
        self.edge_count += 1;
        Ok(true)
    }

    /// Removes a node together with all incident edges.
    pub fn remove_node(&mut self, id: &str) -> Result<Label> {
        let label = self
            .nodes
            .remove(id)
            .ok_or_else(|| Error::UnknownNode(id.into()))?;
        let out = self.succ.remove(id).unwrap_or_default();
        let inc = self.pred.remove(id).unwrap_or_default();
        for (dst, l) in &out {
            if let Some(p) = self.pred.get_mut(dst) {
                p.remove(&(String::from(id), l.clone()));
            }
        }
        for (src, l) in &inc {
            if let Some(s) = self.succ.get_mut(src) {
                s.remove(&(String::from(id), l.clone()));
            }
        }
        self.edge_count -= out.len() + inc.len();
        Ok(label)
    }

    pub fn contains_node(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn has_edge(&self, src: &str, label: &str, dst: &str) -> bool {
        self.succ
            .get(src)
            .is_some_and(|s| s.contains(&(String::from(dst), String::from(label))))
    }

    pub fn label(&self, id: &str) -> Option<&Label> {
        self.nodes.get(id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = (&NodeId, &Label)> + '_ {
        self.nodes.iter()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &NodeId> + '_ {
        self.nodes.keys()
    }

    /// Edges ordered by `(src, dst, label)`.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.succ.iter().flat_map(|(src, out)| {
            out.iter().map(move |(dst, label)| Edge {
                src: src.clone(),
                label: label.clone(),
                dst: dst.clone(),
            })
        })
    }

    /// Outgoing `(dst, label)` pairs of `id`.
    pub fn out_edges(&self, id: &str) -> impl Iterator<Item = &(NodeId, Label)> + '_ {
        self.succ.get(id).into_iter().flatten()
    }

    /// Incoming `(src, label)` pairs of `id`.
    pub fn in_edges(&self, id: &str) -> impl Iterator<Item = &(NodeId, Label)> + '_ {
        self.pred.get(id).into_iter().flatten()
    }

    pub fn out_degree(&self, id: &str) -> usize {
        self.succ.get(id).map_or(0, BTreeSet::len)
    }

    pub fn in_degree(&self, id: &str) -> usize {
        self.pred.get(id).map_or(0, BTreeSet::len)
    }

    /// Distinct successor ids.
    pub fn successors(&self, id: &str) -> BTreeSet<&NodeId> {
        self.out_edges(id).map(|(n, _)| n).collect()
    }

    /// Distinct predecessor ids.
    pub fn predecessors(&self, id: &str) -> BTreeSet<&NodeId> {
        self.in_edges(id).map(|(n, _)| n).collect()
    }

    /// Distinct neighbours in either direction.
    pub fn neighbors(&self, id: &str) -> BTreeSet<&NodeId> {
        let mut n = self.successors(id);
        n.extend(self.predecessors(id));
        n
    }

    /// Nodes with no incoming edge.
    pub fn roots(&self) -> impl Iterator<Item = &NodeId> + '_ {
        self.pred
            .iter()
            .filter(|(_, p)| p.is_empty())
            .map(|(id, _)| id)
    }

    /// Returns a copy whose node ids are rewritten by `f`; `f` must be injective.
    pub fn relabel_ids(&self, mut f: impl FnMut(&str) -> NodeId) -> Result<LabeledDigraph> {
        let map: BTreeMap<&NodeId, NodeId> = self.nodes.keys().map(|id| (id, f(id))).collect();
        let mut g = LabeledDigraph::new();
        for (id, label) in &self.nodes {
            g.add_node(map[id].clone(), label.clone())?;
        }
        for e in self.edges() {
            g.add_edge(map[&e.src].clone(), e.label, map[&e.dst].clone())?;
        }
        Ok(g)
    }

    /// Copy with ids replaced by `"0".."n-1"` in current id order.
    pub fn with_dense_ids(&self) -> LabeledDigraph {
        let index: BTreeMap<&NodeId, usize> = self
            .nodes
            .keys()
            .enumerate()
            .map(|(i, id)| (id, i))
            .collect();
        self.relabel_ids(|id| format!("{}", index[&String::from(id)]))
            .expect("dense relabeling is injective")
    }

    /// Weakly connected components, each sorted, ordered by their smallest id.
    pub fn weak_components(&self) -> Vec<Vec<NodeId>> {
        let mut seen: BTreeSet<&NodeId> = BTreeSet::new();
        let mut comps = Vec::new();
        for start in self.nodes.keys() {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                comp.push(v.clone());
                for (w, _) in self.out_edges(v).chain(self.in_edges(v)) {
                    if seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
            comp.sort();
            comps.push(comp);
        }
        comps
    }

    /// Topological order (Kahn, smallest id first), or `None` if cyclic.
    pub fn topological_order(&self) -> Option<Vec<&NodeId>> {
        let mut indeg: BTreeMap<&NodeId, usize> = self
            .nodes
            .keys()
            .map(|id| (id, self.predecessors(id).len()))
            .collect();
        let mut ready: BTreeSet<&NodeId> = indeg
            .iter()
            .filter(|(_, d)| **d == 0)
            .map(|(id, _)| *id)
            .collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for w in self.successors(v) {
                let d = indeg.get_mut(w).expect("edge endpoint is a node");
                *d -= 1;
                if *d == 0 {
                    ready.insert(w);
                }
            }
        }
        (order.len() == self.nodes.len()).then_some(order)
    }
}

/// True iff `h` has no directed cycle.
pub fn is_dag(h: &LabeledDigraph) -> bool {
    h.topological_order().is_some()
}

/// True iff the underlying undirected graph is connected. The empty graph is
/// not connected.
pub fn is_weakly_connected(h: &LabeledDigraph) -> bool {
    !h.is_empty() && h.weak_components().len() == 1
}

/// Node-induced subgraph on `vs`.
pub fn induced_subgraph<'a, I>(h: &LabeledDigraph, vs: I) -> Result<LabeledDigraph>
where
    I: IntoIterator<Item = &'a NodeId>,
{
    let keep: BTreeSet<&NodeId> = vs.into_iter().collect();
    let mut g = LabeledDigraph::new();
    for v in &keep {
        let label = h.label(v).ok_or_else(|| Error::UnknownNode((*v).clone()))?;
        g.add_node((*v).clone(), label.clone())?;
    }
    for v in &keep {
        for (w, l) in h.out_edges(v) {
            if keep.contains(w) {
                g.add_edge((*v).clone(), l.clone(), w.clone())?;
            }
        }
    }
    Ok(g)
}

/// Disjoint union of a dataset. Node `v` of graph `i` becomes `"{i}/{v}"`;
/// the returned map sends every union node to its graph index.
pub fn composite_graph(d: &DagDataset) -> Result<(LabeledDigraph, BTreeMap<NodeId, usize>)> {
    composite_of(d.graphs())
}

pub(crate) fn composite_of<'a, I>(graphs: I) -> Result<(LabeledDigraph, BTreeMap<NodeId, usize>)>
where
    I: IntoIterator<Item = &'a LabeledDigraph>,
{
    let mut h = LabeledDigraph::new();
    let mut component = BTreeMap::new();
    let mut any = false;
    for (i, g) in graphs.into_iter().enumerate() {
        any = true;
        for (v, l) in g.nodes() {
            let id = format!("{i}/{v}");
            h.add_node(id.clone(), l.clone())?;
            component.insert(id, i);
        }
        for e in g.edges() {
            h.add_edge(format!("{i}/{}", e.src), e.label, format!("{i}/{}", e.dst))?;
        }
    }
    if !any {
        return Err(Error::EmptyDataset);
    }
    Ok((h, component))
}

/// Builds a graph from `(id, label)` nodes and `(src, dst)` edges with the
/// default edge label. Convenient for tests and fixtures.
pub fn graph_from(nodes: &[(&str, &str)], edges: &[(&str, &str)]) -> Result<LabeledDigraph> {
    let mut g = LabeledDigraph::new();
    for (id, l) in nodes {
        g.add_node(*id, *l)?;
    }
    for (s, d) in edges {
        g.add_edge(*s, crate::vocab::DEFAULT_EDGE_LABEL, *d)?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::LabelVocabulary;
    use alloc::vec;

    fn chain(labels: &[&str]) -> LabeledDigraph {
        let ids: Vec<String> = (0..labels.len()).map(|i| format!("{i}")).collect();
        let nodes: Vec<(&str, &str)> = ids
            .iter()
            .zip(labels)
            .map(|(i, l)| (i.as_str(), *l))
            .collect();
        let edges: Vec<(&str, &str)> = ids
            .windows(2)
            .map(|w| (w[0].as_str(), w[1].as_str()))
            .collect();
        graph_from(&nodes, &edges).unwrap()
    }

    fn diamond() -> LabeledDigraph {
        graph_from(
            &[("a", "A"), ("b", "B"), ("c", "C"), ("d", "D")],
            &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")],
        )
        .unwrap()
    }

    #[test]
    fn dag_checks() {
        assert!(is_dag(&graph_from(&[("a", "X")], &[]).unwrap()));
        assert!(is_dag(
            &graph_from(
                &[("a", "X"), ("b", "X"), ("c", "X")],
                &[("a", "b"), ("b", "c"), ("a", "c")]
            )
            .unwrap()
        ));
        assert!(!is_dag(
            &graph_from(&[("a", "X"), ("b", "X")], &[("a", "b"), ("b", "a")]).unwrap()
        ));
    }

    #[test]
    fn connectivity() {
        assert!(is_weakly_connected(&chain(&["X", "Y"])));
        assert!(!is_weakly_connected(
            &graph_from(&[("a", "X"), ("b", "X")], &[]).unwrap()
        ));
        assert!(is_weakly_connected(&diamond()));
        assert!(is_weakly_connected(
            &graph_from(&[("a", "X")], &[]).unwrap()
        ));
        assert!(!is_weakly_connected(&LabeledDigraph::new()));
    }

    #[test]
    fn induced() {
        let d = diamond();
        let ids: Vec<NodeId> = vec!["a".into(), "b".into(), "d".into()];
        let s = induced_subgraph(&d, &ids).unwrap();
        let edges: Vec<(String, String)> = s.edges().map(|e| (e.src, e.dst)).collect();
        assert_eq!(
            edges,
            vec![("a".into(), "b".into()), ("b".into(), "d".into())]
        );

        let all: Vec<NodeId> = d.node_ids().cloned().collect();
        assert_eq!(induced_subgraph(&d, &all).unwrap(), d);

        let c = chain(&["X", "Y", "Z"]);
        let ends: Vec<NodeId> = vec!["0".into(), "2".into()];
        let s = induced_subgraph(&c, &ends).unwrap();
        assert_eq!((s.node_count(), s.edge_count()), (2, 0));

        let bad: Vec<NodeId> = vec!["zz".into()];
        assert_eq!(
            induced_subgraph(&c, &bad),
            Err(Error::UnknownNode("zz".into()))
        );
    }

    #[test]
    fn invariants_enforced() {
        let mut g = graph_from(&[("a", "X"), ("b", "Y")], &[]).unwrap();
        assert_eq!(
            g.add_edge("a", "black", "a"),
            Err(Error::SelfLoop("a".into()))
        );
        assert_eq!(
            g.add_edge("a", "black", "q"),
            Err(Error::UnknownNode("q".into()))
        );
        assert!(g.add_edge("a", "black", "b").unwrap());
        assert!(!g.add_edge("a", "black", "b").unwrap());
        assert!(g.add_edge("a", "red", "b").unwrap());
        assert_eq!(g.edge_count(), 2);
        g.remove_node("b").unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.out_degree("a"), 0);
    }

    #[test]
    fn composite() {
        let vocab = LabelVocabulary::for_terminals(["X", "Y", "Z"]);
        let graphs = vec![chain(&["X", "Y", "Z"]); 3];
        let d = DagDataset::new(graphs, vocab.clone()).unwrap();
        let (h, map) = composite_graph(&d).unwrap();
        assert_eq!(
            (h.node_count(), h.edge_count(), h.weak_components().len()),
            (9, 6, 3)
        );
        assert_eq!(map["2/1"], 2);

        let one = DagDataset::new(
            vec![diamond()],
            LabelVocabulary::for_terminals(["A", "B", "C", "D"]),
        )
        .unwrap();
        let (h, map) = composite_graph(&one).unwrap();
        assert_eq!((h.node_count(), h.edge_count()), (4, 4));
        assert!(map.values().all(|&c| c == 0));

        assert_eq!(
            composite_of(core::iter::empty()).unwrap_err(),
            Error::EmptyDataset
        );
    }

    #[test]
    fn topological_order_is_deterministic() {
        let d = diamond();
        let order: Vec<&str> = d
            .topological_order()
            .unwrap()
            .into_iter()
            .map(|s| s.as_str())
            .collect();
        assert_eq!(order, vec!["a", "b", "c", "d"]);
    }
}
