//! Redirection realizations, instruction bounds and the compatibility graph.
//!
//! A realization fixes, for one occurrence, the direction and label of the
//! edge each boundary neighbour `y` will have to the contracted nonterminal.
//! That gives `y` a precondition `(λ(y), β_y, d_y)`; the edges `y` actually has
//! to the occurrence give its realized postconditions `(x, d′, γ)`. The inset
//! is every precondition paired with a realized postcondition, the outset
//! every precondition paired with a postcondition that is absent.
//!
//! Two realizations can share an instruction set iff they agree on the
//! realized postconditions of every precondition they share. That is the
//! set condition `(inset_i ∪ inset_j) ∩ (outset_i ∪ outset_j) = ∅` written
//! per precondition, and it lets the adjacency matrix be built with a few
//! bitset operations per node instead of a set intersection per pair.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;

use crate::clique::BitGraph;
use crate::error::{Error, Result};
use crate::grammar::{Direction, Instruction};
use crate::graph::{Label, LabeledDigraph, NodeId};
use crate::mining::{Host, Occurrence};
use crate::par;

/// Boundary neighbour to `(d_y, β_y)`: the side of `y` relative to the
/// contracted node (`In`: `y -> n`) and the label of that edge.
pub type RedirectionAssignment = BTreeMap<NodeId, (Direction, Label)>;

/// `(σ, β, d)`
pub type Precondition = (Label, Label, Direction);
/// `(x, d′, γ)`
pub type Postcondition = (NodeId, Direction, Label);

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InstructionBounds {
    /// Instructions that must be in the rule.
    pub inset: BTreeSet<Instruction>,
    /// Instructions that must not be in the rule.
    pub outset: BTreeSet<Instruction>,
}

impl InstructionBounds {
    pub fn is_valid(&self) -> bool {
        self.inset.is_disjoint(&self.outset)
    }

    /// `inset ⊆ i` and `outset ∩ i = ∅`.
    pub fn admits(&self, i: &BTreeSet<Instruction>) -> bool {
        self.inset.is_subset(i) && self.outset.is_disjoint(i)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatNode {
    pub occurrence: Occurrence,
    pub dirs: RedirectionAssignment,
    pub bounds: InstructionBounds,
    /// Realized postconditions per precondition.
    pub signature: BTreeMap<Precondition, BTreeSet<Postcondition>>,
}

#[derive(Debug, Clone)]
pub struct CompatGraph {
    pub nodes: Vec<CompatNode>,
    pub adjacency: BitGraph,
}

impl CompatGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency.has(i, j)
    }

    /// Edges `(i, j)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency.edges()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatConfig {
    /// Boundary size above which only the all-in and all-out assignments are tried.
    pub redirection_cap: usize,
    /// Edge-label universe for `β` and `γ`.
    pub edge_labels: BTreeSet<Label>,
    /// Keep one realization per (component, signature).
    pub collapse_twins: bool,
}

impl CompatConfig {
    pub fn new(edge_labels: BTreeSet<Label>) -> Self {
        CompatConfig {
            redirection_cap: 10,
            edge_labels,
            collapse_twins: false,
        }
    }
}

/// Host nodes outside the occurrence adjacent to it, sorted.
pub fn boundary<'a>(h: &'a LabeledDigraph, occ: &Occurrence) -> BTreeSet<&'a NodeId> {
    let image = occ.image();
    let mut b = BTreeSet::new();
    for s in &image {
        for w in h.neighbors(s) {
            if !image.contains(w) {
                b.insert(w);
            }
        }
    }
    b
}

/// `y ≺ y′` iff a directed path from `y` to `y′` avoids the occurrence.
/// Returned as `y -> {y′}` over boundary neighbours.
pub fn precedence_graph<'a>(
    h: &'a LabeledDigraph,
    occ: &Occurrence,
) -> BTreeMap<&'a NodeId, BTreeSet<&'a NodeId>> {
    let image = occ.image();
    let b = boundary(h, occ);
    let mut rel = BTreeMap::new();
    for &y in &b {
        let mut seen: BTreeSet<&NodeId> = BTreeSet::new();
        let mut queue: VecDeque<&NodeId> = VecDeque::from([y]);
        while let Some(v) = queue.pop_front() {
            for w in h.successors(v) {
                if !image.contains(w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        let after: BTreeSet<&NodeId> = seen
            .into_iter()
            .filter(|w| *w != y && b.contains(w))
            .collect();
        rel.insert(y, after);
    }
    rel
}

/// Labels of the edges between `y` and the occurrence image.
fn connecting_labels<'a>(h: &'a LabeledDigraph, occ: &Occurrence, y: &str) -> BTreeSet<&'a Label> {
    let image = occ.image();
    h.out_edges(y)
        .chain(h.in_edges(y))
        .filter(|(w, _)| image.contains(w))
        .map(|(_, l)| l)
        .collect()
}

/// Acyclicity-preserving redirection assignments, `In` before `Out` and
/// labels ascending per neighbour, neighbours in id order. Above `cap`
/// neighbours only the two uniform assignments are produced.
pub fn enumerate_redirections(
    h: &LabeledDigraph,
    occ: &Occurrence,
    cap: usize,
    edge_labels: &BTreeSet<Label>,
) -> Vec<RedirectionAssignment> {
    let b: Vec<&NodeId> = boundary(h, occ).into_iter().collect();
    if b.len() > cap {
        return [Direction::In, Direction::Out]
            .into_iter()
            .map(|d| {
                b.iter()
                    .map(|y| {
                        let beta = connecting_labels(h, occ, y)
                            .into_iter()
                            .next()
                            .expect("boundary node")
                            .clone();
                        ((*y).clone(), (d, beta))
                    })
                    .collect()
            })
            .collect();
    }
    let prec = precedence_graph(h, occ);
    let index: BTreeMap<&NodeId, usize> = b.iter().enumerate().map(|(i, y)| (*y, i)).collect();
    // before[i]: earlier neighbours j with j ≺ i; after[i]: earlier j with i ≺ j.
    let mut before = alloc::vec![Vec::new(); b.len()];
    let mut after = alloc::vec![Vec::new(); b.len()];
    for (y, succ) in &prec {
        for y2 in succ {
            let (i, j) = (index[y], index[y2]);
            if i < j {
                before[j].push(i);
            } else {
                after[i].push(j);
            }
        }
    }
    let mut out = Vec::new();
    let mut dirs: Vec<Direction> = Vec::with_capacity(b.len());
    let mut betas: Vec<&Label> = Vec::with_capacity(b.len());
    fn rec<'a>(
        i: usize,
        b: &[&NodeId],
        edge_labels: &'a BTreeSet<Label>,
        before: &[Vec<usize>],
        after: &[Vec<usize>],
        dirs: &mut Vec<Direction>,
        betas: &mut Vec<&'a Label>,
        out: &mut Vec<RedirectionAssignment>,
    ) {
        if i == b.len() {
            out.push(
                b.iter()
                    .zip(dirs.iter().zip(betas.iter()))
                    .map(|(y, (d, l))| ((*y).clone(), (*d, (*l).clone())))
                    .collect(),
            );
            return;
        }
        for d in [Direction::In, Direction::Out] {
            // A cycle n -> y -> ... -> y' -> n needs y ≺ y', d_y = Out, d_y' = In.
            let ok = match d {
                Direction::In => before[i].iter().all(|&j| dirs[j] != Direction::Out),
                Direction::Out => after[i].iter().all(|&j| dirs[j] != Direction::In),
            };
            if !ok {
                continue;
            }
            for l in edge_labels {
                dirs.push(d);
                betas.push(l);
                rec(i + 1, b, edge_labels, before, after, dirs, betas, out);
                dirs.pop();
                betas.pop();
            }
        }
    }
    rec(
        0,
        &b,
        edge_labels,
        &before,
        &after,
        &mut dirs,
        &mut betas,
        &mut out,
    );
    out
}

/// Realized postconditions of neighbour `y`.
fn postconditions(h: &LabeledDigraph, occ: &Occurrence, y: &str) -> BTreeSet<Postcondition> {
    let mut r = BTreeSet::new();
    for (x, s) in &occ.node_map {
        for (w, l) in h.out_edges(y) {
            if w == s {
                r.insert((x.clone(), Direction::In, l.clone()));
            }
        }
        for (w, l) in h.in_edges(y) {
            if w == s {
                r.insert((x.clone(), Direction::Out, l.clone()));
            }
        }
    }
    r
}

/// Bounds deduced from one realization, neighbour by neighbour. Conflicting
/// neighbours put an instruction in both sets.
pub fn insets_and_outsets(
    h: &LabeledDigraph,
    occ: &Occurrence,
    dirs: &RedirectionAssignment,
    edge_labels: &BTreeSet<Label>,
) -> InstructionBounds {
    let mut bounds = InstructionBounds::default();
    for (y, (d, beta)) in dirs {
        let sigma = h.label(y).expect("boundary neighbour is a node");
        let realized = postconditions(h, occ, y);
        for x in occ.node_map.keys() {
            for gamma in edge_labels {
                for d_prime in [Direction::In, Direction::Out] {
                    let ins = Instruction {
                        sigma: sigma.clone(),
                        beta: beta.clone(),
                        gamma: gamma.clone(),
                        x: x.clone(),
                        d: *d,
                        d_prime,
                    };
                    if realized.contains(&(x.clone(), d_prime, gamma.clone())) {
                        bounds.inset.insert(ins);
                    } else {
                        bounds.outset.insert(ins);
                    }
                }
            }
        }
    }
    bounds
}

/// Precondition to realized postconditions, or `None` when two neighbours
/// with the same precondition realize different postconditions.
pub fn signature(
    h: &LabeledDigraph,
    occ: &Occurrence,
    dirs: &RedirectionAssignment,
) -> Option<BTreeMap<Precondition, BTreeSet<Postcondition>>> {
    let mut sig: BTreeMap<Precondition, BTreeSet<Postcondition>> = BTreeMap::new();
    for (y, (d, beta)) in dirs {
        let pre = (h.label(y).expect("node").clone(), beta.clone(), *d);
        let post = postconditions(h, occ, y);
        match sig.get(&pre) {
            Some(existing) if *existing != post => return None,
            Some(_) => {}
            None => {
                sig.insert(pre, post);
            }
        }
    }
    Some(sig)
}

/// The literal compatibility condition between two realizations.
pub fn bounds_compatible(a: &InstructionBounds, b: &InstructionBounds) -> bool {
    let ins: BTreeSet<&Instruction> = a.inset.union(&b.inset).collect();
    a.outset.iter().chain(&b.outset).all(|i| !ins.contains(i))
}

/// Valid realizations of every occurrence and their compatibility edges.
/// Two nodes are adjacent iff they lie in different components (hence have
/// disjoint images) and agree on every shared precondition. With
/// `existing` only realizations admitted by that instruction set are kept.
pub fn build_compat_graph(
    host: &Host,
    occs: &[Occurrence],
    existing: Option<&BTreeSet<Instruction>>,
    cfg: &CompatConfig,
) -> CompatGraph {
    let h = &host.graph;
    let per_occ: Vec<Vec<CompatNode>> = par::map(occs, |occ| {
        enumerate_redirections(h, occ, cfg.redirection_cap, &cfg.edge_labels)
            .into_iter()
            .filter_map(|dirs| {
                let signature = signature(h, occ, &dirs)?;
                let bounds = insets_and_outsets(h, occ, &dirs, &cfg.edge_labels);
                if existing.is_some_and(|i| !bounds.admits(i)) {
                    return None;
                }
                Some(CompatNode {
                    occurrence: occ.clone(),
                    dirs,
                    bounds,
                    signature,
                })
            })
            .collect()
    });
    let mut nodes: Vec<CompatNode> = Vec::new();
    let mut seen: BTreeSet<(usize, &BTreeMap<Precondition, BTreeSet<Postcondition>>)> =
        BTreeSet::new();
    for n in per_occ.iter().flatten() {
        if cfg.collapse_twins && !seen.insert((n.occurrence.component, &n.signature)) {
            continue;
        }
        nodes.push(n.clone());
    }
    let adjacency = adjacency(&nodes);
    CompatGraph { nodes, adjacency }
}

fn adjacency(nodes: &[CompatNode]) -> BitGraph {
    let n = nodes.len();
    let mut pre_id: BTreeMap<&Precondition, usize> = BTreeMap::new();
    let mut pair_id: BTreeMap<(&Precondition, &BTreeSet<Postcondition>), usize> = BTreeMap::new();
    let mut comp_id: BTreeMap<usize, usize> = BTreeMap::new();
    let mut sigs: Vec<Vec<(usize, usize)>> = Vec::with_capacity(n);
    for node in nodes {
        let c = comp_id.len();
        comp_id.entry(node.occurrence.component).or_insert(c);
        let mut s = Vec::new();
        for (pre, post) in &node.signature {
            let p = pre_id.len();
            let p = *pre_id.entry(pre).or_insert(p);
            let q = pair_id.len();
            let q = *pair_id.entry((pre, post)).or_insert(q);
            s.push((p, q));
        }
        sigs.push(s);
    }
    let mut has_pre = alloc::vec![BitGraph::empty_row(n); pre_id.len()];
    let mut has_pair = alloc::vec![BitGraph::empty_row(n); pair_id.len()];
    let mut in_comp = alloc::vec![BitGraph::empty_row(n); comp_id.len()];
    for (i, s) in sigs.iter().enumerate() {
        for &(p, q) in s {
            BitGraph::set_bit(&mut has_pre[p], i);
            BitGraph::set_bit(&mut has_pair[q], i);
        }
        BitGraph::set_bit(&mut in_comp[comp_id[&nodes[i].occurrence.component]], i);
    }
    let mut g = BitGraph::new(n);
    for i in 0..n {
        let row = g.row_mut(i);
        BitGraph::fill_row(row, n);
        let c = &in_comp[comp_id[&nodes[i].occurrence.component]];
        for (w, m) in row.iter_mut().zip(c) {
            *w &= !m;
        }
        for &(p, q) in &sigs[i] {
            for ((w, hp), hq) in row.iter_mut().zip(&has_pre[p]).zip(&has_pair[q]) {
                *w &= !(hp & !hq);
            }
        }
    }
    g
}

/// `final_I = ∪ inset`, `excluded = ∪ outset`. Errors if they intersect.
pub fn or_reduce<'a, I>(clique: I) -> Result<(BTreeSet<Instruction>, BTreeSet<Instruction>)>
where
    I: IntoIterator<Item = &'a CompatNode>,
{
    let mut final_i = BTreeSet::new();
    let mut excluded = BTreeSet::new();
    for n in clique {
        final_i.extend(n.bounds.inset.iter().cloned());
        excluded.extend(n.bounds.outset.iter().cloned());
    }
    if let Some(i) = final_i.intersection(&excluded).next() {
        return Err(Error::invariant(alloc::format!(
            "clique members disagree on instruction {i}"
        )));
    }
    Ok((final_i, excluded))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{graph_from, is_dag};
    use crate::vocab::DEFAULT_EDGE_LABEL;
    use alloc::format;
    use alloc::string::{String, ToString};
    use alloc::vec;
    use proptest::prelude::*;

    fn black() -> BTreeSet<Label> {
        [DEFAULT_EDGE_LABEL.to_string()].into()
    }

    fn occ(component: usize, pairs: &[(&str, &str)]) -> Occurrence {
        Occurrence {
            component,
            node_map: pairs
                .iter()
                .map(|(p, h)| (p.to_string(), h.to_string()))
                .collect(),
        }
    }

    fn ids<'a>(s: impl IntoIterator<Item = &'a NodeId>) -> Vec<&'a str> {
        s.into_iter().map(String::as_str).collect()
    }

    #[test]
    fn precedence_examples() {
        // p and q both feed the occurrence, no path between them.
        let h = graph_from(
            &[("p", "P"), ("q", "Q"), ("s", "S")],
            &[("p", "s"), ("q", "s")],
        )
        .unwrap();
        let o = occ(0, &[("0", "s")]);
        assert!(precedence_graph(&h, &o).values().all(|s| s.is_empty()));

        let h = graph_from(
            &[("p", "P"), ("q", "Q"), ("s", "S")],
            &[("p", "s"), ("s", "q"), ("p", "q")],
        )
        .unwrap();
        let rel = precedence_graph(&h, &o);
        assert_eq!(ids(rel[&String::from("p")].iter().copied()), vec!["q"]);

        let h = graph_from(
            &[("p", "P"), ("m", "M"), ("q", "Q"), ("s", "S")],
            &[("p", "s"), ("s", "q"), ("p", "m"), ("m", "q")],
        )
        .unwrap();
        let rel = precedence_graph(&h, &o);
        assert_eq!(ids(rel[&String::from("p")].iter().copied()), vec!["q"]);
        // m is a boundary neighbour? No: m is not adjacent to s.
        assert_eq!(rel.len(), 2);
    }

    #[test]
    fn redirection_counts() {
        let h = graph_from(&[("s", "S")], &[]).unwrap();
        assert_eq!(
            enumerate_redirections(&h, &occ(0, &[("0", "s")]), 10, &black()),
            vec![BTreeMap::new()]
        );

        let h = graph_from(
            &[("p", "P"), ("q", "Q"), ("s", "S")],
            &[("p", "s"), ("s", "q")],
        )
        .unwrap();
        assert_eq!(
            enumerate_redirections(&h, &occ(0, &[("0", "s")]), 10, &black()).len(),
            4
        );

        // p ≺ q through p -> q: q -> n together with n -> p would close q -> n -> p -> q.
        let h = graph_from(
            &[("p", "P"), ("q", "Q"), ("s", "S")],
            &[("p", "s"), ("s", "q"), ("p", "q")],
        )
        .unwrap();
        let all = enumerate_redirections(&h, &occ(0, &[("0", "s")]), 10, &black());
        assert_eq!(all.len(), 3);
        assert!(!all
            .iter()
            .any(|a| a["p"].0 == Direction::Out && a["q"].0 == Direction::In));

        let capped = enumerate_redirections(&h, &occ(0, &[("0", "s")]), 1, &black());
        assert_eq!(capped.len(), 2);
    }

    #[test]
    fn empty_boundary_bounds() {
        let h = graph_from(&[("a", "A"), ("b", "B")], &[("a", "b")]).unwrap();
        let o = occ(0, &[("0", "a"), ("1", "b")]);
        let b = insets_and_outsets(&h, &o, &BTreeMap::new(), &black());
        assert!(b.inset.is_empty() && b.outset.is_empty());
    }

    #[test]
    fn or_reduce_unions() {
        let i = |x: &str| Instruction {
            sigma: "A".into(),
            beta: "black".into(),
            gamma: "black".into(),
            x: x.into(),
            d: Direction::In,
            d_prime: Direction::In,
        };
        let node = |ins: Instruction| CompatNode {
            occurrence: occ(0, &[]),
            dirs: BTreeMap::new(),
            bounds: InstructionBounds {
                inset: [ins].into(),
                outset: BTreeSet::new(),
            },
            signature: BTreeMap::new(),
        };
        let (a, b) = (node(i("0")), node(i("1")));
        assert_eq!(or_reduce([&a]).unwrap().0, a.bounds.inset);
        assert_eq!(or_reduce([&a, &b]).unwrap().0, [i("0"), i("1")].into());
        let mut bad = b.clone();
        bad.bounds.outset.insert(i("0"));
        assert!(matches!(or_reduce([&a, &bad]), Err(Error::Invariant(_))));
    }

    #[test]
    fn overlapping_occurrences_are_never_adjacent() {
        let h = graph_from(
            &[("a", "A"), ("b", "A"), ("c", "A")],
            &[("a", "b"), ("b", "c")],
        )
        .unwrap();
        let host = Host::new(h, |_| false);
        let occs = vec![
            occ(0, &[("0", "a"), ("1", "b")]),
            occ(0, &[("0", "b"), ("1", "c")]),
        ];
        let g = build_compat_graph(&host, &occs, None, &CompatConfig::new(black()));
        assert!(g.len() >= 2);
        assert!(g.edges().is_empty());

        let single = build_compat_graph(&host, &occs[..1], None, &CompatConfig::new(black()));
        assert!(single.edges().is_empty());
    }

    fn contract_and_check_acyclic(
        h: &LabeledDigraph,
        o: &Occurrence,
        dirs: &RedirectionAssignment,
    ) -> bool {
        let mut g = h.clone();
        for v in o.node_map.values() {
            g.remove_node(v).unwrap();
        }
        g.add_node("__n", "N").unwrap();
        for (y, (d, l)) in dirs {
            match d {
                Direction::In => g.add_edge(y.clone(), l.clone(), "__n").unwrap(),
                Direction::Out => g.add_edge("__n", l.clone(), y.clone()).unwrap(),
            };
        }
        is_dag(&g)
    }

    fn arb_host() -> impl Strategy<Value = (LabeledDigraph, Vec<usize>)> {
        (3usize..=7).prop_flat_map(|n| {
            (
                proptest::collection::vec(0usize..2, n),
                proptest::collection::vec(proptest::bool::weighted(0.35), n * (n - 1) / 2),
                proptest::sample::subsequence((0..n).collect::<Vec<usize>>(), 2),
                Just(n),
            )
                .prop_map(|(labels, es, picks, n)| {
                    let mut g = LabeledDigraph::new();
                    for (i, l) in labels.iter().enumerate() {
                        g.add_node(format!("{i}"), format!("L{l}")).unwrap();
                    }
                    let mut k = 0;
                    for i in 0..n {
                        for j in i + 1..n {
                            if es[k] {
                                g.add_edge(format!("{i}"), "black", format!("{j}")).unwrap();
                            }
                            k += 1;
                        }
                    }
                    (g, picks)
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        // Every emitted assignment keeps the contracted graph acyclic, and
        // every acyclic assignment is emitted.
        #[test]
        fn redirections_are_exactly_the_acyclic_ones((h, picks) in arb_host()) {
            let o = Occurrence {
                component: 0,
                node_map: picks.iter().enumerate().map(|(p, v)| (format!("{p}"), format!("{v}"))).collect(),
            };
            let got = enumerate_redirections(&h, &o, 10, &black());
            let b: Vec<&NodeId> = boundary(&h, &o).into_iter().collect();
            let mut expected = Vec::new();
            for mask in 0u32..(1 << b.len()) {
                let dirs: RedirectionAssignment = b
                    .iter()
                    .enumerate()
                    .map(|(i, y)| {
                        let d = if mask >> (b.len() - 1 - i) & 1 == 0 { Direction::In } else { Direction::Out };
                        ((*y).clone(), (d, "black".to_string()))
                    })
                    .collect();
                if contract_and_check_acyclic(&h, &o, &dirs) {
                    expected.push(dirs);
                }
            }
            prop_assert_eq!(got, expected);
        }

        // Signature-based adjacency agrees with the literal set formula.
        #[test]
        fn adjacency_matches_set_formula(
            (h1, p1) in arb_host(),
            (h2, p2) in arb_host(),
            (h3, p3) in arb_host(),
        ) {
            let mut h = LabeledDigraph::new();
            let mut occs = Vec::new();
            for (c, (g, picks)) in [(h1, p1), (h2, p2), (h3, p3)].into_iter().enumerate() {
                for (v, l) in g.nodes() {
                    h.add_node(format!("{c}/{v}"), l.clone()).unwrap();
                }
                for e in g.edges() {
                    h.add_edge(format!("{c}/{}", e.src), e.label, format!("{c}/{}", e.dst)).unwrap();
                }
                occs.push(Occurrence {
                    component: c,
                    node_map: picks.iter().enumerate().map(|(p, v)| (format!("{p}"), format!("{c}/{v}"))).collect(),
                });
            }
            let component = h.node_ids().map(|v| (v.clone(), v[..1].parse().unwrap())).collect();
            let host = Host::with_components(h, component, |_| false);
            let cg = build_compat_graph(&host, &occs, None, &CompatConfig::new(black()));
            for i in 0..cg.len() {
                prop_assert!(cg.nodes[i].bounds.is_valid());
                for j in 0..cg.len() {
                    if i == j { continue; }
                    let (a, b) = (&cg.nodes[i], &cg.nodes[j]);
                    let literal = a.occurrence.component != b.occurrence.component
                        && a.occurrence.image().is_disjoint(&b.occurrence.image())
                        && bounds_compatible(&a.bounds, &b.bounds);
                    prop_assert_eq!(cg.adjacent(i, j), literal, "{} {}", i, j);
                }
            }
        }

        // Realizations rejected by the signature are exactly those whose
        // bounds intersect.
        #[test]
        fn signature_validity_matches_bounds((h, picks) in arb_host()) {
            let o = Occurrence {
                component: 0,
                node_map: picks.iter().enumerate().map(|(p, v)| (format!("{p}"), format!("{v}"))).collect(),
            };
            for dirs in enumerate_redirections(&h, &o, 10, &black()) {
                let b = insets_and_outsets(&h, &o, &dirs, &black());
                prop_assert_eq!(signature(&h, &o, &dirs).is_some(), b.is_valid());
            }
        }
    }
}
