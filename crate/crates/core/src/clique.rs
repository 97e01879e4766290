//! Maximum clique at three accuracy tiers over a bitset adjacency matrix.
//!
//! * exact: branch and bound with greedy-colouring bounds, limited to small
//!   graphs;
//! * approx: iterated Ramsey clique removal;
//! * greedy: best of `K` randomized greedy constructions.
//!
//! Equal-size results are broken towards the lexicographically smallest
//! sorted index list, and every result is checked to be a clique.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng;

/// Undirected simple graph on `0..n` as adjacency bit rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitGraph {
    n: usize,
    rows: Vec<Vec<u64>>,
}

type Row = Vec<u64>;

impl BitGraph {
    pub fn new(n: usize) -> Self {
        BitGraph {
            n,
            rows: vec![Self::empty_row(n); n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::new(n);
        for (i, j) in edges {
            g.add_edge(i, j);
        }
        g
    }

    pub fn empty_row(n: usize) -> Row {
        vec![0; n.div_ceil(64)]
    }

    pub fn set_bit(row: &mut [u64], i: usize) {
        row[i / 64] |= 1 << (i % 64);
    }

    fn clear_bit(row: &mut [u64], i: usize) {
        row[i / 64] &= !(1 << (i % 64));
    }

    fn bit(row: &[u64], i: usize) -> bool {
        row[i / 64] >> (i % 64) & 1 == 1
    }

    /// Sets bits `0..n`.
    pub fn fill_row(row: &mut [u64], n: usize) {
        for (k, w) in row.iter_mut().enumerate() {
            let lo = k * 64;
            *w = if n >= lo + 64 {
                u64::MAX
            } else if n > lo {
                (1u64 << (n - lo)) - 1
            } else {
                0
            };
        }
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut Row {
        &mut self.rows[i]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        if i != j {
            Self::set_bit(&mut self.rows[i], j);
            Self::set_bit(&mut self.rows[j], i);
        }
    }

    pub fn has(&self, i: usize, j: usize) -> bool {
        Self::bit(&self.rows[i], j)
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        ones(&self.rows[i])
    }

    pub fn degree(&self, i: usize) -> usize {
        self.rows[i].iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| {
                self.neighbors(i)
                    .filter(move |&j| j > i)
                    .map(move |j| (i, j))
            })
            .collect()
    }

    pub fn is_clique(&self, vs: &[usize]) -> bool {
        vs.iter().all(|&v| v < self.n)
            && vs
                .iter()
                .enumerate()
                .all(|(k, &a)| vs[k + 1..].iter().all(|&b| a != b && self.has(a, b)))
    }
}

fn ones(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(|(k, &w)| {
        let mut w = w;
        core::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let t = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(k * 64 + t)
        })
    })
}

fn first(row: &[u64]) -> Option<usize> {
    row.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
}

fn and(a: &[u64], b: &[u64]) -> Row {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn is_zero(a: &[u64]) -> bool {
    a.iter().all(|w| *w == 0)
}

fn count(a: &[u64]) -> usize {
    a.iter().map(|w| w.count_ones() as usize).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CliqueTier {
    Exact,
    Approx,
    Greedy,
}

impl CliqueTier {
    pub fn as_str(self) -> &'static str {
        match self {
            CliqueTier::Exact => "exact",
            CliqueTier::Approx => "approx",
            CliqueTier::Greedy => "greedy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueConfig {
    pub tier: CliqueTier,
    pub k_restarts: usize,
    pub exact_cap: usize,
}

impl Default for CliqueConfig {
    fn default() -> Self {
        CliqueConfig {
            tier: CliqueTier::Exact,
            k_restarts: 10,
            exact_cap: 40,
        }
    }
}

/// Sorted clique indices. The exact tier errors above `exact_cap` nodes.
pub fn max_clique(g: &BitGraph, cfg: &CliqueConfig, seed: u64) -> Result<Vec<usize>> {
    let c = match cfg.tier {
        CliqueTier::Exact => {
            if g.len() > cfg.exact_cap {
                return Err(Error::ExactCliqueTooLarge {
                    nodes: g.len(),
                    cap: cfg.exact_cap,
                });
            }
            exact(g)
        }
        CliqueTier::Approx => approx(g),
        CliqueTier::Greedy => greedy(g, cfg.k_restarts, seed),
    };
    if !g.is_clique(&c) {
        return Err(Error::invariant("clique solver returned a non-clique"));
    }
    Ok(c)
}

/// Better of two sorted cliques: larger, then lexicographically smaller.
fn better(a: Vec<usize>, b: Vec<usize>) -> Vec<usize> {
    if b.len() > a.len() || (b.len() == a.len() && b < a) {
        b
    } else {
        a
    }
}

/// Maximum clique, lexicographically smallest among the maximum ones.
pub fn exact(g: &BitGraph) -> Vec<usize> {
    let n = g.len();
    if n == 0 {
        return Vec::new();
    }
    let mut all = BitGraph::empty_row(n);
    BitGraph::fill_row(&mut all, n);
    let omega = clique_number(g, &all);
    // Fix vertices in ascending order while a clique of the full size remains.
    let mut chosen = Vec::with_capacity(omega);
    let mut cand = all;
    while chosen.len() < omega {
        let need = omega - chosen.len() - 1;
        let v = ones(&cand)
            .find(|&v| {
                let mut rest = and(&cand, &g.rows[v]);
                for u in 0..=v {
                    BitGraph::clear_bit(&mut rest, u);
                }
                need == 0 || clique_number_at_least(g, &rest, need)
            })
            .expect("a clique of size omega exists");
        chosen.push(v);
        cand = and(&cand, &g.rows[v]);
        for u in 0..=v {
            BitGraph::clear_bit(&mut cand, u);
        }
    }
    chosen
}

/// Size of a maximum clique inside `p`.
fn clique_number(g: &BitGraph, p: &[u64]) -> usize {
    let mut best = 0;
    expand(g, 0, p.to_vec(), &mut best, usize::MAX);
    best
}

fn clique_number_at_least(g: &BitGraph, p: &[u64], k: usize) -> bool {
    let mut best = k - 1;
    expand(g, 0, p.to_vec(), &mut best, k);
    best >= k
}

// Greedy sequential colouring of `p`; returns vertices with their colour
// numbers, ascending by colour.
fn colour_sort(g: &BitGraph, p: &[u64]) -> Vec<(usize, usize)> {
    let mut uncoloured = p.to_vec();
    let mut out = Vec::with_capacity(count(p));
    let mut colour = 0;
    while !is_zero(&uncoloured) {
        colour += 1;
        let mut q = uncoloured.clone();
        while let Some(v) = first(&q) {
            BitGraph::clear_bit(&mut q, v);
            BitGraph::clear_bit(&mut uncoloured, v);
            for (w, nb) in q.iter_mut().zip(&g.rows[v]) {
                *w &= !nb;
            }
            out.push((v, colour));
        }
    }
    out
}

fn expand(g: &BitGraph, size: usize, mut p: Row, best: &mut usize, stop_at: usize) {
    let order = colour_sort(g, &p);
    for &(v, colour) in order.iter().rev() {
        if size + colour <= *best || *best >= stop_at {
            return;
        }
        let np = and(&p, &g.rows[v]);
        if is_zero(&np) {
            if size + 1 > *best {
                *best = size + 1;
            }
        } else {
            expand(g, size + 1, np, best, stop_at);
        }
        BitGraph::clear_bit(&mut p, v);
    }
}

/// Iterated Ramsey clique removal: repeatedly split off the independent set
/// found by the Ramsey recursion and keep the best clique seen.
pub fn approx(g: &BitGraph) -> Vec<usize> {
    let n = g.len();
    let mut rest = BitGraph::empty_row(n);
    BitGraph::fill_row(&mut rest, n);
    let mut best = Vec::new();
    while !is_zero(&rest) {
        let (mut c, indep) = ramsey(g, &rest);
        c.sort_unstable();
        best = better(best, c);
        for v in indep {
            BitGraph::clear_bit(&mut rest, v);
        }
    }
    best
}

// Ramsey R2 recursion, run with an explicit stack: pivot on the smallest
// vertex, recurse into its neighbours and its non-neighbours.
fn ramsey(g: &BitGraph, set: &[u64]) -> (Vec<usize>, Vec<usize>) {
    enum Task {
        Call(Row),
        Combine(usize),
    }
    let mut tasks = vec![Task::Call(set.to_vec())];
    let mut results: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    while let Some(t) = tasks.pop() {
        match t {
            Task::Call(s) => match first(&s) {
                None => results.push((Vec::new(), Vec::new())),
                Some(v) => {
                    let nbrs = and(&s, &g.rows[v]);
                    let mut non: Row = s.iter().zip(&g.rows[v]).map(|(a, b)| a & !b).collect();
                    BitGraph::clear_bit(&mut non, v);
                    tasks.push(Task::Combine(v));
                    tasks.push(Task::Call(non));
                    tasks.push(Task::Call(nbrs));
                }
            },
            Task::Combine(v) => {
                let (c2, mut i2) = results.pop().expect("non-neighbour result");
                let (mut c1, i1) = results.pop().expect("neighbour result");
                c1.push(v);
                i2.push(v);
                let c = if c2.len() > c1.len() { c2 } else { c1 };
                let i = if i2.len() > i1.len() { i2 } else { i1 };
                results.push((c, i));
            }
        }
    }
    results.pop().expect("root result")
}

/// Best of `k` greedy constructions, each from a random start and a random
/// scan order.
pub fn greedy(g: &BitGraph, k: usize, seed: u64) -> Vec<usize> {
    let n = g.len();
    if n == 0 {
        return Vec::new();
    }
    let mut rng = rng::forked(seed, &[rng::stream::CLIQUE]);
    let mut best = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..k.max(1) {
        let start = rng.gen_range(0..n);
        order.shuffle(&mut rng);
        let mut clique = vec![start];
        let mut cand = g.rows[start].clone();
        for &v in &order {
            if BitGraph::bit(&cand, v) {
                clique.push(v);
                cand = and(&cand, &g.rows[v]);
            }
        }
        clique.sort_unstable();
        best = better(best, clique);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(g: &BitGraph) -> Vec<usize> {
        let n = g.len();
        let mut best: Vec<usize> = Vec::new();
        for mask in 0u32..(1 << n) {
            let vs: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            if g.is_clique(&vs) {
                best = better(best, vs);
            }
        }
        best
    }

    fn all_tiers(g: &BitGraph) -> [Vec<usize>; 3] {
        let cfg = |tier| CliqueConfig {
            tier,
            ..CliqueConfig::default()
        };
        [
            max_clique(g, &cfg(CliqueTier::Exact), 0).unwrap(),
            max_clique(g, &cfg(CliqueTier::Approx), 0).unwrap(),
            max_clique(g, &cfg(CliqueTier::Greedy), 0).unwrap(),
        ]
    }

    #[test]
    fn complete_graph() {
        let g = BitGraph::from_edges(5, (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))));
        for c in all_tiers(&g) {
            assert_eq!(c, vec![0, 1, 2, 3, 4]);
        }
    }

    #[test]
    fn five_cycle() {
        let g = BitGraph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(exact(&g), vec![0, 1]);
        assert_eq!(brute(&g).len(), 2);
    }

    #[test]
    fn edgeless() {
        let g = BitGraph::new(3);
        for c in all_tiers(&g) {
            assert_eq!(c.len(), 1);
        }
        assert_eq!(exact(&g), vec![0]);
        assert!(max_clique(&BitGraph::new(0), &CliqueConfig::default(), 0)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn exact_cap() {
        let g = BitGraph::new(41);
        assert_eq!(
            max_clique(&g, &CliqueConfig::default(), 0),
            Err(Error::ExactCliqueTooLarge { nodes: 41, cap: 40 })
        );
    }

    #[test]
    fn wide_rows() {
        // Two cliques of 70 and 71 nodes spanning several words.
        let mut g = BitGraph::new(141);
        for i in 0..70 {
            for j in i + 1..70 {
                g.add_edge(i, j);
            }
        }
        for i in 70..141 {
            for j in i + 1..141 {
                g.add_edge(i, j);
            }
        }
        assert_eq!(approx(&g), (70..141).collect::<Vec<_>>());
        assert!(greedy(&g, 10, 1).len() >= 70);
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = BitGraph> {
        (1..=max_n, 0.0f64..1.0).prop_flat_map(|(n, p)| {
            proptest::collection::vec(proptest::bool::weighted(p), n * (n - 1) / 2).prop_map(
                move |bits| {
                    let mut g = BitGraph::new(n);
                    let mut k = 0;
                    for i in 0..n {
                        for j in i + 1..n {
                            if bits[k] {
                                g.add_edge(i, j);
                            }
                            k += 1;
                        }
                    }
                    g
                },
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn exact_matches_brute_force(g in arb_graph(12)) {
            prop_assert_eq!(exact(&g), brute(&g));
        }

        #[test]
        fn heuristics_are_valid_and_bounded(g in arb_graph(14), seed in any::<u64>()) {
            let e = exact(&g);
            for c in [approx(&g), greedy(&g, 10, seed)] {
                prop_assert!(g.is_clique(&c));
                prop_assert!(c.len() <= e.len());
                prop_assert!(!c.is_empty());
            }
        }
    }
}
