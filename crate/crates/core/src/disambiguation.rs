//! Derivation enumeration and rule elimination.
//!
//! [`enumerate_derivations`] searches forward from the start graph, rewriting
//! the single nonterminal with every applicable rule. An intermediate is
//! dropped when it is disconnected or cyclic, larger than the target, has
//! more nodes of some terminal label than the target, or when its terminal
//! part has no node-induced embedding into the target. Terminal nodes and the
//! edges between them are never touched again, and a terminal node that is
//! not adjacent to the nonterminal never gains an edge, so the embedding must
//! also keep the exact degrees of those nodes.
//! Results are memoized per intermediate up to isomorphism.
//!
//! [`disambiguate`] then removes rules so that each target graph keeps
//! exactly one derivation and every other graph of the dataset has none.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::rc::Rc;
use alloc::vec;
use alloc::vec::Vec;
use core::time::Duration;

use crate::canon::{canonical_key, CanonicalKey};
use crate::error::{Error, ErrorKind, Result};
use crate::grammar::{apply_rule_at, unique_nonterminal, Derivation, Grammar, Rule, RuleId};
use crate::graph::{induced_subgraph, is_dag, is_weakly_connected, Label, LabeledDigraph, NodeId};
use crate::hitting::{
    hitting_set, minimal_rule_set_selection, EliminationInstance, Family, HittingTier, RuleSet,
};
use crate::matching::{has_closed_embedding, is_isomorphic};
use crate::par;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumConfig {
    /// Intermediates expanded per graph.
    pub max_states: usize,
    pub max_derivations: usize,
    /// Wall-clock limit per graph. Only enforced with the `std` feature.
    pub timeout: Option<Duration>,
    /// Disabling the memo changes running time only.
    pub memoize: bool,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            max_states: 1_000_000,
            max_derivations: 10_000,
            timeout: None,
            memoize: true,
        }
    }
}

type Suffixes = Rc<Vec<Vec<RuleId>>>;

struct Search<'a> {
    g: &'a Grammar,
    target: &'a LabeledDigraph,
    cfg: &'a EnumConfig,
    /// Target label -> position in count vectors.
    label_index: BTreeMap<&'a Label, usize>,
    target_counts: Vec<usize>,
    /// Nonterminal -> terminal-count vectors its expansions can produce
    /// without exceeding the target.
    yields: BTreeMap<Label, BTreeSet<Vec<usize>>>,
    /// Per rule id: terminal counts and nonterminal of the daughter, `None`
    /// when the daughter has a label the target lacks.
    rule_counts: Vec<Option<(Vec<usize>, Option<Label>)>>,
    /// `None` marks an intermediate still being expanded.
    memo: BTreeMap<CanonicalKey, Vec<(LabeledDigraph, Option<Suffixes>)>>,
    states: usize,
    #[cfg(feature = "std")]
    deadline: Option<std::time::Instant>,
}

impl<'a> Search<'a> {
    fn new(g: &'a Grammar, target: &'a LabeledDigraph, cfg: &'a EnumConfig) -> Self {
        let mut terminal_counts: BTreeMap<&Label, usize> = BTreeMap::new();
        for (_, l) in target.nodes() {
            *terminal_counts.entry(l).or_default() += 1;
        }
        let label_index: BTreeMap<&Label, usize> = terminal_counts
            .keys()
            .enumerate()
            .map(|(i, &l)| (l, i))
            .collect();
        let target_counts: Vec<usize> = terminal_counts.values().copied().collect();
        let rule_counts: Vec<_> = g
            .rules
            .iter()
            .map(|r| daughter_counts(r, &g.vocab, &label_index, target_counts.len()))
            .collect();
        let yields = yields(g, &rule_counts, &target_counts);
        Search {
            g,
            target,
            cfg,
            label_index,
            target_counts,
            yields,
            rule_counts,
            memo: BTreeMap::new(),
            states: 0,
            #[cfg(feature = "std")]
            deadline: cfg.timeout.map(|t| std::time::Instant::now() + t),
        }
    }

    fn check_budget(&mut self) -> Result<()> {
        self.states += 1;
        if self.states > self.cfg.max_states {
            return Err(Error::EnumerationBudget(format!(
                "more than {} intermediates",
                self.cfg.max_states
            )));
        }
        #[cfg(feature = "std")]
        if self.deadline.is_some_and(|d| std::time::Instant::now() > d) {
            return Err(Error::EnumerationBudget("timeout".into()));
        }
        Ok(())
    }

    /// Target counts minus the terminal counts of `h`, if none is exceeded.
    fn need(&self, h: &LabeledDigraph) -> Option<Vec<usize>> {
        let mut need = self.target_counts.clone();
        for (_, l) in h.nodes() {
            if !self.g.vocab.is_nonterminal(l) {
                let c = &mut need[*self.label_index.get(l)?];
                *c = c.checked_sub(1)?;
            }
        }
        Some(need)
    }

    /// Whether applying `r` to an intermediate lacking `need` can still
    /// reach the target's label counts.
    fn counts_reachable(&self, r: &Rule, need: &[usize]) -> bool {
        let Some((c, nt)) = &self.rule_counts[r.id] else {
            return false;
        };
        let mut rest = Vec::with_capacity(need.len());
        for (a, b) in need.iter().zip(c) {
            match a.checked_sub(*b) {
                Some(v) => rest.push(v),
                None => return false,
            }
        }
        match nt {
            None => rest.iter().all(|&v| v == 0),
            Some(y) => self.yields.get(y).is_some_and(|ys| ys.contains(&rest)),
        }
    }

    fn viable(&self, h: &LabeledDigraph) -> bool {
        if h.node_count() > self.target.node_count() {
            return false;
        }
        let mut need = self.target_counts.clone();
        let mut nt = None;
        let mut terminals: Vec<&NodeId> = Vec::new();
        for (v, l) in h.nodes() {
            if self.g.vocab.is_nonterminal(l) {
                nt = Some((v, l));
                continue;
            }
            match self.label_index.get(l).map(|&i| &mut need[i]) {
                Some(c) if *c > 0 => *c -= 1,
                _ => return false,
            }
            terminals.push(v);
        }
        let reachable = match nt {
            None => need.iter().all(|&c| c == 0),
            Some((_, l)) => self.yields.get(l).is_some_and(|ys| ys.contains(&need)),
        };
        if !reachable || !is_weakly_connected(h) || !is_dag(h) {
            return false;
        }
        // Nodes away from the nonterminal already have their final edges.
        let open = nt.map(|(n, _)| h.neighbors(n)).unwrap_or_default();
        let part = induced_subgraph(h, terminals).expect("nodes of h");
        has_closed_embedding(&part, self.target, |v| {
            !open.iter().any(|o| o.as_str() == v)
        })
    }

    fn lookup(&self, key: &CanonicalKey, h: &LabeledDigraph) -> Option<Option<Suffixes>> {
        self.memo
            .get(key)?
            .iter()
            .find(|(k, _)| is_isomorphic(k, h))
            .map(|(_, v)| v.clone())
    }

    fn visit(&mut self, h: &LabeledDigraph, depth: usize) -> Result<Suffixes> {
        self.check_budget()?;
        let nt = match unique_nonterminal(h, &self.g.vocab, depth) {
            Ok(nt) => nt.cloned(),
            Err(e) => {
                return Err(Error::invariant(format!(
                    "intermediate with several nonterminals: {e}"
                )))
            }
        };
        let Some(n) = nt else {
            let done = h.node_count() == self.target.node_count() && is_isomorphic(h, self.target);
            return Ok(Rc::new(if done { vec![Vec::new()] } else { Vec::new() }));
        };
        let key = canonical_key(h)?;
        match self.lookup(&key, h) {
            Some(Some(v)) => return Ok(v),
            // Rewriting cycles through single-node rules are cut here.
            Some(None) => return Ok(Rc::new(Vec::new())),
            None => {}
        }
        self.memo
            .entry(key.clone())
            .or_default()
            .push((h.clone(), None));

        let label = h.label(&n).expect("nonterminal is a node").clone();
        let need = self.need(h).unwrap_or_default();
        let mut out: Vec<Vec<RuleId>> = Vec::new();
        for r in self.g.rules_for(&label) {
            if !self.counts_reachable(r, &need) {
                continue;
            }
            let next = apply_rule_at(h, &n, r, depth)?.graph;
            if !self.viable(&next) {
                continue;
            }
            let rest = self.visit(&next, depth + 1)?;
            for s in rest.iter() {
                let mut d = Vec::with_capacity(s.len() + 1);
                d.push(r.id);
                d.extend_from_slice(s);
                out.push(d);
            }
            if out.len() > self.cfg.max_derivations {
                return Err(Error::EnumerationBudget(format!(
                    "more than {} derivations",
                    self.cfg.max_derivations
                )));
            }
        }
        out.sort();
        out.dedup();
        let out = Rc::new(out);

        let bucket = self.memo.get_mut(&key).expect("entry inserted above");
        let pos = bucket
            .iter()
            .position(|(k, v)| v.is_none() && is_isomorphic(k, h))
            .expect("in progress");
        if self.cfg.memoize {
            bucket[pos].1 = Some(out.clone());
        } else {
            bucket.swap_remove(pos);
        }
        Ok(out)
    }
}

fn daughter_counts(
    r: &Rule,
    vocab: &crate::vocab::LabelVocabulary,
    index: &BTreeMap<&Label, usize>,
    dim: usize,
) -> Option<(Vec<usize>, Option<Label>)> {
    let mut c = vec![0; dim];
    let mut nt = None;
    for (_, l) in r.daughter.nodes() {
        if vocab.is_nonterminal(l) {
            nt = Some(l.clone());
        } else {
            c[*index.get(l)?] += 1;
        }
    }
    Some((c, nt))
}

/// Least fixpoint of `yields(X) = {counts(D) + y : (X, D) a rule, y in
/// yields(nonterminal of D)}`, restricted to vectors bounded by `bound`.
fn yields(
    g: &Grammar,
    counts: &[Option<(Vec<usize>, Option<Label>)>],
    bound: &[usize],
) -> BTreeMap<Label, BTreeSet<Vec<usize>>> {
    let rules: Vec<(&Label, &Vec<usize>, &Option<Label>)> = g
        .rules
        .iter()
        .zip(counts)
        .filter_map(|(r, c)| c.as_ref().map(|(c, nt)| (&r.lhs, c, nt)))
        .filter(|(_, c, _)| c.iter().zip(bound).all(|(a, b)| a <= b))
        .collect();
    let mut out: BTreeMap<Label, BTreeSet<Vec<usize>>> = BTreeMap::new();
    loop {
        let mut changed = false;
        for (lhs, c, nt) in &rules {
            let new: Vec<Vec<usize>> = match nt {
                None => vec![(*c).clone()],
                Some(y) => out
                    .get(y)
                    .into_iter()
                    .flatten()
                    .map(|v| {
                        v.iter()
                            .zip(c.iter())
                            .map(|(a, b)| a + b)
                            .collect::<Vec<usize>>()
                    })
                    .filter(|v| v.iter().zip(bound).all(|(a, b)| a <= b))
                    .collect(),
            };
            let set = out.entry((*lhs).clone()).or_default();
            for v in new {
                changed |= set.insert(v);
            }
        }
        if !changed {
            return out;
        }
    }
}

/// Every derivation of `h` under `g` whose intermediates are connected DAGs,
/// sorted and without duplicates. Empty when `h` is not in the language.
pub fn enumerate_derivations(
    g: &Grammar,
    h: &LabeledDigraph,
    cfg: &EnumConfig,
) -> Result<Vec<Derivation>> {
    if g.is_empty() || h.is_empty() {
        return Ok(Vec::new());
    }
    let mut search = Search::new(g, h, cfg);
    let found = search.visit(&g.start_graph(), 0)?;
    Ok(found.iter().cloned().map(Derivation::new).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationSet {
    pub graph_index: usize,
    pub derivations: Vec<Derivation>,
    /// Sorted distinct rule ids to the derivations using exactly those rules.
    pub by_rule_set: BTreeMap<Vec<RuleId>, Vec<Derivation>>,
}

impl DerivationSet {
    pub fn new(graph_index: usize, derivations: Vec<Derivation>) -> Self {
        let mut by_rule_set: BTreeMap<Vec<RuleId>, Vec<Derivation>> = BTreeMap::new();
        for d in &derivations {
            by_rule_set.entry(d.rule_set()).or_default().push(d.clone());
        }
        DerivationSet {
            graph_index,
            derivations,
            by_rule_set,
        }
    }

    /// Derivations alone in their rule-set group, sorted.
    pub fn keepable(&self) -> Vec<&Derivation> {
        let mut k: Vec<&Derivation> = self
            .by_rule_set
            .values()
            .filter(|g| g.len() == 1)
            .map(|g| &g[0])
            .collect();
        k.sort();
        k
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisambiguationConfig {
    pub enumeration: EnumConfig,
    pub hitting: HittingTier,
}

impl Default for DisambiguationConfig {
    fn default() -> Self {
        DisambiguationConfig {
            enumeration: EnumConfig::default(),
            hitting: HittingTier::Exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisambiguationResult {
    pub grammar: Grammar,
    /// Removed rules, as ids of the input grammar.
    pub removed: RuleSet,
    /// Input rule id to output rule id for the surviving rules.
    pub id_map: BTreeMap<RuleId, RuleId>,
    /// Unique derivation of every retained target, in output ids.
    pub parses: BTreeMap<usize, Derivation>,
    /// Targets left without a unique derivation, ascending.
    pub lost: Vec<usize>,
}

fn rule_set(d: &Derivation) -> RuleSet {
    d.rule_ids.iter().copied().collect()
}

fn alive<'d>(ds: &'d [Derivation], removed: &RuleSet) -> Vec<&'d Derivation> {
    ds.iter()
        .filter(|d| d.rule_ids.iter().all(|r| !removed.contains(r)))
        .collect()
}

/// Removes rules from `g` so that every graph with an entry in `parses` (the
/// targets) is derived exactly once or is lost, and every other graph of
/// `graphs` as well as every lost target has no derivation left.
///
/// Targets are enumerated smallest first. Each keepable derivation `k` of a
/// target gives the elimination sets `set(o) \ set(k)` over the other
/// derivations `o`; their hitting set is one option of the target's family,
/// and [`minimal_rule_set_selection`] picks the removed rules. A target whose
/// enumeration exceeds the budget is lost.
pub fn disambiguate(
    g: &Grammar,
    graphs: &[LabeledDigraph],
    parses: &BTreeMap<usize, Derivation>,
    cfg: &DisambiguationConfig,
) -> Result<DisambiguationResult> {
    if let Some(&i) = parses.keys().find(|&&i| i >= graphs.len()) {
        return Err(Error::invariant(format!("parse for unknown graph {i}")));
    }
    let mut order: Vec<usize> = (0..graphs.len()).collect();
    order.sort_by_key(|&i| (!parses.contains_key(&i), graphs[i].node_count(), i));
    let enumerated = par::map(&order, |&i| {
        (i, enumerate_derivations(g, &graphs[i], &cfg.enumeration))
    });

    let mut sets: BTreeMap<usize, DerivationSet> = BTreeMap::new();
    let mut lost: BTreeSet<usize> = BTreeSet::new();
    for (i, res) in enumerated {
        match res {
            Ok(ds) => {
                if let Some(p) = parses.get(&i) {
                    if ds.binary_search(p).is_err() {
                        return Err(Error::invariant(format!(
                            "graph {i}: its parse is not among its derivations"
                        )));
                    }
                }
                sets.insert(i, DerivationSet::new(i, ds));
            }
            Err(e) if e.kind() == ErrorKind::Budget && parses.contains_key(&i) => {
                lost.insert(i);
            }
            Err(e) => return Err(e),
        }
    }

    let mut families = Vec::new();
    for &i in order
        .iter()
        .filter(|i| parses.contains_key(i) && sets.contains_key(i))
    {
        let ds = &sets[&i];
        let mut options = Vec::new();
        for k in ds.keepable() {
            let ks = rule_set(k);
            let elim: Vec<RuleSet> = ds
                .derivations
                .iter()
                .filter(|o| *o != k)
                .map(|o| rule_set(o).difference(&ks).copied().collect())
                .collect();
            if elim.iter().any(BTreeSet::is_empty) {
                continue;
            }
            let h = hitting_set(&elim, cfg.hitting)?;
            if !options.contains(&h) {
                options.push(h);
            }
        }
        if options.is_empty() {
            lost.insert(i);
        } else {
            families.push(Family {
                graph_index: i,
                options,
            });
        }
    }
    let mut removed = minimal_rule_set_selection(&EliminationInstance::new(families))?;

    // Remove further rules until only the retained targets are derivable.
    let retained = loop {
        let retained: BTreeMap<usize, &Derivation> = sets
            .iter()
            .filter(|(i, _)| parses.contains_key(i))
            .filter_map(|(&i, ds)| match alive(&ds.derivations, &removed)[..] {
                [d] => Some((i, d)),
                _ => None,
            })
            .collect();
        let protected: RuleSet = retained
            .values()
            .flat_map(|d| d.rule_ids.iter().copied())
            .collect();
        let offender = sets
            .iter()
            .filter(|(i, _)| !retained.contains_key(i))
            .map(|(_, ds)| alive(&ds.derivations, &removed))
            .find(|a| !a.is_empty());
        let Some(offending) = offender else {
            break retained;
        };
        let free: Vec<RuleSet> = offending
            .iter()
            .map(|d| rule_set(d).difference(&protected).copied().collect())
            .collect();
        if free.iter().all(|s| !s.is_empty()) {
            removed.extend(hitting_set(&free, cfg.hitting)?);
        } else {
            // Every removal now costs a retained graph; take the cheapest rule.
            let d = offending[free
                .iter()
                .position(BTreeSet::is_empty)
                .expect("some set is empty")];
            let cost = |r: &RuleId| retained.values().filter(|k| k.rule_ids.contains(r)).count();
            let r = rule_set(d)
                .into_iter()
                .min_by_key(|r| (cost(r), *r))
                .expect("derivations are nonempty");
            removed.insert(r);
        }
    };

    let (grammar, id_map) = g.without_rules(&removed);
    let parses_out: BTreeMap<usize, Derivation> = retained
        .iter()
        .map(|(&i, d)| {
            (
                i,
                Derivation::new(d.rule_ids.iter().map(|r| id_map[r]).collect()),
            )
        })
        .collect();
    lost.extend(parses.keys().filter(|i| !parses_out.contains_key(i)));

    let check: Vec<(&usize, &Derivation)> = parses_out.iter().collect();
    for (i, res) in par::map(&check, |(&i, p)| {
        (
            i,
            enumerate_derivations(&grammar, &graphs[i], &cfg.enumeration)
                .map(|ds| ds == [(*p).clone()]),
        )
    }) {
        if !res? {
            return Err(Error::invariant(format!(
                "graph {i}: not uniquely derivable after elimination"
            )));
        }
    }
    Ok(DisambiguationResult {
        grammar,
        removed,
        id_map,
        parses: parses_out,
        lost: lost.into_iter().collect(),
    })
}
