//! edNCE rules, one-step rewriting and derivation replay.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::graph::{is_dag, is_weakly_connected, Label, LabeledDigraph, NodeId};
use crate::vocab::LabelVocabulary;

pub type RuleId = usize;

/// Id of the single node of a derivation's start graph.
pub const START_NODE: &str = "s";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    In,
    Out,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::In => "in",
            Direction::Out => "out",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "in" => Some(Direction::In),
            "out" => Some(Direction::Out),
            _ => None,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Embedding instruction `(σ, β/γ, x, d/d′)`.
///
/// For every neighbour `y` of the rewritten node with label `sigma`, joined by
/// an edge labeled `beta` on side `d` (`In`: `y -> n`), create an edge labeled
/// `gamma` between `y` and the copy of daughter node `x`, on side `d_prime`
/// (`In`: `y -> x`, `Out`: `x -> y`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Instruction {
    pub sigma: Label,
    pub beta: Label,
    pub gamma: Label,
    pub x: NodeId,
    pub d: Direction,
    pub d_prime: Direction,
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}/{}, {}, {}/{})",
            self.sigma, self.beta, self.gamma, self.x, self.d, self.d_prime
        )
    }
}

/// Production `(X, D, I)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub id: RuleId,
    pub lhs: Label,
    pub daughter: LabeledDigraph,
    pub instructions: BTreeSet<Instruction>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    pub vocab: LabelVocabulary,
    pub rules: Vec<Rule>,
}

/// Ordered rule ids; replaying them from the start symbol yields one graph.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Derivation {
    pub rule_ids: Vec<RuleId>,
}

impl Derivation {
    pub fn new(rule_ids: Vec<RuleId>) -> Self {
        Derivation { rule_ids }
    }

    pub fn len(&self) -> usize {
        self.rule_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rule_ids.is_empty()
    }

    /// Sorted distinct rule ids.
    pub fn rule_set(&self) -> Vec<RuleId> {
        let s: BTreeSet<RuleId> = self.rule_ids.iter().copied().collect();
        s.into_iter().collect()
    }
}

impl From<Vec<RuleId>> for Derivation {
    fn from(rule_ids: Vec<RuleId>) -> Self {
        Derivation { rule_ids }
    }
}

impl Grammar {
    /// Checks dense ids, nonterminal left-hand sides, daughters that are
    /// connected DAGs with at most one nonterminal, and instruction labels.
    pub fn new(vocab: LabelVocabulary, rules: Vec<Rule>) -> Result<Self> {
        vocab.validate()?;
        for (i, r) in rules.iter().enumerate() {
            let bad = |msg: String| Error::InvalidGrammar(format!("rule {}: {msg}", r.id));
            if r.id != i {
                return Err(bad(format!("ids must be dense; expected id {i}")));
            }
            if !vocab.is_nonterminal(&r.lhs) {
                return Err(bad(format!("lhs `{}` is not a nonterminal", r.lhs)));
            }
            if !is_weakly_connected(&r.daughter) || !is_dag(&r.daughter) {
                return Err(bad("daughter is not a weakly connected DAG".into()));
            }
            if let Some((v, l)) = r.daughter.nodes().find(|(_, l)| !vocab.sigma.contains(*l)) {
                return Err(bad(format!("daughter node `{v}` has unknown label `{l}`")));
            }
            if let Some(e) = r
                .daughter
                .edges()
                .find(|e| !vocab.edge_labels.contains(&e.label))
            {
                return Err(bad(format!(
                    "daughter edge has unknown label `{}`",
                    e.label
                )));
            }
            let nts = r
                .daughter
                .nodes()
                .filter(|(_, l)| vocab.is_nonterminal(l))
                .count();
            if nts > 1 {
                return Err(bad(format!("daughter has {nts} nonterminal nodes")));
            }
            for ins in &r.instructions {
                if !r.daughter.contains_node(&ins.x) {
                    return Err(bad(format!(
                        "instruction {ins} targets an unknown daughter node"
                    )));
                }
                if !vocab.sigma.contains(&ins.sigma) {
                    return Err(bad(format!("instruction {ins} has unknown node label")));
                }
                if !vocab.edge_labels.contains(&ins.beta) || !vocab.edge_labels.contains(&ins.gamma)
                {
                    return Err(bad(format!("instruction {ins} has unknown edge label")));
                }
            }
        }
        Ok(Grammar { vocab, rules })
    }

    pub fn start(&self) -> &Label {
        &self.vocab.start
    }

    pub fn rule(&self, id: RuleId) -> Result<&Rule> {
        self.rules.get(id).ok_or(Error::UnknownRule(id))
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Rules rewriting `lhs`, in id order.
    pub fn rules_for<'a>(&'a self, lhs: &'a str) -> impl Iterator<Item = &'a Rule> + 'a {
        self.rules.iter().filter(move |r| r.lhs == lhs)
    }

    /// Copy keeping only rules not in `removed`, with ids made dense again.
    /// Returns the new grammar and the old-to-new id map.
    pub fn without_rules(&self, removed: &BTreeSet<RuleId>) -> (Grammar, BTreeMap<RuleId, RuleId>) {
        let mut map = BTreeMap::new();
        let mut rules = Vec::new();
        for r in self.rules.iter().filter(|r| !removed.contains(&r.id)) {
            map.insert(r.id, rules.len());
            rules.push(Rule {
                id: rules.len(),
                ..r.clone()
            });
        }
        (
            Grammar {
                vocab: self.vocab.clone(),
                rules,
            },
            map,
        )
    }

    pub fn start_graph(&self) -> LabeledDigraph {
        let mut g = LabeledDigraph::new();
        g.add_node(START_NODE, self.vocab.start.clone())
            .expect("fresh graph");
        g
    }
}

/// Nonterminal nodes of `h` in id order.
pub fn nonterminal_nodes<'a>(h: &'a LabeledDigraph, vocab: &LabelVocabulary) -> Vec<&'a NodeId> {
    h.nodes()
        .filter(|(_, l)| vocab.is_nonterminal(l))
        .map(|(v, _)| v)
        .collect()
}

/// The graph's only nonterminal node. Errors name `step`.
pub fn unique_nonterminal<'a>(
    h: &'a LabeledDigraph,
    vocab: &LabelVocabulary,
    step: usize,
) -> Result<Option<&'a NodeId>> {
    let nts = nonterminal_nodes(h, vocab);
    match nts.len() {
        0 => Ok(None),
        1 => Ok(Some(nts[0])),
        count => Err(Error::MultipleNonterminals { step, count }),
    }
}

/// Result of one rewriting step, exposing what it added.
#[derive(Debug, Clone)]
pub struct Application {
    pub graph: LabeledDigraph,
    /// Daughter node id to fresh host id.
    pub fresh: BTreeMap<NodeId, NodeId>,
}

/// Rewrites nonterminal `n` with `r`: removes `n`, inserts a copy of the
/// daughter and connects former neighbours according to the instructions.
/// Fresh ids are `"{rule}.{step}.{x}"` with the smallest `step` that avoids
/// a collision.
pub fn apply_rule(h: &LabeledDigraph, n: &str, r: &Rule) -> Result<LabeledDigraph> {
    let mut step = 0;
    loop {
        let clash = r
            .daughter
            .node_ids()
            .any(|x| h.contains_node(&fresh_id(r.id, step, x)));
        if !clash {
            return Ok(apply_rule_at(h, n, r, step)?.graph);
        }
        step += 1;
    }
}

fn fresh_id(rule: RuleId, step: usize, x: &str) -> NodeId {
    format!("{rule}.{step}.{x}")
}

/// [`apply_rule`] with an explicit step number for the fresh ids.
pub fn apply_rule_at(h: &LabeledDigraph, n: &str, r: &Rule, step: usize) -> Result<Application> {
    let label = h.label(n).ok_or_else(|| Error::UnknownNode(n.into()))?;
    if *label != r.lhs {
        return Err(Error::LabelMismatch {
            step,
            expected: r.lhs.clone(),
            found: label.clone(),
        });
    }
    // (neighbour, edge label, side relative to n)
    let mut neighbours: Vec<(NodeId, Label, Direction)> = Vec::new();
    neighbours.extend(
        h.in_edges(n)
            .map(|(y, l)| (y.clone(), l.clone(), Direction::In)),
    );
    neighbours.extend(
        h.out_edges(n)
            .map(|(y, l)| (y.clone(), l.clone(), Direction::Out)),
    );

    let mut g = h.clone();
    g.remove_node(n)?;
    let mut fresh = BTreeMap::new();
    for (x, l) in r.daughter.nodes() {
        let id = fresh_id(r.id, step, x);
        g.add_node(id.clone(), l.clone())?;
        fresh.insert(x.clone(), id);
    }
    for e in r.daughter.edges() {
        g.add_edge(fresh[&e.src].clone(), e.label, fresh[&e.dst].clone())?;
    }
    for (y, beta, side) in &neighbours {
        let sigma = h.label(y).expect("neighbour is a node");
        for ins in &r.instructions {
            if ins.sigma != *sigma || ins.beta != *beta || ins.d != *side {
                continue;
            }
            let x = fresh.get(&ins.x).ok_or_else(|| {
                Error::InvalidGrammar(format!("rule {}: unknown daughter node `{}`", r.id, ins.x))
            })?;
            match ins.d_prime {
                Direction::In => g.add_edge(y.clone(), ins.gamma.clone(), x.clone())?,
                Direction::Out => g.add_edge(x.clone(), ins.gamma.clone(), y.clone())?,
            };
        }
    }
    Ok(Application { graph: g, fresh })
}

/// Replays `deriv` from the start graph and returns the final graph.
pub fn derive(g: &Grammar, deriv: &Derivation) -> Result<LabeledDigraph> {
    let mut out = None;
    replay(g, deriv, |h| out = Some(h.clone()))?;
    Ok(out.expect("replay visits the final graph"))
}

/// Every intermediate of the replay, from the start graph to the final graph.
pub fn derive_trace(g: &Grammar, deriv: &Derivation) -> Result<Vec<LabeledDigraph>> {
    let mut out = Vec::with_capacity(deriv.len() + 1);
    replay(g, deriv, |h| out.push(h.clone()))?;
    Ok(out)
}

fn replay(g: &Grammar, deriv: &Derivation, mut visit: impl FnMut(&LabeledDigraph)) -> Result<()> {
    if deriv.is_empty() {
        return Err(Error::EmptyDerivation);
    }
    let mut h = g.start_graph();
    visit(&h);
    for (step, &id) in deriv.rule_ids.iter().enumerate() {
        let n = unique_nonterminal(&h, &g.vocab, step)?
            .ok_or(Error::NoNonterminal { step })?
            .clone();
        let r = g.rule(id)?;
        let label = h.label(&n).expect("nonterminal is a node");
        if *label != r.lhs {
            return Err(Error::LabelMismatch {
                step,
                expected: r.lhs.clone(),
                found: label.clone(),
            });
        }
        h = apply_rule_at(&h, &n, r, step)?.graph;
        let count = nonterminal_nodes(&h, &g.vocab).len();
        if count > 1 {
            return Err(Error::MultipleNonterminals {
                step: step + 1,
                count,
            });
        }
        visit(&h);
    }
    if !nonterminal_nodes(&h, &g.vocab).is_empty() {
        return Err(Error::RemainingNonterminal);
    }
    Ok(())
}

/// Rule-token counts over all parses, by count descending then id ascending.
pub fn token_frequency(parses: &[Derivation]) -> Vec<(RuleId, usize)> {
    let mut counts: BTreeMap<RuleId, usize> = BTreeMap::new();
    for p in parses {
        for &r in &p.rule_ids {
            *counts.entry(r).or_default() += 1;
        }
    }
    let mut table: Vec<(RuleId, usize)> = counts.into_iter().collect();
    table.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    table
}
