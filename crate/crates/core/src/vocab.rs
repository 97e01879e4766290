//! Label vocabularies and validated datasets.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{is_dag, is_weakly_connected, Label, LabeledDigraph};

/// Edge label used when the input does not carry edge labels.
pub const DEFAULT_EDGE_LABEL: &str = "black";
/// Start symbol of induced grammars.
pub const START_LABEL: &str = "black";
/// Nonterminal placed by contractions during induction.
pub const CONTRACTION_LABEL: &str = "gray";

/// `(Σ, N, T, S)`: node labels, nonterminals, edge labels and the start label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVocabulary {
    pub sigma: BTreeSet<Label>,
    pub nonterminals: BTreeSet<Label>,
    pub edge_labels: BTreeSet<Label>,
    pub start: Label,
}

impl LabelVocabulary {
    pub fn new(
        sigma: impl IntoIterator<Item = impl Into<Label>>,
        nonterminals: impl IntoIterator<Item = impl Into<Label>>,
        edge_labels: impl IntoIterator<Item = impl Into<Label>>,
        start: impl Into<Label>,
    ) -> Result<Self> {
        let mut edge_labels: BTreeSet<Label> = edge_labels.into_iter().map(Into::into).collect();
        if edge_labels.is_empty() {
            edge_labels.insert(DEFAULT_EDGE_LABEL.into());
        }
        let v = LabelVocabulary {
            sigma: sigma.into_iter().map(Into::into).collect(),
            nonterminals: nonterminals.into_iter().map(Into::into).collect(),
            edge_labels,
            start: start.into(),
        };
        v.validate()?;
        Ok(v)
    }

    /// Vocabulary for a dataset over `terminals`, reserving the induction's
    /// nonterminals `black` (start) and `gray`, and the single edge label.
    pub fn for_terminals(terminals: impl IntoIterator<Item = impl Into<Label>>) -> Self {
        let mut sigma: BTreeSet<Label> = terminals.into_iter().map(Into::into).collect();
        sigma.insert(START_LABEL.into());
        sigma.insert(CONTRACTION_LABEL.into());
        LabelVocabulary {
            sigma,
            nonterminals: [START_LABEL.to_string(), CONTRACTION_LABEL.to_string()].into(),
            edge_labels: [DEFAULT_EDGE_LABEL.to_string()].into(),
            start: START_LABEL.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.nonterminals.contains(&self.start) {
            return Err(Error::InvalidVocabulary(format!(
                "start label `{}` is not a nonterminal",
                self.start
            )));
        }
        if let Some(n) = self.nonterminals.iter().find(|n| !self.sigma.contains(*n)) {
            return Err(Error::InvalidVocabulary(format!(
                "nonterminal `{n}` is not in sigma"
            )));
        }
        if self.edge_labels.is_empty() {
            return Err(Error::InvalidVocabulary("no edge labels".into()));
        }
        Ok(())
    }

    pub fn is_nonterminal(&self, label: &str) -> bool {
        self.nonterminals.contains(label)
    }

    pub fn terminals(&self) -> impl Iterator<Item = &Label> + '_ {
        self.sigma
            .iter()
            .filter(|l| !self.nonterminals.contains(*l))
    }
}

/// An ordered list of connected DAGs over a common vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DagDataset {
    graphs: Vec<LabeledDigraph>,
    vocab: LabelVocabulary,
}

impl DagDataset {
    /// Validates every graph: DAG, weakly connected, terminal node labels from
    /// the vocabulary and known edge labels. Errors name the graph index.
    pub fn new(graphs: Vec<LabeledDigraph>, vocab: LabelVocabulary) -> Result<Self> {
        vocab.validate()?;
        for (i, g) in graphs.iter().enumerate() {
            check_graph(i, g, &vocab)?;
        }
        Ok(DagDataset { graphs, vocab })
    }

    pub fn graphs(&self) -> &[LabeledDigraph] {
        &self.graphs
    }

    pub fn vocab(&self) -> &LabelVocabulary {
        &self.vocab
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn into_parts(self) -> (Vec<LabeledDigraph>, LabelVocabulary) {
        (self.graphs, self.vocab)
    }
}

fn check_graph(i: usize, g: &LabeledDigraph, vocab: &LabelVocabulary) -> Result<()> {
    let bad = |reason: String| Error::InvalidGraph {
        graph_index: i,
        reason,
    };
    if g.is_empty() {
        return Err(bad("graph has no nodes".into()));
    }
    for (id, l) in g.nodes() {
        if !vocab.sigma.contains(l) {
            return Err(bad(format!("node `{id}` has unknown label `{l}`")));
        }
        if vocab.is_nonterminal(l) {
            return Err(bad(format!("node `{id}` carries nonterminal label `{l}`")));
        }
    }
    if let Some(e) = g.edges().find(|e| !vocab.edge_labels.contains(&e.label)) {
        return Err(bad(format!(
            "edge {} -> {} has unknown label `{}`",
            e.src, e.dst, e.label
        )));
    }
    if !is_dag(g) {
        return Err(bad("graph is cyclic".into()));
    }
    if !is_weakly_connected(g) {
        return Err(bad("graph is not weakly connected".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::graph_from;
    use alloc::vec;

    #[test]
    fn errors_name_the_graph() {
        let vocab = LabelVocabulary::for_terminals(["X", "Y"]);
        let ok = graph_from(&[("a", "X"), ("b", "Y")], &[("a", "b")]).unwrap();
        let cyclic = graph_from(&[("a", "X"), ("b", "Y")], &[("a", "b"), ("b", "a")]).unwrap();
        let split = graph_from(&[("a", "X"), ("b", "Y")], &[]).unwrap();
        let unknown = graph_from(&[("a", "Q")], &[]).unwrap();
        let nt = graph_from(&[("a", "gray")], &[]).unwrap();

        for (g, needle) in [
            (cyclic, "cyclic"),
            (split, "not weakly connected"),
            (unknown, "unknown label"),
            (nt, "nonterminal"),
        ] {
            let err = DagDataset::new(vec![ok.clone(), g], vocab.clone()).unwrap_err();
            match err {
                Error::InvalidGraph {
                    graph_index,
                    reason,
                } => {
                    assert_eq!(graph_index, 1);
                    assert!(reason.contains(needle), "{reason}");
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn vocabulary_validation() {
        assert!(LabelVocabulary::new(["a", "S"], ["S"], [] as [&str; 0], "S").is_ok());
        assert!(LabelVocabulary::new(["a"], ["S"], ["black"], "S").is_err());
        assert!(LabelVocabulary::new(["a", "S"], ["S"], ["black"], "a").is_err());
        let v = LabelVocabulary::new(["a", "S"], ["S"], [] as [&str; 0], "S").unwrap();
        assert_eq!(v.edge_labels.iter().next().unwrap(), DEFAULT_EDGE_LABEL);
    }
}
