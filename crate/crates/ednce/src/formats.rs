//! Serde views of datasets, grammars and parses.
//!
//! Dataset: `{"labels": {...}, "graphs": [{"nodes": [{"id", "label"}],
//! "edges": [{"src", "dst", "label"?}]}]}`. `labels` may be omitted, in which
//! case every node label is a terminal and the induction's nonterminals are
//! added. A missing edge label means `black`.
//!
//! Grammar: `{"labels": {...}, "rules": [{"id", "lhs", "daughter",
//! "instructions": [{"sigma", "beta", "gamma", "x", "d", "d_prime"}]}]}`.
//!
//! Parses: one `{"graph_index", "rule_ids"}` object per line.

use std::collections::BTreeSet;

use ednce_core::grammar::{Direction, Instruction, Rule};
use ednce_core::{
    DagDataset, Derivation, Grammar, LabelVocabulary, LabeledDigraph, DEFAULT_EDGE_LABEL,
};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelsDto {
    pub sigma: Vec<String>,
    pub nonterminals: Vec<String>,
    #[serde(default)]
    pub edge_labels: Vec<String>,
    pub start: String,
}

impl From<&LabelVocabulary> for LabelsDto {
    fn from(v: &LabelVocabulary) -> Self {
        LabelsDto {
            sigma: v.sigma.iter().cloned().collect(),
            nonterminals: v.nonterminals.iter().cloned().collect(),
            edge_labels: v.edge_labels.iter().cloned().collect(),
            start: v.start.clone(),
        }
    }
}

impl LabelsDto {
    pub fn to_vocab(&self) -> Result<LabelVocabulary> {
        Ok(LabelVocabulary::new(
            self.sigma.iter().cloned(),
            self.nonterminals.iter().cloned(),
            self.edge_labels.iter().cloned(),
            self.start.clone(),
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeDto {
    pub id: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDto {
    pub src: String,
    pub dst: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDto {
    pub nodes: Vec<NodeDto>,
    #[serde(default)]
    pub edges: Vec<EdgeDto>,
}

impl From<&LabeledDigraph> for GraphDto {
    fn from(g: &LabeledDigraph) -> Self {
        GraphDto {
            nodes: g
                .nodes()
                .map(|(id, label)| NodeDto {
                    id: id.clone(),
                    label: label.clone(),
                })
                .collect(),
            edges: g
                .edges()
                .map(|e| EdgeDto {
                    src: e.src,
                    dst: e.dst,
                    label: (e.label != DEFAULT_EDGE_LABEL).then_some(e.label),
                })
                .collect(),
        }
    }
}

impl GraphDto {
    /// `what` names the graph in error messages.
    pub fn to_graph(&self, what: &str) -> Result<LabeledDigraph> {
        let mut g = LabeledDigraph::new();
        let bad = |e: ednce_core::Error| Error::Format(format!("{what}: {e}"));
        for n in &self.nodes {
            g.add_node(n.id.clone(), n.label.clone()).map_err(bad)?;
        }
        for e in &self.edges {
            let label = e.label.clone().unwrap_or_else(|| DEFAULT_EDGE_LABEL.into());
            if !g
                .add_edge(e.src.clone(), label, e.dst.clone())
                .map_err(bad)?
            {
                return Err(Error::Format(format!(
                    "{what}: duplicate edge {} -> {}",
                    e.src, e.dst
                )));
            }
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<LabelsDto>,
    pub graphs: Vec<GraphDto>,
}

impl From<&DagDataset> for DatasetDto {
    fn from(d: &DagDataset) -> Self {
        DatasetDto {
            labels: Some(d.vocab().into()),
            graphs: d.graphs().iter().map(GraphDto::from).collect(),
        }
    }
}

impl DatasetDto {
    pub fn to_dataset(&self) -> Result<DagDataset> {
        let graphs = self
            .graphs
            .iter()
            .enumerate()
            .map(|(i, g)| g.to_graph(&format!("graph {i}")))
            .collect::<Result<Vec<_>>>()?;
        let vocab = match &self.labels {
            Some(l) => l.to_vocab()?,
            None => {
                let terminals: BTreeSet<&String> = self
                    .graphs
                    .iter()
                    .flat_map(|g| g.nodes.iter().map(|n| &n.label))
                    .collect();
                let mut v = LabelVocabulary::for_terminals(terminals.into_iter().cloned());
                for g in &self.graphs {
                    v.edge_labels
                        .extend(g.edges.iter().filter_map(|e| e.label.clone()));
                }
                v
            }
        };
        Ok(DagDataset::new(graphs, vocab)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionDto {
    pub sigma: String,
    pub beta: String,
    pub gamma: String,
    pub x: String,
    pub d: String,
    pub d_prime: String,
}

impl From<&Instruction> for InstructionDto {
    fn from(i: &Instruction) -> Self {
        InstructionDto {
            sigma: i.sigma.clone(),
            beta: i.beta.clone(),
            gamma: i.gamma.clone(),
            x: i.x.clone(),
            d: i.d.as_str().into(),
            d_prime: i.d_prime.as_str().into(),
        }
    }
}

impl InstructionDto {
    fn to_instruction(&self, rule: usize) -> Result<Instruction> {
        let dir = |s: &str| {
            Direction::parse(s).ok_or_else(|| {
                Error::Format(format!("rule {rule}: direction `{s}` is not `in` or `out`"))
            })
        };
        Ok(Instruction {
            sigma: self.sigma.clone(),
            beta: self.beta.clone(),
            gamma: self.gamma.clone(),
            x: self.x.clone(),
            d: dir(&self.d)?,
            d_prime: dir(&self.d_prime)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleDto {
    pub id: usize,
    pub lhs: String,
    pub daughter: GraphDto,
    #[serde(default)]
    pub instructions: Vec<InstructionDto>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrammarDto {
    pub labels: LabelsDto,
    pub rules: Vec<RuleDto>,
}

impl From<&Grammar> for GrammarDto {
    fn from(g: &Grammar) -> Self {
        GrammarDto {
            labels: (&g.vocab).into(),
            rules: g
                .rules
                .iter()
                .map(|r| RuleDto {
                    id: r.id,
                    lhs: r.lhs.clone(),
                    daughter: (&r.daughter).into(),
                    instructions: r.instructions.iter().map(InstructionDto::from).collect(),
                })
                .collect(),
        }
    }
}

impl GrammarDto {
    pub fn to_grammar(&self) -> Result<Grammar> {
        let vocab = self.labels.to_vocab()?;
        let rules = self
            .rules
            .iter()
            .map(|r| {
                Ok(Rule {
                    id: r.id,
                    lhs: r.lhs.clone(),
                    daughter: r.daughter.to_graph(&format!("rule {}", r.id))?,
                    instructions: r
                        .instructions
                        .iter()
                        .map(|i| i.to_instruction(r.id))
                        .collect::<Result<_>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Grammar::new(vocab, rules)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseLine {
    pub graph_index: usize,
    pub rule_ids: Vec<usize>,
}

impl ParseLine {
    pub fn new(graph_index: usize, d: &Derivation) -> Self {
        ParseLine {
            graph_index,
            rule_ids: d.rule_ids.clone(),
        }
    }

    pub fn derivation(&self) -> Derivation {
        Derivation::new(self.rule_ids.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ednce_core::graph::graph_from;

    #[test]
    fn graph_round_trip_keeps_edge_labels() {
        let mut g = graph_from(&[("a", "A"), ("b", "B"), ("c", "C")], &[("a", "b")]).unwrap();
        g.add_edge("b", "red", "c").unwrap();
        let dto = GraphDto::from(&g);
        assert_eq!(dto.edges[0].label, None);
        assert_eq!(dto.edges[1].label.as_deref(), Some("red"));
        assert_eq!(dto.to_graph("g").unwrap(), g);
    }

    #[test]
    fn labels_are_inferred_when_missing() {
        let json = r#"{"graphs": [{"nodes": [{"id": "0", "label": "A"}, {"id": "1", "label": "B"}],
                                     "edges": [{"src": "0", "dst": "1"}]}]}"#;
        let d: DatasetDto = serde_json::from_str(json).unwrap();
        let d = d.to_dataset().unwrap();
        assert_eq!(
            d.vocab().terminals().cloned().collect::<Vec<_>>(),
            vec!["A".to_string(), "B".to_string()]
        );
        assert_eq!(d.vocab().start, "black");
    }

    #[test]
    fn bad_graphs_name_their_index() {
        let json = r#"{"graphs": [{"nodes": [{"id": "0", "label": "A"}]},
                                  {"nodes": [{"id": "0", "label": "A"}, {"id": "1", "label": "A"}]}]}"#;
        let d: DatasetDto = serde_json::from_str(json).unwrap();
        let msg = d.to_dataset().unwrap_err().to_string();
        assert!(msg.contains("graph 1"), "{msg}");
        let json = r#"{"graphs": [{"nodes": [{"id": "0", "label": "A"}], "edges": [{"src": "0", "dst": "9"}]}]}"#;
        let d: DatasetDto = serde_json::from_str(json).unwrap();
        let msg = d.to_dataset().unwrap_err().to_string();
        assert!(msg.contains("graph 0"), "{msg}");
    }

    #[test]
    fn directions_are_checked() {
        let i = InstructionDto {
            sigma: "A".into(),
            beta: "black".into(),
            gamma: "black".into(),
            x: "0".into(),
            d: "sideways".into(),
            d_prime: "in".into(),
        };
        assert!(i
            .to_instruction(3)
            .unwrap_err()
            .to_string()
            .contains("rule 3"));
    }
}
