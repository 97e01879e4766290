//! Seeded random connected DAGs.

use ednce_core::rng::{self, stream, Rng};
use ednce_core::{DagDataset, LabelVocabulary, LabeledDigraph, DEFAULT_EDGE_LABEL};
use rand::seq::SliceRandom;
use rand::Rng as _;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub graphs: usize,
    /// Inclusive node-count range.
    pub nodes: (usize, usize),
    /// Inclusive range for the size of the node-label alphabet.
    pub labels: (usize, usize),
    pub edge_labels: usize,
    /// Probability of each forward edge beyond the spanning tree.
    pub extra_edge_probability: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            graphs: 50,
            nodes: (6, 12),
            labels: (3, 5),
            edge_labels: 1,
            extra_edge_probability: 0.15,
        }
    }
}

fn label_name(i: usize) -> String {
    let letter = char::from(b'A' + (i % 26) as u8);
    if i < 26 {
        letter.to_string()
    } else {
        format!("{letter}{}", i / 26)
    }
}

fn edge_label(i: usize) -> String {
    if i == 0 {
        DEFAULT_EDGE_LABEL.into()
    } else {
        format!("e{i}")
    }
}

/// Connected DAG over `labels`: a random spanning tree oriented along a
/// random topological order, plus random forward edges.
pub fn random_dag(
    rng: &mut Rng,
    n: usize,
    labels: &[String],
    edge_labels: &[String],
    extra_edge_probability: f64,
) -> LabeledDigraph {
    let mut g = LabeledDigraph::new();
    for i in 0..n {
        g.add_node(
            i.to_string(),
            labels.choose(rng).expect("non-empty alphabet").clone(),
        )
        .expect("fresh id");
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for pos in 1..n {
        let other = order[rng.gen_range(0..pos)];
        let e = edge_labels.choose(rng).expect("non-empty edge alphabet");
        g.add_edge(other.to_string(), e.clone(), order[pos].to_string())
            .expect("valid endpoints");
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(extra_edge_probability) {
                let e = edge_labels.choose(rng).expect("non-empty edge alphabet");
                g.add_edge(order[a].to_string(), e.clone(), order[b].to_string())
                    .expect("valid endpoints");
            }
        }
    }
    g
}

/// A dataset drawn from the synthetic stream of `seed`.
pub fn random_dataset(cfg: &SynthConfig, seed: u64) -> DagDataset {
    let mut rng = rng::forked(seed, &[stream::SYNTH]);
    let k = rng
        .gen_range(cfg.labels.0..=cfg.labels.1.max(cfg.labels.0))
        .max(1);
    let labels: Vec<String> = (0..k).map(label_name).collect();
    let edge_labels: Vec<String> = (0..cfg.edge_labels.max(1)).map(edge_label).collect();
    let graphs = (0..cfg.graphs)
        .map(|_| {
            let n = rng.gen_range(cfg.nodes.0..=cfg.nodes.1.max(cfg.nodes.0));
            random_dag(
                &mut rng,
                n,
                &labels,
                &edge_labels,
                cfg.extra_edge_probability,
            )
        })
        .collect();
    let mut vocab = LabelVocabulary::for_terminals(labels);
    vocab.edge_labels.extend(edge_labels);
    DagDataset::new(graphs, vocab).expect("labels are terminals")
}

#[cfg(test)]
mod tests {
    use super::*;
    use ednce_core::{is_dag, is_weakly_connected};

    #[test]
    fn graphs_are_connected_dags_within_bounds() {
        let cfg = SynthConfig {
            graphs: 200,
            edge_labels: 2,
            ..SynthConfig::default()
        };
        let d = random_dataset(&cfg, 7);
        let used: std::collections::BTreeSet<&String> = d
            .graphs()
            .iter()
            .flat_map(|g| g.nodes().map(|(_, l)| l))
            .collect();
        assert!((3..=5).contains(&used.len()));
        for g in d.graphs() {
            assert!((6..=12).contains(&g.node_count()));
            assert!(is_dag(g) && is_weakly_connected(g));
            assert!(g.edges().all(|e| d.vocab().edge_labels.contains(&e.label)));
        }
    }

    #[test]
    fn same_seed_same_dataset() {
        let cfg = SynthConfig::default();
        assert_eq!(random_dataset(&cfg, 3), random_dataset(&cfg, 3));
        assert_ne!(random_dataset(&cfg, 3), random_dataset(&cfg, 4));
    }
}
