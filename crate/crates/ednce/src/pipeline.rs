//! The commands behind the `ednce` binary.
//!
//! Each `cmd_*` function reads its inputs from disk, writes its outputs into
//! a directory and returns a small report. The in-memory steps they wrap
//! (`induce`, `parse_graphs`, `sample_graphs`, ...) are public as well.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use ednce_core::clique::{CliqueConfig, CliqueTier};
use ednce_core::disambiguation::{enumerate_derivations, EnumConfig};
use ednce_core::grammar::{derive_trace, nonterminal_nodes, token_frequency};
use ednce_core::hitting::HittingTier;
use ednce_core::induction::{
    compression_curve, grammar_induction, InductionConfig, InductionResult,
};
use ednce_core::mining::MiningConfig;
use ednce_core::rng::{fork, stream};
use ednce_core::sample::{sample, NodeBudget, ValidityPredicate};
use ednce_core::{
    derive, is_dag, is_isomorphic, is_weakly_connected, DagDataset, Derivation, Grammar,
    LabelVocabulary, LabeledDigraph,
};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats::{DatasetDto, ParseLine};
use crate::io;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CliqueSolver {
    Exact,
    Approx,
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum HittingSolver {
    Exact,
    Beam,
}

/// How instruction sets are chosen from a clique's bounds. Only the minimal
/// choice (the union of the insets) is implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InstructionPolicy {
    Minimal,
}

/// Every knob of a run. Serialized into `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub beam_width: usize,
    pub max_motif_size: usize,
    pub top_n: usize,
    pub clique_solver: CliqueSolver,
    pub k_restarts: usize,
    pub exact_clique_cap: usize,
    pub redirection_cap: usize,
    pub instruction_policy: InstructionPolicy,
    pub hitting_set: HittingSolver,
    pub hitting_beam_width: usize,
    pub max_derivations_per_graph: usize,
    pub max_enumeration_states: usize,
    /// Seconds per enumerated graph.
    pub enum_timeout: Option<f64>,
    pub max_iters: usize,
    pub skip_disambiguation: bool,
    pub partition_by: Option<usize>,
    pub jobs: Option<usize>,
    pub dataset: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let ind = InductionConfig::default();
        let clique = CliqueConfig::default();
        let en = EnumConfig::default();
        RunConfig {
            seed: 0,
            beam_width: ind.mining.beam_width,
            max_motif_size: ind.mining.max_motif_size,
            top_n: ind.mining.top_n,
            clique_solver: CliqueSolver::Exact,
            k_restarts: clique.k_restarts,
            exact_clique_cap: clique.exact_cap,
            redirection_cap: ind.redirection_cap,
            instruction_policy: InstructionPolicy::Minimal,
            hitting_set: HittingSolver::Exact,
            hitting_beam_width: 10,
            max_derivations_per_graph: en.max_derivations,
            max_enumeration_states: en.max_states,
            enum_timeout: None,
            max_iters: ind.max_iters,
            skip_disambiguation: false,
            partition_by: None,
            jobs: None,
            dataset: None,
            out_dir: None,
        }
    }
}

impl RunConfig {
    pub fn enumeration(&self) -> EnumConfig {
        EnumConfig {
            max_states: self.max_enumeration_states,
            max_derivations: self.max_derivations_per_graph,
            timeout: self.enum_timeout.map(Duration::from_secs_f64),
            memoize: true,
        }
    }

    pub fn induction(&self) -> InductionConfig {
        InductionConfig {
            mining: MiningConfig {
                beam_width: self.beam_width,
                max_motif_size: self.max_motif_size,
                top_n: self.top_n,
            },
            clique: CliqueConfig {
                tier: match self.clique_solver {
                    CliqueSolver::Exact => CliqueTier::Exact,
                    CliqueSolver::Approx => CliqueTier::Approx,
                    CliqueSolver::Greedy => CliqueTier::Greedy,
                },
                k_restarts: self.k_restarts,
                exact_cap: self.exact_clique_cap,
            },
            redirection_cap: self.redirection_cap,
            hitting: match self.hitting_set {
                HittingSolver::Exact => HittingTier::Exact,
                HittingSolver::Beam => HittingTier::Beam(self.hitting_beam_width),
            },
            enumeration: self.enumeration(),
            max_iters: self.max_iters,
            skip_disambiguation: self.skip_disambiguation,
            partition_by: self.partition_by,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Compression {
    pub initial: usize,
    pub pre_termination: usize,
    pub post_termination: usize,
    /// initial |H| / pre-termination |H|.
    pub initial_over_pre_termination: f64,
    /// pre-termination |H| / initial |H|.
    pub pre_termination_over_initial: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationReport {
    pub iteration: usize,
    pub graphs: usize,
    pub initial_size: usize,
    pub pre_termination_size: usize,
    pub post_termination_size: usize,
    pub rules_learned: usize,
    pub rules_removed: usize,
    pub retained: usize,
    pub lost: Vec<usize>,
    pub final_round_cliques: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub config: RunConfig,
    pub graphs: usize,
    pub rules: usize,
    pub lost: usize,
    /// Graphs lost by some iteration and resolved by a later one.
    pub deferred: usize,
    pub parse_length_histogram: BTreeMap<usize, usize>,
    pub compression: Compression,
    pub iterations: Vec<IterationReport>,
    /// Wall-clock milliseconds per phase. The only run-dependent field.
    pub timings_ms: BTreeMap<String, f64>,
}

pub fn parse_length_histogram<'a>(
    parses: impl IntoIterator<Item = &'a Derivation>,
) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for p in parses {
        *h.entry(p.len()).or_default() += 1;
    }
    h
}

/// Sizes summed over the first iteration that saw each graph; later
/// iterations re-learn subsets already counted.
pub fn compression(result: &InductionResult) -> Compression {
    let mut seen = BTreeSet::new();
    let (mut initial, mut pre, mut post) = (0, 0, 0);
    for it in &result.iterations {
        if it.graphs.iter().all(|g| !seen.contains(g)) {
            initial += it.initial_size;
            pre += it.pre_termination_size;
            post += it.post_termination_size;
            seen.extend(it.graphs.iter().copied());
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    Compression {
        initial,
        pre_termination: pre,
        post_termination: post,
        initial_over_pre_termination: ratio(initial, pre),
        pre_termination_over_initial: ratio(pre, initial),
    }
}

pub fn summarize(
    result: &InductionResult,
    dataset_len: usize,
    cfg: &RunConfig,
    timings: &Timings,
) -> Summary {
    let deferred: BTreeSet<usize> = result
        .iterations
        .iter()
        .flat_map(|it| it.lost.iter().copied())
        .collect();
    Summary {
        config: cfg.clone(),
        graphs: dataset_len,
        rules: result.grammar.len(),
        lost: result.lost.len(),
        deferred: deferred.len(),
        parse_length_histogram: parse_length_histogram(result.parses.values()),
        compression: compression(result),
        iterations: result
            .iterations
            .iter()
            .map(|it| IterationReport {
                iteration: it.iteration,
                graphs: it.graphs.len(),
                initial_size: it.initial_size,
                pre_termination_size: it.pre_termination_size,
                post_termination_size: it.post_termination_size,
                rules_learned: it.rules_learned,
                rules_removed: it.rules_removed,
                retained: it.retained.len(),
                lost: it.lost.clone(),
                final_round_cliques: it.final_round_cliques.clone(),
            })
            .collect(),
        timings_ms: timings.0.clone(),
    }
}

#[derive(Debug, Clone, Default)]
pub struct Timings(pub BTreeMap<String, f64>);

impl Timings {
    pub fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.0.insert(phase.into(), t.elapsed().as_secs_f64() * 1e3);
        out
    }
}

pub const TRACE_HEADER: [&str; 7] = [
    "iteration",
    "step",
    "rule_id",
    "clique_size",
    "motif_size",
    "size_before",
    "size_after",
];

pub fn induce(d: &DagDataset, cfg: &RunConfig) -> Result<InductionResult> {
    Ok(grammar_induction(d, &cfg.induction())?)
}

/// Writes grammar.json, parses.jsonl, trace.csv, compression.csv and
/// summary.json into `out`.
pub fn write_induction(out: &Path, result: &InductionResult, summary: &Summary) -> Result<()> {
    io::save_grammar(&out.join("grammar.json"), &result.grammar)?;
    io::save_parses(
        &out.join("parses.jsonl"),
        result.parses.iter().map(|(&i, p)| (i, p)),
    )?;
    io::write_csv(
        &out.join("trace.csv"),
        &TRACE_HEADER,
        result.trace.iter().map(|e| {
            (
                e.iteration,
                e.step,
                e.rule_id,
                e.clique_size,
                e.motif_size,
                e.size_before,
                e.size_after,
            )
        }),
    )?;
    io::write_csv(
        &out.join("compression.csv"),
        &["fraction_of_steps", "relative_size"],
        compression_curve(&result.trace),
    )?;
    io::write_json(&out.join("summary.json"), summary)
}

pub fn cmd_induce(dataset: &Path, out: &Path, cfg: &RunConfig) -> Result<Summary> {
    let mut timings = Timings::default();
    let d = timings.time("load", || io::load_dataset(dataset))?;
    let result = timings.time("induce", || induce(&d, cfg))?;
    let mut cfg = cfg.clone();
    cfg.dataset = Some(dataset.to_path_buf());
    cfg.out_dir = Some(out.to_path_buf());
    let summary = summarize(&result, d.len(), &cfg, &timings);
    write_induction(out, &result, &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseOutcome {
    Unique(Derivation),
    Ambiguous(usize),
    NotInLanguage,
}

impl ParseOutcome {
    pub fn derivations(&self) -> usize {
        match self {
            ParseOutcome::Unique(_) => 1,
            ParseOutcome::Ambiguous(n) => *n,
            ParseOutcome::NotInLanguage => 0,
        }
    }

    pub fn status(&self) -> String {
        match self {
            ParseOutcome::Unique(_) => "unique".into(),
            ParseOutcome::Ambiguous(n) => format!("ambiguous({n})"),
            ParseOutcome::NotInLanguage => "not-in-language".into(),
        }
    }
}

pub fn parse_graph(g: &Grammar, h: &LabeledDigraph, cfg: &EnumConfig) -> Result<ParseOutcome> {
    let mut ds = enumerate_derivations(g, h, cfg)?;
    Ok(match ds.len() {
        0 => ParseOutcome::NotInLanguage,
        1 => ParseOutcome::Unique(ds.pop().expect("one derivation")),
        n => ParseOutcome::Ambiguous(n),
    })
}

pub fn parse_graphs(
    g: &Grammar,
    graphs: &[LabeledDigraph],
    cfg: &EnumConfig,
) -> Result<Vec<ParseOutcome>> {
    use rayon::prelude::*;
    graphs.par_iter().map(|h| parse_graph(g, h, cfg)).collect()
}

/// Writes parses.jsonl (unique parses only) and parse_report.csv.
pub fn cmd_parse(
    grammar: &Path,
    dataset: &Path,
    out: &Path,
    cfg: &RunConfig,
) -> Result<Vec<ParseOutcome>> {
    let g = io::load_grammar(grammar)?;
    let d = io::load_dataset(dataset)?;
    let outcomes = parse_graphs(&g, d.graphs(), &cfg.enumeration())?;
    let unique = outcomes.iter().enumerate().filter_map(|(i, o)| match o {
        ParseOutcome::Unique(p) => Some((i, p)),
        _ => None,
    });
    io::save_parses(&out.join("parses.jsonl"), unique)?;
    io::write_csv(
        &out.join("parse_report.csv"),
        &["graph_index", "status", "derivations"],
        outcomes
            .iter()
            .enumerate()
            .map(|(i, o)| (i, o.status(), o.derivations())),
    )?;
    Ok(outcomes)
}

/// Vocabulary for graphs derived from `g`: its terminals and edge labels.
pub fn derived_vocab(g: &Grammar) -> LabelVocabulary {
    let mut v = LabelVocabulary::for_terminals(g.vocab.terminals().cloned());
    v.edge_labels.extend(g.vocab.edge_labels.iter().cloned());
    v
}

/// Replays `parses` in graph-index order.
pub fn derive_all(g: &Grammar, parses: &[ParseLine]) -> Result<DagDataset> {
    let mut sorted: Vec<&ParseLine> = parses.iter().collect();
    sorted.sort_by_key(|p| p.graph_index);
    for w in sorted.windows(2) {
        if w[0].graph_index == w[1].graph_index {
            return Err(Error::Format(format!(
                "graph {} has more than one parse",
                w[0].graph_index
            )));
        }
    }
    let graphs = sorted
        .iter()
        .map(|p| derive(g, &p.derivation()))
        .collect::<ednce_core::Result<Vec<_>>>()?;
    Ok(DagDataset::new(graphs, derived_vocab(g))?)
}

pub fn cmd_derive(grammar: &Path, parses: &Path, out: &Path) -> Result<DagDataset> {
    let g = io::load_grammar(grammar)?;
    let ps = io::load_parses(parses)?;
    let d = derive_all(&g, &ps)?;
    io::save_dataset(out, &d)?;
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleOptions {
    pub n: usize,
    pub seed: u64,
    pub node_budget: Option<usize>,
    /// Attempts per sample before giving up on it.
    pub retries: usize,
    pub max_steps: usize,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            n: 100,
            seed: 0,
            node_budget: None,
            retries: 100,
            max_steps: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub derivations: Vec<Derivation>,
    pub graphs: Vec<LabeledDigraph>,
    /// Set when a sample failed all its retries; the lists hold the samples
    /// drawn before it.
    pub failure: Option<ednce_core::Error>,
}

/// Sample `i`, attempt `a` draws from `fork(seed, [SAMPLE, i, a])`.
pub fn sample_graphs(g: &Grammar, opts: &SampleOptions) -> Samples {
    let budget = opts.node_budget.map(NodeBudget);
    let pred = budget.as_ref().map(|b| b as &dyn ValidityPredicate);
    let mut out = Samples {
        derivations: Vec::new(),
        graphs: Vec::new(),
        failure: None,
    };
    for i in 0..opts.n {
        let mut last = None;
        for a in 0..opts.retries.max(1) {
            match sample(
                g,
                fork(opts.seed, &[stream::SAMPLE, i as u64, a as u64]),
                opts.max_steps,
                pred,
            ) {
                Ok(d) => {
                    last = None;
                    match derive(g, &d) {
                        Ok(h) => {
                            out.graphs.push(h);
                            out.derivations.push(d);
                        }
                        Err(e) => last = Some(e),
                    }
                    break;
                }
                Err(e) if e.kind() == ednce_core::ErrorKind::Budget => last = Some(e),
                Err(e) => {
                    last = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = last {
            out.failure = Some(e);
            break;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleReport {
    pub options: SampleOptions,
    pub requested: usize,
    pub produced: usize,
    pub partial: bool,
    pub error: Option<String>,
}

/// Writes samples.jsonl, samples.json and sample_summary.json. Output is
/// written even when sampling stops early, with `partial` set.
pub fn cmd_sample(grammar: &Path, out: &Path, opts: &SampleOptions) -> Result<SampleReport> {
    let g = io::load_grammar(grammar)?;
    let s = sample_graphs(&g, opts);
    io::save_parses(&out.join("samples.jsonl"), s.derivations.iter().enumerate())?;
    let dto = DatasetDto {
        labels: Some((&derived_vocab(&g)).into()),
        graphs: s.graphs.iter().map(Into::into).collect(),
    };
    io::write_json(&out.join("samples.json"), &dto)?;
    let report = SampleReport {
        options: opts.clone(),
        requested: opts.n,
        produced: s.graphs.len(),
        partial: s.failure.is_some(),
        error: s.failure.as_ref().map(ToString::to_string),
    };
    io::write_json(&out.join("sample_summary.json"), &report)?;
    match s.failure {
        Some(source) => Err(Error::Sampling {
            produced: report.produced,
            requested: opts.n,
            source,
        }),
        None => Ok(report),
    }
}

/// Writes token_frequency.csv and parse_lengths.csv.
pub fn cmd_stats(
    parses: &Path,
    out: &Path,
) -> Result<(Vec<(usize, usize)>, BTreeMap<usize, usize>)> {
    let ps: Vec<Derivation> = io::load_parses(parses)?
        .iter()
        .map(ParseLine::derivation)
        .collect();
    let freq = token_frequency(&ps);
    let hist = parse_length_histogram(&ps);
    io::write_csv(
        &out.join("token_frequency.csv"),
        &["rule_id", "count"],
        freq.iter().copied(),
    )?;
    io::write_csv(
        &out.join("parse_lengths.csv"),
        &["parse_length", "graphs"],
        hist.iter().map(|(&k, &v)| (k, v)),
    )?;
    Ok((freq, hist))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub graph_index: Option<usize>,
    pub passed: bool,
    pub detail: String,
}

/// Number of nonterminal nodes, or why the intermediate is invalid.
fn intermediate_violation(h: &LabeledDigraph, vocab: &LabelVocabulary) -> Option<String> {
    if !is_dag(h) {
        return Some("cyclic intermediate".into());
    }
    if !is_weakly_connected(h) {
        return Some("disconnected intermediate".into());
    }
    let n = nonterminal_nodes(h, vocab).len();
    (n > 1).then(|| format!("{n} nonterminals in an intermediate"))
}

/// Replays each parse (every intermediate a connected DAG with at most one
/// nonterminal, the result isomorphic to its graph) and checks that every
/// graph has exactly one derivation, equal to its parse when one is given.
pub fn check(
    g: &Grammar,
    d: &DagDataset,
    parses: Option<&[ParseLine]>,
    cfg: &EnumConfig,
) -> Result<Vec<CheckResult>> {
    let mut results = Vec::new();
    let mut given: BTreeMap<usize, Derivation> = BTreeMap::new();
    for p in parses.unwrap_or_default() {
        if p.graph_index >= d.len() {
            return Err(Error::Format(format!(
                "parse for graph {} but the dataset has {} graphs",
                p.graph_index,
                d.len()
            )));
        }
        given.insert(p.graph_index, p.derivation());
    }
    for (&i, p) in &given {
        let detail = match derive_trace(g, p) {
            Err(e) => Some(e.to_string()),
            Ok(steps) => steps
                .iter()
                .find_map(|h| intermediate_violation(h, &g.vocab))
                .or_else(|| {
                    (!is_isomorphic(steps.last().expect("start graph"), &d.graphs()[i]))
                        .then(|| "replay differs from the graph".into())
                }),
        };
        results.push(CheckResult {
            check: "replay".into(),
            graph_index: Some(i),
            passed: detail.is_none(),
            detail: detail.unwrap_or_default(),
        });
    }
    let outcomes = parse_graphs(g, d.graphs(), cfg)?;
    for (i, o) in outcomes.iter().enumerate() {
        let mut detail = match o {
            ParseOutcome::Unique(_) => String::new(),
            other => other.status(),
        };
        if let (ParseOutcome::Unique(found), Some(p)) = (o, given.get(&i)) {
            if found != p {
                detail = format!(
                    "unique derivation {:?} differs from the recorded parse",
                    found.rule_ids
                );
            }
        }
        results.push(CheckResult {
            check: "unambiguous".into(),
            graph_index: Some(i),
            passed: detail.is_empty(),
            detail,
        });
    }
    Ok(results)
}

/// Writes check.csv; fails with exit code 4 when any check fails.
pub fn cmd_check(
    grammar: &Path,
    dataset: &Path,
    parses: Option<&Path>,
    out: &Path,
    cfg: &RunConfig,
) -> Result<Vec<CheckResult>> {
    let g = io::load_grammar(grammar)?;
    let d = io::load_dataset(dataset)?;
    let ps = parses.map(io::load_parses).transpose()?;
    let results = check(&g, &d, ps.as_deref(), &cfg.enumeration())?;
    io::write_csv(
        &out.join("check.csv"),
        &["check", "graph_index", "passed", "detail"],
        results
            .iter()
            .map(|r| (&r.check, r.graph_index, r.passed, &r.detail)),
    )?;
    let failures = results.iter().filter(|r| !r.passed).count();
    if failures > 0 {
        return Err(Error::Check { failures });
    }
    Ok(results)
}
