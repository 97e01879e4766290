//! Unambiguous edNCE graph grammars for labeled DAGs.
//!
//! The crate induces a context-free, edge-directed NCE graph grammar from a
//! dataset of node-labeled DAGs by repeated lossless contraction of frequent
//! motifs, then removes a minimal set of rules so that every graph of the
//! dataset keeps exactly one derivation. The resulting rule sequences are a
//! one-to-one sequential encoding of the dataset that can be replayed,
//! re-parsed and sampled from.
//!
//! Everything here is pure computation over `alloc` collections; file formats
//! and the command line front end live in the `ednce` crate.
//!
//! Module map:
//!
//! * [`graph`], [`vocab`], [`canon`], [`matching`]: graph values, validity
//!   predicates, canonical hashing and (sub)graph isomorphism.
//! * [`grammar`], [`sample`]: rules, one-step rewriting, derivation replay and
//!   constrained sampling.
//! * [`mining`]: beam-search frequent subgraph mining and occurrence grounding.
//! * [`compat`], [`clique`]: redirection realizations, instruction bounds, the
//!   compatibility graph and its max-clique solvers.
//! * [`induction`]: the description-length driven compression loop.
//! * [`disambiguation`], [`hitting`]: derivation enumeration and rule
//!   elimination.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod canon;
pub mod clique;
pub mod compat;
pub mod disambiguation;
mod error;
pub mod grammar;
pub mod graph;
pub mod hitting;
pub mod induction;
pub mod matching;
pub mod mining;
mod par;
pub mod rng;
pub mod sample;
pub mod vocab;

pub use canon::{canonical_key, CanonicalKey};
pub use error::{Error, ErrorKind, Result};
pub use grammar::{apply_rule, derive, Derivation, Direction, Grammar, Instruction, Rule, RuleId};
pub use graph::{
    composite_graph, induced_subgraph, is_dag, is_weakly_connected, Edge, LabeledDigraph,
};
pub use matching::is_isomorphic;
pub use vocab::{DagDataset, LabelVocabulary, DEFAULT_EDGE_LABEL};
