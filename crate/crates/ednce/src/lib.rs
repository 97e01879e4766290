//! File formats, IO and the command pipeline around [`ednce_core`].
//!
//! Datasets and grammars are JSON, parses are JSON lines, traces and reports
//! are CSV. [`pipeline`] holds the commands the `ednce` binary exposes, as
//! plain functions so they can be driven from tests.

pub use ednce_core as core;

pub mod error;
pub mod formats;
pub mod io;
pub mod pipeline;
pub mod synth;

pub use error::{Error, Result};
