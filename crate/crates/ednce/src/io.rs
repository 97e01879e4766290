//! Reading and writing the pipeline's files.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ednce_core::{DagDataset, Derivation, Grammar};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formats::{DatasetDto, GrammarDto, ParseLine};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let f = File::open(path).map_err(io_err(path))?;
    serde_json::from_reader(BufReader::new(f)).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Pretty-printed, newline-terminated.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    bytes.push(b'\n');
    write_bytes(path, &bytes)
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, bytes).map_err(io_err(path))
}

pub fn load_dataset(path: &Path) -> Result<DagDataset> {
    read_json::<DatasetDto>(path)?.to_dataset()
}

pub fn save_dataset(path: &Path, d: &DagDataset) -> Result<()> {
    write_json(path, &DatasetDto::from(d))
}

pub fn load_grammar(path: &Path) -> Result<Grammar> {
    read_json::<GrammarDto>(path)?.to_grammar()
}

pub fn save_grammar(path: &Path, g: &Grammar) -> Result<()> {
    write_json(path, &GrammarDto::from(g))
}

/// Blank lines are skipped.
pub fn load_parses(path: &Path) -> Result<Vec<ParseLine>> {
    let f = File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let p = serde_json::from_str(&line).map_err(|source| Error::JsonLine {
            path: path.to_path_buf(),
            line: i + 1,
            source,
        })?;
        out.push(p);
    }
    Ok(out)
}

pub fn parses_to_jsonl<'a>(parses: impl IntoIterator<Item = (usize, &'a Derivation)>) -> Vec<u8> {
    let mut out = Vec::new();
    for (i, d) in parses {
        serde_json::to_writer(&mut out, &ParseLine::new(i, d)).expect("in-memory write");
        out.push(b'\n');
    }
    out
}

pub fn save_parses<'a>(
    path: &Path,
    parses: impl IntoIterator<Item = (usize, &'a Derivation)>,
) -> Result<()> {
    write_bytes(path, &parses_to_jsonl(parses))
}

/// Writes `rows` under `header` as CSV.
pub fn write_csv<R: Serialize>(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = R>,
) -> Result<()> {
    let mut buf = Vec::new();
    {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(BufWriter::new(&mut buf));
        w.write_record(header)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush().map_err(io_err(path))?;
    }
    write_bytes(path, &buf)
}

/// Writes `bytes` to stdout.
pub fn emit_stdout(bytes: &[u8]) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(bytes)
        .and_then(|_| out.flush())
        .map_err(io_err(Path::new("<stdout>")))
}
