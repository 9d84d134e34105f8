//! Atomic output files and the structured error report.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use feeder_stats::Error;
use serde::Serialize;
use serde_json::{json, Value};
use tempfile::NamedTempFile;

pub struct Output {
    dir: PathBuf,
}

impl Output {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
        })
    }

    /// Writes `name` through a temporary file in the same directory and
    /// renames it into place once complete.
    pub fn write<F>(&self, name: &str, body: F) -> Result<()>
    where
        F: FnOnce(&mut dyn Write) -> feeder_stats::Result<()>,
    {
        let target = self.dir.join(name);
        let tmp = NamedTempFile::new_in(&self.dir)
            .with_context(|| format!("cannot create a temporary file in {}", self.dir.display()))?;
        let mut w = BufWriter::new(tmp);
        body(&mut w)?;
        let tmp = w.into_inner().map_err(|e| e.into_error())?;
        tmp.as_file().sync_all()?;
        tmp.persist(&target)
            .with_context(|| format!("cannot write {}", target.display()))?;
        Ok(())
    }

    pub fn json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<()> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            w.write_all(b"\n")?;
            Ok(())
        })
    }
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidParameter(_) => "invalid_parameter",
        Error::Domain(_) => "domain",
        Error::InsufficientData { .. } => "insufficient_data",
        Error::Degenerate(_) => "degenerate",
        Error::Convergence { .. } => "convergence",
        Error::Singular { .. } => "singular",
        Error::NotFound(_) => "not_found",
        Error::Contract(_) => "contract",
        Error::UndefinedMetric(_) => "undefined_metric",
        Error::Unidentifiable(_) => "unidentifiable",
        Error::InvalidTree(_) => "invalid_tree",
        Error::Config(_) => "config",
        Error::Parse { .. } => "parse",
        Error::Schema(_) => "schema",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
        Error::Csv(_) => "csv",
    }
}

/// One-line JSON description of a failed run.
pub fn error_json(e: &anyhow::Error) -> Value {
    let mut out = json!({ "error": "runtime", "message": format!("{e:#}") });
    if let Some(lib) = e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        out["error"] = json!(kind(lib));
        if let Error::Parse { line, .. } = lib {
            out["line"] = json!(line);
        }
    } else if e.chain().any(|c| c.is::<serde_json::Error>()) {
        out["error"] = json!("config");
    } else if e.chain().any(|c| c.is::<std::io::Error>()) {
        out["error"] = json!("io");
    }
    out
}
