//! CSV and JSON writers. Everything is written with LF line endings and
//! shortest round-trip float formatting, so reruns are byte-identical.

use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

fn output_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Output {
        path: path.to_path_buf(),
        source,
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| output_error(dir, e))
}

/// Writes `rows` under a header taken from the row type's field names.
pub fn write_csv<T: Serialize>(dir: &Path, name: &str, rows: &[T]) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(&path)
        .map_err(|e| output_error(&path, e.into()))?;
    for row in rows {
        w.serialize(row).map_err(|e| output_error(&path, e.into()))?;
    }
    w.flush().map_err(|e| output_error(&path, e))?;
    Ok(path)
}

#[derive(Debug, Serialize)]
struct Summary<'a, M: Serialize> {
    tool: &'static str,
    version: &'static str,
    core_version: &'static str,
    config: &'a ExperimentConfig,
    metrics: M,
}

/// `summary.json`: config echo, versions and headline metrics.
pub fn write_summary<M: Serialize>(dir: &Path, cfg: &ExperimentConfig, metrics: M) -> Result<PathBuf> {
    let path = dir.join("summary.json");
    let summary = Summary {
        tool: "distimate",
        version: env!("CARGO_PKG_VERSION"),
        core_version: distimation::VERSION,
        config: cfg,
        metrics,
    };
    let mut text = serde_json::to_string_pretty(&summary).map_err(|e| output_error(&path, e.into()))?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| output_error(&path, e))?;
    Ok(path)
}

/// Snaps a grid coordinate to ten decimal places.
pub fn round10(v: f64) -> f64 {
    (v * 1e10).round() / 1e10
}
