use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

pub fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Rows of numbers as CSV; `f64` Display is the shortest exact round-trip.
pub fn csv_rows<'a>(header: Option<&[String]>, rows: impl IntoIterator<Item = &'a [f64]>) -> String {
    let mut s = String::new();
    if let Some(h) = header {
        s.push_str(&h.join(","));
        s.push('\n');
    }
    for row in rows {
        s.push_str(&join(row));
        s.push('\n');
    }
    s
}

pub fn join(row: &[f64]) -> String {
    row.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

pub fn fixed(row: &[f64], decimals: usize) -> String {
    row.iter()
        .map(|v| format!("{v:>8.decimals$}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
