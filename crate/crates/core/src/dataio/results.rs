use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::fusion::CollaborativeFeatures;
use crate::protocols::RunSummary;

/// Pretty-printed JSON; refuses a summary without episodes.
pub fn write_results(summary: &RunSummary, path: &Path) -> Result<()> {
    if summary.per_episode.is_empty() {
        return Err(Error::EmptyList);
    }
    fs::write(path, serde_json::to_string_pretty(summary)? + "\n")?;
    Ok(())
}

pub fn read_results(path: &Path) -> Result<RunSummary> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// CSV with header `label,f0,…` and one row per column of `z`.
pub fn write_features(z: &CollaborativeFeatures, labels: &[i64], path: &Path) -> Result<()> {
    if labels.len() != z.n_samples() {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {} feature columns",
            labels.len(),
            z.n_samples()
        )));
    }
    let dim = z.matrix.rows();
    let mut out = BufWriter::new(fs::File::create(path)?);
    let header: Vec<String> = std::iter::once("label".to_string())
        .chain((0..dim).map(|i| format!("f{i}")))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for (n, label) in labels.iter().enumerate() {
        write!(out, "{label}")?;
        for i in 0..dim {
            write!(out, ",{}", z.matrix[(i, n)])?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}
