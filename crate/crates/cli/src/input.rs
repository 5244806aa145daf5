//! Count-sample input files.
//!
//! Two shapes are accepted: plain text with one non-negative integer per line
//! (`#` comments and blank lines allowed), and a two-column CSV
//! `group,count` whose groups are `x` and `y` (an optional `group,count`
//! header is skipped).

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Reads a plain one-count-per-line file.
pub fn read_counts(path: &Path) -> Result<Vec<u64>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut counts = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let value: u64 = line.parse().with_context(|| {
            format!(
                "{}:{}: `{line}` is not a non-negative integer",
                path.display(),
                lineno + 1
            )
        })?;
        counts.push(value);
    }
    if counts.is_empty() {
        bail!("{}: no counts found", path.display());
    }
    Ok(counts)
}

/// Reads a `group,count` CSV and splits it into the x and y samples.
pub fn read_grouped_counts(path: &Path) -> Result<(Vec<u64>, Vec<u64>)> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if lineno == 0 && line.eq_ignore_ascii_case("group,count") {
            continue;
        }
        let (group, count) = line.split_once(',').with_context(|| {
            format!(
                "{}:{}: expected `group,count`, got `{line}`",
                path.display(),
                lineno + 1
            )
        })?;
        let value: u64 = count.trim().parse().with_context(|| {
            format!(
                "{}:{}: `{}` is not a non-negative integer",
                path.display(),
                lineno + 1,
                count.trim()
            )
        })?;
        match group.trim().to_ascii_lowercase().as_str() {
            "x" => x.push(value),
            "y" => y.push(value),
            other => bail!(
                "{}:{}: group must be `x` or `y`, got `{other}`",
                path.display(),
                lineno + 1
            ),
        }
    }
    if x.is_empty() {
        bail!("{}: no counts for group x", path.display());
    }
    if y.is_empty() {
        bail!("{}: no counts for group y", path.display());
    }
    Ok((x, y))
}
