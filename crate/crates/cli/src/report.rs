//! Length-summary table and per-surface coverage matrices from a results CSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use nbdiff::inference::MethodKind;
use nbdiff::simulation::{summarize_median_lengths, LengthSummaryRow};

use crate::csvio::{BlockKey, ExperimentKey, ResultRow};

/// Groups rows by experiment and summarizes the per-experiment median
/// interval lengths per method.
pub fn length_summary(rows: &[ResultRow]) -> Result<Vec<LengthSummaryRow>> {
    let mut by_experiment: BTreeMap<ExperimentKey, Vec<(MethodKind, f64)>> = BTreeMap::new();
    for row in rows {
        by_experiment
            .entry(row.experiment_key())
            .or_default()
            .push((row.method, row.median_length));
    }
    let experiments: Vec<Vec<(MethodKind, f64)>> = by_experiment.into_values().collect();
    summarize_median_lengths(&experiments).map_err(Into::into)
}

/// Renders the summary in the usual six-number layout.
pub fn render_summary(rows: &[LengthSummaryRow], experiments: usize) -> String {
    let label_width = rows
        .iter()
        .map(|r| r.label.len())
        .max()
        .unwrap_or(0)
        .max("method".len());
    let mut out = String::new();
    let _ = writeln!(
        out,
        "median interval length across {experiments} experiment(s):"
    );
    let _ = writeln!(
        out,
        "{:<label_width$}  {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}",
        "method", "min", "1st qu.", "median", "mean", "3rd qu.", "max"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<label_width$}  {:>9.2} {:>9.2} {:>9.2} {:>9.2} {:>9.2} {:>9.2}",
            r.label, r.min, r.q1, r.median, r.mean, r.q3, r.max
        );
    }
    out
}

/// Writes one tidy `n_x,n_y,coverage` file per (method, parameter block),
/// suitable for external surface plotting. Returns the created paths.
pub fn write_coverage_matrices(rows: &[ResultRow], out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))?;

    let mut groups: BTreeMap<(BlockKey, &'static str), Vec<&ResultRow>> = BTreeMap::new();
    for row in rows {
        groups
            .entry((row.block_key(), row.method.name()))
            .or_default()
            .push(row);
    }

    let mut paths = Vec::new();
    for ((_, method), mut group) in groups {
        group.sort_by_key(|r| (r.n_x, r.n_y));
        let first = group[0];
        let name = format!(
            "coverage_{method}_mux{}_muy{}_thx{}_thy{}_a{}_t{}.csv",
            first.mu_x, first.mu_y, first.theta_x, first.theta_y, first.alpha, first.trials
        );
        let path = out_dir.join(name);
        let mut body = String::from("n_x,n_y,coverage\n");
        for row in group {
            let _ = writeln!(body, "{},{},{}", row.n_x, row.n_y, row.coverage);
        }
        fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
        paths.push(path);
    }
    Ok(paths)
}
