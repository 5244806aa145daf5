//! Flat key/value grid configuration format.
//!
//! One `key = value` pair per line; list-valued axes use comma-separated
//! values; `#` starts a comment. Example:
//!
//! ```text
//! mu_x = 5
//! mu_y = 5
//! theta_x = 0.025
//! theta_y = 0.025
//! n_x = 10, 20, 50, 100, 200
//! n_y = 10, 20, 50, 100, 200
//! trials = 2000
//! alpha = 0.05
//! seed = 421775
//! methods = normal, bernstein, mixture
//! ```
//!
//! Required keys: `mu_x`, `mu_y`, `theta_x`, `theta_y`, `n_x`, `n_y`,
//! `trials`, `seed`. Optional with defaults: `alpha` (0.05), `methods`
//! (normal, bernstein, mixture), `mixture_weight` (0.5), `c_a` (1), `c_b` (1).

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use nbdiff::inference::MethodKind;
use nbdiff::simulation::GridSpec;

const KNOWN_KEYS: &[&str] = &[
    "mu_x",
    "mu_y",
    "theta_x",
    "theta_y",
    "n_x",
    "n_y",
    "trials",
    "alpha",
    "seed",
    "methods",
    "mixture_weight",
    "c_a",
    "c_b",
];

pub fn parse_grid_config(text: &str) -> Result<GridSpec> {
    let mut entries: BTreeMap<String, (usize, Vec<String>)> = BTreeMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected `key = value`, got `{raw}`", lineno + 1))?;
        let key = key.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            bail!("line {}: unknown key `{key}`", lineno + 1);
        }
        let values: Vec<String> = value
            .split(',')
            .map(|v| v.trim().to_string())
            .filter(|v| !v.is_empty())
            .collect();
        if values.is_empty() {
            bail!("line {}: key `{key}` has no values", lineno + 1);
        }
        if entries.insert(key.clone(), (lineno + 1, values)).is_some() {
            bail!("line {}: key `{key}` given more than once", lineno + 1);
        }
    }

    let take = |key: &str| entries.get(key).map(|(_, v)| v.clone());
    let required = |key: &str| {
        take(key).ok_or_else(|| anyhow!("missing required key `{key}`"))
    };

    fn scalar(key: &str, values: Vec<String>) -> Result<String> {
        if values.len() != 1 {
            bail!("key `{key}` must have exactly one value, got {}", values.len());
        }
        Ok(values.into_iter().next().unwrap())
    }

    fn f64_list(key: &str, values: Vec<String>) -> Result<Vec<f64>> {
        values
            .iter()
            .map(|v| {
                v.parse::<f64>()
                    .with_context(|| format!("key `{key}`: `{v}` is not a number"))
            })
            .collect()
    }

    fn usize_list(key: &str, values: Vec<String>) -> Result<Vec<usize>> {
        values
            .iter()
            .map(|v| {
                v.parse::<usize>()
                    .with_context(|| format!("key `{key}`: `{v}` is not a positive integer"))
            })
            .collect()
    }

    let methods = match take("methods") {
        Some(values) => values
            .iter()
            .map(|v| {
                v.parse::<MethodKind>()
                    .map_err(|e| anyhow!("key `methods`: {e}"))
            })
            .collect::<Result<Vec<_>>>()?,
        None => vec![MethodKind::Normal, MethodKind::Bernstein, MethodKind::Mixture],
    };

    let grid = GridSpec {
        mu_x: f64_list("mu_x", required("mu_x")?)?,
        mu_y: f64_list("mu_y", required("mu_y")?)?,
        theta_x: f64_list("theta_x", required("theta_x")?)?,
        theta_y: f64_list("theta_y", required("theta_y")?)?,
        n_x: usize_list("n_x", required("n_x")?)?,
        n_y: usize_list("n_y", required("n_y")?)?,
        trials: scalar("trials", required("trials")?)?
            .parse()
            .context("key `trials` must be a positive integer")?,
        alpha: match take("alpha") {
            Some(v) => scalar("alpha", v)?.parse().context("key `alpha`")?,
            None => 0.05,
        },
        master_seed: scalar("seed", required("seed")?)?
            .parse()
            .context("key `seed` must be an unsigned 64-bit integer")?,
        methods,
        mixture_weight: match take("mixture_weight") {
            Some(v) => scalar("mixture_weight", v)?
                .parse()
                .context("key `mixture_weight`")?,
            None => 0.5,
        },
        c_a: match take("c_a") {
            Some(v) => scalar("c_a", v)?.parse().context("key `c_a`")?,
            None => 1.0,
        },
        c_b: match take("c_b") {
            Some(v) => scalar("c_b", v)?.parse().context("key `c_b`")?,
            None => 1.0,
        },
    };

    // Surface invalid combinations now rather than mid-run.
    grid.experiments()
        .map_err(|e| anyhow!("invalid grid: {e}"))?;
    Ok(grid)
}
