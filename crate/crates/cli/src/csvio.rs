//! Results CSV schema: one row per (experiment, method), fixed column order.

use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use nbdiff::inference::MethodKind;
use nbdiff::simulation::ExperimentResult;

pub const RESULTS_HEADER: &str = "mu_x,mu_y,theta_x,theta_y,n_x,n_y,trials,alpha,seed,method,\
coverage,coverage_se,mean_length,median_length,degenerate_trials";

/// Writes one row per method record of one experiment. Floats use the
/// shortest round-trip representation, so identical results produce
/// byte-identical rows.
pub fn write_result_rows<W: Write>(out: &mut W, result: &ExperimentResult) -> std::io::Result<()> {
    let s = &result.spec;
    for rec in &result.records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            s.mu_x,
            s.mu_y,
            s.theta_x,
            s.theta_y,
            s.n_x,
            s.n_y,
            s.trials,
            s.alpha,
            s.seed,
            rec.method,
            rec.coverage,
            rec.coverage_se,
            rec.mean_length,
            rec.median_length,
            rec.degenerate_trials
        )?;
    }
    Ok(())
}

/// One parsed row of a results CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub mu_x: f64,
    pub mu_y: f64,
    pub theta_x: f64,
    pub theta_y: f64,
    pub n_x: usize,
    pub n_y: usize,
    pub trials: usize,
    pub alpha: f64,
    pub seed: u64,
    pub method: MethodKind,
    pub coverage: f64,
    pub coverage_se: f64,
    pub mean_length: f64,
    pub median_length: f64,
    pub degenerate_trials: usize,
}

impl ResultRow {
    /// Key identifying the experiment a row belongs to. Floats are compared
    /// by bit pattern; every parameter here is positive, so the bit order
    /// agrees with numeric order.
    pub fn experiment_key(&self) -> ExperimentKey {
        (
            self.mu_x.to_bits(),
            self.mu_y.to_bits(),
            self.theta_x.to_bits(),
            self.theta_y.to_bits(),
            self.n_x,
            self.n_y,
            self.trials,
            self.alpha.to_bits(),
            self.seed,
        )
    }

    /// Key identifying a parameter block (one coverage surface): everything
    /// but the sample sizes and seed.
    pub fn block_key(&self) -> BlockKey {
        (
            self.mu_x.to_bits(),
            self.mu_y.to_bits(),
            self.theta_x.to_bits(),
            self.theta_y.to_bits(),
            self.trials,
            self.alpha.to_bits(),
        )
    }
}

pub type ExperimentKey = (u64, u64, u64, u64, usize, usize, usize, u64, u64);
pub type BlockKey = (u64, u64, u64, u64, usize, u64);

pub fn read_results_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == RESULTS_HEADER => {}
        Some((_, header)) => bail!(
            "{}: header does not match the results schema\n  expected: {RESULTS_HEADER}\n  found:    {header}",
            path.display()
        ),
        None => bail!("{}: empty file", path.display()),
    }

    let mut rows = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 15 {
            bail!(
                "{}:{}: expected 15 fields, got {}",
                path.display(),
                lineno + 1,
                fields.len()
            );
        }
        let ctx = |i: usize| format!("{}:{}: field {}", path.display(), lineno + 1, i + 1);
        rows.push(ResultRow {
            mu_x: fields[0].parse().with_context(|| ctx(0))?,
            mu_y: fields[1].parse().with_context(|| ctx(1))?,
            theta_x: fields[2].parse().with_context(|| ctx(2))?,
            theta_y: fields[3].parse().with_context(|| ctx(3))?,
            n_x: fields[4].parse().with_context(|| ctx(4))?,
            n_y: fields[5].parse().with_context(|| ctx(5))?,
            trials: fields[6].parse().with_context(|| ctx(6))?,
            alpha: fields[7].parse().with_context(|| ctx(7))?,
            seed: fields[8].parse().with_context(|| ctx(8))?,
            method: fields[9]
                .parse::<MethodKind>()
                .map_err(|e| anyhow!("{}: {e}", ctx(9)))?,
            coverage: fields[10].parse().with_context(|| ctx(10))?,
            coverage_se: fields[11].parse().with_context(|| ctx(11))?,
            mean_length: fields[12].parse().with_context(|| ctx(12))?,
            median_length: fields[13].parse().with_context(|| ctx(13))?,
            degenerate_trials: fields[14].parse().with_context(|| ctx(14))?,
        });
    }
    if rows.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nbdiff::simulation::{run_experiment, ExperimentSpec};

    fn sample_result() -> ExperimentResult {
        run_experiment(&ExperimentSpec {
            mu_x: 5.0,
            mu_y: 5.0,
            theta_x: 0.25,
            theta_y: 0.25,
            n_x: 10,
            n_y: 12,
            trials: 50,
            alpha: 0.05,
            seed: 3,
            methods: vec![MethodKind::Normal, MethodKind::Bernstein, MethodKind::Mixture],
            mixture_weight: 0.5,
            c_a: 1.0,
            c_b: 1.0,
        })
        .unwrap()
    }

    #[test]
    fn rows_round_trip_through_the_schema() {
        let result = sample_result();
        let mut buf = Vec::new();
        writeln!(buf, "{RESULTS_HEADER}").unwrap();
        write_result_rows(&mut buf, &result).unwrap();

        let path = std::env::temp_dir().join(format!("nbdiff-csv-test-{}.csv", std::process::id()));
        std::fs::write(&path, &buf).unwrap();
        let rows = read_results_csv(&path).unwrap();
        std::fs::remove_file(&path).ok();

        assert_eq!(rows.len(), 3);
        for (row, rec) in rows.iter().zip(&result.records) {
            assert_eq!(row.method, rec.method);
            assert_eq!(row.coverage, rec.coverage);
            assert_eq!(row.median_length, rec.median_length);
            assert_eq!(row.seed, result.spec.seed);
        }
        assert_eq!(rows[0].experiment_key(), rows[1].experiment_key());
        assert_eq!(rows[0].block_key(), rows[2].block_key());
    }

    #[test]
    fn header_mismatch_is_rejected() {
        let path = std::env::temp_dir().join(format!("nbdiff-csv-bad-{}.csv", std::process::id()));
        std::fs::write(&path, "wrong,header\n1,2\n").unwrap();
        let err = read_results_csv(&path).unwrap_err().to_string();
        assert!(err.contains("header"), "{err}");
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn short_rows_are_rejected_with_line_numbers() {
        let path = std::env::temp_dir().join(format!("nbdiff-csv-short-{}.csv", std::process::id()));
        std::fs::write(&path, format!("{RESULTS_HEADER}\n1,2,3\n")).unwrap();
        let err = read_results_csv(&path).unwrap_err().to_string();
        assert!(err.contains(":2"), "{err}");
        std::fs::remove_file(&path).ok();
    }
}
