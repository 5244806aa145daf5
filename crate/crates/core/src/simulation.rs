//! Monte Carlo coverage and interval-length experiments over parameter grids.
//!
//! Every number produced here is a pure function of the experiment
//! specification (including its seed). Grid runs derive one seed per
//! experiment from a master seed and the experiment's grid index with a
//! SplitMix64-style mixer, so results do not depend on execution order or on
//! the degree of parallelism.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::distributions::{summarize, NegBinParams, NegBinSampler};
use crate::error::{Error, Result};
use crate::inference::{
    ci_bernstein_from_stats, ci_mixture, ci_normal_two_sample, IntervalEstimate, MethodKind,
    VarianceMode,
};

/// One cell of a simulation grid: the population parameters, the sample
/// sizes, and everything needed to rebuild each interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub mu_x: f64,
    pub mu_y: f64,
    pub theta_x: f64,
    pub theta_y: f64,
    pub n_x: usize,
    pub n_y: usize,
    pub trials: usize,
    pub alpha: f64,
    pub seed: u64,
    pub methods: Vec<MethodKind>,
    pub mixture_weight: f64,
    pub c_a: f64,
    pub c_b: f64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        NegBinParams::new(self.mu_x, self.theta_x)?;
        NegBinParams::new(self.mu_y, self.theta_y)?;
        if self.n_x == 0 || self.n_y == 0 {
            return Err(Error::InvalidExperiment("sample sizes must be >= 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidExperiment("trials must be >= 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidExperiment(format!(
                "alpha must lie in (0,1), got {}",
                self.alpha
            )));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidExperiment("no methods requested".into()));
        }
        for (i, m) in self.methods.iter().enumerate() {
            match m {
                MethodKind::Normal | MethodKind::Bernstein | MethodKind::Mixture => {}
                other => return Err(Error::UnsupportedMethod(other.name().to_string())),
            }
            if self.methods[..i].contains(m) {
                return Err(Error::InvalidExperiment(format!("duplicate method {m}")));
            }
        }
        let needs_normal = self.methods.contains(&MethodKind::Normal)
            || self.methods.contains(&MethodKind::Mixture);
        if needs_normal && (self.n_x < 2 || self.n_y < 2) {
            return Err(Error::InvalidExperiment(
                "normal and mixture intervals need n_x >= 2 and n_y >= 2".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.mixture_weight) || !self.mixture_weight.is_finite() {
            return Err(Error::InvalidExperiment(format!(
                "mixture weight must lie in [0,1], got {}",
                self.mixture_weight
            )));
        }
        if self.c_a < 1.0 || self.c_b < 1.0 {
            return Err(Error::InvalidExperiment(format!(
                "scaling constants must be at least 1, got c_a={}, c_b={}",
                self.c_a, self.c_b
            )));
        }
        Ok(())
    }
}

/// Per-method outcome of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodRecord {
    pub method: MethodKind,
    /// Fraction of trials whose interval contained the true mean difference.
    pub coverage: f64,
    /// Binomial standard error sqrt(p̂(1−p̂)/trials).
    pub coverage_se: f64,
    pub mean_length: f64,
    /// Median interval length across trials. For the mixture method this is
    /// the w-weighted combination of the component medians — the quantile
    /// convention matching its endpoint definition — since length ranks need
    /// not align trial-by-trial across methods.
    pub median_length: f64,
    /// Trials whose interval was a zero-width degenerate; these are counted
    /// as non-covering rather than silently dropped.
    pub degenerate_trials: usize,
}

/// One simulation grid cell with its per-method coverage and length records.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub records: Vec<MethodRecord>,
}

impl ExperimentResult {
    pub fn record(&self, method: MethodKind) -> Option<&MethodRecord> {
        self.records.iter().find(|r| r.method == method)
    }
}

#[derive(Default)]
struct MethodTally {
    covered: usize,
    degenerate: usize,
    lengths: Vec<f64>,
}

impl MethodTally {
    fn observe(&mut self, ci: &IntervalEstimate, true_diff: f64) {
        // Degenerate zero-width intervals carry no information and are
        // counted as misses regardless of where they sit.
        if ci.degenerate {
            self.degenerate += 1;
        } else if ci.contains(true_diff) {
            self.covered += 1;
        }
        self.lengths.push(ci.length);
    }
}

/// Runs one simulation experiment: `trials` independent sample pairs, one
/// interval per requested method per pair, tallied into coverage and length
/// summaries. Deterministic given the spec.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let params_x = NegBinParams::new(spec.mu_x, spec.theta_x)?;
    let params_y = NegBinParams::new(spec.mu_y, spec.theta_y)?;
    let sampler_x = NegBinSampler::new(params_x);
    let sampler_y = NegBinSampler::new(params_y);
    let true_diff = spec.mu_x - spec.mu_y;

    let want = |m: MethodKind| spec.methods.contains(&m);
    let need_normal = want(MethodKind::Normal) || want(MethodKind::Mixture);
    let need_bernstein = want(MethodKind::Bernstein) || want(MethodKind::Mixture);

    let mut normal_tally = MethodTally::default();
    let mut bernstein_tally = MethodTally::default();
    let mut mixture_tally = MethodTally::default();

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..spec.trials {
        let x = sampler_x.sample_vec(spec.n_x, &mut rng);
        let y = sampler_y.sample_vec(spec.n_y, &mut rng);
        let x_stats = summarize(&x)?;
        let y_stats = summarize(&y)?;

        let normal_ci = if need_normal {
            Some(ci_normal_two_sample(
                &x_stats,
                &y_stats,
                spec.alpha,
                &VarianceMode::Direct,
            )?)
        } else {
            None
        };
        let bernstein_ci = if need_bernstein {
            Some(ci_bernstein_from_stats(
                &x_stats,
                &y_stats,
                spec.alpha,
                spec.c_a,
                spec.c_b,
            )?)
        } else {
            None
        };

        if let Some(ci) = &normal_ci {
            normal_tally.observe(ci, true_diff);
        }
        if let Some(ci) = &bernstein_ci {
            bernstein_tally.observe(ci, true_diff);
        }
        if want(MethodKind::Mixture) {
            let mix = ci_mixture(
                normal_ci.as_ref().expect("mixture implies normal"),
                bernstein_ci.as_ref().expect("mixture implies bernstein"),
                spec.mixture_weight,
            )?;
            mixture_tally.observe(&mix, true_diff);
        }
    }

    let trials = spec.trials as f64;
    let normal_median = need_normal.then(|| median(normal_tally.lengths.clone()));
    let bernstein_median = need_bernstein.then(|| median(bernstein_tally.lengths.clone()));

    let mut records = Vec::with_capacity(spec.methods.len());
    for &method in &spec.methods {
        let (tally, median_length) = match method {
            MethodKind::Normal => (
                &normal_tally,
                normal_median.expect("normal tally populated"),
            ),
            MethodKind::Bernstein => (
                &bernstein_tally,
                bernstein_median.expect("bernstein tally populated"),
            ),
            MethodKind::Mixture => {
                let w = spec.mixture_weight;
                let blended = w * normal_median.expect("mixture implies normal")
                    + (1.0 - w) * bernstein_median.expect("mixture implies bernstein");
                (&mixture_tally, blended)
            }
            _ => unreachable!("validated"),
        };
        let coverage = tally.covered as f64 / trials;
        let (coverage_se, _) = coverage_margin(coverage, spec.trials)?;
        records.push(MethodRecord {
            method,
            coverage,
            coverage_se,
            mean_length: tally.lengths.iter().sum::<f64>() / trials,
            median_length,
            degenerate_trials: tally.degenerate,
        });
    }

    Ok(ExperimentResult {
        spec: spec.clone(),
        records,
    })
}

/// Standard error and 95% margin of an estimated coverage probability:
/// se = sqrt(p(1−p)/trials), margin = 1.96·se.
pub fn coverage_margin(p: f64, trials: usize) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "coverage must lie in [0,1], got {p}"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let se = (p * (1.0 - p) / trials as f64).sqrt();
    Ok((se, 1.96 * se))
}

/// Cartesian product specification over the simulation grid axes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub mu_x: Vec<f64>,
    pub mu_y: Vec<f64>,
    pub theta_x: Vec<f64>,
    pub theta_y: Vec<f64>,
    pub n_x: Vec<usize>,
    pub n_y: Vec<usize>,
    pub trials: usize,
    pub alpha: f64,
    pub master_seed: u64,
    pub methods: Vec<MethodKind>,
    pub mixture_weight: f64,
    pub c_a: f64,
    pub c_b: f64,
}

impl GridSpec {
    /// Number of experiments in the cartesian product.
    pub fn len(&self) -> usize {
        self.mu_x.len()
            * self.mu_y.len()
            * self.theta_x.len()
            * self.theta_y.len()
            * self.n_x.len()
            * self.n_y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The full factorial study grid: means {5, 10}², dispersions
    /// {0.01, 0.025, 0.05, 0.075, 0.1}², and 23 sample sizes per arm —
    /// 52,900 experiments. At 10,000 trials each this is days of compute;
    /// callers should reach for it deliberately.
    pub fn full_grid(trials: usize, master_seed: u64) -> Self {
        let n_axis: Vec<usize> = (1..=20)
            .map(|i| i * 10)
            .chain([250, 500, 1000])
            .collect();
        Self {
            mu_x: vec![5.0, 10.0],
            mu_y: vec![5.0, 10.0],
            theta_x: vec![0.01, 0.025, 0.05, 0.075, 0.1],
            theta_y: vec![0.01, 0.025, 0.05, 0.075, 0.1],
            n_x: n_axis.clone(),
            n_y: n_axis,
            trials,
            alpha: 0.05,
            master_seed,
            methods: vec![MethodKind::Normal, MethodKind::Bernstein, MethodKind::Mixture],
            mixture_weight: 0.5,
            c_a: 1.0,
            c_b: 1.0,
        }
    }

    /// Enumerates the experiments in a fixed nesting order (mu_x outermost,
    /// n_y innermost), deriving each seed from the master seed and the
    /// experiment's index.
    pub fn experiments(&self) -> Result<Vec<ExperimentSpec>> {
        if self.is_empty() {
            return Err(Error::InvalidExperiment("grid has an empty axis".into()));
        }
        let mut specs = Vec::with_capacity(self.len());
        let mut index: u64 = 0;
        for &mu_x in &self.mu_x {
            for &mu_y in &self.mu_y {
                for &theta_x in &self.theta_x {
                    for &theta_y in &self.theta_y {
                        for &n_x in &self.n_x {
                            for &n_y in &self.n_y {
                                let spec = ExperimentSpec {
                                    mu_x,
                                    mu_y,
                                    theta_x,
                                    theta_y,
                                    n_x,
                                    n_y,
                                    trials: self.trials,
                                    alpha: self.alpha,
                                    seed: derive_seed(self.master_seed, index),
                                    methods: self.methods.clone(),
                                    mixture_weight: self.mixture_weight,
                                    c_a: self.c_a,
                                    c_b: self.c_b,
                                };
                                spec.validate()?;
                                specs.push(spec);
                                index += 1;
                            }
                        }
                    }
                }
            }
        }
        Ok(specs)
    }
}

/// SplitMix64 output stream: maps (master seed, experiment index) to a
/// per-experiment stream seed. Pure function, collision-resistant mixing.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs every experiment of a grid, `parallelism` at a time, invoking
/// `on_result` in grid order as soon as each prefix of results is complete.
/// The returned vector is in grid order and identical for every parallelism
/// degree.
pub fn run_grid<F>(
    grid: &GridSpec,
    parallelism: usize,
    mut on_result: F,
) -> Result<Vec<ExperimentResult>>
where
    F: FnMut(&ExperimentResult),
{
    let specs = grid.experiments()?;
    let workers = parallelism.max(1).min(specs.len());

    if workers == 1 {
        let mut out = Vec::with_capacity(specs.len());
        for spec in &specs {
            let result = run_experiment(spec)?;
            on_result(&result);
            out.push(result);
        }
        return Ok(out);
    }

    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, Result<ExperimentResult>)>();
    let mut slots: Vec<Option<ExperimentResult>> = (0..specs.len()).map(|_| None).collect();

    thread::scope(|scope| -> Result<()> {
        for _ in 0..workers {
            let tx = tx.clone();
            let next = &next;
            let specs = &specs;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= specs.len() {
                    break;
                }
                if tx.send((i, run_experiment(&specs[i]))).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        let mut emitted = 0;
        while let Ok((i, result)) = rx.recv() {
            slots[i] = Some(result?);
            while emitted < slots.len() {
                match &slots[emitted] {
                    Some(r) => {
                        on_result(r);
                        emitted += 1;
                    }
                    None => break,
                }
            }
        }
        Ok(())
    })?;

    Ok(slots
        .into_iter()
        .map(|s| s.expect("every index was computed"))
        .collect())
}

/// One row of the interval-length summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthSummaryRow {
    pub label: String,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
}

/// Summarizes per-experiment median interval lengths per method (min,
/// quartiles, mean, max), plus a `bernstein - normal` difference row when
/// both methods are present.
pub fn summarize_lengths(results: &[ExperimentResult]) -> Result<Vec<LengthSummaryRow>> {
    let per_experiment: Vec<Vec<(MethodKind, f64)>> = results
        .iter()
        .map(|r| {
            r.records
                .iter()
                .map(|rec| (rec.method, rec.median_length))
                .collect()
        })
        .collect();
    summarize_median_lengths(&per_experiment)
}

/// Lower-level entry point for callers that only hold (method, median length)
/// pairs per experiment, e.g. re-reading a results file.
pub fn summarize_median_lengths(
    experiments: &[Vec<(MethodKind, f64)>],
) -> Result<Vec<LengthSummaryRow>> {
    if experiments.is_empty() {
        return Err(Error::InvalidExperiment("no results to summarize".into()));
    }
    let collect = |method: MethodKind| -> Vec<f64> {
        experiments
            .iter()
            .filter_map(|e| {
                e.iter()
                    .find(|(m, _)| *m == method)
                    .map(|(_, len)| *len)
            })
            .collect()
    };

    let mut rows = Vec::new();
    for method in [MethodKind::Bernstein, MethodKind::Mixture, MethodKind::Normal] {
        let values = collect(method);
        if !values.is_empty() {
            rows.push(summary_row(method.name().to_string(), values));
        }
    }

    let diffs: Vec<f64> = experiments
        .iter()
        .filter_map(|e| {
            let b = e.iter().find(|(m, _)| *m == MethodKind::Bernstein)?;
            let n = e.iter().find(|(m, _)| *m == MethodKind::Normal)?;
            Some(b.1 - n.1)
        })
        .collect();
    if !diffs.is_empty() {
        rows.push(summary_row("bernstein - normal".to_string(), diffs));
    }

    if rows.is_empty() {
        return Err(Error::InvalidExperiment(
            "results contain no known methods".into(),
        ));
    }
    Ok(rows)
}

fn summary_row(label: String, mut values: Vec<f64>) -> LengthSummaryRow {
    values.sort_unstable_by(f64::total_cmp);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    LengthSummaryRow {
        label,
        min: values[0],
        q1: quantile_type7(&values, 0.25),
        median: quantile_type7(&values, 0.5),
        mean,
        q3: quantile_type7(&values, 0.75),
        max: values[values.len() - 1],
    }
}

/// Linear-interpolation sample quantile (R type 7) of an ascending slice.
fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Median with the even-count midpoint convention.
fn median(mut values: Vec<f64>) -> f64 {
    assert!(!values.is_empty());
    values.sort_unstable_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn base_spec() -> ExperimentSpec {
        ExperimentSpec {
            mu_x: 5.0,
            mu_y: 5.0,
            theta_x: 0.25,
            theta_y: 0.25,
            n_x: 20,
            n_y: 20,
            trials: 200,
            alpha: 0.05,
            seed: 99,
            methods: vec![MethodKind::Normal, MethodKind::Bernstein, MethodKind::Mixture],
            mixture_weight: 0.5,
            c_a: 1.0,
            c_b: 1.0,
        }
    }

    #[test]
    fn experiment_is_bit_deterministic() {
        let spec = base_spec();
        let a = run_experiment(&spec).unwrap();
        let b = run_experiment(&spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_trial_coverage_is_zero_or_one() {
        let mut spec = base_spec();
        spec.trials = 1;
        let result = run_experiment(&spec).unwrap();
        for rec in &result.records {
            assert!(rec.coverage == 0.0 || rec.coverage == 1.0);
            assert_eq!(rec.coverage_se, 0.0);
        }
    }

    #[test]
    fn lengths_order_normal_mixture_bernstein() {
        let result = run_experiment(&base_spec()).unwrap();
        let normal = result.record(MethodKind::Normal).unwrap();
        let bern = result.record(MethodKind::Bernstein).unwrap();
        let mix = result.record(MethodKind::Mixture).unwrap();

        assert!(normal.mean_length <= mix.mean_length);
        assert!(mix.mean_length <= bern.mean_length);
        assert!(normal.median_length <= mix.median_length);
        assert!(mix.median_length <= bern.median_length);

        // Exact linear identities for the mixture records.
        assert_relative_eq!(
            mix.mean_length,
            0.5 * (normal.mean_length + bern.mean_length),
            max_relative = 1e-12
        );
        assert_abs_diff_eq!(
            mix.median_length,
            0.5 * (normal.median_length + bern.median_length),
            epsilon = 0.0
        );
    }

    #[test]
    fn mixture_alone_is_a_valid_request() {
        let mut spec = base_spec();
        spec.methods = vec![MethodKind::Mixture];
        let result = run_experiment(&spec).unwrap();
        assert_eq!(result.records.len(), 1);
        let rec = result.record(MethodKind::Mixture).unwrap();
        assert!(rec.mean_length > 0.0);
        assert!(rec.median_length > 0.0);
    }

    #[test]
    fn coverage_se_matches_closed_form() {
        let result = run_experiment(&base_spec()).unwrap();
        for rec in &result.records {
            let expected = (rec.coverage * (1.0 - rec.coverage) / 200.0).sqrt();
            assert_relative_eq!(rec.coverage_se, expected, max_relative = 1e-14);
            assert!((0.0..=1.0).contains(&rec.coverage));
        }
    }

    #[test]
    fn coverage_margin_matches_reported_values() {
        let (se, margin) = coverage_margin(0.95, 10_000).unwrap();
        assert_abs_diff_eq!(margin, 0.004, epsilon = 3e-4);
        assert_relative_eq!(se, (0.95_f64 * 0.05 / 1e4).sqrt(), max_relative = 1e-14);

        let (_, margin) = coverage_margin(0.5, 10_000).unwrap();
        assert_abs_diff_eq!(margin, 0.01, epsilon = 3e-4);

        assert_eq!(coverage_margin(0.0, 100).unwrap().0, 0.0);
        assert_eq!(coverage_margin(1.0, 100).unwrap().0, 0.0);
        assert!(coverage_margin(1.5, 100).is_err());
        assert!(coverage_margin(0.5, 0).is_err());
    }

    #[test]
    fn spec_validation_rejects_bad_inputs() {
        let mut s = base_spec();
        s.methods = vec![];
        assert!(s.validate().is_err());

        let mut s = base_spec();
        s.methods = vec![MethodKind::Bootstrap];
        assert!(matches!(s.validate(), Err(Error::UnsupportedMethod(_))));

        let mut s = base_spec();
        s.methods = vec![MethodKind::Normal, MethodKind::Normal];
        assert!(s.validate().is_err());

        let mut s = base_spec();
        s.n_x = 1;
        assert!(s.validate().is_err(), "normal interval needs n >= 2");

        let mut s = base_spec();
        s.methods = vec![MethodKind::Bernstein];
        s.n_x = 1;
        assert!(s.validate().is_ok(), "bernstein alone allows n_x = 1");

        let mut s = base_spec();
        s.mixture_weight = 1.5;
        assert!(s.validate().is_err());

        let mut s = base_spec();
        s.trials = 0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn derive_seed_is_stable_and_spread_out() {
        assert_eq!(derive_seed(7, 0), derive_seed(7, 0));
        assert_ne!(derive_seed(7, 0), derive_seed(7, 1));
        assert_ne!(derive_seed(7, 0), derive_seed(8, 0));
    }

    fn small_grid() -> GridSpec {
        GridSpec {
            mu_x: vec![5.0],
            mu_y: vec![5.0],
            theta_x: vec![0.25],
            theta_y: vec![0.25],
            n_x: vec![10, 20],
            n_y: vec![15],
            trials: 100,
            alpha: 0.05,
            master_seed: 31337,
            methods: vec![MethodKind::Normal, MethodKind::Bernstein, MethodKind::Mixture],
            mixture_weight: 0.5,
            c_a: 1.0,
            c_b: 1.0,
        }
    }

    #[test]
    fn grid_results_are_independent_of_parallelism() {
        let grid = small_grid();
        let sequential = run_grid(&grid, 1, |_| {}).unwrap();
        let parallel = run_grid(&grid, 4, |_| {}).unwrap();
        assert_eq!(sequential, parallel);
    }

    #[test]
    fn grid_callback_sees_results_in_grid_order() {
        let grid = small_grid();
        let mut seen = Vec::new();
        let results = run_grid(&grid, 4, |r| seen.push(r.spec.clone())).unwrap();
        assert_eq!(
            seen,
            results.iter().map(|r| r.spec.clone()).collect::<Vec<_>>()
        );
        assert_eq!(results.len(), 2);
        assert_eq!(results[0].spec.n_x, 10);
        assert_eq!(results[1].spec.n_x, 20);
        assert_ne!(results[0].spec.seed, results[1].spec.seed);
    }

    #[test]
    fn empty_grid_axis_is_rejected() {
        let mut grid = small_grid();
        grid.n_y = vec![];
        assert!(run_grid(&grid, 1, |_| {}).is_err());
    }

    #[test]
    fn full_grid_has_the_documented_shape() {
        let grid = GridSpec::full_grid(10_000, 1);
        assert_eq!(grid.len(), 2 * 2 * 5 * 5 * 23 * 23);
        assert_eq!(grid.n_x.len(), 23);
        assert_eq!(grid.n_x[0], 10);
        assert_eq!(grid.n_x[19], 200);
        assert_eq!(&grid.n_x[20..], &[250, 500, 1000]);
    }

    #[test]
    fn summarize_lengths_of_single_experiment_collapses() {
        let results = run_grid(
            &GridSpec {
                n_x: vec![20],
                n_y: vec![20],
                ..small_grid()
            },
            1,
            |_| {},
        )
        .unwrap();
        let rows = summarize_lengths(&results).unwrap();
        assert_eq!(rows.len(), 4, "three methods plus the difference row");
        for row in &rows {
            assert_eq!(row.min, row.median);
            assert_eq!(row.median, row.max);
            assert_eq!(row.q1, row.q3);
        }
    }

    #[test]
    fn summarize_lengths_mixture_and_difference_identities() {
        let results = run_grid(&small_grid(), 2, |_| {}).unwrap();
        let rows = summarize_lengths(&results).unwrap();
        let find = |label: &str| rows.iter().find(|r| r.label == label).unwrap();
        let bern = find("bernstein");
        let normal = find("normal");
        let mix = find("mixture");
        let diff = find("bernstein - normal");

        assert!(diff.min > 0.0, "bernstein must out-length normal everywhere");
        for (m, n, b) in [
            (mix.min, normal.min, bern.min),
            (mix.median, normal.median, bern.median),
            (mix.max, normal.max, bern.max),
        ] {
            assert_relative_eq!(m, 0.5 * (n + b), max_relative = 1e-12);
        }
    }

    #[test]
    fn summarize_lengths_rejects_empty_input() {
        assert!(summarize_lengths(&[]).is_err());
    }

    #[test]
    fn quantile_type7_matches_reference_values() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_type7(&v, 0.25), 1.75);
        assert_eq!(quantile_type7(&v, 0.5), 2.5);
        assert_eq!(quantile_type7(&v, 0.75), 3.25);
        assert_eq!(quantile_type7(&v, 0.0), 1.0);
        assert_eq!(quantile_type7(&v, 1.0), 4.0);

        let w = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        assert_eq!(quantile_type7(&w, 0.25), 4.0);
        assert_eq!(quantile_type7(&w, 0.5), 4.5);
        assert_eq!(quantile_type7(&w, 0.75), 5.5);

        assert_eq!(quantile_type7(&[5.0], 0.33), 5.0);
    }

    #[test]
    fn median_conventions() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(vec![7.0]), 7.0);
    }
}
