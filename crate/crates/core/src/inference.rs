//! Confidence intervals and hypothesis tests for the mean difference
//! μ_x − μ_y (and the one-sample mean μ), together with the method-selection
//! guidelines and the 3×3 variance table used by the parametric Normal
//! approximation.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::concentration::{
    alpha_for_epsilon, build_context, epsilon_for_alpha, one_sample_context,
};
use crate::distributions::{summarize, NegBinParams, SampleStats};
use crate::error::{Error, Result};
use crate::special::{normal_cdf, normal_quantile, normal_two_sided_tail};

/// Inference method labels.
///
/// `Bootstrap` exists only as a label for reporting and selection tables;
/// no estimator is implemented behind it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodKind {
    Normal,
    Gamma,
    ChiSquare,
    Bernstein,
    Mixture,
    Bootstrap,
}

impl MethodKind {
    pub fn name(&self) -> &'static str {
        match self {
            MethodKind::Normal => "normal",
            MethodKind::Gamma => "gamma",
            MethodKind::ChiSquare => "chi-square",
            MethodKind::Bernstein => "bernstein",
            MethodKind::Mixture => "mixture",
            MethodKind::Bootstrap => "bootstrap",
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "normal" => Ok(MethodKind::Normal),
            "gamma" => Ok(MethodKind::Gamma),
            "chi-square" | "chi_square" | "chisquare" => Ok(MethodKind::ChiSquare),
            "bernstein" => Ok(MethodKind::Bernstein),
            "mixture" => Ok(MethodKind::Mixture),
            "bootstrap" => Ok(MethodKind::Bootstrap),
            other => Err(Error::UnsupportedMethod(other.to_string())),
        }
    }
}

/// A confidence interval with its level, method tag, and length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalEstimate {
    pub lower: f64,
    pub upper: f64,
    /// Confidence level 1 − α.
    pub level: f64,
    pub method: MethodKind,
    /// upper − lower.
    pub length: f64,
    /// Zero-width interval produced by degenerate statistics (all constant
    /// observations); the bound carries no information there.
    pub degenerate: bool,
}

impl IntervalEstimate {
    fn from_bounds(lower: f64, upper: f64, level: f64, method: MethodKind) -> Self {
        Self {
            lower,
            upper,
            level,
            method,
            length: upper - lower,
            degenerate: false,
        }
    }

    fn degenerate_at(center: f64, level: f64, method: MethodKind) -> Self {
        Self {
            lower: center,
            upper: center,
            level,
            method,
            length: 0.0,
            degenerate: true,
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

/// Outcome of a two-sided test of H0: μ_x − μ_y = w.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    /// The null value w.
    pub null_value: f64,
    /// X̄ − Ȳ − w.
    pub statistic: f64,
    /// Two-sided p-value in (0, 1].
    pub p_value: f64,
    pub method: MethodKind,
    pub alpha: f64,
    /// p_value < alpha.
    pub reject: bool,
}

/// Thresholds behind the one-sample method-selection guidelines.
///
/// The boundaries are heuristic; these defaults bracket the study range of
/// the simulation grids and every field is caller-configurable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectorThresholds {
    /// Sample sizes at or above this count as "large".
    pub n_large: usize,
    /// Dispersions at or above this count as "large".
    pub theta_large: f64,
    /// Relative tolerance for the μ ≈ 2nθ chi-square proximity check.
    pub chi_square_tolerance: f64,
}

impl Default for SelectorThresholds {
    fn default() -> Self {
        Self {
            n_large: 100,
            theta_large: 0.1,
            chi_square_tolerance: 0.1,
        }
    }
}

impl SelectorThresholds {
    fn validate(&self) -> Result<()> {
        if self.n_large == 0
            || !self.theta_large.is_finite()
            || self.theta_large <= 0.0
            || !self.chi_square_tolerance.is_finite()
            || self.chi_square_tolerance < 0.0
        {
            return Err(Error::InvalidParameter(format!(
                "invalid selector thresholds: {self:?}"
            )));
        }
        Ok(())
    }
}

/// One-sample method-selection guidelines:
///
/// | scenario          | preferred method |
/// |-------------------|------------------|
/// | μ ≈ 2nθ           | chi-square       |
/// | small n, small θ  | bounded Bernstein|
/// | large n, small θ  | gamma            |
/// | large n, large θ  | normal           |
/// | small n, large θ  | normal (default among the admissible choices) |
pub fn select_method(
    n: usize,
    mu: f64,
    theta: f64,
    thresholds: &SelectorThresholds,
) -> Result<MethodKind> {
    thresholds.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let params = NegBinParams::new(mu, theta)?;
    let (mu, theta) = (params.mu(), params.theta());

    let chi_square_gap = (mu - 2.0 * n as f64 * theta).abs() / mu;
    if chi_square_gap <= thresholds.chi_square_tolerance {
        return Ok(MethodKind::ChiSquare);
    }
    Ok(
        match (n >= thresholds.n_large, theta >= thresholds.theta_large) {
            (false, false) => MethodKind::Bernstein,
            (true, false) => MethodKind::Gamma,
            (true, true) => MethodKind::Normal,
            (false, true) => MethodKind::Normal,
        },
    )
}

/// One arm of the 3×3 variance table: the approximating distribution of a
/// sample mean together with the population parameters its variance
/// contribution is evaluated at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmSpec {
    pub kind: MethodKind,
    pub mu: f64,
    pub theta: f64,
    /// Per-observation population variance, used by the Normal entry (σ²/n).
    pub sigma2: f64,
    pub n: usize,
}

impl ArmSpec {
    pub fn new(kind: MethodKind, mu: f64, theta: f64, sigma2: f64, n: usize) -> Result<Self> {
        match kind {
            MethodKind::Normal | MethodKind::Gamma | MethodKind::ChiSquare => {}
            other => return Err(Error::UnsupportedMethod(other.name().to_string())),
        }
        NegBinParams::new(mu, theta)?;
        if !sigma2.is_finite() || sigma2 <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sigma2 must be finite and > 0, got {sigma2}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        Ok(Self {
            kind,
            mu,
            theta,
            sigma2,
            n,
        })
    }

    /// Arm with σ² filled in from the population identity σ² = μ + μ²/θ.
    pub fn from_population(kind: MethodKind, mu: f64, theta: f64, n: usize) -> Result<Self> {
        let params = NegBinParams::new(mu, theta)?;
        let (_, var) = crate::distributions::nb_moments(params);
        Self::new(kind, mu, theta, var, n)
    }

    /// This arm's contribution to Var(X̄ − Ȳ):
    /// Normal → σ²/n, Gamma → μ²/(nθ), ChiSquare → 2μ.
    fn variance_contribution(&self) -> f64 {
        let n = self.n as f64;
        match self.kind {
            MethodKind::Normal => self.sigma2 / n,
            MethodKind::Gamma => self.mu * self.mu / (n * self.theta),
            MethodKind::ChiSquare => 2.0 * self.mu,
            _ => unreachable!("constructor restricts the kind"),
        }
    }
}

/// Variance of X̄ − Ȳ when the two sample means are approximated by the given
/// pair of parametric distributions. Only the nine Normal/Gamma/ChiSquare
/// combinations are defined.
pub fn variance_of_difference(x: &ArmSpec, y: &ArmSpec) -> f64 {
    x.variance_contribution() + y.variance_contribution()
}

/// A resolved cell of the 3×3 variance table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceGridCell {
    pub kind_x: MethodKind,
    pub kind_y: MethodKind,
    /// Resolved Var(X̄ − Ȳ) for this cell.
    pub variance: f64,
}

impl VarianceGridCell {
    pub fn new(x: &ArmSpec, y: &ArmSpec) -> Self {
        Self {
            kind_x: x.kind,
            kind_y: y.kind,
            variance: variance_of_difference(x, y),
        }
    }
}

/// How the Normal interval estimates Var(X̄ − Ȳ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarianceMode {
    /// s²_x/n_x + s²_y/n_y — direct estimation, the default. Avoids any
    /// plug-in estimate of the hard-to-estimate dispersion parameters.
    Direct,
    /// A resolved cell of the parametric variance table, supplied by the
    /// caller; the library never auto-classifies samples into cells.
    Grid(VarianceGridCell),
}

fn validate_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0,1), got {alpha}"
        )));
    }
    Ok(())
}

/// Two-sample Normal interval X̄ − Ȳ ± z_{1−α/2}·√V.
///
/// A zero variance estimate (every observation constant in both samples)
/// yields a zero-width interval flagged degenerate rather than an error.
pub fn ci_normal_two_sample(
    x_stats: &SampleStats,
    y_stats: &SampleStats,
    alpha: f64,
    mode: &VarianceMode,
) -> Result<IntervalEstimate> {
    validate_alpha(alpha)?;
    for s in [x_stats, y_stats] {
        if s.n < 2 {
            return Err(Error::InsufficientData { needed: 2, got: s.n });
        }
    }
    let variance = match mode {
        VarianceMode::Direct => {
            x_stats.variance / x_stats.n as f64 + y_stats.variance / y_stats.n as f64
        }
        VarianceMode::Grid(cell) => {
            if !cell.variance.is_finite() || cell.variance < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "grid cell variance must be finite and >= 0, got {}",
                    cell.variance
                )));
            }
            cell.variance
        }
    };
    let center = x_stats.mean - y_stats.mean;
    let level = 1.0 - alpha;
    if variance == 0.0 {
        return Ok(IntervalEstimate::degenerate_at(
            center,
            level,
            MethodKind::Normal,
        ));
    }
    let half_width = normal_quantile(1.0 - alpha / 2.0)? * variance.sqrt();
    Ok(IntervalEstimate::from_bounds(
        center - half_width,
        center + half_width,
        level,
        MethodKind::Normal,
    ))
}

/// Two-sample Bernstein interval X̄ − Ȳ ± ε built from precomputed summaries.
///
/// When both samples are entirely zero the support collapses and the bound is
/// vacuous; the result is a zero-width interval at 0 flagged degenerate.
pub fn ci_bernstein_from_stats(
    x_stats: &SampleStats,
    y_stats: &SampleStats,
    alpha: f64,
    c_a: f64,
    c_b: f64,
) -> Result<IntervalEstimate> {
    validate_alpha(alpha)?;
    let center = x_stats.mean - y_stats.mean;
    let level = 1.0 - alpha;
    match build_context(x_stats, y_stats, c_a, c_b) {
        Ok(ctx) => {
            let eps = epsilon_for_alpha(&ctx, alpha)?;
            Ok(IntervalEstimate::from_bounds(
                center - eps,
                center + eps,
                level,
                MethodKind::Bernstein,
            ))
        }
        Err(Error::DegenerateSupport) => Ok(IntervalEstimate::degenerate_at(
            center,
            level,
            MethodKind::Bernstein,
        )),
        Err(e) => Err(e),
    }
}

/// Two-sample Bernstein interval from raw count samples.
pub fn ci_bernstein_two_sample(
    x: &[u64],
    y: &[u64],
    alpha: f64,
    c_a: f64,
    c_b: f64,
) -> Result<IntervalEstimate> {
    let x_stats = summarize(x)?;
    let y_stats = summarize(y)?;
    ci_bernstein_from_stats(&x_stats, &y_stats, alpha, c_a, c_b)
}

/// Endpoint-wise convex combination of a Normal and a Bernstein interval:
///
/// ```text
/// L = w·L_normal + (1−w)·L_bernstein,   U likewise,   w in [0, 1].
/// ```
pub fn ci_mixture(
    normal_ci: &IntervalEstimate,
    bernstein_ci: &IntervalEstimate,
    w: f64,
) -> Result<IntervalEstimate> {
    if !(0.0..=1.0).contains(&w) || !w.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "mixture weight must lie in [0,1], got {w}"
        )));
    }
    if normal_ci.level != bernstein_ci.level {
        return Err(Error::MismatchedLevels(normal_ci.level, bernstein_ci.level));
    }
    let lower = w * normal_ci.lower + (1.0 - w) * bernstein_ci.lower;
    let upper = w * normal_ci.upper + (1.0 - w) * bernstein_ci.upper;
    let mut out = IntervalEstimate::from_bounds(lower, upper, normal_ci.level, MethodKind::Mixture);
    out.degenerate = normal_ci.degenerate && bernstein_ci.degenerate;
    Ok(out)
}

/// Two-sided test of H0: μ_x − μ_y = w by the Normal or Bernstein method.
///
/// Bernstein reads the tail bound at ε = |X̄ − Ȳ − w| (the two-sided
/// deviation), capping the p-value at 1 when the statistic is exactly zero;
/// Normal uses the standard z statistic with direct variance estimation.
pub fn test_mean_difference(
    x: &[u64],
    y: &[u64],
    null_value: f64,
    method: MethodKind,
    alpha: f64,
    c_a: f64,
    c_b: f64,
) -> Result<TestResult> {
    validate_alpha(alpha)?;
    let x_stats = summarize(x)?;
    let y_stats = summarize(y)?;
    let statistic = x_stats.mean - y_stats.mean - null_value;
    let p_value = match method {
        MethodKind::Normal => {
            for s in [&x_stats, &y_stats] {
                if s.n < 2 {
                    return Err(Error::InsufficientData { needed: 2, got: s.n });
                }
            }
            let variance =
                x_stats.variance / x_stats.n as f64 + y_stats.variance / y_stats.n as f64;
            if variance == 0.0 {
                return Err(Error::DegenerateStatistics(
                    "both sample variances are zero".into(),
                ));
            }
            normal_two_sided_tail(statistic / variance.sqrt())
        }
        MethodKind::Bernstein => {
            let ctx = build_context(&x_stats, &y_stats, c_a, c_b)?;
            let eps = statistic.abs();
            if eps == 0.0 {
                1.0
            } else {
                alpha_for_epsilon(&ctx, eps)?
            }
        }
        other => return Err(Error::UnsupportedMethod(other.name().to_string())),
    };
    Ok(TestResult {
        null_value,
        statistic,
        p_value,
        method,
        alpha,
        reject: p_value < alpha,
    })
}

/// One-sample Normal interval X̄ ± z_{1−α/2}·s/√n.
pub fn ci_normal_one_sample(stats: &SampleStats, alpha: f64) -> Result<IntervalEstimate> {
    validate_alpha(alpha)?;
    if stats.n < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: stats.n,
        });
    }
    let level = 1.0 - alpha;
    if stats.variance == 0.0 {
        return Ok(IntervalEstimate::degenerate_at(
            stats.mean,
            level,
            MethodKind::Normal,
        ));
    }
    let half_width = normal_quantile(1.0 - alpha / 2.0)? * (stats.variance / stats.n as f64).sqrt();
    Ok(IntervalEstimate::from_bounds(
        stats.mean - half_width,
        stats.mean + half_width,
        level,
        MethodKind::Normal,
    ))
}

/// One-sample Bernstein interval X̄ ± ε with support bounds (0, c_b·max).
pub fn ci_bernstein_one_sample(sample: &[u64], alpha: f64, c_b: f64) -> Result<IntervalEstimate> {
    validate_alpha(alpha)?;
    let stats = summarize(sample)?;
    let level = 1.0 - alpha;
    match one_sample_context(&stats, c_b) {
        Ok(ctx) => {
            let eps = epsilon_for_alpha(&ctx, alpha)?;
            Ok(IntervalEstimate::from_bounds(
                stats.mean - eps,
                stats.mean + eps,
                level,
                MethodKind::Bernstein,
            ))
        }
        Err(Error::DegenerateSupport) => Ok(IntervalEstimate::degenerate_at(
            stats.mean,
            level,
            MethodKind::Bernstein,
        )),
        Err(e) => Err(e),
    }
}

/// Gamma approximation to the distribution of a sample mean:
/// X̄ ≈ Gamma(shape = nθ, rate = nθ/μ), so the implied mean is μ and the
/// implied variance is μ²/(nθ).
pub fn gamma_approx_params(mu: f64, theta: f64, n: usize) -> Result<(f64, f64)> {
    NegBinParams::new(mu, theta)?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let shape = n as f64 * theta;
    Ok((shape, shape / mu))
}

/// Kolmogorov–Smirnov distance between Monte Carlo draws of the difference of
/// the two gamma-approximated sample means and the Normal limit
/// N(μ_x − μ_y, μ²_x/(n_xθ_x) + μ²_y/(n_yθ_y)).
///
/// Quantifies how much the second-order cumulant truncation behind the Normal
/// approximation loses at a given pair of gamma shapes; the distance shrinks
/// as the shapes n·θ grow.
pub fn normal_approx_divergence(
    params_x: NegBinParams,
    params_y: NegBinParams,
    n_x: usize,
    n_y: usize,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if trials < 1000 {
        return Err(Error::InvalidParameter(format!(
            "need at least 1000 trials for a stable distance, got {trials}"
        )));
    }
    let (shape_x, rate_x) = gamma_approx_params(params_x.mu(), params_x.theta(), n_x)?;
    let (shape_y, rate_y) = gamma_approx_params(params_y.mu(), params_y.theta(), n_y)?;
    let gx = Gamma::new(shape_x, 1.0 / rate_x)
        .map_err(|e| Error::InvalidParameter(format!("gamma x: {e}")))?;
    let gy = Gamma::new(shape_y, 1.0 / rate_y)
        .map_err(|e| Error::InvalidParameter(format!("gamma y: {e}")))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws: Vec<f64> = (0..trials)
        .map(|_| gx.sample(&mut rng) - gy.sample(&mut rng))
        .collect();
    draws.sort_unstable_by(f64::total_cmp);

    let mean = params_x.mu() - params_y.mu();
    let var = params_x.mu() * params_x.mu() / (n_x as f64 * params_x.theta())
        + params_y.mu() * params_y.mu() / (n_y as f64 * params_y.theta());
    let sd = var.sqrt();
    Ok(ks_distance_sorted(&draws, |v| normal_cdf((v - mean) / sd)))
}

/// One-sample KS statistic of an ascending sample against a reference CDF.
fn ks_distance_sorted<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        d = d.max(above.max(below));
    }
    d
}
