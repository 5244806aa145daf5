//! Bounded Bernstein inequality machinery.
//!
//! For independent variables Z_1, …, Z_n bounded in (a, b) with variance
//! proxy σ², the bound is
//!
//! ```text
//! P(|Z̄ − E[Z̄]| > ε) <= 2·exp(−½ · nε² / (σ² + ε(b−a)/3))
//! ```
//!
//! Setting the right side equal to α and solving the resulting quadratic for
//! ε gives the half-width of a 1−α confidence interval; fixing ε instead and
//! reading the bound off directly gives the p-value of a two-sided test. The
//! relation is linear in log(α/2) once ε is fixed, so the two directions are
//! exact inverses of one another.
//!
//! A two-sample problem reduces to this one-sample bound through a signed
//! rescaling of the pooled data ([`two_sample_transform`]) whose mean is
//! exactly the difference of the two sample means.

use crate::distributions::SampleStats;
use crate::error::{Error, Result};

/// The (n, σ², a, b) tuple the bounded Bernstein inequality is evaluated at,
/// together with the scaling constants applied to the support bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernsteinContext {
    n: usize,
    sigma2: f64,
    a: f64,
    b: f64,
    c_a: f64,
    c_b: f64,
}

impl BernsteinContext {
    /// Builds a context from raw parts.
    ///
    /// Requires n >= 2, σ² >= 0, a < b, and both scaling constants at least 1.
    pub fn new(n: usize, sigma2: f64, a: f64, b: f64, c_a: f64, c_b: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InsufficientData { needed: 2, got: n });
        }
        if !sigma2.is_finite() || sigma2 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sigma2 must be finite and >= 0, got {sigma2}"
            )));
        }
        if !a.is_finite() || !b.is_finite() || a >= b {
            return Err(Error::InvalidParameter(format!(
                "support bounds must satisfy a < b, got a={a}, b={b}"
            )));
        }
        validate_scaling(c_a, c_b)?;
        Ok(Self {
            n,
            sigma2,
            a,
            b,
            c_a,
            c_b,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Width of the support, b − a.
    pub fn range(&self) -> f64 {
        self.b - self.a
    }

    pub fn c_a(&self) -> f64 {
        self.c_a
    }

    pub fn c_b(&self) -> f64 {
        self.c_b
    }
}

fn validate_scaling(c_a: f64, c_b: f64) -> Result<()> {
    if !c_a.is_finite() || c_a < 1.0 || !c_b.is_finite() || c_b < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "scaling constants must be at least 1, got c_a={c_a}, c_b={c_b}"
        )));
    }
    Ok(())
}

/// Signed rescaling of two pooled samples into one vector Z of length
/// n = n_x + n_y with Z̄ = X̄ − Ȳ exactly:
///
/// ```text
/// Z_i = (n/n_x)·X_i          for i in the X block,
/// Z_i = −(n/n_y)·Y_(i−n_x)   for i in the Y block.
/// ```
pub fn two_sample_transform(x: &[u64], y: &[u64]) -> Result<Vec<f64>> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = (x.len() + y.len()) as f64;
    let rx = n / x.len() as f64;
    let ry = n / y.len() as f64;
    let mut z = Vec::with_capacity(x.len() + y.len());
    z.extend(x.iter().map(|&v| rx * v as f64));
    z.extend(y.iter().map(|&v| -ry * v as f64));
    Ok(z)
}

/// Bernstein parameters for the transformed two-sample data, using plug-in
/// sample variances:
///
/// ```text
/// n  = n_x + n_y
/// σ² = (n/n_x)·s²_x + (n/n_y)·s²_y
/// a  = −c_a·(n/n_y)·max(Y)
/// b  =  c_b·(n/n_x)·max(X)
/// ```
///
/// Signals [`Error::DegenerateSupport`] when every observation in both
/// samples is zero, which collapses the support to a single point.
pub fn build_context(
    x_stats: &SampleStats,
    y_stats: &SampleStats,
    c_a: f64,
    c_b: f64,
) -> Result<BernsteinContext> {
    validate_scaling(c_a, c_b)?;
    if x_stats.max == 0 && y_stats.max == 0 {
        return Err(Error::DegenerateSupport);
    }
    let n = x_stats.n + y_stats.n;
    let nf = n as f64;
    let rx = nf / x_stats.n as f64;
    let ry = nf / y_stats.n as f64;
    let sigma2 = rx * x_stats.variance + ry * y_stats.variance;
    let a = -c_a * ry * y_stats.max as f64;
    let b = c_b * rx * x_stats.max as f64;
    BernsteinContext::new(n, sigma2, a, b, c_a, c_b)
}

/// Bernstein parameters for a single non-negative sample: n observations
/// bounded in (0, c_b·max) with σ² the plug-in sample variance.
pub fn one_sample_context(stats: &SampleStats, c_b: f64) -> Result<BernsteinContext> {
    validate_scaling(1.0, c_b)?;
    if stats.n < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: stats.n,
        });
    }
    if stats.max == 0 {
        return Err(Error::DegenerateSupport);
    }
    BernsteinContext::new(
        stats.n,
        stats.variance,
        0.0,
        c_b * stats.max as f64,
        1.0,
        c_b,
    )
}

/// Half-width ε of the 1−α confidence interval: the positive root of the
/// quadratic obtained by setting the tail bound equal to α,
///
/// ```text
/// ε = [ −(2/3)(b−a)·L + sqrt((4/9)(b−a)²L² − 8nσ²L) ] / (2n),  L = log(α/2).
/// ```
///
/// With L < 0 the discriminant dominates the linear term, so this branch is
/// the unique positive solution; the "−" branch is non-positive.
pub fn epsilon_for_alpha(ctx: &BernsteinContext, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0,1), got {alpha}"
        )));
    }
    let n = ctx.n as f64;
    let range = ctx.range();
    let log_half_alpha = (alpha / 2.0).ln();
    let linear = -(2.0 / 3.0) * range * log_half_alpha;
    let discriminant = (4.0 / 9.0) * range * range * log_half_alpha * log_half_alpha
        - 8.0 * n * ctx.sigma2 * log_half_alpha;
    Ok((linear + discriminant.sqrt()) / (2.0 * n))
}

/// Tail probability bound at deviation ε, capped at 1:
///
/// ```text
/// α(ε) = min(1, 2·exp(−½ · nε² / (σ² + ε(b−a)/3)))
/// ```
///
/// Exact inverse of [`epsilon_for_alpha`] wherever the cap is inactive.
pub fn alpha_for_epsilon(ctx: &BernsteinContext, epsilon: f64) -> Result<f64> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be finite and > 0, got {epsilon}"
        )));
    }
    let n = ctx.n as f64;
    let denom = ctx.sigma2 + epsilon * ctx.range() / 3.0;
    let bound = 2.0 * (-0.5 * n * epsilon * epsilon / denom).exp();
    Ok(bound.min(1.0))
}
