//! Negative binomial distribution core: mass function, moments, random
//! sampling, and moment-based dispersion estimation.
//!
//! The mean/dispersion parameterization NB(μ, θ) is used throughout: the mean
//! is μ and the variance is μ + μ²/θ, so the variance strictly exceeds the
//! mean for every finite θ and the Poisson model is recovered as θ → ∞.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson};

use crate::error::{Error, Result};
use crate::special::ln_gamma;

/// Mean/dispersion parameterization of a negative binomial population.
///
/// Under the classical (r, p) parameterization, r equals θ and the success
/// probability is p = θ/(θ + μ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegBinParams {
    mu: f64,
    theta: f64,
}

impl NegBinParams {
    pub fn new(mu: f64, theta: f64) -> Result<Self> {
        if !mu.is_finite() || mu <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "mu must be finite and > 0, got {mu}"
            )));
        }
        if !theta.is_finite() || theta <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "theta must be finite and > 0, got {theta}"
            )));
        }
        Ok(Self { mu, theta })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Success probability of the classical (r, p) parameterization; lies in (0, 1).
    pub fn success_prob(&self) -> f64 {
        self.theta / (self.theta + self.mu)
    }

    /// Number-of-successes parameter of the classical parameterization; equals θ.
    pub fn r(&self) -> f64 {
        self.theta
    }
}

/// Log probability mass at `k`.
///
/// Evaluated entirely through log-gamma differences so that tiny dispersions
/// (θ = 0.01) with counts in the thousands stay finite; the direct gamma
/// ratios overflow long before that.
pub fn nb_ln_pmf(k: u64, params: NegBinParams) -> f64 {
    let kf = k as f64;
    let NegBinParams { mu, theta } = params;
    ln_gamma(theta + kf) - ln_gamma(theta) - ln_gamma(kf + 1.0)
        - kf * (theta / mu).ln_1p()
        - theta * (mu / theta).ln_1p()
}

/// Probability mass P(X = k) for X ~ NB(μ, θ).
pub fn nb_pmf(k: u64, params: NegBinParams) -> f64 {
    nb_ln_pmf(k, params).exp()
}

/// Population mean and variance: (μ, μ + μ²/θ).
pub fn nb_moments(params: NegBinParams) -> (f64, f64) {
    let NegBinParams { mu, theta } = params;
    (mu, mu + mu * mu / theta)
}

/// Draws NB(μ, θ) variates as a gamma–Poisson mixture: λ ~ Gamma(shape = θ,
/// scale = μ/θ), then K ~ Poisson(λ).
///
/// The mixture form is the analytic continuation of the distribution to real
/// θ, which matters because every dispersion in the study range is far from
/// an integer. The gamma sampler must remain valid for shapes well below 1;
/// `rand_distr` uses the Marsaglia–Tsang method with the small-shape boost,
/// which is safe down past θ = 0.01.
#[derive(Debug, Clone, Copy)]
pub struct NegBinSampler {
    mixing: Gamma<f64>,
}

impl NegBinSampler {
    pub fn new(params: NegBinParams) -> Self {
        let mixing = Gamma::new(params.theta, params.mu / params.theta)
            .expect("NegBinParams guarantees positive shape and scale");
        Self { mixing }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let lambda = self.mixing.sample(rng);
        // At tiny shapes the gamma draw can underflow to zero; the count is
        // then zero with probability one.
        if lambda <= 0.0 {
            return 0;
        }
        let k: f64 = Poisson::new(lambda)
            .expect("lambda is positive and finite")
            .sample(rng);
        k as u64
    }

    pub fn sample_vec<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<u64> {
        (0..count).map(|_| self.sample(rng)).collect()
    }
}

/// Draws `count` i.i.d. NB(μ, θ) variates from a stream seeded with `seed`.
///
/// The output is a pure function of `(params, count, seed)`.
pub fn nb_sample(params: NegBinParams, count: usize, seed: u64) -> Result<Vec<u64>> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(NegBinSampler::new(params).sample_vec(count, &mut rng))
}

/// Sufficient summary of one observed count sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    pub n: usize,
    pub mean: f64,
    /// Unbiased sample variance (divisor n − 1); 0 by convention when n = 1.
    pub variance: f64,
    pub max: u64,
    /// Set when n = 1, where the variance is 0 only by convention.
    pub variance_degenerate: bool,
}

impl SampleStats {
    /// Builds stats from already-computed summaries, for callers that do not
    /// hold the raw sample.
    pub fn new(n: usize, mean: f64, variance: f64, max: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySample);
        }
        if !mean.is_finite() || !variance.is_finite() || variance < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "mean/variance must be finite with variance >= 0, got {mean}/{variance}"
            )));
        }
        if n == 1 && variance != 0.0 {
            return Err(Error::InvalidParameter(
                "variance must be 0 when n = 1".into(),
            ));
        }
        Ok(Self {
            n,
            mean,
            variance,
            max,
            variance_degenerate: n == 1,
        })
    }
}

/// Computes n, mean, unbiased variance, and maximum of a count sample.
pub fn summarize(sample: &[u64]) -> Result<SampleStats> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = sample.len();
    let mean = sample.iter().map(|&x| x as f64).sum::<f64>() / n as f64;
    let variance = if n == 1 {
        0.0
    } else {
        sample
            .iter()
            .map(|&x| {
                let d = x as f64 - mean;
                d * d
            })
            .sum::<f64>()
            / (n - 1) as f64
    };
    let max = *sample.iter().max().expect("non-empty");
    Ok(SampleStats {
        n,
        mean,
        variance,
        max,
        variance_degenerate: n == 1,
    })
}

/// Method-of-moments dispersion estimate θ̂ = x̄² / (s² − x̄), the solution of
/// s² = x̄ + x̄²/θ.
///
/// Fails with [`Error::DispersionInestimable`] when the sample variance does
/// not exceed the sample mean, where the matched θ would be non-positive.
pub fn mom_dispersion(stats: &SampleStats) -> Result<f64> {
    if stats.n < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: stats.n,
        });
    }
    if stats.variance <= stats.mean || stats.mean <= 0.0 {
        return Err(Error::DispersionInestimable {
            mean: stats.mean,
            variance: stats.variance,
        });
    }
    Ok(stats.mean * stats.mean / (stats.variance - stats.mean))
}
