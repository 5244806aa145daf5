//! Confidence intervals and hypothesis tests for the difference of means of
//! two independent, highly dispersed negative binomial samples, plus a Monte
//! Carlo harness that estimates coverage probabilities and interval lengths
//! over parameter grids.
//!
//! The crate is organized around four layers:
//!
//! * [`distributions`] — the NB(μ, θ) core: mass function, moments,
//!   gamma–Poisson sampling, and moment-based dispersion estimation;
//! * [`concentration`] — the bounded Bernstein inequality, its ε ↔ α
//!   inversion pair, and the two-sample data transformation that reduces a
//!   mean-difference problem to a one-sample bound;
//! * [`inference`] — Normal, Bernstein, and Mixture confidence intervals and
//!   tests for μ_x − μ_y, the method-selection guidelines, and the 3×3
//!   variance table for the parametric approximations;
//! * [`simulation`] — deterministic, parallelizable coverage experiments.

pub mod concentration;
pub mod distributions;
pub mod error;
pub mod inference;
pub mod simulation;
pub mod special;

pub use error::{Error, Result};
