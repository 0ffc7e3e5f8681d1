//! Uniform concentration inequalities for the log-likelihood of categorical
//! variables around the negative entropy.
//!
//! The crate evaluates every closed-form tail bound for
//! `(1/n) Σ_i (log p_{i,Z_i} − Σ_k p_ik log p_ik)`, verifies the underlying
//! moment-generating-function and variance maximizations with brute-force
//! oracles, estimates the tails by Monte Carlo, and applies the bounds to
//! fixed-length source coding.
//!
//! Modules:
//! - [`simplex`]: distributions, entropy, log-likelihood statistics, sampling.
//! - [`bounds`]: closed-form tail bounds and their baselines.
//! - [`mgf`]: exact MGF, the two simplex maximization lemmas, oracles.
//! - [`montecarlo`]: tail estimation, the rate-optimality construction, the
//!   grouped (misspecified) model.
//! - [`coding`]: typical sets, essential bit content, block codes, error
//!   exponents.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod coding;
pub mod error;
pub mod mgf;
pub mod montecarlo;
pub mod rng;
pub mod simplex;
pub mod special;

pub use error::{Error, Result};
pub use simplex::{
    entropy, loglik_variance, LogBase, LogLikStats, OneHotSample, ParamSet, ProbVector,
};
