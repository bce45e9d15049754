//! Structural causal models, counterfactual treatment choice, and
//! exogenous-stability experiments.
//!
//! The crate is organized around a small set of building blocks:
//!
//! - [`scm`]: structural causal models with invertible mechanisms,
//!   observational sampling, interventions, abduction, and counterfactual /
//!   interventional sampling.
//! - [`distributions`]: empirical outcome distributions, exact step CDFs
//!   with rational weights, population variance, and Gaussian KDE.
//! - [`welfare`]: rank-dependent social welfare functionals evaluated
//!   exactly on step CDFs (Gini, mean, negative variance).
//! - [`policy`]: treatment rules in two paradigms — covariate decision sets
//!   optimized against population post-treatment distributions, and
//!   per-unit assignments optimized against the observed sample — under a
//!   treatment budget.
//! - [`forwardsim`]: a two-period simulation contrasting interventional and
//!   counterfactual predictions of post-treatment outcomes under varying
//!   exogenous stability and structure.
//! - [`kl`]: a k-nearest-neighbor Kullback–Leibler divergence estimator for
//!   one-dimensional samples.
//! - [`cli`]: the `cfchoice` command-line harness (`ewm-example`,
//!   `densities`, `sweep-kl`, `variance-table`).
//!
//! All randomized operations are deterministic functions of their inputs and
//! a `u64` seed: every (unit, noise) pair draws from its own seed-derived
//! substream, so results are reproducible regardless of evaluation order or
//! thread count. See the `examples/` directory for runnable walkthroughs of
//! each capability.

pub mod cli;
pub mod distributions;
pub mod forwardsim;
pub mod kl;
pub mod models;
pub mod policy;
pub mod rational;
pub mod scm;
pub(crate) mod substream;
pub mod welfare;
