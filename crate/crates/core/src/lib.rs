//! Local effective-dimension inference in the Gaussian sequence model
//! `X_i = θ_i + ε ξ_i`.
//!
//! The crate computes the oracle τ-dimension of a signal, the empirical-Bayes
//! posterior over the dimension together with its mode, the Chernoff rate
//! functions bounding over- and undershoot of that posterior, and runs
//! seeded Monte Carlo experiments checking those bounds.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`.

// `!(x > y)` guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod format;
pub mod oracle;
pub mod posterior;
pub mod rate;
pub mod rng;
mod scalar;
pub mod signals;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Signal64 = signals::Signal<f64>;
pub type Signal32 = signals::Signal<f32>;
pub type NoiseLevel64 = signals::NoiseLevel<f64>;
pub type Observation64 = signals::Observation<f64>;
pub type PriorParams64 = posterior::PriorParams<f64>;
pub type PriorParams32 = posterior::PriorParams<f32>;
pub type PosteriorOverD64 = posterior::PosteriorOverD<f64>;
pub type OracleResult64 = oracle::OracleResult<f64>;
pub type RateParams64 = rate::RateParams<f64>;
pub type RateEvaluation64 = rate::RateEvaluation<f64>;
pub type ExperimentReport64 = experiments::ExperimentReport<f64>;
pub type SmoothnessReport64 = experiments::SmoothnessReport<f64>;
