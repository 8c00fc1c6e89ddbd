//! Seeded Monte Carlo checks of the over/undershoot bounds, the two-point
//! lower bound and the smoothness connection.
//!
//! Replicate `r` of an experiment always draws its noise from the stream
//! keyed by `(master_seed, block, r)`, and per-replicate results are reduced
//! in replicate order, so a report is a pure function of its inputs no
//! matter how rayon schedules the work.

mod bounds;
mod lower_bound;
mod smoothness;

pub use bounds::{mc_overshoot, mc_two_sided, mc_undershoot, TwoSidedCase};
pub use lower_bound::{lower_bound_experiment, lower_bound_floor, LowerBoundReport};
pub use smoothness::{
    smoothness_estimate, smoothness_sweep, SmoothnessReport, SmoothnessRow, SweepSettings,
};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::posterior::{map_dimension_from, pmf, region_mass, PosteriorOverD, PriorParams};
use crate::rng::ReplicateSeed;
use crate::scalar::Real;
use crate::signals::{simulate, Signal};

/// Multiplier on the standard error in every Monte Carlo comparison.
pub const SIGMA_TOLERANCE: f64 = 3.0;

/// Smallest replicate count for which standard errors are reported.
pub const MIN_REPLICATES_WITH_SE: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McConfig {
    pub replicates: usize,
    /// Number of observations `n` per replicate.
    pub data_len: usize,
    pub master_seed: u64,
    /// Offsets at which the bounds are evaluated.
    pub offsets: Vec<usize>,
}

impl McConfig {
    pub(crate) fn validate_for_report(&self) -> Result<()> {
        if self.replicates < MIN_REPLICATES_WITH_SE {
            return Err(Error::Config(format!(
                "replicates must be at least {MIN_REPLICATES_WITH_SE}, got {}",
                self.replicates
            )));
        }
        if self.data_len == 0 {
            return Err(Error::Config("data length must be at least 1".into()));
        }
        if self.offsets.is_empty() || self.offsets.contains(&0) {
            return Err(Error::Config("offsets must be a nonempty list of positive integers".into()));
        }
        Ok(())
    }
}

/// Which bound a report checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Overshoot,
    Undershoot,
    TwoSidedTail,
    TwoSidedHead,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Overshoot => "overshoot",
            BoundKind::Undershoot => "undershoot",
            BoundKind::TwoSidedTail => "two-sided-i",
            BoundKind::TwoSidedHead => "two-sided-ii",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow<T> {
    pub offset: usize,
    /// Allowed undershoot `n₁` (absent for the overshoot bound).
    pub below: Option<usize>,
    /// Allowed overshoot `n₂` (absent for the undershoot bound).
    pub above: Option<usize>,
    /// Mean over replicates of the posterior mass of the event.
    pub posterior_mass: T,
    pub posterior_se: T,
    /// Frequency of the event for the posterior mode `d̂`.
    pub dhat_freq: T,
    pub dhat_se: T,
    pub theory_bound: T,
    /// The bound is at least one and carries no information.
    pub vacuous: bool,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport<T> {
    pub kind: BoundKind,
    pub d_tau: usize,
    /// Overshoot exponent `α`, when the bound has one.
    pub alpha: Option<T>,
    /// Undershoot exponent `β`, when the bound has one.
    pub beta: Option<T>,
    /// Descriptive key/value pairs (signal, ε, τ, κ, ϰ, A, ...).
    pub metadata: Vec<(String, String)>,
    pub rows: Vec<ReportRow<T>>,
}

impl<T: Real> ExperimentReport<T> {
    /// Every informative row holds.
    pub fn all_satisfied(&self) -> bool {
        self.rows.iter().all(|r| r.vacuous || r.satisfied)
    }

    pub fn informative_rows(&self) -> usize {
        self.rows.iter().filter(|r| !r.vacuous).count()
    }
}

/// Set of dimensions whose probability a row measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Event {
    AtLeast(usize),
    /// `D ≤ k`; `None` is the empty event (`k < 1`).
    AtMost(Option<usize>),
    /// `D ∉ [lo, hi]` with `lo` possibly below one.
    Outside { lo: Option<usize>, hi: usize },
}

impl Event {
    pub(crate) fn mass<T: Real>(self, post: &PosteriorOverD<T>) -> T {
        match self {
            Event::AtLeast(k) => region_mass(post, k, None),
            Event::AtMost(None) => T::zero(),
            Event::AtMost(Some(k)) => region_mass(post, 1, Some(k)),
            Event::Outside { lo, hi } => {
                let below = match lo {
                    Some(lo) if lo > 1 => region_mass(post, 1, Some(lo - 1)),
                    _ => T::zero(),
                };
                below + region_mass(post, hi + 1, None)
            }
        }
    }

    pub(crate) fn contains(self, d: usize) -> bool {
        match self {
            Event::AtLeast(k) => d >= k,
            Event::AtMost(k) => k.is_some_and(|k| d <= k),
            Event::Outside { lo, hi } => d > hi || lo.is_some_and(|lo| d < lo),
        }
    }
}

/// Per-event averages over the replicates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct EventEstimate<T> {
    pub mass: T,
    pub mass_se: T,
    pub freq: T,
    pub freq_se: T,
}

pub(crate) fn mean_and_se<T: Real>(values: &[T]) -> (T, T) {
    let r = T::from_count(values.len());
    let mean = values.iter().copied().sum::<T>() / r;
    if values.len() < 2 {
        return (mean, T::zero());
    }
    let ss: T = values.iter().map(|&v| (v - mean) * (v - mean)).sum();
    let sd = (ss / (r - T::one())).sqrt();
    (mean, sd / r.sqrt())
}

pub(crate) fn frequency_and_se<T: Real>(hits: usize, total: usize) -> (T, T) {
    let r = T::from_count(total);
    let p = T::from_count(hits) / r;
    (p, (p * (T::one() - p) / r).sqrt())
}

/// Simulates `replicates` datasets from `theta` and estimates, for each
/// event, the mean posterior mass and the frequency of `d̂` in it.
pub(crate) fn estimate_events<T: Real>(
    theta: &Signal<T>,
    prior: &PriorParams<T>,
    data_len: usize,
    replicates: usize,
    master_seed: u64,
    block: u32,
    events: &[Event],
) -> Result<Vec<EventEstimate<T>>> {
    let per_replicate: Vec<(Vec<T>, usize)> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let seed = ReplicateSeed::blocked(master_seed, block, replicate_id(r)?);
            let x = simulate(theta, prior.epsilon(), data_len, seed)?;
            let post = pmf(&x, prior)?;
            let dhat = map_dimension_from(&post);
            Ok((events.iter().map(|e| e.mass(&post)).collect(), dhat))
        })
        .collect::<Result<_>>()?;

    Ok(events
        .iter()
        .enumerate()
        .map(|(k, event)| {
            let masses: Vec<T> = per_replicate.iter().map(|(m, _)| m[k]).collect();
            let hits = per_replicate.iter().filter(|(_, d)| event.contains(*d)).count();
            let (mass, mass_se) = mean_and_se(&masses);
            let (freq, freq_se) = frequency_and_se(hits, replicates);
            EventEstimate {
                mass,
                mass_se,
                freq,
                freq_se,
            }
        })
        .collect())
}

pub(crate) fn replicate_id(r: usize) -> Result<u32> {
    u32::try_from(r).map_err(|_| Error::Config(format!("replicate index {r} exceeds u32")))
}

/// Checks that the data never reach past a signal whose tail is unknown.
pub(crate) fn check_data_len<T: Real>(theta: &Signal<T>, data_len: usize) -> Result<()> {
    if theta.tail_energy() > T::zero() && data_len > theta.len() {
        return Err(Error::Config(format!(
            "data length {data_len} exceeds the {} materialized coefficients of a signal with nonzero tail energy",
            theta.len()
        )));
    }
    Ok(())
}

pub(crate) fn row_from<T: Real>(
    offset: usize,
    below: Option<usize>,
    above: Option<usize>,
    est: EventEstimate<T>,
    theory_bound: T,
) -> ReportRow<T> {
    let k = T::lit(SIGMA_TOLERANCE);
    let satisfied =
        est.mass <= theory_bound + k * est.mass_se && est.freq <= theory_bound + k * est.freq_se;
    ReportRow {
        offset,
        below,
        above,
        posterior_mass: est.mass,
        posterior_se: est.mass_se,
        dhat_freq: est.freq,
        dhat_se: est.freq_se,
        theory_bound,
        vacuous: theory_bound >= T::one(),
        satisfied,
    }
}

/// `e^{−rate·n} / rate`.
pub(crate) fn envelope<T: Real>(rate: T, n: usize) -> T {
    (-rate * T::from_count(n)).exp() / rate
}
