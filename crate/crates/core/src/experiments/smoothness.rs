use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::oracle::effective_dimension;
use crate::posterior::{map_dimension, PriorParams};
use crate::rng::ReplicateSeed;
use crate::scalar::Real;
use crate::signals::{self_similar_signal, simulate, NoiseLevel, SmoothnessClassParams};

use super::{replicate_id, McConfig};

/// `ŝ = ½(ln ε^{−2} / ln d̂ − 1)`.
pub fn smoothness_estimate<T: Real>(dhat: usize, eps: NoiseLevel<T>) -> Result<T> {
    if dhat < 2 {
        return Err(Error::Domain(format!("smoothness estimate needs dhat >= 2, got {dhat}")));
    }
    if !(eps.get() < T::one()) {
        return Err(Error::Domain(format!("smoothness estimate needs eps < 1, got {}", eps.get())));
    }
    let half = T::lit(0.5);
    Ok(half * (-(eps.variance().ln()) / T::from_count(dhat).ln() - T::one()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings<T> {
    pub class: SmoothnessClassParams<T>,
    pub tau: T,
    /// Strictly decreasing noise levels.
    pub eps_grid: Vec<T>,
    /// `c < 1` in the event `d̂ ∉ [c·d_τ, C·d_τ]`.
    pub lower_factor: T,
    /// `C > 1` in the same event.
    pub upper_factor: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessRow<T> {
    pub eps: T,
    pub d_tau: usize,
    /// `d_τ·(τε^{−2})^{−1/(2s+1)}`.
    pub band: T,
    pub median_dhat: T,
    /// Median of the defined `ŝ` values; NaN when none is defined.
    pub median_s_hat: T,
    /// Median of `|ŝ − s|`, with undefined `ŝ` counted as `+∞`.
    pub median_abs_err: T,
    /// `median_abs_err · ln ε^{−2}`.
    pub scaled_err: T,
    /// Frequency of `d̂ ∉ [c·d_τ, C·d_τ]`.
    pub outside_freq: T,
    /// Replicates with `d̂ = 1`.
    pub undefined: usize,
    /// `c0·ε^{−2/(2s+1)}`, the class lower value for `d_τ`.
    pub bracket_lo: T,
    /// `c(s)·Q^{1/(2s+1)}·(τε²)^{−1/(2s+1)}`, the class upper value for `d_τ`.
    pub bracket_hi: T,
}

impl<T: Real> SmoothnessRow<T> {
    pub fn d_tau_in_bracket(&self) -> bool {
        let d = T::from_count(self.d_tau);
        self.bracket_lo <= d && d <= self.bracket_hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessReport<T> {
    pub s: T,
    pub tau: T,
    pub lower_factor: T,
    pub upper_factor: T,
    pub replicates: usize,
    pub data_len: usize,
    pub rows: Vec<SmoothnessRow<T>>,
    /// `d_τ` never decreases as `ε` decreases.
    pub monotone_dtau: bool,
    /// Median `|ŝ − s|` never increases as `ε` decreases.
    pub monotone_error: bool,
    /// max/min of the band column.
    pub band_ratio: T,
    pub note: &'static str,
}

/// Footer carried by every smoothness report.
pub const SMOOTHNESS_NOTE: &str = "the direction of the event in the two-sided probability \
bound for d-hat is ambiguous as displayed; only the consistency of s-hat at rate \
1/log(eps^-2) and the frequency of d-hat outside [c*d_tau, C*d_tau] are checked";

/// `c(s) = (2s)^{−2s/(2s+1)} + (2s)^{1/(2s+1)}`.
fn c_of_s<T: Real>(s: T) -> T {
    let two_s = T::lit(2.0) * s;
    let k = two_s + T::one();
    two_s.powf(-two_s / k) + two_s.powf(T::one() / k)
}

fn median<T: Real>(mut v: Vec<T>) -> T {
    if v.is_empty() {
        return T::nan();
    }
    v.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in median input"));
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) * T::lit(0.5)
    }
}

/// Runs the self-similar smoothness sweep.
///
/// The signal is `self_similar_signal(class, cfg.data_len)` and every replicate
/// observes `cfg.data_len` coordinates. Replicate `r` at grid point `g` draws
/// from stream block `g`.
pub fn smoothness_sweep<T: Real>(
    settings: &SweepSettings<T>,
    p: &PriorParams<T>,
    cfg: &McConfig,
) -> Result<SmoothnessReport<T>> {
    let SweepSettings {
        class,
        tau,
        eps_grid,
        lower_factor: c,
        upper_factor: big_c,
    } = settings;
    let (tau, c, big_c) = (*tau, *c, *big_c);
    let one = T::one();
    if !(tau > T::zero()) || !tau.is_finite() {
        return Err(Error::Config(format!("tau must be positive, got {tau}")));
    }
    if !(c > T::zero() && c < one) || !(big_c > one) || !big_c.is_finite() {
        return Err(Error::Config(format!("band factors need 0 < c < 1 < C, got c = {c}, C = {big_c}")));
    }
    if eps_grid.is_empty() {
        return Err(Error::Config("eps grid is empty".into()));
    }
    if eps_grid.iter().any(|&e| !(e > T::zero() && e < one)) {
        return Err(Error::Config("every eps in the grid must lie in (0, 1)".into()));
    }
    if eps_grid.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Config("eps grid must be strictly decreasing".into()));
    }
    if cfg.replicates == 0 {
        return Err(Error::Config("replicates must be at least 1".into()));
    }
    let theta = self_similar_signal(class, cfg.data_len)?;

    let s = class.s;
    let k = T::lit(2.0) * s + one;
    let cs = c_of_s(s);
    let c0 = (class.alpha / cs).powf(one / (T::lit(2.0) * s)) * (class.q / tau).powf(one / k);

    let mut rows = Vec::with_capacity(eps_grid.len());
    for (g, &e) in eps_grid.iter().enumerate() {
        let eps = NoiseLevel::new(e)?;
        let d_tau = effective_dimension(&theta, eps, tau)?.d_tau;
        let prior = p.with_epsilon(eps);
        let block = u32::try_from(g).map_err(|_| Error::Config("eps grid too long".into()))?;
        let dhats: Vec<usize> = (0..cfg.replicates)
            .into_par_iter()
            .map(|r| {
                let seed = ReplicateSeed::blocked(cfg.master_seed, block, replicate_id(r)?);
                let x = simulate(&theta, eps, cfg.data_len, seed)?;
                map_dimension(&x, &prior)
            })
            .collect::<Result<_>>()?;

        let s_hats: Vec<T> = dhats
            .iter()
            .filter(|&&d| d >= 2)
            .map(|&d| smoothness_estimate(d, eps))
            .collect::<Result<_>>()?;
        let undefined = dhats.len() - s_hats.len();
        let mut errs: Vec<T> = s_hats.iter().map(|&v| (v - s).abs()).collect();
        errs.extend(std::iter::repeat_n(T::infinity(), undefined));
        let median_abs_err = median(errs);
        let log_inv = -eps.variance().ln();
        let lo = c * T::from_count(d_tau);
        let hi = big_c * T::from_count(d_tau);
        let outside = dhats
            .iter()
            .filter(|&&d| {
                let d = T::from_count(d);
                d < lo || d > hi
            })
            .count();

        rows.push(SmoothnessRow {
            eps: e,
            d_tau,
            band: T::from_count(d_tau) * (tau / eps.variance()).powf(-one / k),
            median_dhat: median(dhats.iter().map(|&d| T::from_count(d)).collect()),
            median_s_hat: median(s_hats),
            median_abs_err,
            scaled_err: median_abs_err * log_inv,
            outside_freq: T::from_count(outside) / T::from_count(dhats.len()),
            undefined,
            bracket_lo: c0 * eps.variance().powf(-one / k),
            bracket_hi: cs * class.q.powf(one / k) * (tau * eps.variance()).powf(-one / k),
        });
    }

    let monotone_dtau = rows.windows(2).all(|w| w[1].d_tau >= w[0].d_tau);
    let monotone_error = rows.windows(2).all(|w| w[1].median_abs_err <= w[0].median_abs_err);
    let bands = rows.iter().map(|r| r.band);
    let band_max = bands.clone().fold(T::neg_infinity(), T::max);
    let band_min = bands.fold(T::infinity(), T::min);
    Ok(SmoothnessReport {
        s,
        tau,
        lower_factor: c,
        upper_factor: big_c,
        replicates: cfg.replicates,
        data_len: cfg.data_len,
        rows,
        monotone_dtau,
        monotone_error,
        band_ratio: band_max / band_min,
        note: SMOOTHNESS_NOTE,
    })
}
