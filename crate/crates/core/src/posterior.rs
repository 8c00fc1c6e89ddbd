//! Empirical-Bayes posterior over the model dimension.
//!
//! Under the prior `θ | D=d ~ ⊗ N(μ_i 1{i≤d}, κε² 1{i≤d})`,
//! `P(D=d) ∝ e^{−ϰd}`, with the prior means replaced by the data, the
//! weight of dimension `d` given `X_1..X_n` is (up to a factor free of `d`)
//!
//! ```text
//! log w(d) = −ϰ·d + ½ Σ_{i≤d} X_i²/ε² − (d/2)·ln(κ+1)   (d ≤ n)
//!          = −crit(d) / (2ε²),    crit(d) = −Σ_{i≤d} X_i² + A·ε²·d
//! ```
//!
//! and `w(d) = w(n)·e^{−ϰ(d−n)}` for `d > n`. The dimensions beyond the data
//! are carried as one geometric lump.

use crate::error::{Error, Result};
use crate::rate::penalty_constant;
use crate::scalar::Real;
use crate::signals::{NoiseLevel, Observation};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorParams<T> {
    kappa: T,
    varkappa: T,
    epsilon: NoiseLevel<T>,
    a: T,
}

impl<T: Real> PriorParams<T> {
    /// Rejects `κ ≤ e − 1`, for which the posterior does not exist.
    pub fn new(kappa: T, varkappa: T, epsilon: NoiseLevel<T>) -> Result<Self> {
        let a = penalty_constant(kappa, varkappa)?;
        Ok(Self {
            kappa,
            varkappa,
            epsilon,
            a,
        })
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn varkappa(&self) -> T {
        self.varkappa
    }

    pub fn epsilon(&self) -> NoiseLevel<T> {
        self.epsilon
    }

    /// Penalty constant `A = ln(κ+1) + 2ϰ`.
    pub fn penalty(&self) -> T {
        self.a
    }

    pub fn with_epsilon(&self, epsilon: NoiseLevel<T>) -> Self {
        Self { epsilon, ..*self }
    }
}

/// Unnormalized log-weights for `d = 1..n` and the log of the total weight
/// of `{d > n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogWeights<T> {
    pub values: Vec<T>,
    pub log_tail: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorOverD<T> {
    pub log_weights: Vec<T>,
    /// `P(D = d | X)` for `d = 1..n` (index `d − 1`).
    pub pmf: Vec<T>,
    /// `P(D > n | X)`.
    pub tail_mass: T,
    pub n: usize,
    /// `e^{−ϰ}`: ratio between consecutive weights beyond `n`.
    pub tail_ratio: T,
}

impl<T: Real> PosteriorOverD<T> {
    /// `P(D = d | X)` for any `d ≥ 1`.
    pub fn mass_at(&self, d: usize) -> T {
        match d {
            0 => T::zero(),
            d if d <= self.n => self.pmf[d - 1],
            d => self.tail_mass * (T::one() - self.tail_ratio) * self.tail_ratio.powi(exp_i32(d - self.n - 1)),
        }
    }

    /// `P(D ≥ d | X)`.
    pub fn mass_from(&self, d: usize) -> T {
        if d <= self.n + 1 {
            let d = d.max(1);
            self.pmf[d - 1..].iter().copied().sum::<T>() + self.tail_mass
        } else {
            self.tail_mass * self.tail_ratio.powi(exp_i32(d - self.n - 1))
        }
    }

    /// Total mass, which is one up to rounding.
    pub fn total(&self) -> T {
        self.pmf.iter().copied().sum::<T>() + self.tail_mass
    }
}

fn exp_i32(k: usize) -> i32 {
    i32::try_from(k).unwrap_or(i32::MAX)
}

fn cumulative_squares<T: Real>(x: &Observation<T>) -> Vec<T> {
    let mut acc = T::zero();
    x.x()
        .iter()
        .map(|&v| {
            acc = acc + v * v;
            acc
        })
        .collect()
}

fn check_noise<T: Real>(x: &Observation<T>, p: &PriorParams<T>) -> Result<()> {
    if x.epsilon() != p.epsilon() {
        return Err(Error::Domain(format!(
            "observation noise {} differs from prior noise {}",
            x.epsilon().get(),
            p.epsilon().get()
        )));
    }
    Ok(())
}

/// `crit(d) = −Σ_{i≤d} X_i² + A·ε²·d` for `1 ≤ d ≤ n`.
pub fn crit<T: Real>(d: usize, x: &Observation<T>, p: &PriorParams<T>) -> Result<T> {
    if d == 0 || d > x.len() {
        return Err(Error::Index { index: d, len: x.len() });
    }
    let s: T = x.x()[..d].iter().map(|&v| v * v).sum();
    Ok(-s + p.penalty() * p.epsilon().variance() * T::from_count(d))
}

/// The whole criterion curve `crit(1..=n)`.
pub fn crit_curve<T: Real>(x: &Observation<T>, p: &PriorParams<T>) -> Vec<T> {
    let unit = p.penalty() * p.epsilon().variance();
    cumulative_squares(x)
        .into_iter()
        .enumerate()
        .map(|(k, s)| -s + unit * T::from_count(k + 1))
        .collect()
}

pub fn log_weights<T: Real>(x: &Observation<T>, p: &PriorParams<T>) -> Result<LogWeights<T>> {
    check_noise(x, p)?;
    let scale = T::lit(2.0) * p.epsilon().variance();
    let values: Vec<T> = crit_curve(x, p).into_iter().map(|c| -c / scale).collect();
    let last = *values.last().expect("observation is nonempty");
    // Σ_{d>n} w(n) e^{−ϰ(d−n)} = w(n) / (e^ϰ − 1)
    let log_tail = last - p.varkappa().exp_m1().ln();
    Ok(LogWeights { values, log_tail })
}

/// Normalized posterior, computed with a single max-shift.
pub fn pmf<T: Real>(x: &Observation<T>, p: &PriorParams<T>) -> Result<PosteriorOverD<T>> {
    let lw = log_weights(x, p)?;
    let shift = lw.values.iter().copied().fold(lw.log_tail, T::max);
    let raw: Vec<T> = lw.values.iter().map(|&v| (v - shift).exp()).collect();
    let raw_tail = (lw.log_tail - shift).exp();
    let z = raw.iter().copied().sum::<T>() + raw_tail;
    Ok(PosteriorOverD {
        pmf: raw.into_iter().map(|w| w / z).collect(),
        tail_mass: raw_tail / z,
        n: lw.values.len(),
        tail_ratio: (-p.varkappa()).exp(),
        log_weights: lw.values,
    })
}

/// Posterior mode `d̂`: the smallest maximizer of `P(D = d | X)`.
///
/// Weights beyond `n` decrease strictly, so the mode lies in `1..=n`.
pub fn map_dimension<T: Real>(x: &Observation<T>, p: &PriorParams<T>) -> Result<usize> {
    Ok(argmax_first(&log_weights(x, p)?.values))
}

/// Mode of an already computed posterior; same tie rule as [`map_dimension`].
pub fn map_dimension_from<T: Real>(post: &PosteriorOverD<T>) -> usize {
    argmax_first(&post.log_weights)
}

pub(crate) fn argmax_first<T: Real>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best + 1
}

/// `X(d̂) = (X_i 1{i ≤ d̂})`, the penalized projection estimator.
pub fn posterior_mean_theta<T: Real>(x: &Observation<T>, p: &PriorParams<T>) -> Result<Vec<T>> {
    let d = map_dimension(x, p)?;
    Ok(x
        .x()
        .iter()
        .enumerate()
        .map(|(i, &v)| if i < d { v } else { T::zero() })
        .collect())
}

/// `P(lo ≤ D ≤ hi | X)`; `hi = None` means unbounded.
///
/// Dimensions past the data are resolved exactly from the geometric lump.
pub fn region_mass<T: Real>(post: &PosteriorOverD<T>, lo: usize, hi: Option<usize>) -> T {
    let lo = lo.max(1);
    match hi {
        None => post.mass_from(lo),
        Some(hi) if hi < lo => T::zero(),
        Some(hi) => {
            let inside: T = (lo..=hi.min(post.n)).map(|d| post.pmf[d - 1]).sum();
            let beyond = if hi > post.n {
                let from = lo.max(post.n + 1);
                (post.mass_from(from) - post.mass_from(hi + 1)).max(T::zero())
            } else {
                T::zero()
            };
            inside + beyond
        }
    }
}

/// Total variation distance between two posteriors over `ℕ`.
pub fn total_variation<T: Real>(a: &PosteriorOverD<T>, b: &PosteriorOverD<T>) -> T {
    let m = a.n.max(b.n);
    let head: T = (1..=m).map(|d| (a.mass_at(d) - b.mass_at(d)).abs()).sum();
    // past m both are geometric with the same ratio
    let rest = (a.mass_from(m + 1) - b.mass_from(m + 1)).abs();
    T::lit(0.5) * (head + rest)
}

/// Total variation between the posteriors built from the first `n` and the
/// first `2n` observations of `x`.
pub fn truncation_tv<T: Real>(x: &Observation<T>, p: &PriorParams<T>, n: usize) -> Result<T> {
    let short = pmf(&x.truncated(n)?, p)?;
    let long = pmf(&x.truncated(2 * n)?, p)?;
    Ok(total_variation(&short, &long))
}
