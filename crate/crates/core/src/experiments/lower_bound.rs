use crate::error::{Error, Result};
use crate::oracle::effective_dimension;
use crate::posterior::PriorParams;
use crate::scalar::Real;
use crate::signals::{adversarial_pair, NoiseLevel};

use super::{estimate_events, Event, McConfig, MIN_REPLICATES_WITH_SE, SIGMA_TOLERANCE};

/// `q_o(Δ) = 1 + 2Δ − 2√(Δ² + Δ)`, evaluated as `1/(1 + 2Δ + 2√(Δ² + Δ))`
/// to avoid cancellation for large `Δ`.
pub fn lower_bound_floor<T: Real>(delta: T) -> Result<T> {
    if !(delta > T::one()) || !delta.is_finite() {
        return Err(Error::Domain(format!("Delta must exceed 1, got {delta}")));
    }
    let two = T::lit(2.0);
    Ok(T::one() / (T::one() + two * delta + two * (delta * delta + delta).sqrt()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundReport<T> {
    /// Frequency of `d̂ ≥ d_τ(θ′) + L1` under `θ′`.
    pub p1: T,
    pub p1_se: T,
    /// Frequency of `d̂ ≤ d_τ(θ″) − L2` under `θ″`.
    pub p2: T,
    pub p2_se: T,
    pub sum: T,
    pub combined_se: T,
    pub delta_prime: T,
    /// `sum ≥ δ′ − 3·combined_se`.
    pub satisfied: bool,
    pub d_tau_prime: usize,
    pub d_tau_double: usize,
    /// `exp(‖θ′ − θ″‖²/ε²)`.
    pub separation: T,
    pub metadata: Vec<(String, String)>,
}

/// Two-point lower bound: no estimator can keep both the overshoot under
/// `θ′` and the undershoot under `θ″` small. Checked here for `d̂`.
///
/// `θ′` replicates draw from stream block 0 and `θ″` replicates from block 1.
pub fn lower_bound_experiment<T: Real>(
    tau: T,
    eps: NoiseLevel<T>,
    l1: usize,
    l2: usize,
    delta: T,
    p: &PriorParams<T>,
    cfg: &McConfig,
) -> Result<LowerBoundReport<T>> {
    let (low, high) = adversarial_pair(tau, eps, l1, l2, delta)?;
    let delta_prime = lower_bound_floor(delta)?;
    if cfg.replicates < MIN_REPLICATES_WITH_SE {
        return Err(Error::Config(format!(
            "replicates must be at least {MIN_REPLICATES_WITH_SE}, got {}",
            cfg.replicates
        )));
    }
    if cfg.data_len < high.len() {
        return Err(Error::Config(format!(
            "data length {} is shorter than the {} coefficients of the two-point signals",
            cfg.data_len,
            high.len()
        )));
    }
    let p = p.with_epsilon(eps);
    let d_tau_prime = effective_dimension(&low, eps, tau)?.d_tau;
    let d_tau_double = effective_dimension(&high, eps, tau)?.d_tau;

    let over = Event::AtLeast(d_tau_prime + l1);
    let under = Event::AtMost(d_tau_double.checked_sub(l2).filter(|&k| k > 0));
    let e1 = estimate_events(&low, &p, cfg.data_len, cfg.replicates, cfg.master_seed, 0, &[over])?[0];
    let e2 = estimate_events(&high, &p, cfg.data_len, cfg.replicates, cfg.master_seed, 1, &[under])?[0];

    let sum = e1.freq + e2.freq;
    let combined_se = (e1.freq_se * e1.freq_se + e2.freq_se * e2.freq_se).sqrt();
    let satisfied = sum >= delta_prime - T::lit(SIGMA_TOLERANCE) * combined_se;
    let dist2: T = low
        .coeffs()
        .iter()
        .zip(high.coeffs())
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum();
    let separation = (dist2 / eps.variance()).exp();

    let metadata = vec![
        ("epsilon".into(), format!("{:e}", eps.get())),
        ("tau".into(), format!("{:e}", tau)),
        ("L1".into(), l1.to_string()),
        ("L2".into(), l2.to_string()),
        ("Delta".into(), format!("{:e}", delta)),
        ("kappa".into(), format!("{:e}", p.kappa())),
        ("varkappa".into(), format!("{:e}", p.varkappa())),
        ("A".into(), format!("{:e}", p.penalty())),
    ];
    Ok(LowerBoundReport {
        p1: e1.freq,
        p1_se: e1.freq_se,
        p2: e2.freq,
        p2_se: e2.freq_se,
        sum,
        combined_se,
        delta_prime,
        satisfied,
        d_tau_prime,
        d_tau_double,
        separation,
        metadata,
    })
}
