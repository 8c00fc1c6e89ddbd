use crate::error::{Error, Result};
use crate::oracle::{effective_dimension, head_condition, tail_condition};
use crate::posterior::PriorParams;
use crate::rate::{f_sup, g_sup, RateParams};
use crate::scalar::Real;
use crate::signals::Signal;

use super::{
    check_data_len, envelope, estimate_events, row_from, Event, ExperimentReport, McConfig,
    BoundKind,
};

fn metadata<T: Real>(
    theta: &Signal<T>,
    p: &PriorParams<T>,
    tau: T,
    d_tau: usize,
) -> Vec<(String, String)> {
    vec![
        ("signal_len".into(), theta.len().to_string()),
        ("signal_energy".into(), format!("{:e}", theta.total_energy())),
        ("epsilon".into(), format!("{:e}", p.epsilon().get())),
        ("tau".into(), format!("{:e}", tau)),
        ("kappa".into(), format!("{:e}", p.kappa())),
        ("varkappa".into(), format!("{:e}", p.varkappa())),
        ("A".into(), format!("{:e}", p.penalty())),
        ("d_tau".into(), d_tau.to_string()),
    ]
}

fn check_tau<T: Real>(tau: T) -> Result<()> {
    if !(tau > T::zero()) || !tau.is_finite() {
        return Err(Error::Config(format!("tau must be positive, got {tau}")));
    }
    Ok(())
}

/// Monte Carlo check of `E_θ P(D ≥ d_τ + n | X) ≤ e^{−αn}/α` with
/// `α = f_o(A, τ)`, together with the same bound for `P_θ(d̂ ≥ d_τ + n)`.
///
/// Requires `A > 1 + τ`.
pub fn mc_overshoot<T: Real>(
    theta: &Signal<T>,
    p: &PriorParams<T>,
    tau: T,
    cfg: &McConfig,
) -> Result<ExperimentReport<T>> {
    check_tau(tau)?;
    let a = p.penalty();
    if !(a > T::one() + tau) {
        return Err(Error::Config(format!(
            "overshoot bound requires A > 1+τ (A = {a}, τ = {tau})"
        )));
    }
    cfg.validate_for_report()?;
    check_data_len(theta, cfg.data_len)?;
    let d_tau = effective_dimension(theta, p.epsilon(), tau)?.d_tau;
    let alpha = f_sup(&RateParams::new(a, tau)?).value;

    let events: Vec<Event> = cfg.offsets.iter().map(|&n| Event::AtLeast(d_tau + n)).collect();
    let est = estimate_events(theta, p, cfg.data_len, cfg.replicates, cfg.master_seed, 0, &events)?;
    let rows = cfg
        .offsets
        .iter()
        .zip(est)
        .map(|(&n, e)| row_from(n, None, Some(n), e, envelope(alpha, n)))
        .collect();
    let mut meta = metadata(theta, p, tau, d_tau);
    meta.push(("alpha".into(), format!("{:e}", alpha)));
    Ok(ExperimentReport {
        kind: BoundKind::Overshoot,
        d_tau,
        alpha: Some(alpha),
        beta: None,
        metadata: meta,
        rows,
    })
}

/// Monte Carlo check of `E_θ P(D ≤ d_τ − n | X) ≤ e^{−βn}/β` with
/// `β = g_o(A, τ)`, together with the same bound for `P_θ(d̂ ≤ d_τ − n)`.
///
/// Requires `A < 1 + τ`.
pub fn mc_undershoot<T: Real>(
    theta: &Signal<T>,
    p: &PriorParams<T>,
    tau: T,
    cfg: &McConfig,
) -> Result<ExperimentReport<T>> {
    check_tau(tau)?;
    let a = p.penalty();
    if !(a < T::one() + tau) {
        return Err(Error::Config(format!(
            "undershoot bound requires A < 1+τ (A = {a}, τ = {tau})"
        )));
    }
    cfg.validate_for_report()?;
    check_data_len(theta, cfg.data_len)?;
    let d_tau = effective_dimension(theta, p.epsilon(), tau)?.d_tau;
    let beta = g_sup(&RateParams::new(a, tau)?).value;

    let events: Vec<Event> = cfg
        .offsets
        .iter()
        .map(|&n| Event::AtMost(d_tau.checked_sub(n).filter(|&k| k > 0)))
        .collect();
    let est = estimate_events(theta, p, cfg.data_len, cfg.replicates, cfg.master_seed, 0, &events)?;
    let rows = cfg
        .offsets
        .iter()
        .zip(est)
        .map(|(&n, e)| row_from(n, Some(n), None, e, envelope(beta, n)))
        .collect();
    let mut meta = metadata(theta, p, tau, d_tau);
    meta.push(("beta".into(), format!("{:e}", beta)));
    Ok(ExperimentReport {
        kind: BoundKind::Undershoot,
        d_tau,
        alpha: None,
        beta: Some(beta),
        metadata: meta,
        rows,
    })
}

/// Hypotheses under which both sides are controlled at once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TwoSidedCase<T> {
    /// Tail condition with `(t₀, N₀)` and `1 + t₀ < A < 1 + τ`.
    Tail { t0: T, n0: usize },
    /// Head condition with `(H₀, n₀)` and `1 + τ < A < 1 + H₀`.
    Head { h0: T, n0: usize },
}

/// Monte Carlo check of
/// `E_θ P(D ∉ [d_τ − n₁, d_τ + n₂] | X) ≤ e^{−αn₂}/α + e^{−βn₁}/β`.
///
/// Each configured offset `n` is turned into `(n₁, n₂) = (n, max(n, N₀))`
/// for the tail case and `(max(n, n₀), n)` for the head case. The sandwich
/// on `A` and the signal's membership in the condition are checked before
/// any simulation.
pub fn mc_two_sided<T: Real>(
    theta: &Signal<T>,
    p: &PriorParams<T>,
    tau: T,
    case: TwoSidedCase<T>,
    cfg: &McConfig,
) -> Result<ExperimentReport<T>> {
    check_tau(tau)?;
    let a = p.penalty();
    let one = T::one();
    let eps = p.epsilon();
    let (kind, alpha, beta, extra) = match case {
        TwoSidedCase::Tail { t0, n0 } => {
            if !(one + t0 < a) {
                return Err(Error::Config(format!("case (i) requires 1+t0 < A (A = {a}, t0 = {t0})")));
            }
            if !(a < one + tau) {
                return Err(Error::Config(format!("case (i) requires A < 1+τ (A = {a}, τ = {tau})")));
            }
            let rep = tail_condition(theta, eps, tau, t0, n0)?;
            if !rep.member {
                return Err(Error::Config(format!(
                    "signal fails the tail condition (t0 = {t0}, N0 = {n0}) at block length {}",
                    rep.first_violation.unwrap_or(0)
                )));
            }
            let alpha = f_sup(&RateParams::new(a, t0)?).value;
            let beta = g_sup(&RateParams::new(a, tau)?).value;
            let extra = vec![("t0".to_string(), format!("{:e}", t0)), ("N0".to_string(), n0.to_string())];
            (BoundKind::TwoSidedTail, alpha, beta, extra)
        }
        TwoSidedCase::Head { h0, n0 } => {
            if !(one + tau < a) {
                return Err(Error::Config(format!("case (ii) requires 1+τ < A (A = {a}, τ = {tau})")));
            }
            if !(a < one + h0) {
                return Err(Error::Config(format!("case (ii) requires A < 1+H0 (A = {a}, H0 = {h0})")));
            }
            let rep = head_condition(theta, eps, tau, h0, n0)?;
            if !rep.member {
                return Err(Error::Config(format!(
                    "signal fails the head condition (H0 = {h0}, n0 = {n0}) at block length {}",
                    rep.first_violation.unwrap_or(0)
                )));
            }
            let alpha = f_sup(&RateParams::new(a, tau)?).value;
            let beta = g_sup(&RateParams::new(a, h0)?).value;
            let extra = vec![("H0".to_string(), format!("{:e}", h0)), ("n0".to_string(), n0.to_string())];
            (BoundKind::TwoSidedHead, alpha, beta, extra)
        }
    };
    cfg.validate_for_report()?;
    check_data_len(theta, cfg.data_len)?;
    let d_tau = effective_dimension(theta, eps, tau)?.d_tau;

    let gaps: Vec<(usize, usize)> = cfg
        .offsets
        .iter()
        .map(|&n| match case {
            TwoSidedCase::Tail { n0, .. } => (n, n.max(n0)),
            TwoSidedCase::Head { n0, .. } => (n.max(n0), n),
        })
        .collect();
    let events: Vec<Event> = gaps
        .iter()
        .map(|&(below, above)| Event::Outside {
            lo: d_tau.checked_sub(below),
            hi: d_tau + above,
        })
        .collect();
    let est = estimate_events(theta, p, cfg.data_len, cfg.replicates, cfg.master_seed, 0, &events)?;
    let rows = cfg
        .offsets
        .iter()
        .zip(gaps)
        .zip(est)
        .map(|((&n, (below, above)), e)| {
            let bound = envelope(alpha, above) + envelope(beta, below);
            row_from(n, Some(below), Some(above), e, bound)
        })
        .collect();
    let mut meta = metadata(theta, p, tau, d_tau);
    meta.extend(extra);
    meta.push(("alpha".into(), format!("{:e}", alpha)));
    meta.push(("beta".into(), format!("{:e}", beta)));
    Ok(ExperimentReport {
        kind,
        d_tau,
        alpha: Some(alpha),
        beta: Some(beta),
        metadata: meta,
        rows,
    })
}
