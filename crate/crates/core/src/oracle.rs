//! τ-weighted quantization risk and the local effective τ-dimension.
//!
//! `r_τ(d) = Σ_{i>d} θ_i² + τ·d·ε²` for `d ≥ 1`; `d_τ` is its smallest
//! minimizer.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signals::{NoiseLevel, Signal};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult<T> {
    pub d_tau: usize,
    pub r_tau: T,
    /// `r_τ(d)` for `d = 1..N` (index `d − 1`).
    pub risk_curve: Vec<T>,
    /// `Σ_{i>d} θ_i²` including the tail, for `d = 1..N`.
    pub approx_error: Vec<T>,
    /// `τ·ε²`, the cost of one dimension.
    pub unit_cost: T,
}

impl<T: Real> OracleResult<T> {
    pub fn dim_cost(&self, d: usize) -> T {
        self.unit_cost * T::from_count(d)
    }
}

fn check_tau<T: Real>(tau: T) -> Result<()> {
    if !(tau > T::zero()) || !tau.is_finite() {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    Ok(())
}

/// `r_τ(d, θ)`; `d` ranges over `1..=N`.
pub fn risk<T: Real>(d: usize, theta: &Signal<T>, eps: NoiseLevel<T>, tau: T) -> Result<T> {
    check_tau(tau)?;
    let n = theta.len();
    if d == 0 || d > n {
        return Err(Error::Index { index: d, len: n });
    }
    let approx = theta.coeffs()[d..]
        .iter()
        .rev()
        .fold(theta.tail_energy(), |acc, &c| acc + c * c);
    Ok(approx + tau * eps.variance() * T::from_count(d))
}

/// Smallest minimizer of `r_τ(·, θ)`.
///
/// Needs `tail_energy ≤ τε²`: beyond `N` each extra dimension costs at least
/// `τε²` while recovering at most the tail energy, so no `d > N` beats `d = N`.
pub fn effective_dimension<T: Real>(
    theta: &Signal<T>,
    eps: NoiseLevel<T>,
    tau: T,
) -> Result<OracleResult<T>> {
    check_tau(tau)?;
    let unit_cost = tau * eps.variance();
    if theta.tail_energy() > unit_cost {
        return Err(Error::HorizonInsufficient {
            tail_energy: theta.tail_energy().as_f64(),
            budget: unit_cost.as_f64(),
            suggested_len: 2 * theta.len(),
        });
    }
    let suffix = theta.energy_suffix();
    let approx_error: Vec<T> = suffix[1..].to_vec();
    let risk_curve: Vec<T> = approx_error
        .iter()
        .enumerate()
        .map(|(k, &a)| a + unit_cost * T::from_count(k + 1))
        .collect();
    let (best, r_tau) = risk_curve
        .iter()
        .enumerate()
        .fold((0, risk_curve[0]), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) });
    Ok(OracleResult {
        d_tau: best + 1,
        r_tau,
        risk_curve,
        approx_error,
        unit_cost,
    })
}

/// Whether `d_τ(θ, ε) = d_1(θ, √τ ε)`.
pub fn tau_scaling_identity_check<T: Real>(
    theta: &Signal<T>,
    eps: NoiseLevel<T>,
    tau: T,
) -> Result<bool> {
    let weighted = effective_dimension(theta, eps, tau)?;
    let rescaled = effective_dimension(theta, NoiseLevel::new(tau.sqrt() * eps.get())?, T::one())?;
    Ok(weighted.d_tau == rescaled.d_tau)
}

/// Outcome of a tail or head condition check.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub member: bool,
    /// First block length `d` at which the inequality fails.
    pub first_violation: Option<usize>,
    pub d_tau: usize,
    /// Tail check: the materialized horizon `N − d_τ` is shorter than `N₀`,
    /// so only the conservative beyond-horizon block was checked.
    pub horizon_warning: bool,
    /// Head check: `d_τ < n₀`, so no block is constrained.
    pub vacuous: bool,
}

/// Tail condition: `Σ_{i=d_τ+1}^{d_τ+d} θ_i² ≤ t₀ε²d` for every `d ≥ N₀`.
///
/// Blocks inside the materialized coefficients are checked exactly. Every
/// longer block is bounded by the full remaining energy including the tail;
/// since the right side grows with `d`, checking that bound at the shortest
/// such block decides all of them.
pub fn tail_condition<T: Real>(
    theta: &Signal<T>,
    eps: NoiseLevel<T>,
    tau: T,
    t0: T,
    n0: usize,
) -> Result<ConditionReport> {
    if !(t0 > T::zero() && t0 < tau) {
        return Err(Error::Domain(format!("t0 must lie in (0, tau), got t0={t0} tau={tau}")));
    }
    if n0 == 0 {
        return Err(Error::Domain("N0 must be at least 1".into()));
    }
    let oracle = effective_dimension(theta, eps, tau)?;
    let k = oracle.d_tau;
    let n = theta.len();
    let unit = t0 * eps.variance();
    let prefix = theta.energy_prefix();
    let suffix = theta.energy_suffix();

    let inside = (n0..=n - k).find(|&d| prefix[k + d] - prefix[k] > unit * T::from_count(d));
    let first_violation = inside.or_else(|| {
        let d = n0.max(n - k + 1);
        (suffix[k] > unit * T::from_count(d)).then_some(d)
    });
    Ok(ConditionReport {
        member: first_violation.is_none(),
        first_violation,
        d_tau: k,
        horizon_warning: n - k < n0,
        vacuous: false,
    })
}

/// Head condition: `Σ_{i=d_τ−d+1}^{d_τ} θ_i² ≥ H₀ε²d` for `n₀ ≤ d ≤ d_τ`.
pub fn head_condition<T: Real>(
    theta: &Signal<T>,
    eps: NoiseLevel<T>,
    tau: T,
    h0: T,
    n0: usize,
) -> Result<ConditionReport> {
    if !(h0 > tau) || !h0.is_finite() {
        return Err(Error::Domain(format!("H0 must exceed tau, got H0={h0} tau={tau}")));
    }
    if n0 == 0 {
        return Err(Error::Domain("n0 must be at least 1".into()));
    }
    let oracle = effective_dimension(theta, eps, tau)?;
    let k = oracle.d_tau;
    let unit = h0 * eps.variance();
    let prefix = theta.energy_prefix();
    let first_violation = (n0..=k).find(|&d| prefix[k] - prefix[k - d] < unit * T::from_count(d));
    Ok(ConditionReport {
        member: first_violation.is_none(),
        first_violation,
        d_tau: k,
        horizon_warning: false,
        vacuous: k < n0,
    })
}
