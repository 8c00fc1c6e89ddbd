//! Test signals and noisy observations of them.
//!
//! A [`Signal`] materializes the first `N` coefficients and carries the energy
//! of everything beyond them as a single number, which is all the oracle and
//! membership checks need.

use crate::error::{Error, Result};
use crate::rng::{NormalStream, ReplicateSeed};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Signal<T> {
    coeffs: Vec<T>,
    tail_energy: T,
}

impl<T: Real> Signal<T> {
    pub fn new(coeffs: Vec<T>, tail_energy: T) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Domain("signal needs at least one coefficient".into()));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("coefficient {} is not finite", i + 1)));
        }
        if !(tail_energy >= T::zero()) || !tail_energy.is_finite() {
            return Err(Error::Domain(format!(
                "tail_energy must be finite and nonnegative, got {tail_energy}"
            )));
        }
        Ok(Self { coeffs, tail_energy })
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(vec![T::zero(); len], T::zero())
    }

    /// Number of materialized coefficients `N`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn tail_energy(&self) -> T {
        self.tail_energy
    }

    /// `θ_i` with 1-based `i`; zero past the materialized prefix.
    pub fn coeff(&self, i: usize) -> T {
        if i == 0 || i > self.coeffs.len() {
            T::zero()
        } else {
            self.coeffs[i - 1]
        }
    }

    pub fn total_energy(&self) -> T {
        self.coeffs.iter().map(|&c| c * c).sum::<T>() + self.tail_energy
    }

    /// Squared-coefficient prefix sums: entry `k` is `Σ_{i≤k} θ_i²`.
    pub fn energy_prefix(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        let mut acc = T::zero();
        out.push(acc);
        for &c in &self.coeffs {
            acc = acc + c * c;
            out.push(acc);
        }
        out
    }

    /// Energy beyond each index: entry `k` is `Σ_{i>k} θ_i²` including the
    /// tail, accumulated from the far end.
    pub fn energy_suffix(&self) -> Vec<T> {
        let n = self.coeffs.len();
        let mut out = vec![T::zero(); n + 1];
        let mut acc = self.tail_energy;
        out[n] = acc;
        for k in (0..n).rev() {
            acc = acc + self.coeffs[k] * self.coeffs[k];
            out[k] = acc;
        }
        out
    }

    /// Extends a signal with exactly known zero tail by explicit zeros.
    pub fn zero_padded(&self, len: usize) -> Result<Self> {
        if len <= self.coeffs.len() {
            return Ok(self.clone());
        }
        if self.tail_energy != T::zero() {
            return Err(Error::Domain(
                "cannot zero-pad a signal whose tail energy is nonzero".into(),
            ));
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(len, T::zero());
        Self::new(coeffs, T::zero())
    }
}

/// Noise intensity `ε > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct NoiseLevel<T>(T);

impl<T: Real> NoiseLevel<T> {
    pub fn new(epsilon: T) -> Result<Self> {
        if !(epsilon > T::zero()) || !epsilon.is_finite() {
            return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(Self(epsilon))
    }

    pub fn get(self) -> T {
        self.0
    }

    pub fn variance(self) -> T {
        self.0 * self.0
    }
}

/// Noisy prefix `X_1..X_n` of the sequence model.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation<T> {
    x: Vec<T>,
    epsilon: NoiseLevel<T>,
    seed_trace: Option<ReplicateSeed>,
}

impl<T: Real> Observation<T> {
    /// Wraps externally supplied data.
    pub fn from_data(x: Vec<T>, epsilon: NoiseLevel<T>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Domain("observation needs at least one value".into()));
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("observation {} is not finite", i + 1)));
        }
        Ok(Self {
            x,
            epsilon,
            seed_trace: None,
        })
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn epsilon(&self) -> NoiseLevel<T> {
        self.epsilon
    }

    pub fn seed_trace(&self) -> Option<ReplicateSeed> {
        self.seed_trace
    }

    /// Prefix of the first `n` observations.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.x.len() {
            return Err(Error::Index {
                index: n,
                len: self.x.len(),
            });
        }
        Ok(Self {
            x: self.x[..n].to_vec(),
            epsilon: self.epsilon,
            seed_trace: self.seed_trace,
        })
    }
}

/// `X_i = θ_i + ε ξ_i` for `i = 1..n`, with `θ_i = 0` past the materialized
/// coefficients and `ξ_i` read from the keyed stream of `seed`.
pub fn simulate<T: Real>(
    theta: &Signal<T>,
    eps: NoiseLevel<T>,
    n: usize,
    seed: ReplicateSeed,
) -> Result<Observation<T>> {
    if n == 0 {
        return Err(Error::Domain("simulate needs n >= 1".into()));
    }
    let mut stream = NormalStream::new(seed);
    let x = (1..=n)
        .map(|i| theta.coeff(i) + eps.get() * T::lit(stream.next_normal()))
        .collect();
    Ok(Observation {
        x,
        epsilon: eps,
        seed_trace: Some(seed),
    })
}

/// Partial sums beyond this index are replaced by an integral bound.
pub const POWER_TAIL_PARTIAL_LIMIT: usize = 1_000_000;

/// Certified upper value of `Σ_{i>n} i^{−p}` for `p > 1`.
///
/// Sums exactly up to `M = max(n, 10⁶)` and bounds the remainder by
/// `∫_M^∞ x^{−p} dx = M^{1−p}/(p−1)`, which exceeds the remainder by at most
/// `M^{−p}`.
pub fn power_tail_upper(p: f64, n: usize) -> f64 {
    assert!(p > 1.0, "power tail needs p > 1");
    let m = n.max(POWER_TAIL_PARTIAL_LIMIT);
    // smallest terms first
    let partial: f64 = (n + 1..=m).rev().map(|i| (i as f64).powf(-p)).sum();
    partial + (m as f64).powf(1.0 - p) / (p - 1.0)
}

/// `θ_i = c · i^{−(s+½)}` for `i ≤ N`, with the certified tail energy of the
/// same law beyond `N`.
pub fn power_law_signal<T: Real>(s: T, c: T, len: usize) -> Result<Signal<T>> {
    if !(s > T::zero()) || !s.is_finite() {
        return Err(Error::Domain(format!("smoothness s must be positive, got {s}")));
    }
    if !(c > T::zero()) || !c.is_finite() {
        return Err(Error::Domain(format!("scale c must be positive, got {c}")));
    }
    if len == 0 {
        return Err(Error::Domain("power-law signal needs N >= 1".into()));
    }
    let decay = s + T::lit(0.5);
    let coeffs = (1..=len)
        .map(|i| c * T::from_count(i).powf(-decay))
        .collect();
    let p = 2.0 * s.as_f64() + 1.0;
    let tail = c.as_f64().powi(2) * power_tail_upper(p, len);
    Signal::new(coeffs, T::lit(tail))
}

/// The two-point construction separating one-sided from two-sided control.
///
/// Both signals share `θ_1 = ε√(2τ)` and differ on the block
/// `i = 2..L1+L2+1` by `∓ ε√(ln Δ) / (2√(L1+L2))` around `ε√τ`, so that
/// `exp(‖θ′ − θ″‖²/ε²) = Δ` while their τ-dimensions are `1` and `L1+L2+1`.
pub fn adversarial_pair<T: Real>(
    tau: T,
    eps: NoiseLevel<T>,
    l1: usize,
    l2: usize,
    delta: T,
) -> Result<(Signal<T>, Signal<T>)> {
    if !(tau > T::zero()) || !tau.is_finite() {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    if l1 == 0 || l2 == 0 {
        return Err(Error::Domain("L1 and L2 must be at least 1".into()));
    }
    if !(delta > T::one()) || !delta.is_finite() {
        return Err(Error::Domain(format!("Delta must exceed 1, got {delta}")));
    }
    let e = eps.get();
    let block = l1 + l2;
    let centre = e * tau.sqrt();
    let gap = e * delta.ln().sqrt() / (T::lit(2.0) * T::from_count(block).sqrt());
    if !(centre - gap > T::zero()) {
        return Err(Error::Domain(format!(
            "theta' block coefficient eps*sqrt(tau) - eps*sqrt(ln Delta)/(2*sqrt(L1+L2)) = {} \
             is not positive; increase L1+L2 or tau, or decrease Delta",
            centre - gap
        )));
    }
    let head = e * (T::lit(2.0) * tau).sqrt();
    let mut low = Vec::with_capacity(block + 1);
    let mut high = Vec::with_capacity(block + 1);
    low.push(head);
    high.push(head);
    low.extend(std::iter::repeat_n(centre - gap, block));
    high.extend(std::iter::repeat_n(centre + gap, block));
    Ok((Signal::new(low, T::zero())?, Signal::new(high, T::zero())?))
}

/// `θ_i = ε √level` for `i ≤ len`, zero afterwards.
///
/// With `level > τ` the τ-dimension is `len`, and every trailing block of the
/// head carries `level · ε²` per coordinate.
pub fn head_heavy_signal<T: Real>(eps: NoiseLevel<T>, level: T, len: usize) -> Result<Signal<T>> {
    if !(level > T::zero()) || !level.is_finite() {
        return Err(Error::Domain(format!("head level must be positive, got {level}")));
    }
    if len == 0 {
        return Err(Error::Domain("head length must be at least 1".into()));
    }
    Signal::new(vec![eps.get() * level.sqrt(); len], T::zero())
}

/// Parameters of the self-similar smoothness class: tail class `T_s(Q)`
/// intersected with the block lower bound `Σ_{i=N}^{ρ₀N} θ_i² ≥ αQ/N^{2s}`
/// for `N ≥ N₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessClassParams<T> {
    pub s: T,
    pub q: T,
    pub alpha: T,
    pub rho0: T,
    pub n0: usize,
}

impl<T: Real> SmoothnessClassParams<T> {
    pub fn new(s: T, q: T, alpha: T, rho0: T, n0: usize) -> Result<Self> {
        if !(s > T::zero()) || !s.is_finite() {
            return Err(Error::Domain(format!("s must be positive, got {s}")));
        }
        if !(q > T::zero()) || !q.is_finite() {
            return Err(Error::Domain(format!("Q must be positive, got {q}")));
        }
        if !(alpha > T::zero() && alpha < T::one()) {
            return Err(Error::Domain(format!("alpha must lie in (0,1), got {alpha}")));
        }
        if !(rho0 > T::one()) || !rho0.is_finite() {
            return Err(Error::Domain(format!("rho0 must exceed 1, got {rho0}")));
        }
        if n0 == 0 {
            return Err(Error::Domain("N0 must be at least 1".into()));
        }
        Ok(Self {
            s,
            q,
            alpha,
            rho0,
            n0,
        })
    }

    /// Last index of the block starting at `start`.
    pub fn block_end(&self, start: usize) -> usize {
        (self.rho0 * T::from_count(start))
            .ceil()
            .to_usize()
            .expect("block end representable")
    }
}

/// Outcome of [`check_membership`].
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipReport {
    pub in_tail_class: bool,
    /// First `m` with `m^{2s} Σ_{k>m} θ_k² > Q`.
    pub tail_violation: Option<usize>,
    pub self_similar: bool,
    /// First block start violating the lower bound.
    pub block_violation: Option<usize>,
    /// Block starts that fit inside the materialized coefficients.
    pub blocks_checked: usize,
}

/// Checks `θ ∈ T_s(Q)` for `m = 1..N` and the self-similar block bound for
/// every block start `N' ≥ N₀` whose block `[N', ⌈ρ₀N'⌉]` is materialized.
///
/// The unmaterialized tail enters the class check through `tail_energy`, an
/// upper value, so a pass is never spurious.
pub fn check_membership<T: Real>(theta: &Signal<T>, p: &SmoothnessClassParams<T>) -> MembershipReport {
    let n = theta.len();
    let suffix = theta.energy_suffix();
    let two_s = T::lit(2.0) * p.s;
    let tail_violation = (1..=n).find(|&m| T::from_count(m).powf(two_s) * suffix[m] > p.q);

    let prefix = theta.energy_prefix();
    let mut blocks_checked = 0;
    let mut block_violation = None;
    let mut start = p.n0;
    loop {
        let end = p.block_end(start);
        if end > n {
            break;
        }
        blocks_checked += 1;
        let mass = prefix[end] - prefix[start - 1];
        if mass < p.alpha * p.q / T::from_count(start).powf(two_s) {
            block_violation = Some(start);
            break;
        }
        start += 1;
    }
    MembershipReport {
        in_tail_class: tail_violation.is_none(),
        tail_violation,
        self_similar: blocks_checked > 0 && block_violation.is_none(),
        block_violation,
        blocks_checked,
    }
}

/// Power-law member of the self-similar class with `N` materialized
/// coefficients.
///
/// Uses `θ_i = c·i^{−(s+½)}` with `c² = Q·min(1, 2s)`, which keeps every tail
/// `Σ_{k>m} θ_k²` below `c² m^{−2s}/(2s) ≤ Q m^{−2s}`. The block bound is then
/// verified for every block that fits in the first `N` coefficients.
pub fn self_similar_signal<T: Real>(p: &SmoothnessClassParams<T>, len: usize) -> Result<Signal<T>> {
    if p.block_end(p.n0) > len {
        return Err(Error::Construction(format!(
            "N = {len} is too small to check any block: the first block ends at {}",
            p.block_end(p.n0)
        )));
    }
    let c = (p.q * T::one().min(T::lit(2.0) * p.s)).sqrt();
    let theta = power_law_signal(p.s, c, len)?;
    let report = check_membership(&theta, p);
    if let Some(m) = report.tail_violation {
        return Err(Error::Construction(format!("tail class bound violated at m = {m}")));
    }
    if let Some(start) = report.block_violation {
        return Err(Error::Construction(format!(
            "self-similar block lower bound violated for the block starting at N = {start} (ending at {})",
            p.block_end(start)
        )));
    }
    Ok(theta)
}
