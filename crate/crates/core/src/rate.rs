//! Chernoff-type rate functions governing the exponential decay of the
//! overshoot and undershoot probabilities of the dimension posterior.
//!
//! With penalty constant `a` and noise weight `t`,
//!
//! ```text
//! f(h) = ½ (a·h + ln(1 − h) − t·h / (1 − h)),   h < 1
//! g(h) = f(−h),                                 h > −1
//! ```
//!
//! `f_sup` maximizes `f` over `[0, 1)` and `g_sup` maximizes `g` over `[0, 1]`.
//! Both suprema have closed-form maximizers; `f` is unimodal on `(−∞, 1)` with
//! its peak at `h_f = (2a − 1 − √(4at + 1)) / (2a)`, and `g` peaks at `−h_f`.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Arguments `(a, t)` of the rate functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateParams<T> {
    pub a: T,
    pub t: T,
}

impl<T: Real> RateParams<T> {
    pub fn new(a: T, t: T) -> Result<Self> {
        if !(a > T::zero() && a.is_finite()) {
            return Err(Error::Domain(format!("rate argument a must be positive, got {a}")));
        }
        if !(t > T::zero() && t.is_finite()) {
            return Err(Error::Domain(format!("rate argument t must be positive, got {t}")));
        }
        Ok(Self { a, t })
    }
}

/// Location and value of a rate-function supremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEvaluation<T> {
    pub h_star: T,
    pub value: T,
    /// `value` exceeds [`positivity_tolerance`].
    pub positive: bool,
}

/// Values at or below this are treated as zero when classifying a supremum.
pub fn positivity_tolerance<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(16.0))
}

/// `A = ln(κ + 1) + 2ϰ`, the per-dimension penalty of the posterior mode criterion.
///
/// Requires `κ > e − 1` (so that the posterior over dimensions exists) and
/// `ϰ > 0`; the result is then always greater than one.
pub fn penalty_constant<T: Real>(kappa: T, varkappa: T) -> Result<T> {
    if !(kappa > T::e_minus_one()) || !kappa.is_finite() {
        return Err(Error::Domain(format!("kappa must exceed e−1, got {kappa}")));
    }
    if !(varkappa > T::zero()) || !varkappa.is_finite() {
        return Err(Error::Domain(format!("varkappa must be positive, got {varkappa}")));
    }
    Ok(kappa.ln_1p() + T::lit(2.0) * varkappa)
}

#[inline]
fn f_raw<T: Real>(h: T, p: &RateParams<T>) -> T {
    let one = T::one();
    T::lit(0.5) * (p.a * h + (-h).ln_1p() - p.t * h / (one - h))
}

#[inline]
fn g_raw<T: Real>(h: T, p: &RateParams<T>) -> T {
    let one = T::one();
    T::lit(0.5) * (p.t * h / (one + h) + h.ln_1p() - p.a * h)
}

/// `f(h, a, t)`; defined for `h < 1`.
pub fn f<T: Real>(h: T, p: &RateParams<T>) -> Result<T> {
    if !(h < T::one()) {
        return Err(Error::Domain(format!("f requires h < 1, got {h}")));
    }
    Ok(f_raw(h, p))
}

/// `g(h, a, t) = f(−h, a, t)`; defined for `h > −1`.
pub fn g<T: Real>(h: T, p: &RateParams<T>) -> Result<T> {
    if !(h > -T::one()) {
        return Err(Error::Domain(format!("g requires h > -1, got {h}")));
    }
    Ok(g_raw(h, p))
}

/// Unconstrained maximizer of `f` over `h < 1`.
pub fn h_f<T: Real>(p: &RateParams<T>) -> T {
    let two = T::lit(2.0);
    let root = (T::lit(4.0) * p.a * p.t + T::one()).sqrt();
    (two * p.a - T::one() - root) / (two * p.a)
}

/// Unconstrained maximizer of `g` over `h > −1`.
pub fn h_g<T: Real>(p: &RateParams<T>) -> T {
    let two = T::lit(2.0);
    let root = (T::lit(4.0) * p.a * p.t + T::one()).sqrt();
    (T::one() - two * p.a + root) / (two * p.a)
}

/// `f_o(a, t) = sup_{h ∈ [0,1)} f(h, a, t)`.
///
/// Positive exactly when `a > t + 1`; otherwise the supremum is `f(0) = 0`.
pub fn f_sup<T: Real>(p: &RateParams<T>) -> RateEvaluation<T> {
    let h_star = h_f(p).max(T::zero());
    let value = f_raw(h_star, p);
    RateEvaluation {
        h_star,
        value,
        positive: value > positivity_tolerance(),
    }
}

/// `g_o(a, t) = sup_{h ∈ [0,1]} g(h, a, t)`.
///
/// Positive exactly when `a < t + 1`; otherwise the supremum is `g(0) = 0`.
pub fn g_sup<T: Real>(p: &RateParams<T>) -> RateEvaluation<T> {
    let h_star = h_g(p).max(T::zero()).min(T::one());
    let value = g_raw(h_star, p);
    RateEvaluation {
        h_star,
        value,
        positive: value > positivity_tolerance(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn rp(a: f64, t: f64) -> RateParams<f64> {
        RateParams::new(a, t).unwrap()
    }

    /// Uniform grid over `[0, upper]`.
    fn grid_max(upper: f64, points: usize, eval: impl Fn(f64) -> f64) -> (f64, f64) {
        let mut best = (0.0, eval(0.0));
        for k in 1..points {
            let h = upper * k as f64 / (points - 1) as f64;
            let v = eval(h);
            if v > best.1 {
                best = (h, v);
            }
        }
        best
    }

    #[test]
    fn penalty_constant_examples() {
        let e = std::f64::consts::E;
        // κ = e−1 is the excluded boundary; the formula tends to 2 there.
        assert!(penalty_constant(e - 1.0, 0.5).is_err());
        assert_abs_diff_eq!(penalty_constant(e - 1.0 + 1e-12, 0.5).unwrap(), 2.0, epsilon = 1e-11);
        assert_abs_diff_eq!(penalty_constant(e * e - 1.0, 2.0).unwrap(), 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            penalty_constant(1.9, 0.1).unwrap(),
            1.264_710_736_992_428_3,
            epsilon = 1e-14
        );
    }

    #[test]
    fn penalty_constant_rejects_bad_inputs() {
        assert!(penalty_constant(1.0, 0.5).is_err());
        assert!(penalty_constant(3.0, 0.0).is_err());
        assert!(penalty_constant(3.0, -1.0).is_err());
        assert!(penalty_constant(f64::NAN, 1.0).is_err());
        let msg = penalty_constant(1.0, 0.5).unwrap_err().to_string();
        assert!(msg.contains("kappa must exceed e−1"), "{msg}");
    }

    #[test]
    fn penalty_constant_exceeds_one() {
        for &k in &[1.7183, 2.0, 5.0, 100.0] {
            for &v in &[1e-6, 0.1, 3.0] {
                assert!(penalty_constant(k, v).unwrap() > 1.0);
            }
        }
    }

    #[test]
    fn f_and_g_examples() {
        assert_eq!(f(0.0, &rp(3.0, 2.0)).unwrap(), 0.0);
        assert_eq!(g(0.0, &rp(3.0, 2.0)).unwrap(), 0.0);
        assert_abs_diff_eq!(f(0.5, &rp(4.0, 1.0)).unwrap(), 0.153_426_409_720_027_35, epsilon = 1e-14);
        assert_abs_diff_eq!(g(1.0, &rp(2.0, 9.0)).unwrap(), 1.596_573_590_279_972_7, epsilon = 1e-14);
        assert_abs_diff_eq!(
            f(-0.3, &rp(2.0, 1.0)).unwrap(),
            g(0.3, &rp(2.0, 1.0)).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn f_and_g_domains() {
        assert!(f(1.0, &rp(2.0, 1.0)).is_err());
        assert!(f(1.5, &rp(2.0, 1.0)).is_err());
        assert!(g(-1.0, &rp(2.0, 1.0)).is_err());
        assert!(RateParams::new(0.0, 1.0).is_err());
        assert!(RateParams::new(1.0, -1.0).is_err());
    }

    #[test]
    fn f_sup_zero_on_boundary() {
        for &t in &[1.0, 2.0, 5.0] {
            let ev = f_sup(&rp(t + 1.0, t));
            assert_eq!(ev.h_star, 0.0);
            assert!(ev.value.abs() <= 1e-12);
            assert!(!ev.positive);
            let ev = g_sup(&rp(t + 1.0, t));
            assert!(ev.value.abs() <= 1e-12);
            assert!(!ev.positive);
        }
    }

    #[test]
    fn f_sup_matches_grid_oracle() {
        // Expected values frozen from a 10^7-point grid over [0, 1 - 1e-6].
        let ev = f_sup(&rp(4.0, 1.0));
        assert_abs_diff_eq!(ev.h_star, (7.0 - 17f64.sqrt()) / 8.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ev.value, 0.215_606_827_684_828_8, epsilon = 1e-12);
        assert!(ev.positive);

        let ev = f_sup(&rp(6.0, 1.0));
        assert_abs_diff_eq!(ev.h_star, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(ev.value, 0.5 * (2.0 - 2f64.ln()), epsilon = 1e-15);

        let p = rp(4.0, 1.0);
        let (_, grid) = grid_max(1.0 - 1e-6, 1_000_001, |h| f(h, &p).unwrap());
        assert!((grid - f_sup(&p).value).abs() <= 1e-8);
    }

    #[test]
    fn g_sup_matches_grid_oracle() {
        let ev = g_sup(&rp(1.5, 1.0));
        assert_abs_diff_eq!(ev.h_star, (7f64.sqrt() - 2.0) / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ev.value, 0.024_599_432_746_640_017, epsilon = 1e-12);

        let ev = g_sup(&rp(2.0, 9.0));
        assert_eq!(ev.h_star, 1.0);
        assert_abs_diff_eq!(ev.value, 1.596_573_590_279_972_7, epsilon = 1e-14);
        assert!(h_g(&rp(2.0, 9.0)) > 1.38);

        let p = rp(1.5, 1.0);
        let (_, grid) = grid_max(1.0, 1_000_001, |h| g(h, &p).unwrap());
        assert!((grid - g_sup(&p).value).abs() <= 1e-8);
    }

    #[test]
    fn printed_closed_form_agrees_with_evaluation_at_peak() {
        // f_o(a,t) = (2a−1−r)/4 + ½ ln((1+r)/(2a)) − (2a−1−r)t/(2(1+r)),  r = √(4at+1)
        let printed = |a: f64, t: f64| {
            let r = (4.0 * a * t + 1.0).sqrt();
            (2.0 * a - 1.0 - r) / 4.0 + 0.5 * ((1.0 + r) / (2.0 * a)).ln()
                - (2.0 * a - 1.0 - r) * t / (2.0 * (1.0 + r))
        };
        for &(a, t) in &[(4.0, 1.0), (6.0, 1.0), (13.0, 2.5), (20.0, 0.1), (3.0, 1.5)] {
            let p = rp(a, t);
            assert!((printed(a, t) - f_sup(&p).value).abs() <= 1e-12, "a={a} t={t}");
        }
    }

    #[test]
    fn f_unimodal_around_peak() {
        for &(a, t) in &[(4.0, 1.0), (10.0, 3.0), (2.5, 0.2)] {
            let p = rp(a, t);
            let peak = h_f(&p);
            let step = 1e-3;
            let mut h = 0.0;
            while h + step < 1.0 - 1e-6 {
                let diff = f(h + step, &p).unwrap() - f(h, &p).unwrap();
                if h + step <= peak {
                    assert!(diff >= -1e-15, "not increasing at h={h}");
                } else if h >= peak {
                    assert!(diff <= 1e-15, "not decreasing at h={h}");
                }
                h += step;
            }
        }
    }

    #[test]
    fn single_precision_tracks_double() {
        let p32 = RateParams::new(6.0f32, 1.0f32).unwrap();
        let ev = f_sup(&p32);
        assert!((ev.value - 0.653_426_4f32).abs() < 1e-5);
        let ev = g_sup(&RateParams::new(2.0f32, 9.0f32).unwrap());
        assert!((ev.value - 1.596_573_6f32).abs() < 1e-5);
        assert!(penalty_constant(1.0f32, 0.5).is_err());
    }
}
