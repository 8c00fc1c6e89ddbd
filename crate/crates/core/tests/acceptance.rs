//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use effdim::experiments::{
    lower_bound_experiment, mc_overshoot, mc_two_sided, mc_undershoot, smoothness_sweep, McConfig,
    SweepSettings, TwoSidedCase,
};
use effdim::format::{lower_bound_csv, report_csv, smoothness_csv};
use effdim::oracle::{effective_dimension, head_condition, tail_condition, tau_scaling_identity_check};
use effdim::posterior::{crit, map_dimension, pmf, truncation_tv, PriorParams};
use effdim::rate::{f_sup, g_sup, RateParams};
use effdim::rng::ReplicateSeed;
use effdim::signals::{
    adversarial_pair, head_heavy_signal, power_law_signal, simulate, NoiseLevel, Observation,
    Signal, SmoothnessClassParams,
};

const E: f64 = std::f64::consts::E;

const RATE_SAMPLES: usize = 10_000;
const RATE_TOL: f64 = 1e-8;
const RATE_BOUNDARY_TOL: f64 = 1e-12;
const RATE_GRID_POINTS: usize = 2001;
const RATE_GRID_LEVELS: usize = 5;
const RUNTIME_LIMIT: Duration = Duration::from_secs(60);

const ORACLE_SIGNALS: usize = 1000;
const ORACLE_MAX_LEN: usize = 200;
const RISK_REL_TOL: f64 = 1e-12;

const POSTERIOR_DATASETS: usize = 500;
const NORMALIZATION_TOL: f64 = 1e-12;
const TRUNCATION_TV: f64 = 1e-6;
const TRUNCATION_MAX_N: usize = 400;

const BOUND_REPLICATES: usize = 2000;
const LOWER_BOUND_REPLICATES: usize = 5000;
const DELTA_PRIME: f64 = 0.160263;
const SEPARATION_TOL: f64 = 1e-10;
const SMOOTHNESS_REPLICATES: usize = 50;
const BAND_FACTOR: f64 = 4.0;

const MASTER_SEED: u64 = 20_240_501;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = fn() -> Outcome;

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    lo + (hi - lo) * u
}

fn rate_sample() -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED);
    (0..RATE_SAMPLES)
        .map(|_| (uniform(&mut rng, 0.1, 20.0), uniform(&mut rng, 0.1, 20.0)))
        .collect()
}

/// Maximum of a concave function on `[lo, hi]` by repeated grid zooming.
fn zoom_grid_max(lo: f64, hi: f64, eval: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..RATE_GRID_LEVELS {
        let step = (hi - lo) / (RATE_GRID_POINTS - 1) as f64;
        let mut arg = lo;
        for k in 0..RATE_GRID_POINTS {
            let h = lo + step * k as f64;
            let v = eval(h);
            if v > best {
                best = v;
                arg = h;
            }
        }
        let (nlo, nhi) = ((arg - step).max(lo), (arg + step).min(hi));
        lo = nlo;
        hi = nhi;
    }
    best
}

fn f_direct(h: f64, a: f64, t: f64) -> f64 {
    0.5 * (a * h + (1.0 - h).ln() - t * h / (1.0 - h))
}

fn g_direct(h: f64, a: f64, t: f64) -> f64 {
    f_direct(-h, a, t)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut failures = 0;
    for (a, t) in rate_sample() {
        let p = RateParams::new(a, t).unwrap();
        let fg = zoom_grid_max(0.0, 1.0 - 1e-15, |h| f_direct(h, a, t));
        let gg = zoom_grid_max(0.0, 1.0, |h| g_direct(h, a, t));
        let df = (f_sup(&p).value - fg).abs();
        let dg = (g_sup(&p).value - gg).abs();
        worst = worst.max(df).max(dg);
        if df > RATE_TOL || dg > RATE_TOL {
            failures += 1;
        }
    }
    let mut boundary_ok = true;
    for t in [0.1f64, 0.5, 1.0, 3.7, 10.0, 19.0] {
        let p = RateParams::new(t + 1.0, t).unwrap();
        boundary_ok &= f_sup(&p).value.abs() <= RATE_BOUNDARY_TOL;
        boundary_ok &= g_sup(&p).value.abs() <= RATE_BOUNDARY_TOL;
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && boundary_ok && elapsed < RUNTIME_LIMIT,
        format!(
            "{RATE_SAMPLES} samples, max |closed - grid| = {worst:.3e}, boundary ok = {boundary_ok}, {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut exceptions = 0;
    for (a, t) in rate_sample() {
        let p = RateParams::new(a, t).unwrap();
        let above = a > t + 1.0;
        let below = a < t + 1.0;
        if (f_sup(&p).value > 0.0) != above || (g_sup(&p).value > 0.0) != below {
            exceptions += 1;
        }
    }
    outcome(exceptions == 0, format!("{exceptions} exceptions in {RATE_SAMPLES} samples"))
}

fn random_signal(rng: &mut ChaCha8Rng) -> Signal<f64> {
    let len = 1 + (rng.next_u64() % ORACLE_MAX_LEN as u64) as usize;
    let decay = uniform(rng, 0.0, 2.0);
    let coeffs = (1..=len)
        .map(|i| uniform(rng, -3.0, 3.0) * (i as f64).powf(-decay))
        .collect();
    Signal::new(coeffs, 0.0).unwrap()
}

/// `d_τ` by recomputing every `Σ_{i>d} θ_i²` from scratch.
fn naive_oracle(theta: &Signal<f64>, eps: f64, tau: f64) -> (usize, f64) {
    let c = theta.coeffs();
    let mut best = (0, f64::INFINITY);
    for d in 1..=c.len() {
        let tail: f64 = c[d..].iter().rev().fold(theta.tail_energy(), |acc, &v| acc + v * v);
        let r = tail + tau * eps * eps * d as f64;
        if r < best.1 {
            best = (d, r);
        }
    }
    best
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED + 3);
    let taus = [0.25, 0.5, 1.0, 2.0, 4.0, 9.0];
    let (mut naive_bad, mut mono_bad, mut sandwich_bad, mut scaling_bad) = (0, 0, 0, 0);
    for _ in 0..ORACLE_SIGNALS {
        let theta = random_signal(&mut rng);
        let e = uniform(&mut rng, 0.05, 1.5);
        let eps = NoiseLevel::new(e).unwrap();
        let mut dims = Vec::new();
        let r1 = effective_dimension(&theta, eps, 1.0).unwrap().r_tau;
        for &tau in &taus {
            let o = effective_dimension(&theta, eps, tau).unwrap();
            let (d, r) = naive_oracle(&theta, e, tau);
            if o.d_tau != d || (o.r_tau - r).abs() > RISK_REL_TOL * r {
                naive_bad += 1;
            }
            if tau >= 1.0 && !(r1 <= o.r_tau * (1.0 + RISK_REL_TOL) && o.r_tau <= tau * r1 * (1.0 + RISK_REL_TOL)) {
                sandwich_bad += 1;
            }
            if !tau_scaling_identity_check(&theta, eps, tau).unwrap() {
                scaling_bad += 1;
            }
            dims.push(o.d_tau);
        }
        // taus ascend, so dimensions must not increase
        if dims.windows(2).any(|w| w[1] > w[0]) {
            mono_bad += 1;
        }
    }
    outcome(
        naive_bad + mono_bad + sandwich_bad + scaling_bad == 0,
        format!(
            "{ORACLE_SIGNALS} signals x {} taus: naive {naive_bad}, monotone {mono_bad}, sandwich {sandwich_bad}, scaling {scaling_bad} failures",
            taus.len()
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED + 4);
    let (mut norm_bad, mut map_bad) = (0, 0);
    let mut worst_norm = 0.0f64;
    for k in 0..POSTERIOR_DATASETS {
        let len = 1 + (rng.next_u64() % 150) as usize;
        let e = uniform(&mut rng, 0.1, 2.0);
        let eps = NoiseLevel::new(e).unwrap();
        let kappa = uniform(&mut rng, E - 1.0 + 1e-3, 30.0);
        let varkappa = uniform(&mut rng, 0.01, 3.0);
        let p = PriorParams::new(kappa, varkappa, eps).unwrap();
        let theta = random_signal(&mut rng);
        let x = simulate(&theta, eps, len, ReplicateSeed::new(MASTER_SEED, k as u64)).unwrap();
        let post = pmf(&x, &p).unwrap();
        let dev = (post.total() - 1.0).abs();
        worst_norm = worst_norm.max(dev);
        if dev > NORMALIZATION_TOL {
            norm_bad += 1;
        }
        let mut argmin = (0, f64::INFINITY);
        for d in 1..=len {
            let c = crit(d, &x, &p).unwrap();
            if c < argmin.1 {
                argmin = (d, c);
            }
        }
        if map_dimension(&x, &p).unwrap() != argmin.0 {
            map_bad += 1;
        }
    }

    let eps = NoiseLevel::new(0.1).unwrap();
    let p = PriorParams::new(E * E - 1.0, 2.0, eps).unwrap();
    let theta = power_law_signal(1.0, 1.0, 2 * TRUNCATION_MAX_N).unwrap();
    let x: Observation<f64> =
        simulate(&theta, eps, 2 * TRUNCATION_MAX_N, ReplicateSeed::new(MASTER_SEED, 1 << 40)).unwrap();
    let tvs: Vec<f64> = (1..=TRUNCATION_MAX_N)
        .map(|n| truncation_tv(&x, &p, n).unwrap())
        .collect();
    let threshold = tvs.iter().position(|&v| v < TRUNCATION_TV).map(|i| i + 1);
    let stable = threshold.is_some_and(|n0| tvs[n0 - 1..].iter().all(|&v| v < TRUNCATION_TV));

    outcome(
        norm_bad == 0 && map_bad == 0 && stable,
        format!(
            "{POSTERIOR_DATASETS} datasets: max |total - 1| = {worst_norm:.2e}, map mismatches {map_bad}; truncation threshold n = {} (stable through {TRUNCATION_MAX_N}: {stable})",
            threshold.map_or("none".to_string(), |n| n.to_string())
        ),
    )
}

fn prior_a6(eps: NoiseLevel<f64>) -> PriorParams<f64> {
    PriorParams::new(E * E - 1.0, 2.0, eps).unwrap()
}

fn prior_a2(eps: NoiseLevel<f64>) -> PriorParams<f64> {
    PriorParams::new(1.5f64.exp() - 1.0, 0.25, eps).unwrap()
}

fn mc(data_len: usize, offsets: Vec<usize>, replicates: usize) -> McConfig {
    McConfig {
        replicates,
        data_len,
        master_seed: MASTER_SEED,
        offsets,
    }
}

fn run_overshoot() -> String {
    let eps = NoiseLevel::new(1.0).unwrap();
    let rep = mc_overshoot(
        &Signal::zeros(1).unwrap(),
        &prior_a6(eps),
        1.0,
        &mc(50, (1..=5).collect(), BOUND_REPLICATES),
    )
    .unwrap();
    report_csv(&rep, &[])
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let eps = NoiseLevel::new(1.0).unwrap();
    let rep = mc_overshoot(
        &Signal::zeros(1).unwrap(),
        &prior_a6(eps),
        1.0,
        &mc(50, (1..=5).collect(), BOUND_REPLICATES),
    )
    .unwrap();
    let elapsed = start.elapsed();
    let alpha = rep.alpha.unwrap();
    let last = rep.rows.last().unwrap();
    outcome(
        rep.all_satisfied() && rep.informative_rows() == 5 && elapsed < RUNTIME_LIMIT,
        format!(
            "alpha = {alpha:.6}, d_tau = {}, n=5: bound {:.5}, mass {:.5}, freq {:.5}; {:.1}s",
            rep.d_tau,
            last.theory_bound,
            last.posterior_mass,
            last.dhat_freq,
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_6() -> Outcome {
    let eps = NoiseLevel::new(1.0).unwrap();
    let (_, theta) = adversarial_pair(9.0, eps, 3, 3, 1.1).unwrap();
    let rep = mc_undershoot(&theta, &prior_a2(eps), 9.0, &mc(50, vec![1, 2, 3], BOUND_REPLICATES)).unwrap();
    let first = &rep.rows[0];
    outcome(
        rep.all_satisfied() && rep.informative_rows() == 3,
        format!(
            "beta = {:.5}, d_tau = {}, n=1: bound {:.4}, mass {:.5}, freq {:.5}",
            rep.beta.unwrap(),
            rep.d_tau,
            first.theory_bound,
            first.posterior_mass,
            first.dhat_freq
        ),
    )
}

fn run_lower_bound() -> effdim::experiments::LowerBoundReport<f64> {
    let eps = NoiseLevel::new(1.0).unwrap();
    lower_bound_experiment(1.0, eps, 3, 3, 1.1, &prior_a2(eps), &mc(50, vec![1], LOWER_BOUND_REPLICATES))
        .unwrap()
}

fn criterion_7() -> Outcome {
    let rep = run_lower_bound();
    let floor_ok = rep.sum >= DELTA_PRIME - 3.0 * rep.combined_se;
    let pair_ok = (rep.separation - 1.1).abs() <= SEPARATION_TOL
        && rep.d_tau_prime == 1
        && rep.d_tau_double == 7;
    outcome(
        floor_ok && pair_ok && rep.satisfied,
        format!(
            "p1 = {:.4}, p2 = {:.4}, sum = {:.4} (se {:.4}) vs delta' = {:.6}; separation = {:.12}, d_tau = ({}, {})",
            rep.p1, rep.p2, rep.sum, rep.combined_se, rep.delta_prime, rep.separation, rep.d_tau_prime, rep.d_tau_double
        ),
    )
}

const CASE_I_TAU: f64 = 20.0;
const CASE_I_T0: f64 = 1.0;
const CASE_I_N0: usize = 40;
const CASE_II_H0: f64 = 20.0;
const CASE_II_N0: usize = 1;

fn case_i_signal() -> Signal<f64> {
    // θ_i² = 20·8⁵·i⁻⁵, so θ_8² = τε²
    power_law_signal(2.0, (20.0f64 * 8f64.powi(5)).sqrt(), 200).unwrap()
}

fn criterion_8() -> Outcome {
    let eps = NoiseLevel::new(1.0).unwrap();
    let p = prior_a6(eps);

    let theta_i = case_i_signal();
    let member_i = tail_condition(&theta_i, eps, CASE_I_TAU, CASE_I_T0, CASE_I_N0).unwrap();
    let rep_i = mc_two_sided(
        &theta_i,
        &p,
        CASE_I_TAU,
        TwoSidedCase::Tail { t0: CASE_I_T0, n0: CASE_I_N0 },
        &mc(200, (1..=5).collect(), BOUND_REPLICATES),
    )
    .unwrap();

    let theta_ii = head_heavy_signal(eps, 25.0, 10).unwrap();
    let member_ii = head_condition(&theta_ii, eps, 1.0, CASE_II_H0, CASE_II_N0).unwrap();
    let rep_ii = mc_two_sided(
        &theta_ii,
        &p,
        1.0,
        TwoSidedCase::Head { h0: CASE_II_H0, n0: CASE_II_N0 },
        &mc(50, (1..=5).collect(), BOUND_REPLICATES),
    )
    .unwrap();

    outcome(
        member_i.member
            && member_ii.member
            && rep_i.all_satisfied()
            && rep_ii.all_satisfied()
            && rep_i.informative_rows() > 0
            && rep_ii.informative_rows() > 0,
        format!(
            "case i: d_tau = {}, {} informative rows, all satisfied = {}; case ii: d_tau = {}, {} informative rows, all satisfied = {}",
            rep_i.d_tau,
            rep_i.informative_rows(),
            rep_i.all_satisfied(),
            rep_ii.d_tau,
            rep_ii.informative_rows(),
            rep_ii.all_satisfied()
        ),
    )
}

fn run_smoothness() -> effdim::experiments::SmoothnessReport<f64> {
    let settings = SweepSettings {
        class: SmoothnessClassParams::new(1.0, 1.0, 0.1, 2.0, 2).unwrap(),
        tau: 1.0,
        eps_grid: vec![0.3, 0.1, 0.03, 0.01],
        lower_factor: 0.5,
        upper_factor: 2.0,
    };
    smoothness_sweep(
        &settings,
        &prior_a2(NoiseLevel::new(1.0).unwrap()),
        &mc(512, vec![], SMOOTHNESS_REPLICATES),
    )
    .unwrap()
}

fn criterion_9() -> Outcome {
    let rep = run_smoothness();
    let errs: Vec<String> = rep.rows.iter().map(|r| format!("{:.3}", r.median_abs_err)).collect();
    let dims: Vec<String> = rep.rows.iter().map(|r| r.d_tau.to_string()).collect();
    outcome(
        rep.monotone_dtau && rep.monotone_error && rep.band_ratio <= BAND_FACTOR,
        format!(
            "d_tau = [{}], median |s_hat - s| = [{}], band ratio = {:.3}",
            dims.join(", "),
            errs.join(", "),
            rep.band_ratio
        ),
    )
}

fn criterion_10() -> Outcome {
    type CsvRun = fn() -> String;
    let runs: [(&str, CsvRun); 3] = [
        ("overshoot", run_overshoot),
        ("lower-bound", || lower_bound_csv(&run_lower_bound(), &[])),
        ("smoothness", || smoothness_csv(&run_smoothness(), &[])),
    ];
    let mut differing = Vec::new();
    for (name, run) in runs {
        if run().as_bytes() != run().as_bytes() {
            differing.push(name);
        }
    }
    outcome(
        differing.is_empty(),
        format!("reran overshoot, lower-bound, smoothness; differing: {:?}", differing),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("rate functions match grid search", criterion_1),
        ("rate sign trichotomy", criterion_2),
        ("oracle brute force and identities", criterion_3),
        ("posterior contracts", criterion_4),
        ("overshoot bound", criterion_5),
        ("undershoot bound", criterion_6),
        ("two-point lower bound", criterion_7),
        ("two-sided bounds", criterion_8),
        ("smoothness sweep", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {} -- {}",
            k + 1,
            if o.pass { "PASS" } else { "FAIL" },
            name,
            o.detail
        );
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
