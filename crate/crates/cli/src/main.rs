mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use effdim::experiments::{
    lower_bound_experiment, mc_overshoot, mc_two_sided, mc_undershoot, smoothness_sweep, McConfig,
    SweepSettings, TwoSidedCase,
};
use effdim::format::{
    fmt_num, lower_bound_csv, pmf_csv, report_csv, risk_curve_csv, signal_to_text, smoothness_csv,
};
use effdim::oracle::effective_dimension;
use effdim::posterior::{map_dimension_from, pmf};
use effdim::rng::ReplicateSeed;
use effdim::signals::{simulate, NoiseLevel, Observation};

use config::{Config, ConfigResult, SIGNAL_KEYS};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "effdim", version, about = "Local effective-dimension inference in the Gaussian sequence model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Oracle τ-dimension and risk curve of a signal.
    Oracle(Common),
    /// Posterior over the dimension and its mode.
    Posterior(Common),
    /// Monte Carlo check of a concentration or lower bound.
    Verify(Common),
    /// Smoothness sweep over a grid of noise levels.
    Smoothness(Common),
    /// Write a signal in the plain-text signal format.
    MakeSignal(Common),
}

#[derive(Args)]
struct Common {
    /// Run configuration (`key = value` per line).
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed, overriding the `seed` key.
    #[arg(long)]
    seed: Option<u64>,
}

/// What a subcommand produced: the file body, summary lines and whether
/// every checked claim held.
struct Output {
    body: String,
    summary: Vec<String>,
    verified: bool,
}

fn keys<'a>(extra: &[&'a str]) -> Vec<&'a str> {
    let mut k: Vec<&str> = SIGNAL_KEYS.to_vec();
    k.extend_from_slice(extra);
    k.push("out");
    k
}

fn oracle(cfg: &Config) -> ConfigResult<Output> {
    cfg.reject_unknown(&keys(&["epsilon", "tau"]))?;
    let theta = cfg.signal()?;
    let eps = cfg.noise()?;
    let o = effective_dimension(&theta, eps, cfg.or("tau", 1.0)?).map_err(|e| e.to_string())?;
    Ok(Output {
        body: risk_curve_csv(&o),
        summary: vec![format!("d_tau = {}", o.d_tau), format!("r_tau = {}", fmt_num(o.r_tau))],
        verified: true,
    })
}

fn posterior(cfg: &Config) -> ConfigResult<Output> {
    cfg.reject_unknown(&keys(&["epsilon", "kappa", "varkappa", "data", "n", "seed"]))?;
    let eps = cfg.noise()?;
    let prior = cfg.prior(eps)?;
    let x = match cfg.list::<f64>("data")? {
        Some(data) => Observation::from_data(data, eps).map_err(|e| e.to_string())?,
        None => {
            let theta = cfg.signal()?;
            let n = cfg.or("n", theta.len())?;
            let seed = ReplicateSeed::new(cfg.or("seed", 0)?, 0);
            simulate(&theta, eps, n, seed).map_err(|e| e.to_string())?
        }
    };
    let post = pmf(&x, &prior).map_err(|e| e.to_string())?;
    Ok(Output {
        body: pmf_csv(&post),
        summary: vec![
            format!("dhat = {}", map_dimension_from(&post)),
            format!("tail_mass = {}", fmt_num(post.tail_mass)),
        ],
        verified: true,
    })
}

fn mc_config(cfg: &Config, default_n: usize) -> ConfigResult<McConfig> {
    Ok(McConfig {
        replicates: cfg.or("replicates", 2000)?,
        data_len: cfg.or("n", default_n)?,
        master_seed: cfg.or("seed", 0)?,
        offsets: cfg.list("offsets")?.unwrap_or_else(|| (1..=5).collect()),
    })
}

const VERIFY_KEYS: &[&str] = &[
    "theorem", "epsilon", "tau", "kappa", "varkappa", "t0", "H0", "n0", "replicates", "n", "seed",
    "offsets",
];

fn verify(cfg: &Config) -> ConfigResult<Output> {
    cfg.reject_unknown(&keys(VERIFY_KEYS))?;
    let theorem: String = cfg.req("theorem")?;
    let eps = cfg.noise()?;
    let prior = cfg.prior(eps)?;
    let tau: f64 = cfg.req("tau")?;
    let err = |e: effdim::Error| e.to_string();

    if theorem == "lower-bound" {
        let mc = mc_config(cfg, 50)?;
        let rep = lower_bound_experiment(tau, eps, cfg.req("L1")?, cfg.req("L2")?, cfg.req("Delta")?, &prior, &mc)
            .map_err(err)?;
        return Ok(Output {
            body: lower_bound_csv(&rep, cfg.entries()),
            summary: vec![
                format!("sum = {}", fmt_num(rep.sum)),
                format!("delta_prime = {}", fmt_num(rep.delta_prime)),
                format!("satisfied = {}", rep.satisfied),
            ],
            verified: rep.satisfied,
        });
    }

    let theta = cfg.signal()?;
    let mc = mc_config(cfg, theta.len())?;
    let rep = match theorem.as_str() {
        "overshoot" => mc_overshoot(&theta, &prior, tau, &mc),
        "undershoot" => mc_undershoot(&theta, &prior, tau, &mc),
        "two-sided-i" => {
            let case = TwoSidedCase::Tail {
                t0: cfg.req("t0")?,
                n0: cfg.req("N0")?,
            };
            mc_two_sided(&theta, &prior, tau, case, &mc)
        }
        "two-sided-ii" => {
            let case = TwoSidedCase::Head {
                h0: cfg.req("H0")?,
                n0: cfg.req("n0")?,
            };
            mc_two_sided(&theta, &prior, tau, case, &mc)
        }
        other => {
            return Err(format!(
                "unknown theorem '{other}' (expected overshoot, undershoot, two-sided-i, two-sided-ii or lower-bound)"
            ))
        }
    }
    .map_err(err)?;
    let satisfied = rep.all_satisfied();
    Ok(Output {
        body: report_csv(&rep, cfg.entries()),
        summary: vec![
            format!("d_tau = {}", rep.d_tau),
            format!("informative_rows = {}", rep.informative_rows()),
            format!("all_satisfied = {satisfied}"),
        ],
        verified: satisfied,
    })
}

fn smoothness(cfg: &Config) -> ConfigResult<Output> {
    cfg.reject_unknown(&keys(&[
        "tau", "kappa", "varkappa", "eps_grid", "band_lower", "band_upper", "replicates", "n", "seed",
    ]))?;
    let settings = SweepSettings {
        class: cfg.class()?,
        tau: cfg.or("tau", 1.0)?,
        eps_grid: cfg.list("eps_grid")?.ok_or("missing required key 'eps_grid'")?,
        lower_factor: cfg.or("band_lower", 0.5)?,
        upper_factor: cfg.or("band_upper", 2.0)?,
    };
    // the sweep sets the noise level per grid point
    let prior = cfg.prior(NoiseLevel::new(1.0).map_err(|e| e.to_string())?)?;
    let mc = McConfig {
        replicates: cfg.or("replicates", 50)?,
        data_len: cfg.or("n", 512)?,
        master_seed: cfg.or("seed", 0)?,
        offsets: Vec::new(),
    };
    let rep = smoothness_sweep(&settings, &prior, &mc).map_err(|e| e.to_string())?;
    let dims: Vec<String> = rep.rows.iter().map(|r| r.d_tau.to_string()).collect();
    Ok(Output {
        body: smoothness_csv(&rep, cfg.entries()),
        summary: vec![
            format!("d_tau = {}", dims.join(",")),
            format!("monotone_dtau = {}", rep.monotone_dtau),
            format!("monotone_error = {}", rep.monotone_error),
            format!("band_ratio = {}", fmt_num(rep.band_ratio)),
        ],
        verified: rep.monotone_dtau,
    })
}

fn make_signal(cfg: &Config) -> ConfigResult<Output> {
    cfg.reject_unknown(&keys(&["epsilon", "tau"]))?;
    let theta = cfg.signal()?;
    Ok(Output {
        body: signal_to_text(&theta),
        summary: vec![
            format!("N = {}", theta.len()),
            format!("tail_energy = {}", fmt_num(theta.tail_energy())),
        ],
        verified: true,
    })
}

fn run(cli: Cli) -> Result<bool, String> {
    let (common, handler): (&Common, fn(&Config) -> ConfigResult<Output>) = match &cli.command {
        Command::Oracle(c) => (c, oracle),
        Command::Posterior(c) => (c, posterior),
        Command::Verify(c) => (c, verify),
        Command::Smoothness(c) => (c, smoothness),
        Command::MakeSignal(c) => (c, make_signal),
    };
    let mut cfg = Config::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.set("seed", seed.to_string());
    }
    let out = match &common.out {
        Some(p) => Some(p.clone()),
        None => cfg.path("out")?,
    };
    let output = handler(&cfg)?;
    match out {
        Some(path) => {
            std::fs::write(&path, &output.body)
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            for line in &output.summary {
                println!("{line}");
            }
        }
        None => {
            for line in &output.summary {
                eprintln!("{line}");
            }
            print!("{}", output.body);
        }
    }
    Ok(output.verified)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY_FAILED),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
