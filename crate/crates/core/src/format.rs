//! Plain-text serialization: the signal column format and the CSV exports.
//!
//! Every number is written with 17 significant digits so doubles round-trip.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::experiments::{ExperimentReport, LowerBoundReport, SmoothnessReport};
use crate::oracle::OracleResult;
use crate::posterior::PosteriorOverD;
use crate::scalar::Real;
use crate::signals::Signal;

const SIGNAL_MAGIC: &str = "# effdim-signal v1";
const REPORT_MAGIC: &str = "# effdim-report v1";

pub fn fmt_num<T: Real>(x: T) -> String {
    format!("{:.16e}", x)
}

fn fmt_opt(v: Option<usize>) -> String {
    v.map_or_else(|| "NA".to_string(), |k| k.to_string())
}

pub fn signal_to_text<T: Real>(theta: &Signal<T>) -> String {
    let mut out = format!(
        "{SIGNAL_MAGIC} N={} tail_energy={}\n",
        theta.len(),
        fmt_num(theta.tail_energy())
    );
    for &c in theta.coeffs() {
        out.push_str(&fmt_num(c));
        out.push('\n');
    }
    out
}

pub fn signal_from_text<T: Real>(text: &str) -> Result<Signal<T>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty signal file".into()))?;
    let rest = header
        .strip_prefix(SIGNAL_MAGIC)
        .ok_or_else(|| Error::Parse(format!("signal header must start with '{SIGNAL_MAGIC}'")))?;
    let mut len = None;
    let mut tail = None;
    for field in rest.split_whitespace() {
        match field.split_once('=') {
            Some(("N", v)) => {
                len = Some(v.parse::<usize>().map_err(|e| Error::Parse(format!("bad N '{v}': {e}")))?)
            }
            Some(("tail_energy", v)) => tail = Some(parse_num::<T>(v)?),
            _ => return Err(Error::Parse(format!("unknown header field '{field}'"))),
        }
    }
    let len = len.ok_or_else(|| Error::Parse("signal header lacks N".into()))?;
    let tail = tail.ok_or_else(|| Error::Parse("signal header lacks tail_energy".into()))?;
    let coeffs: Vec<T> = lines
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(parse_num)
        .collect::<Result<_>>()?;
    if coeffs.len() != len {
        return Err(Error::Parse(format!(
            "header declares N={len} but {} coefficients follow",
            coeffs.len()
        )));
    }
    Signal::new(coeffs, tail)
}

pub(crate) fn parse_num<T: Real>(s: &str) -> Result<T> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("bad number '{s}': {e}")))?;
    Ok(T::lit(v))
}

/// Columns `d, r_tau, approx_error, dim_cost`.
pub fn risk_curve_csv<T: Real>(oracle: &OracleResult<T>) -> String {
    let mut out = String::from("d,r_tau,approx_error,dim_cost\n");
    for (k, (&r, &a)) in oracle.risk_curve.iter().zip(&oracle.approx_error).enumerate() {
        let d = k + 1;
        let _ = writeln!(out, "{d},{},{},{}", fmt_num(r), fmt_num(a), fmt_num(oracle.dim_cost(d)));
    }
    out
}

/// Columns `d, pmf, cumulative`, closed by a `tail` row holding `P(D > n)`.
pub fn pmf_csv<T: Real>(post: &PosteriorOverD<T>) -> String {
    let mut out = String::from("d,pmf,cumulative\n");
    let mut cum = T::zero();
    for (k, &m) in post.pmf.iter().enumerate() {
        cum = cum + m;
        let _ = writeln!(out, "{},{},{}", k + 1, fmt_num(m), fmt_num(cum));
    }
    let _ = writeln!(
        out,
        "tail,{},{}",
        fmt_num(post.tail_mass),
        fmt_num(cum + post.tail_mass)
    );
    out
}

fn write_header(out: &mut String, kind: &str, config: &[(String, String)], metadata: &[(String, String)]) {
    let _ = writeln!(out, "{REPORT_MAGIC}");
    let _ = writeln!(out, "# experiment = {kind}");
    for (k, v) in config {
        let _ = writeln!(out, "# {k} = {v}");
    }
    // configured keys are not repeated
    for (k, v) in metadata.iter().filter(|(k, _)| !config.iter().any(|(c, _)| c == k)) {
        let _ = writeln!(out, "# {k} = {v}");
    }
}

/// Bound-experiment report; `config` is echoed into the header before the
/// report's own metadata.
pub fn report_csv<T: Real>(report: &ExperimentReport<T>, config: &[(String, String)]) -> String {
    let mut out = String::new();
    write_header(&mut out, report.kind.name(), config, &report.metadata);
    out.push_str(
        "offset,n_below,n_above,posterior_mass,posterior_se,dhat_freq,dhat_se,theory_bound,vacuous,satisfied\n",
    );
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.offset,
            fmt_opt(r.below),
            fmt_opt(r.above),
            fmt_num(r.posterior_mass),
            fmt_num(r.posterior_se),
            fmt_num(r.dhat_freq),
            fmt_num(r.dhat_se),
            fmt_num(r.theory_bound),
            r.vacuous,
            r.satisfied
        );
    }
    let _ = writeln!(out, "# all_satisfied = {}", report.all_satisfied());
    out
}

pub fn lower_bound_csv<T: Real>(report: &LowerBoundReport<T>, config: &[(String, String)]) -> String {
    let mut out = String::new();
    write_header(&mut out, "lower-bound", config, &report.metadata);
    let _ = writeln!(out, "# d_tau_prime = {}", report.d_tau_prime);
    let _ = writeln!(out, "# d_tau_double_prime = {}", report.d_tau_double);
    let _ = writeln!(out, "# separation = {}", fmt_num(report.separation));
    out.push_str("p1,p1_se,p2,p2_se,sum,combined_se,delta_prime,satisfied\n");
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{}",
        fmt_num(report.p1),
        fmt_num(report.p1_se),
        fmt_num(report.p2),
        fmt_num(report.p2_se),
        fmt_num(report.sum),
        fmt_num(report.combined_se),
        fmt_num(report.delta_prime),
        report.satisfied
    );
    let _ = writeln!(out, "# delta_prime = {}", fmt_num(report.delta_prime));
    let _ = writeln!(out, "# all_satisfied = {}", report.satisfied);
    out
}

pub fn smoothness_csv<T: Real>(report: &SmoothnessReport<T>, config: &[(String, String)]) -> String {
    let mut out = String::new();
    let meta = vec![
        ("s".to_string(), fmt_num(report.s)),
        ("tau".to_string(), fmt_num(report.tau)),
        ("c".to_string(), fmt_num(report.lower_factor)),
        ("C".to_string(), fmt_num(report.upper_factor)),
        ("replicates".to_string(), report.replicates.to_string()),
        ("data_len".to_string(), report.data_len.to_string()),
    ];
    write_header(&mut out, "smoothness", config, &meta);
    out.push_str(
        "eps,d_tau,band,median_dhat,median_s_hat,median_abs_err,scaled_err,outside_freq,undefined,bracket_lo,bracket_hi\n",
    );
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt_num(r.eps),
            r.d_tau,
            fmt_num(r.band),
            fmt_num(r.median_dhat),
            fmt_num(r.median_s_hat),
            fmt_num(r.median_abs_err),
            fmt_num(r.scaled_err),
            fmt_num(r.outside_freq),
            r.undefined,
            fmt_num(r.bracket_lo),
            fmt_num(r.bracket_hi)
        );
    }
    let _ = writeln!(out, "# monotone_dtau = {}", report.monotone_dtau);
    let _ = writeln!(out, "# monotone_error = {}", report.monotone_error);
    let _ = writeln!(out, "# band_ratio = {}", fmt_num(report.band_ratio));
    let _ = writeln!(out, "# note: {}", report.note);
    out
}
