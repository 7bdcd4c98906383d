use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use kal::extension::{
    build_balas_extension, hull_check, verify_extension, BalasExtension, ExtensionReport,
    HullReport,
};
use kal::gf::{build_nw_family, is_prime, verify_set_system, SetSystem, SetSystemReport};
use kal::lowerbound::{
    certify_with, check_certificate, lowerbound_instance, LowerBoundParams, WitnessCertificate,
    CERTIFICATE_FORMAT,
};
use kal::model::{read_json, write_json};
use kal::pairs::parse_pair_policy;
use kal::rounding::{
    certify_ratio_detailed, coeff_set, oracle_chain, CoeffSetReport, OracleChain, Polytope,
    RatioCheck,
};
use kal::sampling::{random_objective, random_polytope, trial_rng};
use kal::solvers::KnapsackConfig;
use kal::{rat_parse, Error, Objective, Rational, Result};

use crate::summary::{emit, Summary};
use crate::{
    CertifyArgs, CheckArgs, ExtensionArgs, Format, NwArgs, Outcome, ReportArgs, RoundArgs,
};

fn verdict_word(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn outcome(ok: bool) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

fn require_seed(seed: Option<u64>, what: &str) -> Result<u64> {
    seed.ok_or_else(|| Error::Parse(format!("{what} draws random data and needs --seed")))
}

fn maybe_write<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    match out {
        Some(path) => write_json(path, value),
        None => Ok(()),
    }
}

#[derive(Serialize, Deserialize)]
struct NwOutput {
    command: String,
    system: SetSystem,
    report: SetSystemReport,
}

fn nw_summary(report: &SetSystemReport, wall_ms: u128) -> (Summary, String) {
    let failures = [
        report.uniform_size,
        report.distinct,
        report.count == report.expected_count,
        report.max_intersection as u64 <= report.d,
    ]
    .iter()
    .filter(|ok| !**ok)
    .count() as u128;
    let line = format!(
        "NW p={} d={} count={} max_intersection={} pairs={}/{} verdict={}",
        report.p,
        report.d,
        report.count,
        report.max_intersection,
        report.pairs_checked,
        report.pairs_total,
        verdict_word(report.verdict)
    );
    let row = Summary {
        command: "nw".into(),
        size: format!("p={}", report.p),
        epsilon: String::new(),
        checks: report.pairs_checked + 3,
        failures,
        wall_ms,
    };
    (row, line)
}

pub fn nw(args: &NwArgs, format: Format) -> Result<Outcome> {
    let start = Instant::now();
    if !is_prime(args.prime) {
        return Err(Error::NotPrime(args.prime));
    }
    let d = match args.degree {
        Some(d) => d,
        None => {
            let raw = args.prime as i64 / 2 - 4;
            if raw < 0 {
                return Err(Error::Regime(format!(
                    "floor(p/2 - 4) is negative for p = {}; pass --degree",
                    args.prime
                )));
            }
            raw as u64
        }
    };
    let policy = parse_pair_policy(&args.pairs, args.seed)?;
    let system = build_nw_family(args.prime, d)?;
    let report = verify_set_system(&system, policy);
    let ok = report.verdict;
    let out = NwOutput {
        command: "nw".into(),
        system,
        report,
    };
    maybe_write(args.out.as_deref(), &out)?;
    let (row, line) = nw_summary(&out.report, start.elapsed().as_millis());
    emit(format, &[row], &[line])?;
    Ok(outcome(ok))
}

fn certificate_summary(cert: &WitnessCertificate, wall_ms: u128) -> (Summary, String) {
    let failed_witnesses = cert.witnesses.iter().filter(|w| !w.verdict).count() as u128;
    let failed_pairs = cert.pairs.iter().filter(|r| !r.verdict).count() as u128;
    let row = Summary {
        command: "certify".into(),
        size: format!("p={}", cert.p),
        epsilon: cert.epsilon.to_fraction_string(),
        checks: 1 + cert.witnesses.len() as u128 + cert.pairs.len() as u128,
        failures: u128::from(!cert.verdicts.count) + failed_witnesses + failed_pairs,
        wall_ms,
    };
    (row, cert.summary_line())
}

pub fn certify(args: &CertifyArgs, format: Format) -> Result<Outcome> {
    let start = Instant::now();
    let epsilon = rat_parse(&args.epsilon)?;
    let mut params = if args.relaxed {
        LowerBoundParams::relaxed(args.prime, epsilon)
    } else {
        LowerBoundParams::strict(args.prime, epsilon)
    };
    if let Some(d) = args.degree {
        params = params.with_degree(d);
    }
    let policy = parse_pair_policy(&args.pairs, args.seed)?;
    let cfg = KnapsackConfig::from_env()?;
    let cert = certify_with(&params, policy, &cfg)?;
    maybe_write(args.out.as_deref(), &cert)?;
    let (row, line) = certificate_summary(&cert, start.elapsed().as_millis());
    emit(format, &[row], &[line])?;
    Ok(outcome(cert.verdicts.overall))
}

fn load_certificate(path: &Path) -> Result<WitnessCertificate> {
    let cert: WitnessCertificate = read_json(path).map_err(|e| match e {
        Error::Json(inner) => Error::Malformed(format!("{}: {inner}", path.display())),
        other => other,
    })?;
    Ok(cert)
}

/// Re-checks a certificate; returns the summary and whether it was reproduced and passes.
fn recheck(
    cert: &WitnessCertificate,
    path: &Path,
    start: Instant,
) -> Result<(Summary, String, bool)> {
    let report = check_certificate(cert, &KnapsackConfig::from_env()?)?;
    for m in &report.mismatches {
        eprintln!("mismatch: {m}");
    }
    let ok = report.reproduced && report.overall;
    let (mut row, _) = certificate_summary(cert, start.elapsed().as_millis());
    if !report.reproduced {
        row.failures += report.mismatches.len().max(1) as u128;
    }
    let line = format!(
        "CHECK {} p={} eps={} reproduced={} verdict={}",
        path.display(),
        cert.p,
        cert.epsilon.to_fraction_string(),
        if report.reproduced { "yes" } else { "no" },
        verdict_word(ok)
    );
    Ok((row, line, ok))
}

pub fn check(args: &CheckArgs, format: Format) -> Result<Outcome> {
    let start = Instant::now();
    let cert = load_certificate(&args.certificate)?;
    let (mut row, line, ok) = recheck(&cert, &args.certificate, start)?;
    row.command = "check".into();
    emit(format, &[row], &[line])?;
    Ok(outcome(ok))
}

#[derive(Serialize, Deserialize)]
struct RoundTrial {
    trial: u64,
    check: RatioCheck,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    chain: Option<OracleChain>,
}

#[derive(Serialize, Deserialize)]
struct RoundOutput {
    command: String,
    source: String,
    n: usize,
    epsilon: Rational,
    seed: Option<u64>,
    coeff_set: CoeffSetReport,
    trials: Vec<RoundTrial>,
    failures: u64,
    verdict: bool,
}

fn trial_ok(t: &RoundTrial) -> bool {
    t.check.verdict && t.chain.as_ref().is_none_or(OracleChain::verdict)
}

fn round_summary(out: &RoundOutput, wall_ms: u128) -> (Summary, Vec<String>) {
    let mut lines: Vec<String> = out
        .trials
        .iter()
        .filter_map(|t| {
            t.chain.as_ref().map(|c| {
                format!(
                    "trial {}: beta={} <= maxQ={} <= bound={}{} {}",
                    t.trial,
                    c.beta,
                    c.max_q,
                    c.bound,
                    c.van_vyve_max_q
                        .as_ref()
                        .map(|v| format!(" grid_maxQ={v}"))
                        .unwrap_or_default(),
                    verdict_word(c.verdict())
                )
            })
        })
        .collect();
    lines.push(format!(
        "ROUND source={} n={} eps={} coeffs={} trials={} failures={} verdict={}",
        out.source,
        out.n,
        out.epsilon.to_fraction_string(),
        out.coeff_set.size,
        out.trials.len(),
        out.failures,
        verdict_word(out.verdict)
    ));
    let row = Summary {
        command: "round".into(),
        size: format!("n={}", out.n),
        epsilon: out.epsilon.to_fraction_string(),
        checks: out.trials.len() as u128 + 1,
        failures: out.failures as u128 + u128::from(!out.coeff_set.verdict),
        wall_ms,
    };
    (row, lines)
}

pub fn round(args: &RoundArgs, format: Format) -> Result<Outcome> {
    let start = Instant::now();
    let epsilon = rat_parse(&args.epsilon)?;
    let (source, fixed): (&str, Option<Polytope>) = if let Some(path) = &args.instance {
        ("instance", Some(Polytope::Knapsack(read_json(path)?)))
    } else if let Some(path) = &args.system {
        ("system", Some(Polytope::System(read_json(path)?)))
    } else if let Some(p) = args.lowerbound {
        let inst_eps = match &args.lowerbound_epsilon {
            Some(text) => rat_parse(text)?,
            None => epsilon.clone(),
        };
        (
            "lowerbound",
            Some(Polytope::Knapsack(lowerbound_instance(p, &inst_eps)?)),
        )
    } else if args.n.is_some() {
        ("random", None)
    } else {
        return Err(Error::Parse(
            "choose one of --instance, --system, --lowerbound, --n".into(),
        ));
    };
    let n = fixed.as_ref().map(Polytope::dim).or(args.n).unwrap_or(0);
    let coeff_report = coeff_set(n, &epsilon)?.report();

    let objective: Option<Objective> = match &args.objective {
        Some(path) => Some(read_json(path)?),
        None => None,
    };
    if objective.is_some() && fixed.is_none() {
        return Err(Error::Parse("--objective needs a fixed polytope".into()));
    }
    let (seed, trial_count) = match objective {
        Some(_) => (args.seed, 1),
        None => (Some(require_seed(args.seed, "round")?), args.trials),
    };
    let cfg = KnapsackConfig::from_env()?;

    let trials: Vec<RoundTrial> = (0..trial_count)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed.unwrap_or(0), trial);
            let polytope = match &fixed {
                Some(p) => p.clone(),
                None => random_polytope(&mut rng, n),
            };
            let c = match &objective {
                Some(c) => c.clone(),
                None => random_objective(&mut rng, n),
            };
            let (check, _) = certify_ratio_detailed(&polytope, &c, &epsilon, &cfg)?;
            let chain = if args.exhaustive {
                Some(oracle_chain(&polytope, &c, &epsilon, true)?)
            } else {
                None
            };
            Ok(RoundTrial {
                trial,
                check,
                chain,
            })
        })
        .collect::<Result<_>>()?;

    let failures = trials.iter().filter(|t| !trial_ok(t)).count() as u64;
    let verdict = failures == 0 && coeff_report.verdict;
    let out = RoundOutput {
        command: "round".into(),
        source: source.into(),
        n,
        epsilon,
        seed,
        coeff_set: coeff_report,
        trials,
        failures,
        verdict,
    };
    maybe_write(args.out.as_deref(), &out)?;
    let (row, lines) = round_summary(&out, start.elapsed().as_millis());
    emit(format, &[row], &lines)?;
    Ok(outcome(verdict))
}

#[derive(Serialize, Deserialize)]
struct ExtensionOutput {
    command: String,
    extension: BalasExtension,
    report: ExtensionReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hull: Option<HullReport>,
    verdict: bool,
}

fn extension_summary(out: &ExtensionOutput, wall_ms: u128) -> (Summary, Vec<String>) {
    let r = &out.report;
    let mut lines = vec![format!(
        "EXTENSION n={} eps={} b0={} b1={} trials={} mismatches={} lifted={} ({}) verdict={}",
        r.n,
        r.epsilon.to_fraction_string(),
        r.b0,
        r.b1,
        r.trials,
        r.mismatches.len(),
        r.lifted_points,
        r.lift_mode,
        verdict_word(r.verdict)
    )];
    if let Some(h) = &out.hull {
        lines.push(format!(
            "HULL vertices={} feasible={}/{} infeasible_excluded={}/{} verdict={}",
            h.vertices,
            h.feasible_contained,
            h.feasible_points,
            h.infeasible_excluded,
            h.infeasible_points,
            verdict_word(h.verdict)
        ));
    }
    let hull_failures = out.hull.as_ref().map_or(0, |h| u128::from(!h.verdict));
    let row = Summary {
        command: "extension".into(),
        size: format!("n={}", r.n),
        epsilon: r.epsilon.to_fraction_string(),
        checks: r.trials as u128 + r.lifted_points as u128 + 1 + u128::from(out.hull.is_some()),
        failures: (r.mismatches.len() + r.projection_failures.len()) as u128
            + r.lift_failures as u128
            + u128::from(!r.bounds_tight)
            + hull_failures,
        wall_ms,
    };
    (row, lines)
}

pub fn extension(args: &ExtensionArgs, format: Format) -> Result<Outcome> {
    let start = Instant::now();
    let epsilon = rat_parse(&args.epsilon)?;
    let n = match (args.prime, args.n) {
        (Some(p), _) => {
            let params = if args.relaxed {
                LowerBoundParams::relaxed(p, epsilon.clone())
            } else {
                LowerBoundParams::strict(p, epsilon.clone())
            };
            params.check()?;
            (p * p) as usize
        }
        (None, Some(n)) => n,
        (None, None) => return Err(Error::Parse("pass --prime or --n".into())),
    };
    let ext = build_balas_extension(n, &epsilon)?;
    let inst = ext.instance()?;
    let seed = if args.trials > 0 {
        require_seed(args.seed, "extension")?
    } else {
        args.seed.unwrap_or(0)
    };
    let cfg = KnapsackConfig::from_env()?;
    let report = verify_extension(&ext, &inst, args.trials, seed, &cfg)?;
    let hull = if args.hull {
        Some(hull_check(&ext)?)
    } else {
        None
    };
    let verdict = report.verdict && hull.as_ref().is_none_or(|h| h.verdict);
    let out = ExtensionOutput {
        command: "extension".into(),
        extension: ext,
        report,
        hull,
        verdict,
    };
    maybe_write(args.out.as_deref(), &out)?;
    let (row, lines) = extension_summary(&out, start.elapsed().as_millis());
    emit(format, &[row], &lines)?;
    Ok(outcome(verdict))
}

fn summarize_file(path: &Path) -> Result<(Summary, Vec<String>, bool)> {
    let start = Instant::now();
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
    let malformed = |e: serde_json::Error| Error::Malformed(format!("{}: {e}", path.display()));
    if value.get("format").and_then(|f| f.as_str()) == Some(CERTIFICATE_FORMAT) {
        let cert: WitnessCertificate = serde_json::from_value(value).map_err(malformed)?;
        let (row, line, ok) = recheck(&cert, path, start)?;
        return Ok((row, vec![line], ok));
    }
    let command = value
        .get("command")
        .and_then(|c| c.as_str())
        .map(str::to_owned);
    match command.as_deref() {
        Some("nw") => {
            let out: NwOutput = serde_json::from_value(value).map_err(malformed)?;
            let (row, line) = nw_summary(&out.report, start.elapsed().as_millis());
            Ok((row, vec![line], out.report.verdict))
        }
        Some("round") => {
            let out: RoundOutput = serde_json::from_value(value).map_err(malformed)?;
            let (row, lines) = round_summary(&out, start.elapsed().as_millis());
            let last = lines.last().cloned().unwrap_or_default();
            Ok((row, vec![last], out.verdict))
        }
        Some("extension") => {
            let out: ExtensionOutput = serde_json::from_value(value).map_err(malformed)?;
            let (row, lines) = extension_summary(&out, start.elapsed().as_millis());
            Ok((row, lines, out.verdict))
        }
        _ => Err(Error::Malformed(format!(
            "{}: not an output of kal",
            path.display()
        ))),
    }
}

pub fn report(args: &ReportArgs, format: Format) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    let mut all_ok = true;
    for path in &args.files {
        let (row, file_lines, ok) = summarize_file(path)?;
        rows.push(row);
        lines.extend(file_lines);
        all_ok &= ok;
    }
    emit(format, &rows, &lines)?;
    Ok(outcome(all_ok))
}
