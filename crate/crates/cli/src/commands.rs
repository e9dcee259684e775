use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use tractlab_core::complexity::{
    curse_lower_bound, n_eps, Certification, ComplexityOptions, ComplexityRecord,
};
use tractlab_core::rank_approx::{
    check_an_i1, lemma3_table, multiplicativity_checks, rank1_pointwise_check, rank1_sq_error_l2,
    rank2_pointwise_check, rank2_sq_error_l2, sample_paths, spectral_tail_check, LemmaCheck,
    PathSample, LEMMA_SLACK,
};
use tractlab_core::scalar::fmt_sig17;
use tractlab_core::spectra::{kernel, spectrum, SpectrumRecord, WienerOptions};
use tractlab_core::tractability::{
    classify, log_grid, log_poly_trajectory, qpt_log_criterion_with, trend_slope, ClassifyConfig,
    Enclosure, Notion, Ratios, TractabilityReport, Trajectory, WienerMode,
};
use tractlab_core::{Error, SmoothnessSequence};

use crate::config::{
    Command, ComplexityArgs, EigenArgs, KernelArgs, LemmaArgs, NotionArg, ScanArgs, SimulateArgs,
    WienerModeArg,
};

/// What a command produced: a CSV body, a JSON result, and an optional
/// reason for exiting with the certification status.
pub struct Output {
    pub csv: String,
    /// Serialized result, embedded verbatim in the JSON report.
    pub json: String,
    pub failure: Option<String>,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::Parse { .. } => CliError::Config(e.to_string()),
            other => CliError::Core(other),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

// Serialized straight to text: a `serde_json::Value` would turn u128 grid
// points beyond u64 into floats.
fn json<T: Serialize>(v: &T) -> CliResult<String> {
    serde_json::to_string(v).map_err(|e| CliError::Config(e.to_string()))
}

fn unit_grid(m: usize) -> CliResult<Vec<f64>> {
    if m == 0 {
        return Err(CliError::Config("grid must be positive".into()));
    }
    Ok((1..=m).map(|i| i as f64 / m as f64).collect())
}

fn sequence(text: &str) -> CliResult<SmoothnessSequence> {
    Ok(text.parse::<SmoothnessSequence>()?)
}

pub fn run(command: &Command) -> CliResult<Output> {
    match command {
        Command::Eigen(a) => eigen(a),
        Command::Kernel(a) => kernel_cmd(a),
        Command::Complexity(a) => complexity(a),
        Command::Scan(a) => scan(a),
        Command::VerifyLemmas(a) => verify_lemmas(a),
        Command::Simulate(a) => simulate(a),
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct EigenResult {
    spectrum: SpectrumRecord,
    error_estimates: Vec<f64>,
}

fn eigen(a: &EigenArgs) -> CliResult<Output> {
    let opts = WienerOptions {
        grid: a.grid,
        tolerance: a.tol,
        ..WienerOptions::default()
    };
    let s = spectrum::<f64>(a.process, a.r, a.count, opts)?;
    let errors = s.method().error_estimates.clone();
    let mut csv = String::new();
    writeln!(csv, "#logTrace={}", fmt_sig17(s.log_trace())).unwrap();
    writeln!(csv, "#logTail={}", fmt_sig17(s.log_tail())).unwrap();
    writeln!(csv, "j,eigenvalue,logEigenvalue,errorEstimate").unwrap();
    for (i, l) in s.log_eigenvalues().iter().enumerate() {
        writeln!(
            csv,
            "{},{},{},{}",
            i + 1,
            fmt_sig17(l.exp()),
            fmt_sig17(*l),
            fmt_sig17(errors[i])
        )
        .unwrap();
    }
    let json = json(&EigenResult {
        spectrum: s.to_record(),
        error_estimates: errors,
    })?;
    Ok(Output {
        csv,
        json,
        failure: None,
    })
}

#[derive(Serialize)]
struct KernelEntry {
    x: f64,
    y: f64,
    value: f64,
}

fn kernel_cmd(a: &KernelArgs) -> CliResult<Output> {
    let grid = unit_grid(a.grid)?;
    let mut entries = Vec::new();
    for &x in &grid {
        for &y in &grid {
            entries.push(KernelEntry {
                x,
                y,
                value: kernel(a.process, x, y, a.r)?,
            });
        }
    }
    let mut csv = String::from("x,y,value\n");
    for e in &entries {
        writeln!(
            csv,
            "{},{},{}",
            fmt_sig17(e.x),
            fmt_sig17(e.y),
            fmt_sig17(e.value)
        )
        .unwrap();
    }
    Ok(Output {
        csv,
        json: json(&entries)?,
        failure: None,
    })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ComplexityRow {
    #[serde(flatten)]
    record: ComplexityRecord,
    enumerated: usize,
    /// Lower bound on n from the ratio of trace and largest eigenvalue.
    curse_lower_bound: f64,
}

fn complexity(a: &ComplexityArgs) -> CliResult<Output> {
    let seq = sequence(&a.seq)?;
    let opts = ComplexityOptions {
        budget: a.budget,
        ..ComplexityOptions::default()
    };
    let mut rows = Vec::new();
    let mut uncertified = Vec::new();
    for &d in &a.d {
        for &eps in &a.eps {
            let res = n_eps(eps, d, a.process, &seq, &opts)?;
            let lower = if eps < 1.0 {
                curse_lower_bound(eps, d, a.process, &seq, opts.wiener)?.exp()
            } else {
                0.0
            };
            if res.certification != Certification::Certified {
                uncertified.push(format!("eps={eps} d={d}"));
            }
            rows.push(ComplexityRow {
                record: ComplexityRecord::from(&res),
                enumerated: res.stats.enumerated,
                curse_lower_bound: lower,
            });
        }
    }
    let mut csv = String::from(
        "eps,d,n,errorFraction,certified,bracketLo,bracketHi,enumerated,curseLowerBound\n",
    );
    for r in &rows {
        let c = &r.record;
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            fmt_sig17(c.eps),
            c.d,
            c.n,
            fmt_sig17(c.error_fraction),
            c.certified,
            c.bracket[0],
            c.bracket[1],
            r.enumerated,
            fmt_sig17(r.curse_lower_bound)
        )
        .unwrap();
    }
    let failure = (a.require_certified && !uncertified.is_empty())
        .then(|| format!("not certified: {}", uncertified.join(", ")));
    Ok(Output {
        csv,
        json: json(&rows)?,
        failure,
    })
}

/// Parses an integer `d`, also in the form `<mantissa>e<exponent>`, exactly.
pub fn parse_dmax(text: &str) -> CliResult<u128> {
    let bad = || {
        CliError::Config(format!(
            "--dmax {text:?} is not an integer between 10 and 1e30"
        ))
    };
    let t = text.trim();
    let (mant, exp) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (
            m,
            e.trim_start_matches('+')
                .parse::<u32>()
                .map_err(|_| bad())?,
        ),
        None => (t, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    let frac = frac.trim_end_matches('0');
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    if !digits.bytes().all(|b| b.is_ascii_digit()) || frac.len() as u32 > exp {
        return Err(bad());
    }
    let base: u128 = digits.parse().map_err(|_| bad())?;
    let v = 10u128
        .checked_pow(exp - frac.len() as u32)
        .and_then(|p| base.checked_mul(p))
        .ok_or_else(bad)?;
    if !(10..=10u128.pow(30)).contains(&v) {
        return Err(bad());
    }
    Ok(v)
}

fn extra_trajectory(name: String, values: Vec<Enclosure>, grid: &[u128]) -> Trajectory {
    let est: Vec<f64> = values.iter().map(|e| e.estimate).collect();
    Trajectory {
        name,
        slope: trend_slope(grid, &est),
        values,
    }
}

fn scan(a: &ScanArgs) -> CliResult<Output> {
    let seq = sequence(&a.seq)?;
    let d_max = parse_dmax(&a.dmax)?;
    if a.grid == 0 {
        return Err(CliError::Config("--grid must be positive".into()));
    }
    let grid = log_grid(d_max, a.grid);
    let mut config = ClassifyConfig {
        rel_tol: a.tol,
        wiener_mode: match a.wiener_mode {
            WienerModeArg::Fitted => WienerMode::Fitted,
            WienerModeArg::Raw => WienerMode::Raw,
        },
        ..ClassifyConfig::default()
    };
    if !a.tau.is_empty() {
        config.taus = a.tau.clone();
    }
    let mut report = classify(a.process, &seq, &grid, &config)?;
    let ratios = Ratios::new(a.process, config.wiener_mode)?;
    if let Some(q) = a.q {
        if !(q >= 0.0) {
            return Err(CliError::Config("--q must be non-negative".into()));
        }
        for &tau in &config.taus {
            let logc = log_poly_trajectory(&ratios, &seq, tau, &grid, a.tol)?;
            let vals = logc
                .iter()
                .zip(&grid)
                .map(|(e, &d)| {
                    let v = (e.estimate - q * (d as f64).ln()).exp();
                    Enclosure {
                        estimate: v,
                        error: v * e.error.exp_m1(),
                    }
                })
                .collect();
            report.trajectories.push(extra_trajectory(
                format!("poly:tau={tau},q={q}"),
                vals,
                &grid,
            ));
        }
    }
    if let Some(delta) = a.delta {
        let vals = grid
            .iter()
            .map(|&d| qpt_log_criterion_with(&ratios, &seq, delta, d, a.tol))
            .collect::<Result<Vec<_>, _>>()?;
        report.trajectories.push(extra_trajectory(
            format!("qpt-log-general:delta={delta}"),
            vals,
            &grid,
        ));
    }
    if a.notion != NotionArg::All {
        let keep = match a.notion {
            NotionArg::Spt => Notion::Spt,
            NotionArg::Pt => Notion::Pt,
            NotionArg::Qpt => Notion::Qpt,
            NotionArg::Weak => Notion::Weak,
            NotionArg::All => unreachable!(),
        };
        report.verdicts.retain(|v| v.notion == keep);
    }
    Ok(Output {
        csv: scan_csv(&report),
        json: json(&report)?,
        failure: None,
    })
}

fn slope_text(s: Option<f64>) -> String {
    s.map_or_else(|| "none".to_string(), fmt_sig17)
}

fn scan_csv(report: &TractabilityReport) -> String {
    let mut csv = String::new();
    writeln!(
        csv,
        "#process={} sequence={}",
        report.process, report.sequence
    )
    .unwrap();
    for v in &report.verdicts {
        writeln!(
            csv,
            "#verdict notion={} verdict={} basis={} detail={}",
            v.notion,
            v.verdict,
            v.basis.join("|"),
            v.detail
        )
        .unwrap();
    }
    for s in &report.series {
        writeln!(
            csv,
            "#series name={} tau={} beta={} trend={}",
            s.name,
            s.tau,
            fmt_sig17(s.beta),
            s.trend
        )
        .unwrap();
    }
    for t in &report.trajectories {
        writeln!(csv, "#slope name={} slope={}", t.name, slope_text(t.slope)).unwrap();
    }
    if let Some(e) = &report.exponent {
        writeln!(
            csv,
            "#exponent r1={} rate={} lo={} hi={}",
            e.r1,
            fmt_sig17(e.rate),
            fmt_sig17(e.lo),
            fmt_sig17(e.hi)
        )
        .unwrap();
    }
    writeln!(csv, "#note={}", report.note).unwrap();
    writeln!(csv, "trajectory,d,estimate,error").unwrap();
    for t in &report.trajectories {
        for (d, e) in report.d_grid.iter().zip(&t.values) {
            writeln!(
                csv,
                "{},{},{},{}",
                t.name,
                d,
                fmt_sig17(e.estimate),
                fmt_sig17(e.error)
            )
            .unwrap();
        }
    }
    csv
}

fn verify_lemmas(a: &LemmaArgs) -> CliResult<Output> {
    if a.grid < 2 || a.count == 0 || a.order_max == 0 {
        return Err(CliError::Config(
            "--grid must be at least 2; --count and --order-max positive".into(),
        ));
    }
    let ts: Vec<f64> = (0..a.grid)
        .map(|i| i as f64 / (a.grid - 1) as f64)
        .collect();
    let per_r: Vec<Vec<LemmaCheck>> = (2..=a.rmax.max(1))
        .into_par_iter()
        .map(|r| -> Result<Vec<LemmaCheck>, Error> {
            let mut out = Vec::new();
            for &t in &ts {
                out.push(rank1_pointwise_check(r, t)?);
            }
            out.push(rank1_sq_error_l2(r)?);
            out.push(spectral_tail_check(r, 1)?);
            if r >= 3 {
                for &t in &ts {
                    out.push(rank2_pointwise_check(r, t)?);
                }
                out.push(rank2_sq_error_l2(r)?);
                out.push(spectral_tail_check(r, 2)?);
            }
            Ok(out)
        })
        .collect::<Result<_, _>>()?;
    let mut checks: Vec<LemmaCheck> = per_r.into_iter().flatten().collect();
    for n in 1..=a.count {
        checks.push(check_an_i1(n, a.c)?);
    }
    checks.extend(lemma3_table(a.order_max, a.count, a.c)?);
    checks.extend(multiplicativity_checks(a.order_max, a.count as usize)?);
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.holds(LEMMA_SLACK))
        .map(|c| format!("{} r={} ratio={}", c.quantity, c.r, c.ratio))
        .collect();
    let mut csv = String::from("quantity,r,n,t,computed,bound,ratio,holds\n");
    for c in &checks {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            c.quantity,
            c.r,
            c.n.map_or(String::new(), |n| n.to_string()),
            c.t.map_or(String::new(), fmt_sig17),
            fmt_sig17(c.computed),
            fmt_sig17(c.bound),
            fmt_sig17(c.ratio),
            c.holds(LEMMA_SLACK)
        )
        .unwrap();
    }
    let failure = (!failed.is_empty()).then(|| format!("bound violated: {}", failed.join("; ")));
    Ok(Output {
        csv,
        json: json(&checks)?,
        failure,
    })
}

fn simulate(a: &SimulateArgs) -> CliResult<Output> {
    let grid = unit_grid(a.grid)?;
    let samples: Vec<PathSample> = sample_paths(a.r, &grid, a.samples, a.seed)?;
    let mut csv = String::new();
    if let Some(s) = samples.first() {
        writeln!(csv, "#method={}", s.method).unwrap();
    }
    csv.push_str("sample,t,value\n");
    for s in &samples {
        for (t, v) in s.grid.iter().zip(&s.values) {
            writeln!(csv, "{},{},{}", s.index, fmt_sig17(*t), fmt_sig17(*v)).unwrap();
        }
    }
    Ok(Output {
        csv,
        json: json(&samples)?,
        failure: None,
    })
}
