//! Command-line front end.
//!
//! Exit codes: 0 success, 1 other errors, 2 malformed input, 3 overflow in a
//! required computation, 4 an inconclusive verdict under `--strict`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classify::{
    classify_polynomial, mean_ergodic_necessary, mixing_classification, monotone_pb_analysis, power_bounded_empirical,
    schwartz_pb_check, schwartz_symbol_check, sort_verdicts, summarize_mean_ergodic, supercyclicity_obstructions,
    SpaceTag, Status, Verdict, DEFAULT_K, PB_GRID_X_MAX,
};
use crate::dynamics::{iterate_point, Termination};
use crate::error::{Error, MAX_ORDER};
use crate::export::{bump_csv, growth_csv, indexed_csv, orbit_csv, sin_square_csv};
use crate::grid::{linspace, ScanWindow};
use crate::lab::{counterexample_bump_sequence, counterexample_sin_x_squared, BumpPoint, SinSquarePoint};
use crate::report::{AnalysisReport, Parameters, SCHEMA_VERSION, TOOL_VERSION};
use crate::seminorm::{membership_om_on, poly_weight, seminorm_omn_on, seminorm_weighted_on, ScanGrid, DEFAULT_X_MAX};
use crate::symbol::{recognize_family, SymbolExpr};

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_OVERFLOW: i32 = 3;
pub const EXIT_STRICT: i32 = 4;
pub const XMAX_ENV: &str = "COPDYN_XMAX";

#[derive(Debug, Parser)]
#[command(name = "copdyn", version, about = "Dynamics of composition operators C_φ f = f∘φ on function spaces over ℝ")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify power boundedness, mean ergodicity, supercyclicity and mixing.
    Classify(ClassifyArgs),
    /// Print the orbit x0, φ(x0), …, φ_n(x0) as CSV.
    Orbit(OrbitArgs),
    /// Print the Cesàro means φ_[1](x0), …, φ_[n](x0) as CSV.
    Cesaro(OrbitArgs),
    /// Estimate a weighted sup seminorm.
    Seminorm(SeminormArgs),
    /// Reproduce the bump and sin(x²) counterexamples.
    Counterexamples(CounterexampleArgs),
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub symbol: String,
    /// c0, c1, …, cinf, om:<m>, oM, schwartz or analytic.
    #[arg(long, default_value = "cinf")]
    pub space: SpaceTag,
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    #[arg(long, default_value_t = 64)]
    pub iterations: usize,
    /// Half-width of the seminorm window; defaults to $COPDYN_XMAX or 100.
    #[arg(long)]
    pub xmax: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write orbit and Cesàro series of x0 = 1 into this directory.
    #[arg(long)]
    pub series_dir: Option<PathBuf>,
    /// Exit with code 4 when any verdict is inconclusive.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    #[arg(long)]
    pub symbol: String,
    #[arg(long, allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("w").required(true).args(["weight", "weight_fn"]))]
pub struct SeminormArgs {
    #[arg(long)]
    pub function: String,
    #[arg(long, default_value_t = 0)]
    pub order: usize,
    /// Polynomial weight exponent n in (1+x²)^{-n}.
    #[arg(long)]
    pub weight: Option<u32>,
    /// Arbitrary weight function v(x).
    #[arg(long)]
    pub weight_fn: Option<String>,
    #[arg(long)]
    pub xmax: Option<f64>,
    /// Write the sampled magnitudes as CSV.
    #[arg(long)]
    pub samples: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Bump,
    Sinsq,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    #[arg(long, value_enum)]
    pub which: Which,
    /// Weight exponent for the bump sequence.
    #[arg(long, default_value_t = 1)]
    pub p: u32,
    /// Bump indices as `a..b`, inclusive.
    #[arg(long, default_value = "1..12", value_parser = parse_range)]
    pub n: (u32, u32),
    /// Weight exponent for the sin(x²) series.
    #[arg(long, default_value_t = 1)]
    pub n0: u32,
    /// Indices k as `a..b`, inclusive.
    #[arg(long, default_value = "1..6", value_parser = parse_range)]
    pub k: (u32, u32),
    /// Write the series as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got `{s}`"))?;
    let a: u32 = a.trim().parse().map_err(|_| format!("bad range start in `{s}`"))?;
    let b: u32 = b.trim().parse().map_err(|_| format!("bad range end in `{s}`"))?;
    if a > b {
        return Err(format!("empty range `{s}`"));
    }
    Ok((a, b))
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Syntax { .. } | Error::UnknownIdentifier { .. } => EXIT_PARSE,
            Error::Overflow { .. } => EXIT_OVERFLOW,
            _ => EXIT_OTHER,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: EXIT_OTHER, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Classify(a) => cmd_classify(&a, stdout),
        Command::Orbit(a) => cmd_orbit(&a, stdout),
        Command::Cesaro(a) => cmd_cesaro(&a, stdout),
        Command::Seminorm(a) => cmd_seminorm(&a, stdout),
        Command::Counterexamples(a) => cmd_counterexamples(&a, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn emit(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// `--xmax`, else `$COPDYN_XMAX`, else 100.
pub fn resolve_xmax(flag: Option<f64>) -> CliResult<f64> {
    let x = match flag {
        Some(x) => x,
        None => match std::env::var(XMAX_ENV) {
            Ok(s) => s.trim().parse().map_err(|_| Failure { code: EXIT_OTHER, message: format!("{XMAX_ENV}=`{s}` is not a number") })?,
            Err(_) => DEFAULT_X_MAX,
        },
    };
    if !(x > 0.0 && x.is_finite()) {
        return Err(Failure { code: EXIT_OTHER, message: format!("xmax must be positive and finite, got {x}") });
    }
    Ok(x)
}

/// Runs the full verdict battery for one symbol.
pub fn classify_symbol(phi: &SymbolExpr, space: SpaceTag, order: usize, iterations: usize, x_max: f64) -> crate::Result<Vec<Verdict>> {
    if order > MAX_ORDER {
        return Err(Error::OrderTooHigh(order));
    }
    let family = recognize_family(phi);
    let m = match space {
        SpaceTag::C(Some(k)) | SpaceTag::Om(k) => (k as usize).min(MAX_ORDER),
        _ => order,
    };
    let mut out = Vec::new();
    match space {
        SpaceTag::Om(_) => out.push(membership_om_on(phi, m, x_max)?),
        SpaceTag::OM => {
            // Only derivatives up to `order` can be sampled.
            let mut v = membership_om_on(phi, m, x_max)?;
            v.property = crate::classify::Property::SymbolFor(SpaceTag::OM);
            let extra = format!("derivatives checked up to order {m}");
            v.note = Some(match v.note.take() {
                Some(n) => format!("{n}; {extra}"),
                None => extra,
            });
            out.push(v);
        }
        SpaceTag::Schwartz => out.push(schwartz_symbol_check(phi, m)?),
        _ => {}
    }
    if family.is_recognized() && space != SpaceTag::Schwartz {
        out.extend(classify_polynomial(&family, space)?);
    } else {
        if space == SpaceTag::Schwartz {
            out.push(schwartz_pb_check(phi, m, iterations)?);
        } else {
            out.push(power_bounded_empirical(phi, m, iterations)?);
            match monotone_pb_analysis(phi, space) {
                Ok(v) => out.push(v),
                Err(Error::PreconditionViolated(_)) => {}
                Err(e) => return Err(e),
            }
        }
        let checks = mean_ergodic_necessary(phi, space, iterations.max(10), DEFAULT_K)?;
        out.extend(summarize_mean_ergodic(&checks));
    }
    out.extend(supercyclicity_obstructions(phi, space)?);
    out.push(mixing_classification(phi, space)?);
    sort_verdicts(&mut out);
    Ok(out)
}

fn cmd_classify(a: &ClassifyArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let phi = SymbolExpr::parse(&a.symbol)?;
    let x_max = resolve_xmax(a.xmax)?;
    let verdicts = classify_symbol(&phi, a.space, a.order, a.iterations, x_max)?;
    let mut series_refs = Vec::new();
    if let Some(dir) = &a.series_dir {
        std::fs::create_dir_all(dir)?;
        let rec = iterate_point(&phi, 1.0, a.iterations)?;
        std::fs::write(dir.join("orbit.csv"), orbit_csv(&rec))?;
        let (means, overflow) = running_means(&rec.values, &rec.terminated_by);
        std::fs::write(dir.join("cesaro.csv"), indexed_csv(1, &means, overflow))?;
        series_refs = vec!["orbit.csv".to_string(), "cesaro.csv".to_string()];
    }
    let report = AnalysisReport {
        schema_version: SCHEMA_VERSION,
        symbol_text: a.symbol.clone(),
        family: recognize_family(&phi),
        space: a.space,
        verdicts,
        series_refs,
        parameters: Parameters {
            order: a.order,
            iterations: a.iterations,
            x_max,
            scan_window: ScanWindow::default(),
            compact_lo: DEFAULT_K.0,
            compact_hi: DEFAULT_K.1,
            pb_grid_x_max: PB_GRID_X_MAX,
            strict: a.strict,
        },
        tool_version: TOOL_VERSION.to_string(),
    };
    emit(a.out.as_deref(), &report.to_json(), stdout)?;
    if a.strict && report.verdicts.iter().any(|v| v.status == Status::Inconclusive) {
        return Ok(EXIT_STRICT);
    }
    Ok(0)
}

fn cmd_orbit(a: &OrbitArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let phi = SymbolExpr::parse(&a.symbol)?;
    let rec = iterate_point(&phi, a.x0, a.n)?;
    emit(a.out.as_deref(), &orbit_csv(&rec), stdout)?;
    Ok(if matches!(rec.terminated_by, Termination::Overflow { .. }) { EXIT_OVERFLOW } else { 0 })
}

/// `φ_[1], …, φ_[k]` from the orbit `x0, φ_1, …, φ_k`.
fn running_means(values: &[f64], t: &Termination) -> (Vec<f64>, Option<usize>) {
    let mut sum = 0.0;
    let means = values[1..]
        .iter()
        .enumerate()
        .map(|(k, v)| {
            sum += v;
            sum / (k + 1) as f64
        })
        .collect();
    let overflow = match t {
        Termination::Overflow { at } => Some(*at),
        _ => None,
    };
    (means, overflow)
}

fn cmd_cesaro(a: &OrbitArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let phi = SymbolExpr::parse(&a.symbol)?;
    if a.n == 0 {
        return Err(Error::InvalidArgument("Cesàro means need n >= 1".into()).into());
    }
    let rec = iterate_point(&phi, a.x0, a.n)?;
    let (means, overflow) = running_means(&rec.values, &rec.terminated_by);
    if means.iter().any(|m| !m.is_finite()) {
        return Err(Error::Overflow { magnitude: f64::INFINITY }.into());
    }
    emit(a.out.as_deref(), &indexed_csv(1, &means, overflow), stdout)?;
    Ok(if overflow.is_some() { EXIT_OVERFLOW } else { 0 })
}

fn cmd_seminorm(a: &SeminormArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let f = SymbolExpr::parse(&a.function)?;
    let x_max = resolve_xmax(a.xmax)?;
    let grid = ScanGrid { x_max, ..ScanGrid::default() };
    let weight_fn = a.weight_fn.as_deref().map(SymbolExpr::parse).transpose()?;
    let est = match (&weight_fn, a.weight) {
        (Some(v), _) => seminorm_weighted_on(&f, a.order, v, grid)?,
        (None, Some(n)) => seminorm_omn_on(&f, a.order, n, grid)?,
        (None, None) => unreachable!("clap requires a weight"),
    };
    if let Some(path) = &a.samples {
        let mut rows = Vec::new();
        for x in linspace(-x_max, x_max, 2001) {
            let w = match (&weight_fn, a.weight) {
                (Some(v), _) => v.eval(x)?.abs(),
                (None, Some(n)) => poly_weight(x, n),
                (None, None) => unreachable!(),
            };
            match f.jet(x, a.order) {
                Ok(j) => rows.extend(j.coeffs.iter().enumerate().map(|(i, c)| (x, i, c.abs(), w * c.abs()))),
                Err(Error::Overflow { .. }) => rows.push((x, 0, f64::INFINITY, f64::INFINITY)),
                Err(e) => return Err(e.into()),
            }
        }
        std::fs::write(path, growth_csv(&rows))?;
    }
    let mut text = serde_json::to_string_pretty(&est).expect("estimate serializes");
    text.push('\n');
    emit(a.out.as_deref(), &text, stdout)?;
    Ok(0)
}

#[derive(Debug, Serialize)]
struct CounterexampleSummary<'a, T: Serialize> {
    which: Which,
    parameters: serde_json::Value,
    series: &'a [T],
    summary: &'static str,
}

fn bump_summary(points: &[BumpPoint]) -> &'static str {
    let claimed: Vec<_> = points.iter().filter(|b| b.claimed).collect();
    if claimed.is_empty() {
        "no claim in range"
    } else if claimed.iter().all(|b| b.ratio >= 1.0 - 1e-9) {
        "pass"
    } else {
        "fail"
    }
}

fn sin_square_summary(points: &[SinSquarePoint]) -> &'static str {
    let increasing = points.windows(2).all(|w| w[1].value > w[0].value);
    let min_ratio = points.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
    if increasing && min_ratio > 0.0 {
        "pass"
    } else {
        "fail"
    }
}

fn cmd_counterexamples(a: &CounterexampleArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let (text, csv) = match a.which {
        Which::Bump => {
            let pts = counterexample_bump_sequence(a.p, a.n.0..=a.n.1)?;
            if pts.iter().any(|b| !b.estimate.value.is_finite()) {
                return Err(Error::Overflow { magnitude: f64::INFINITY }.into());
            }
            let s = CounterexampleSummary {
                which: a.which,
                parameters: serde_json::json!({ "p": a.p, "n_from": a.n.0, "n_to": a.n.1 }),
                series: &pts,
                summary: bump_summary(&pts),
            };
            (serde_json::to_string_pretty(&s).expect("summary serializes"), bump_csv(&pts))
        }
        Which::Sinsq => {
            let pts = counterexample_sin_x_squared(a.n0, a.k.0..=a.k.1)?;
            let s = CounterexampleSummary {
                which: a.which,
                parameters: serde_json::json!({ "n0": a.n0, "k_from": a.k.0, "k_to": a.k.1 }),
                series: &pts,
                summary: sin_square_summary(&pts),
            };
            (serde_json::to_string_pretty(&s).expect("summary serializes"), sin_square_csv(&pts))
        }
    };
    if let Some(path) = &a.csv {
        std::fs::write(path, csv)?;
    }
    emit(a.out.as_deref(), &(text + "\n"), stdout)?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut full = vec!["copdyn"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn parse_errors_exit_two() {
        let (code, _, err) = call(&["classify", "--symbol", "x^^2"]);
        assert_eq!(code, EXIT_PARSE);
        assert!(err.contains("offset 3"), "{err}");
    }

    #[test]
    fn orbit_and_overflow() {
        let (code, out, _) = call(&["orbit", "--symbol", "x^2+1", "--x0", "0", "--n", "5"]);
        assert_eq!(code, 0);
        assert_eq!(out, "n,value\n0,0\n1,1\n2,2\n3,5\n4,26\n5,677\n");
        let (code, out, _) = call(&["orbit", "--symbol", "2*x", "--x0", "1", "--n", "600"]);
        assert_eq!(code, EXIT_OVERFLOW);
        assert!(out.contains("# overflow at n="));
        let (code, out, _) = call(&["cesaro", "--symbol", "x", "--x0", "4", "--n", "3"]);
        assert_eq!(code, 0);
        assert_eq!(out, "n,value\n1,4\n2,4\n3,4\n");
    }

    #[test]
    fn classify_examples() {
        let (code, out, _) = call(&["classify", "--symbol", "0.5*x+1", "--space", "oM"]);
        assert_eq!(code, 0);
        let r = AnalysisReport::from_json(&out).unwrap();
        assert_eq!(r.to_json(), out);
        let st = |p: crate::classify::Property| r.verdicts.iter().find(|v| v.property == p).unwrap().status;
        use crate::classify::Property::*;
        assert_eq!(st(PowerBounded), Status::ProvenTrue);
        assert_eq!(st(MeanErgodic), Status::ProvenTrue);
        assert_eq!(st(Mixing), Status::ProvenFalse);
        let (_, out, _) = call(&["classify", "--symbol", "x+1", "--space", "om:2"]);
        let r = AnalysisReport::from_json(&out).unwrap();
        assert_eq!(r.verdicts.iter().find(|v| v.property == Mixing).unwrap().status, Status::ProvenTrue);
        assert_eq!(r.verdicts.iter().find(|v| v.property == PowerBounded).unwrap().status, Status::ProvenFalse);
    }

    #[test]
    fn strict_mode() {
        let (code, _, _) = call(&["classify", "--symbol", "x+1+0.1*tanh(x)", "--space", "oM", "--strict"]);
        assert_eq!(code, EXIT_STRICT);
    }

    #[test]
    fn seminorm_examples() {
        let (_, out, _) = call(&["seminorm", "--function", "x", "--order", "0", "--weight", "1"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["value"], 0.5);
        assert!((v["witness_x"].as_f64().unwrap().abs() - 1.0).abs() < 1e-6);
        let (_, out, _) = call(&["seminorm", "--function", "exp(x)", "--order", "0", "--weight", "1"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["tail"], "non_decaying");
        let (code, _, _) = call(&["seminorm", "--function", "x", "--order", "0"]);
        assert_eq!(code, EXIT_PARSE);
    }

    #[test]
    fn counterexample_summaries() {
        let (_, out, _) = call(&["counterexamples", "--which", "bump", "--p", "1", "--n", "1..8"]);
        assert!(out.contains("\"summary\": \"pass\""));
        let (_, out, _) = call(&["counterexamples", "--which", "bump", "--p", "9", "--n", "1..3"]);
        assert!(out.contains("\"summary\": \"no claim in range\""));
        let (_, out, _) = call(&["counterexamples", "--which", "sinsq", "--n0", "1", "--k", "1..6"]);
        assert!(out.contains("\"summary\": \"pass\""));
    }
}
