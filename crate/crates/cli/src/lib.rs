//! Dispatch and report emission for the `slicelab` binary.
//!
//! [`run`] turns a [`RunConfig`] into report bytes and an exit code:
//! 0 on success, 1 on usage or input errors, 2 when an asserted bound
//! does not apply to the instance (or a self-test check fails).

pub mod config;

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};
use slicelab::bitcore::table_file::{self, TableFile};
use slicelab::fourier::{level_inequality_report, wht};
use slicelab::nonclassical::{biased_rank_witness, correlation, degree, verify_degree, weight_polynomial};
use slicelab::slicemodel::dense_model_distance;
use slicelab::testers::{decode_linear, gowers_test_pass_rate, linearity_decoding_bar, linearity_pass_rate};
use slicelab::{gowers_norm, DomainSpec, Error, GowersEstimate, Mode, SliceFunction, TorusPolynomial};

pub use config::{Command, Format, ModeArg, RunConfig};

/// Residue parameter of the reweighting domain used for linear decoding.
pub const DECODING_RESIDUE_K: u32 = 4;

/// Largest denominator exponent accepted when reading dyadic tables.
const MAX_DYADIC_BITS: u32 = 52;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input, budget exceeded.
    Usage(String),
    /// The instance is outside the regime of an asserted bound. Carries a
    /// report body when there is something useful to show.
    Regime { message: String, result: Option<Value> },
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::RegimeNotMet { ref message, ref profile } => CliError::Regime {
                message: e.to_string(),
                result: Some(json!({"status": "regime-not-met", "message": message, "profile": profile})),
            },
            other => CliError::Usage(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Rows for CSV output.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

struct Report {
    result: Value,
    table: Option<Table>,
    default_format: Format,
    /// Exit code 2 while still emitting the report (failed self-test).
    failed: bool,
}

/// What a run produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub code: i32,
    pub report: Option<Vec<u8>>,
    pub message: Option<String>,
}

fn json_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn read_table(path: &Path) -> CliResult<TableFile> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    table_file::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn resolve_mode<T>(
    mode: Option<ModeArg>,
    samples: u64,
    seed: u64,
    f: impl Fn(Mode) -> slicelab::Result<T>,
) -> slicelab::Result<T> {
    let mc = Mode::MonteCarlo { samples, seed };
    match mode {
        Some(ModeArg::Exact) => f(Mode::Exact),
        Some(ModeArg::Mc) => f(mc),
        None => match f(Mode::Exact) {
            Err(Error::BudgetExceeded { .. }) => f(mc),
            other => other,
        },
    }
}

/// Reads a `dim=` table of dyadic values in `[0, 1)` as a torus polynomial.
pub fn torus_from_table(table: TableFile) -> CliResult<TorusPolynomial> {
    let table = table.into_real()?;
    let q = (0..=MAX_DYADIC_BITS)
        .find(|&q| {
            let scale = (q as f64).exp2();
            table.values().iter().all(|v| (v * scale).fract() == 0.0)
        })
        .ok_or_else(|| usage(format!("polynomial values must be dyadic with denominator at most 2^{MAX_DYADIC_BITS}")))?;
    let scale = (q as f64).exp2();
    let modulus = 1i128 << q;
    TorusPolynomial::from_fn(table.dim(), q, |x| {
        ((table.values()[x as usize] * scale) as i128).rem_euclid(modulus)
    })
    .map_err(CliError::from)
}

fn fourier(args: &config::FourierArgs) -> CliResult<Report> {
    let f = read_table(&args.input)?.into_real()?;
    let spectrum = wht(&f)?;
    if let Some(d) = args.level_weight {
        let weight = spectrum.level_weight(d)?;
        let alpha = f.l1_mean();
        let ratio = if alpha > 0.0 { Some(weight / (alpha * alpha)) } else { None };
        let ternary = f.values().iter().all(|v| [-1.0, 0.0, 1.0].contains(v));
        let inequality = if ternary && alpha > 0.0 {
            Some(level_inequality_report(&f, d)?)
        } else {
            None
        };
        return Ok(Report {
            result: json!({
                "level": d,
                "weight": weight,
                "alpha": alpha,
                "ratio": ratio,
                "inequality": inequality,
            }),
            table: Some(Table {
                header: vec!["level", "weight", "alpha", "ratio"],
                rows: vec![vec![d.to_string(), weight.to_string(), alpha.to_string(), fmt_opt(ratio)]],
            }),
            default_format: Format::Csv,
            failed: false,
        });
    }
    let pairs: Vec<(u64, f64)> = match args.top {
        Some(k) => spectrum.top(k),
        None => spectrum.coeffs().iter().enumerate().map(|(s, &c)| (s as u64, c)).collect(),
    };
    Ok(Report {
        result: json!({
            "dim": f.dim(),
            "coefficients": pairs
                .iter()
                .map(|(s, c)| json!({"subset": format!("{s:#x}"), "coefficient": c}))
                .collect::<Vec<_>>(),
        }),
        table: Some(Table {
            header: vec!["subset", "coefficient"],
            rows: pairs.iter().map(|(s, c)| vec![format!("{s:#x}"), c.to_string()]).collect(),
        }),
        default_format: Format::Csv,
        failed: false,
    })
}

fn estimate_row(e: &GowersEstimate) -> Vec<String> {
    vec![
        e.s.to_string(),
        e.value_pow.to_string(),
        e.value.to_string(),
        e.mode.to_string(),
        e.samples.to_string(),
        fmt_opt(e.seed),
        e.ci_radius.to_string(),
        e.clipped.to_string(),
    ]
}

fn gowers(args: &config::GowersArgs) -> CliResult<Report> {
    let f = read_table(&args.input)?.into_real()?;
    let est = resolve_mode(args.mode, args.samples, args.seed, |m| gowers_norm(&f, args.order, m))?;
    Ok(Report {
        table: Some(Table {
            header: vec!["s", "value_pow", "value", "mode", "samples", "seed", "ci_radius", "clipped"],
            rows: vec![estimate_row(&est)],
        }),
        result: json_value(&est),
        default_format: Format::Json,
        failed: false,
    })
}

fn dense_model(args: &config::DenseModelArgs) -> CliResult<Report> {
    let ns: Vec<u32> = match (&args.sweep, args.n) {
        (Some(dims), _) => dims
            .iter()
            .map(|&d| {
                if d % 2 == 0 && d > 0 {
                    Ok(d / 2)
                } else {
                    Err(usage(format!("--sweep takes positive even dimensions 2n, got {d}")))
                }
            })
            .collect::<CliResult<_>>()?,
        (None, Some(n)) => vec![n],
        (None, None) => return Err(usage("dense-model needs --n or --sweep")),
    };
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for n in ns {
        let est = resolve_mode(args.mode, args.samples, args.seed, |m| {
            dense_model_distance(n, args.k, args.order, m)
        })?;
        rows.push(vec![
            (2 * n).to_string(),
            args.k.to_string(),
            est.s.to_string(),
            est.value.to_string(),
            est.mode.to_string(),
            est.samples.to_string(),
            fmt_opt(est.seed),
        ]);
        results.push(json!({"2n": 2 * n, "k": args.k, "estimate": est}));
    }
    Ok(Report {
        result: Value::Array(results),
        table: Some(Table {
            header: vec!["2n", "k", "s", "value", "mode", "samples", "seed"],
            rows,
        }),
        default_format: Format::Csv,
        failed: false,
    })
}

/// Parses `linear:S=<mask>[,flip=<rate>]` or `random`.
pub fn synthetic_function(spec: &str, n: u32, seed: u64) -> CliResult<SliceFunction> {
    if spec == "random" {
        return Ok(SliceFunction::random(n, seed)?);
    }
    let body = spec
        .strip_prefix("linear:")
        .ok_or_else(|| usage(format!("unknown synthetic function {spec:?}; expected linear:S=<mask>[,flip=<rate>] or random")))?;
    let mut subset = None;
    let mut flip = 0.0;
    for part in body.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| usage(format!("expected key=value in {spec:?}, got {part:?}")))?;
        match key.trim() {
            "S" => {
                let v = value.trim();
                let parsed = match v.strip_prefix("0x").or_else(|| v.strip_prefix("0X")) {
                    Some(hex) => u64::from_str_radix(hex, 16),
                    None => v.parse(),
                };
                subset = Some(parsed.map_err(|_| usage(format!("bad subset mask {v:?}")))?);
            }
            "flip" => {
                flip = value
                    .trim()
                    .parse()
                    .map_err(|_| usage(format!("bad flip rate {value:?}")))?;
            }
            other => return Err(usage(format!("unknown synthetic parameter {other:?}"))),
        }
    }
    let subset = subset.ok_or_else(|| usage(format!("{spec:?} is missing S=<mask>")))?;
    if 2 * n < 64 && subset >> (2 * n) != 0 {
        return Err(usage(format!("subset {subset:#x} does not fit in dimension {}", 2 * n)));
    }
    Ok(SliceFunction::planted_linear(n, subset, flip, seed)?)
}

fn tester_function(args: &config::TesterArgs) -> CliResult<SliceFunction> {
    if let Some(path) = &args.input {
        let (dim, bits) = read_table(path)?.into_boolean()?;
        if let Some(n) = args.n {
            if dim != 2 * n {
                return Err(usage(format!("--n {n} disagrees with table dimension {dim}")));
            }
        }
        return Ok(SliceFunction::from_table(dim, bits)?);
    }
    let spec = args.synthetic.as_deref().ok_or_else(|| usage("need --input or --synthetic"))?;
    let n = args.n.ok_or_else(|| usage("--synthetic needs --n"))?;
    synthetic_function(spec, n, args.seed)
}

fn outcome_table(outcome: &slicelab::TestOutcome) -> (Vec<&'static str>, Vec<String>) {
    (
        vec!["pass_rate", "mode", "trials", "passes", "seed", "ci_radius"],
        vec![
            outcome.pass_rate.to_string(),
            outcome.mode.to_string(),
            outcome.trials.to_string(),
            outcome.passes.to_string(),
            fmt_opt(outcome.seed),
            outcome.ci_radius.to_string(),
        ],
    )
}

fn test_linearity(args: &config::TesterArgs) -> CliResult<Report> {
    let f = tester_function(args)?;
    let outcome = resolve_mode(args.mode, args.trials, args.seed, |m| linearity_pass_rate(&f, m))?;
    let decoding = decode_linear(&f, DECODING_RESIDUE_K)?;
    let bar = linearity_decoding_bar(outcome.pass_rate);
    let (mut header, mut row) = outcome_table(&outcome);
    header.extend(["subset", "sign_bit", "coefficient", "agreement", "decoding_bar"]);
    row.extend([
        format!("{:#x}", decoding.subset),
        decoding.sign_bit.to_string(),
        decoding.coefficient.to_string(),
        decoding.agreement.to_string(),
        fmt_opt(bar),
    ]);
    Ok(Report {
        result: json!({
            "n": f.n(),
            "outcome": outcome,
            "decoding": decoding,
            "decoding_bar": bar,
            "meets_bar": bar.map(|b| decoding.agreement >= b),
        }),
        table: Some(Table { header, rows: vec![row] }),
        default_format: Format::Json,
        failed: false,
    })
}

fn test_gowers(args: &config::TesterArgs) -> CliResult<Report> {
    let f = tester_function(args)?;
    let outcome = resolve_mode(args.mode, args.trials, args.seed, |m| gowers_test_pass_rate(&f, args.d, m))?;
    let (header, row) = outcome_table(&outcome);
    Ok(Report {
        result: json!({"n": f.n(), "d": args.d, "outcome": outcome}),
        table: Some(Table { header, rows: vec![row] }),
        default_format: Format::Json,
        failed: false,
    })
}

/// `slice`, `cube` or `residue:k` at dimension `dim`.
pub fn parse_domain(text: &str, dim: u32) -> CliResult<DomainSpec> {
    let half = || {
        if dim.is_multiple_of(2) {
            Ok(dim / 2)
        } else {
            Err(usage(format!("domain {text:?} needs an even dimension, got {dim}")))
        }
    };
    match text {
        "cube" => Ok(DomainSpec::cube(dim)?),
        "slice" => Ok(DomainSpec::slice(half()?)?),
        other => {
            let k = other
                .strip_prefix("residue:")
                .and_then(|k| k.parse().ok())
                .ok_or_else(|| usage(format!("unknown domain {other:?}; expected slice, cube or residue:<k>")))?;
            Ok(DomainSpec::residue(half()?, k)?)
        }
    }
}

fn nonclassical(args: &config::NonclassicalArgs) -> CliResult<Report> {
    let mut result = Map::new();
    let poly = match (&args.weight_poly, &args.input) {
        (Some(_), Some(_)) => return Err(usage("give either --weight-poly or --input, not both")),
        (Some(w), None) => {
            let &[j, d, a] = w.as_slice() else {
                return Err(usage("--weight-poly takes j,d,a"));
            };
            let n = args.n.ok_or_else(|| usage("--weight-poly needs --n"))?;
            if j < 0 || !(1..=62).contains(&d) {
                return Err(usage("--weight-poly needs j >= 0 and d in 1..=62"));
            }
            let p = weight_polynomial(n, j as u64, d as u32, a)?;
            result.insert("weight_poly".into(), json!({"n": n, "j": j, "d": d, "a": a}));
            Some(p)
        }
        (None, Some(path)) => Some(torus_from_table(read_table(path)?)?),
        (None, None) => None,
    };
    if let Some(p) = &poly {
        result.insert(
            "polynomial".into(),
            json!({"dim": p.dim(), "denominator_bits": p.denominator_bits(), "degree": degree(p)}),
        );
    }
    if let Some(d) = args.verify_degree {
        let p = poly.as_ref().ok_or_else(|| usage("--verify-degree needs --weight-poly or --input"))?;
        result.insert("verify_degree".into(), json!({"d": d, "holds": verify_degree(p, d)}));
    }
    if let Some(paths) = &args.correlate {
        let (dim, bits) = read_table(&paths[0])?.into_boolean()?;
        let p = torus_from_table(read_table(&paths[1])?)?;
        let domain = parse_domain(&args.domain, dim)?;
        result.insert("correlation".into(), json_value(correlation(Some(&bits), &p, &domain)?));
    }
    if let Some(br) = &args.biased_rank {
        let &[d, delta] = br.as_slice() else {
            return Err(usage("--biased-rank takes d,delta"));
        };
        if d.fract() != 0.0 || !(1.0..=20.0).contains(&d) {
            return Err(usage(format!("--biased-rank degree must be an integer in 1..=20, got {d}")));
        }
        let d = d as u32;
        let p = poly.as_ref().ok_or_else(|| usage("--biased-rank needs --weight-poly or --input"))?;
        if p.dim() % 2 != 0 {
            return Err(usage(format!("--biased-rank needs an even dimension, got {}", p.dim())));
        }
        if !verify_degree(p, d) {
            return Err(CliError::Regime {
                message: format!("polynomial does not have degree <= {d}"),
                result: Some(json!({"status": "degree-check-failed", "d": d})),
            });
        }
        {
            let w = biased_rank_witness(p, p.dim() / 2, d, delta)?;
            result.insert("biased_rank".into(), json_value(w));
        }
    }
    if result.is_empty() {
        return Err(usage(
            "nonclassical needs one of --weight-poly, --input, --verify-degree, --correlate, --biased-rank",
        ));
    }
    Ok(Report {
        result: Value::Object(result),
        table: None,
        default_format: Format::Json,
        failed: false,
    })
}

fn selftest() -> Report {
    let checks = slicelab::selftest::run_all();
    let failed = checks.iter().any(|c| !c.passed);
    Report {
        table: Some(Table {
            header: vec!["check", "passed", "detail"],
            rows: checks
                .iter()
                .map(|c| vec![c.name.to_string(), c.passed.to_string(), c.detail.clone()])
                .collect(),
        }),
        result: json_value(&checks),
        default_format: Format::Csv,
        failed,
    }
}

fn dispatch(config: &RunConfig) -> CliResult<Report> {
    match &config.command {
        Command::Fourier(a) => fourier(a),
        Command::Gowers(a) => gowers(a),
        Command::DenseModel(a) => dense_model(a),
        Command::TestLinearity(a) => test_linearity(a),
        Command::TestGowers(a) => test_gowers(a),
        Command::Nonclassical(a) => nonclassical(a),
        Command::Selftest => Ok(selftest()),
    }
}

fn render_json(config: &RunConfig, result: Value) -> Vec<u8> {
    let doc = json!({
        "version": slicelab::VERSION,
        "config": config,
        "result": result,
    });
    let mut out = serde_json::to_vec_pretty(&doc).expect("reports serialize");
    out.push(b'\n');
    out
}

fn render_csv(config: &RunConfig, table: &Table) -> Vec<u8> {
    let mut out = format!(
        "# slicelab {}\n# config {}\n",
        slicelab::VERSION,
        serde_json::to_string(config).expect("config serializes")
    )
    .into_bytes();
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record(&table.header).expect("in-memory write");
    for row in &table.rows {
        w.write_record(row).expect("in-memory write");
    }
    w.flush().expect("in-memory write");
    drop(w);
    out
}

fn render(config: &RunConfig, report: Report) -> CliResult<Vec<u8>> {
    match (config.format.unwrap_or(report.default_format), report.table) {
        (Format::Csv, Some(table)) => Ok(render_csv(config, &table)),
        (Format::Csv, None) => Err(usage("this report has no CSV form; use --format json")),
        (Format::Json, _) => Ok(render_json(config, report.result)),
    }
}

/// Runs a parsed configuration on the current thread pool.
pub fn run(config: &RunConfig) -> RunOutcome {
    match dispatch(config) {
        Ok(report) => {
            let failed = report.failed;
            match render(config, report) {
                Ok(bytes) => RunOutcome {
                    code: if failed { 2 } else { 0 },
                    report: Some(bytes),
                    message: failed.then(|| "self-test failures".to_string()),
                },
                Err(CliError::Usage(m)) => RunOutcome { code: 1, report: None, message: Some(m) },
                Err(CliError::Regime { message, .. }) => RunOutcome { code: 2, report: None, message: Some(message) },
            }
        }
        Err(CliError::Usage(message)) => RunOutcome {
            code: 1,
            report: None,
            message: Some(message),
        },
        Err(CliError::Regime { message, result }) => RunOutcome {
            code: 2,
            report: result.map(|r| render_json(config, r)),
            message: Some(message),
        },
    }
}

/// Runs with at most `config.threads` workers.
pub fn run_with_threads(config: &RunConfig) -> RunOutcome {
    match config.threads {
        None => run(config),
        Some(0) => RunOutcome {
            code: 1,
            report: None,
            message: Some("--threads must be at least 1".into()),
        },
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| run(config)),
            Err(e) => RunOutcome {
                code: 1,
                report: None,
                message: Some(format!("cannot start {t} threads: {e}")),
            },
        },
    }
}
