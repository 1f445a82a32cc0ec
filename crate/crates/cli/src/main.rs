mod formats;

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use faber_core::basis::{build_basis, DyadicIndex, DEFAULT_TOLERANCE};
use faber_core::chui_wang::{autocorr, scaling_crosscorr, CorrelationKind};
use faber_core::dual::{dual_coeffs, window_for, DualCoeffTable};
use faber_core::norms::{norm, NormParams, Space};
use faber_core::roots::DEFAULT_UNIT_CIRCLE_GUARD;
use faber_core::sampling::{analyze, synthesize};
use faber_core::study::{convergence_study, equivalence_probe, Family};
use faber_core::wavelet::{build_wavelet_basis, Signal};
use faber_core::{PiecewisePolynomial, SplineOrder};
use rayon::prelude::*;
use serde_json::{json, Value};

use formats::{
    expansion_from_json, expansion_to_json, fmt_opt, num, parse_grid, parse_levels, provenance, read_samples, write_csv,
};

/// Exit status and message for a failed run.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(format!("io: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::input(format!("json: {e}"))
    }
}

#[derive(Parser)]
#[command(name = "faber", version, about = "Higher-order Faber splines, Chui-Wang wavelets and dyadic sequence norms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableKind {
    /// `a_n`, dual of the wavelet
    Wavelet,
    /// `b_n`, dual of the B-spline
    Scaling,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    /// Faber spline `s_{j,k}`
    S,
    /// Cardinal interpolant `L`
    #[value(name = "L", alias = "l")]
    L,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    B,
    F,
}

impl From<SpaceArg> for Space {
    fn from(s: SpaceArg) -> Self {
        match s {
            SpaceArg::B => Space::B,
            SpaceArg::F => Space::F,
        }
    }
}

#[derive(Args)]
struct Output {
    /// Write here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Formatted {
    #[command(flatten)]
    output: Output,
    /// Defaults to csv for a `.csv` output path, json otherwise
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl Formatted {
    fn resolve(&self) -> Format {
        self.format.unwrap_or(match self.output.out.as_deref().and_then(Path::extension) {
            Some(ext) if ext == "csv" => Format::Csv,
            _ => Format::Json,
        })
    }
}

#[derive(Args)]
struct NormArgs {
    #[arg(long, allow_hyphen_values = true)]
    r: f64,
    /// May be `inf`
    #[arg(long)]
    p: f64,
    /// May be `inf`
    #[arg(long)]
    theta: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Dual coefficient table
    Coeffs {
        #[arg(long)]
        m: i64,
        /// Keep `|n| <= window`; chosen from the tolerance when absent
        #[arg(long)]
        window: Option<i64>,
        #[arg(long, value_enum, default_value = "wavelet")]
        kind: TableKind,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[command(flatten)]
        fmt: Formatted,
    },
    /// Evaluate a basis function on a grid (CSV)
    Basis {
        #[arg(long)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        j: Option<i32>,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<i64>,
        #[arg(long, value_enum, default_value = "s")]
        which: Which,
        /// `a:b:step`
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Faber coefficients of dyadic samples
    Analyze {
        #[arg(long)]
        m: i64,
        /// samples.csv
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Evaluate a Faber expansion on a grid (CSV)
    Synthesize {
        #[arg(long)]
        coeffs: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Wavelet coefficients of samples or of an exact piecewise polynomial
    WaveletAnalyze {
        #[arg(long)]
        m: i64,
        /// samples.csv
        #[arg(long = "in", conflicts_with = "exact", required_unless_present = "exact")]
        input: Option<PathBuf>,
        /// Piecewise polynomial as JSON
        #[arg(long)]
        exact: Option<PathBuf>,
        /// Finest wavelet level; defaults to N-1 for samples
        #[arg(long)]
        max_level: Option<i32>,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Evaluate a wavelet expansion on a grid (CSV)
    WaveletSynthesize {
        #[arg(long)]
        coeffs: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Sequence-space norm of a coefficient file
    Norm {
        #[arg(long, value_enum)]
        space: SpaceArg,
        #[command(flatten)]
        params: NormArgs,
        #[arg(long)]
        coeffs: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Coefficient norms of a test function across resolutions
    Probe {
        #[arg(long)]
        family: String,
        #[arg(long)]
        m: i64,
        #[arg(long, value_enum, default_value = "b")]
        space: SpaceArg,
        #[command(flatten)]
        params: NormArgs,
        /// `lo:hi`
        #[arg(long, default_value = "3:8")]
        levels: String,
        #[command(flatten)]
        fmt: Formatted,
    },
    /// Sup error of the spline interpolant across resolutions
    Convergence {
        #[arg(long)]
        family: String,
        #[arg(long)]
        m: i64,
        #[arg(long, default_value = "3:8")]
        levels: String,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[command(flatten)]
        fmt: Formatted,
    },
}

fn check_tolerance(t: f64) -> Result<(), Failure> {
    if t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(Failure::input(format!("tolerance must lie in (0, 1), got {t}")))
    }
}

fn family(name: &str) -> Result<Family, Failure> {
    Family::parse(name).ok_or_else(|| Failure::input(format!("unknown family '{name}'")))
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let file = File::open(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_reader(BufReader::new(file))?)
}

fn emit(output: &Output, bytes: Vec<u8>) -> Result<(), Failure> {
    match &output.out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| Failure::input(format!("{}: {e}", path.display()))),
        None => Ok(std::io::stdout().lock().write_all(&bytes)?),
    }
}

fn emit_json(output: &Output, value: &Value) -> Result<(), Failure> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    emit(output, bytes)
}

fn emit_grid(output: &Output, xs: &[f64], ys: &[f64]) -> Result<(), Failure> {
    let mut buf = Vec::new();
    write_csv(&mut buf, &["x", "value"], xs.iter().zip(ys).map(|(x, y)| vec![num(*x), num(*y)]))?;
    emit(output, buf)
}

fn table(m: SplineOrder, kind: TableKind, window: Option<i64>, tolerance: f64) -> Result<DualCoeffTable, Failure> {
    let seq = match kind {
        TableKind::Wavelet => autocorr(m)?,
        TableKind::Scaling => scaling_crosscorr(m)?,
    };
    let window = match window {
        Some(w) => w,
        None => window_for(dual_coeffs(&seq, Some(1), DEFAULT_UNIT_CIRCLE_GUARD)?.decay_rate, tolerance),
    };
    let table = dual_coeffs(&seq, Some(window), DEFAULT_UNIT_CIRCLE_GUARD)?;
    Ok(table)
}

fn coeffs_json(table: &DualCoeffTable, m: SplineOrder, tolerance: f64) -> Result<Value, Failure> {
    let seq = match table.kind {
        CorrelationKind::Wavelet => autocorr(m)?,
        CorrelationKind::Scaling => scaling_crosscorr(m)?,
    };
    let mut value = serde_json::to_value(table)?;
    let obj = value.as_object_mut().expect("table serializes to an object");
    obj.remove("coeffs");
    obj.insert("provenance".into(), provenance(m, tolerance, table.error_bound()));
    obj.insert("error_bound".into(), json!(table.error_bound()));
    obj.insert(
        "sequence".into(),
        json!({
            "fractions": seq.fraction_strings(),
            "integers": seq.normalized.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
        }),
    );
    obj.insert(
        "roots".into(),
        json!({
            "inside": table.roots.inside.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>(),
            "outside": table.roots.outside.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>(),
        }),
    );
    obj.insert(
        "coeffs".into(),
        table.iter().map(|(n, a)| json!({ "n": n, "a": a })).collect(),
    );
    Ok(value)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Coeffs { m, window, kind, tolerance, fmt } => {
            check_tolerance(tolerance)?;
            let m = SplineOrder::new(m)?;
            let table = table(m, kind, window, tolerance)?;
            match fmt.resolve() {
                Format::Json => emit_json(&fmt.output, &coeffs_json(&table, m, tolerance)?),
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_csv(&mut buf, &["n", "a"], table.iter().map(|(n, a)| vec![n.to_string(), num(a)]))?;
                    emit(&fmt.output, buf)
                }
            }
        }
        Command::Basis { m, j, k, which, grid, tolerance, output } => {
            check_tolerance(tolerance)?;
            let xs = parse_grid(&grid)?;
            let basis = build_basis(SplineOrder::new(m)?, tolerance)?;
            let ys: Vec<f64> = match which {
                Which::L => xs.par_iter().map(|x| basis.eval_l(*x)).collect(),
                Which::S => {
                    let (Some(j), Some(k)) = (j, k) else {
                        return Err(Failure::input("--which s needs --j and --k"));
                    };
                    let idx = DyadicIndex::new(j, k)?;
                    xs.par_iter().map(|x| basis.eval_s(idx, *x)).collect()
                }
            };
            emit_grid(&output, &xs, &ys)
        }
        Command::Analyze { m, input, output } => {
            let m = SplineOrder::new(m)?;
            let file = File::open(&input).map_err(|e| Failure::input(format!("{}: {e}", input.display())))?;
            let samples = read_samples(BufReader::new(file))?;
            let exp = analyze(&samples, m)?;
            emit_json(&output, &expansion_to_json(&exp, provenance(m, 0.0, 0.0)))
        }
        Command::Synthesize { coeffs, grid, tolerance, output } => {
            check_tolerance(tolerance)?;
            let exp = expansion_from_json(&read_json(&coeffs)?)?;
            let xs = parse_grid(&grid)?;
            let basis = build_basis(exp.m, tolerance)?;
            let ys = synthesize(&exp, &basis, &xs)?;
            emit_grid(&output, &xs, &ys)
        }
        Command::WaveletAnalyze { m, input, exact, max_level, tolerance, output } => {
            check_tolerance(tolerance)?;
            let m = SplineOrder::new(m)?;
            let basis = build_wavelet_basis(m, tolerance)?;
            let (exp, bound) = match (input, exact) {
                (Some(path), _) => {
                    let file = File::open(&path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
                    let samples = read_samples(BufReader::new(file))?;
                    let level = max_level.unwrap_or(samples.level as i32 - 1);
                    let exp = basis.analyze(Signal::Sampled(&samples), level)?;
                    (exp, basis.faber.cardinal.error_bound())
                }
                (None, Some(path)) => {
                    let f = PiecewisePolynomial::from_json(&read_json(&path)?)?;
                    let level = max_level.ok_or_else(|| Failure::input("--exact needs --max-level"))?;
                    (basis.analyze(Signal::Exact(&f), level)?, 0.0)
                }
                (None, None) => unreachable!("clap requires one input"),
            };
            emit_json(&output, &expansion_to_json(&exp, provenance(m, tolerance, bound)))
        }
        Command::WaveletSynthesize { coeffs, grid, tolerance, output } => {
            check_tolerance(tolerance)?;
            let exp = expansion_from_json(&read_json(&coeffs)?)?;
            let xs = parse_grid(&grid)?;
            let basis = build_wavelet_basis(exp.m, tolerance)?;
            let ys = basis.synthesize(&exp, &xs)?;
            emit_grid(&output, &xs, &ys)
        }
        Command::Norm { space, params, coeffs, output } => {
            let exp = expansion_from_json(&read_json(&coeffs)?)?;
            let params = NormParams::new(params.r, params.p, params.theta)?;
            let space = Space::from(space);
            let value = norm(&exp, space, params)?;
            emit_json(
                &output,
                &json!({
                    "provenance": provenance(exp.m, 0.0, 0.0),
                    "kind": exp.kind.name(),
                    "space": space,
                    "params": params,
                    "norm": value,
                    "warning": params.admissibility(space, exp.kind, exp.m.get()),
                }),
            )
        }
        Command::Probe { family: name, m, space, params, levels, fmt } => {
            let f = family(&name)?.build()?;
            let m = SplineOrder::new(m)?;
            let params = NormParams::new(params.r, params.p, params.theta)?;
            let report = equivalence_probe(&f, m, space.into(), params, parse_levels(&levels)?)?;
            if let Some(w) = &report.warning {
                eprintln!("warning: {w}");
            }
            match fmt.resolve() {
                Format::Json => {
                    let mut value = serde_json::to_value(&report)?;
                    value["provenance"] = provenance(m, 0.0, 0.0);
                    value["family"] = json!(name);
                    emit_json(&fmt.output, &value)
                }
                Format::Csv => {
                    let mut buf = Vec::new();
                    let rows = report
                        .rows
                        .iter()
                        .map(|r| vec![r.level.to_string(), num(r.norm), fmt_opt(r.ratio)]);
                    write_csv(&mut buf, &["N", "norm", "ratio"], rows)?;
                    emit(&fmt.output, buf)
                }
            }
        }
        Command::Convergence { family: name, m, levels, tolerance, fmt } => {
            check_tolerance(tolerance)?;
            let f = family(&name)?.build()?;
            let m = SplineOrder::new(m)?;
            let basis = build_basis(m, tolerance)?;
            let rows = convergence_study(&f, &basis, parse_levels(&levels)?)?;
            match fmt.resolve() {
                Format::Json => emit_json(
                    &fmt.output,
                    &json!({
                        "provenance": provenance(m, tolerance, basis.l_error_bound()),
                        "family": name,
                        "rows": rows,
                    }),
                ),
                Format::Csv => {
                    let mut buf = Vec::new();
                    let rows = rows
                        .iter()
                        .map(|r| vec![r.level.to_string(), num(r.error), fmt_opt(r.order)]);
                    write_csv(&mut buf, &["N", "error", "order"], rows)?;
                    emit(&fmt.output, buf)
                }
            }
        }
    }
}

/// `FABER_THREADS` caps the worker pool; unset or 0 leaves the default.
fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("FABER_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| Failure::input(format!("FABER_THREADS must be a non-negative integer, got '{value}'")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure { code: 1, message: e.to_string() })?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
