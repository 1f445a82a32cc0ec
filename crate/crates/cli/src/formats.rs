//! File formats: `samples.csv`, `coeffs.json`, grids and level ranges.

use std::io::{Read, Write};

use faber_core::basis::DyadicIndex;
use faber_core::expansion::{Expansion, ExpansionKind};
use faber_core::sampling::SampledFunction;
use faber_core::{FaberError, SplineOrder};
use serde_json::{json, Map, Value};

use crate::Failure;

/// `a:b:step`, both ends included up to rounding.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::input(format!("grid '{s}' is not a:b:step")))?;
    let [a, b, step] = parts[..] else {
        return Err(Failure::input(format!("grid '{s}' is not a:b:step")));
    };
    if !(a.is_finite() && b.is_finite() && step > 0.0 && step.is_finite() && b >= a) {
        return Err(Failure::input(format!("grid '{s}' needs finite a <= b and step > 0")));
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    if count > 50_000_000 {
        return Err(Failure::input(format!("grid '{s}' has {count} points")));
    }
    Ok((0..count).map(|i| a + i as f64 * step).collect())
}

/// `lo:hi` inclusive.
pub fn parse_levels(s: &str) -> Result<std::ops::RangeInclusive<u32>, Failure> {
    let bad = || Failure::input(format!("level range '{s}' is not lo:hi with lo <= hi"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi || hi > 30 {
        return Err(bad());
    }
    Ok(lo..=hi)
}

/// Reads
///
/// ```text
/// N,k_lo,k_hi
/// 6,-64,64
/// k,value
/// -64,0.0
/// ...
/// ```
pub fn read_samples(input: impl Read) -> Result<SampledFunction, Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let rows: Vec<csv::StringRecord> = reader.records().collect::<Result<_, _>>()?;
    let header = |i: usize, want: &[&str]| -> Result<(), Failure> {
        let row = rows.get(i).ok_or_else(|| Failure::input("samples file is truncated"))?;
        if row.iter().collect::<Vec<_>>() != want {
            return Err(Failure::input(format!("line {}: expected header {}", i + 1, want.join(","))));
        }
        Ok(())
    };
    header(0, &["N", "k_lo", "k_hi"])?;
    let meta = rows.get(1).ok_or_else(|| Failure::input("samples file is truncated"))?;
    let int = |s: &str, line: usize| -> Result<i64, Failure> {
        s.parse().map_err(|_| Failure::input(format!("line {line}: '{s}' is not an integer")))
    };
    let level = int(field(meta, 0, 2)?, 2)?;
    let k_lo = int(field(meta, 1, 2)?, 2)?;
    let k_hi = int(field(meta, 2, 2)?, 2)?;
    if !(0..=30).contains(&level) || k_hi < k_lo {
        return Err(Failure::input("line 2: need 0 <= N <= 30 and k_lo <= k_hi"));
    }
    header(2, &["k", "value"])?;
    let mut values = Vec::with_capacity((k_hi - k_lo + 1) as usize);
    for (i, row) in rows[3..].iter().enumerate() {
        let line = i + 4;
        let k = int(field(row, 0, line)?, line)?;
        if k != k_lo + i as i64 {
            return Err(Failure::input(format!("line {line}: expected k = {}, got {k}", k_lo + i as i64)));
        }
        let v = field(row, 1, line)?;
        let v: f64 = v
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| Failure::input(format!("line {line}: '{v}' is not a finite number")))?;
        values.push(v);
    }
    if values.len() as i64 != k_hi - k_lo + 1 {
        return Err(Failure::input(format!(
            "expected {} samples for k = {k_lo}..={k_hi}, got {}",
            k_hi - k_lo + 1,
            values.len()
        )));
    }
    Ok(SampledFunction::new(level as u32, k_lo, values)?)
}

fn field(row: &csv::StringRecord, i: usize, line: usize) -> Result<&str, Failure> {
    row.get(i).ok_or_else(|| Failure::input(format!("line {line}: missing column {}", i + 1)))
}

/// `{m, tolerance, truncation_bound, version}`.
pub fn provenance(m: SplineOrder, tolerance: f64, truncation_bound: f64) -> Value {
    json!({
        "m": m.get(),
        "tolerance": tolerance,
        "truncation_bound": truncation_bound,
        "version": env!("CARGO_PKG_VERSION"),
    })
}

pub fn expansion_to_json(exp: &Expansion, provenance: Value) -> Value {
    let levels: Vec<Value> = exp
        .levels
        .iter()
        .map(|(j, coeffs)| {
            let map: Map<String, Value> = coeffs.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
            json!({ "j": j, "coeffs": map })
        })
        .collect();
    json!({
        "m": exp.m.get(),
        "kind": exp.kind.name(),
        "provenance": provenance,
        "levels": levels,
    })
}

pub fn expansion_from_json(value: &Value) -> Result<Expansion, Failure> {
    let bad = |what: &str| Failure::input(format!("coefficient file: {what}"));
    let m = value
        .get("m")
        .and_then(Value::as_i64)
        .ok_or_else(|| bad("missing integer \"m\""))?;
    let m = SplineOrder::new(m)?;
    let kind = match value.get("kind") {
        None => ExpansionKind::Faber,
        Some(k) => k
            .as_str()
            .and_then(ExpansionKind::parse)
            .ok_or_else(|| bad("\"kind\" must be \"faber\" or \"wavelet\""))?,
    };
    let mut exp = Expansion::new(m, kind);
    let levels = value
        .get("levels")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing array \"levels\""))?;
    for level in levels {
        let j = level
            .get("j")
            .and_then(Value::as_i64)
            .and_then(|j| i32::try_from(j).ok())
            .ok_or_else(|| bad("level without integer \"j\""))?;
        let coeffs = level
            .get("coeffs")
            .and_then(Value::as_object)
            .ok_or_else(|| bad("level without object \"coeffs\""))?;
        for (k, v) in coeffs {
            let k: i64 = k.parse().map_err(|_| bad(&format!("key '{k}' is not an integer")))?;
            let v = v.as_f64().ok_or_else(|| bad(&format!("value at j={j}, k={k} is not a number")))?;
            exp.insert(DyadicIndex::new(j, k)?, v);
        }
    }
    Ok(exp)
}

/// Header plus one row per entry, LF line endings.
pub fn write_csv<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), Failure> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest round-trip decimal, exponent form for small or large magnitudes.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::input(format!("csv: {e}"))
    }
}

impl From<FaberError> for Failure {
    fn from(e: FaberError) -> Self {
        let code = if e.is_numerical_guard() { 3 } else { 2 };
        Failure { code, message: e.to_string() }
    }
}
