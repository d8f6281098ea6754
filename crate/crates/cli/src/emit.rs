//! Report serialization. Floats always carry 17 significant digits and exact
//! rationals travel as a `"num/den"` string next to a decimal value.

use num_rational::BigRational;
use serde::Serialize;
use serde_json::{Map, Number, Value};
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::{CliError, Command, Manifest, Status};

/// Rows for the CSV form of a report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        // signed exponent, as JSON writers print it
        let s = format!("{x:.16e}");
        match s.split_once('e') {
            Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
            _ => s,
        }
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&fmt_f64(x)).expect("formatted float is a JSON number"))
    } else {
        Value::Null
    }
}

pub fn int(x: &impl ToString) -> Value {
    Value::Number(Number::from_str(&x.to_string()).expect("integer is a JSON number"))
}

pub fn rational_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn rational_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn rational(q: &BigRational) -> Value {
    let mut m = Map::new();
    m.insert("value".into(), Value::String(rational_string(q)));
    m.insert("decimal".into(), num(rational_f64(q)));
    Value::Object(m)
}

/// Serializes `x` and rewrites every float in it to 17 significant digits.
pub fn to_json<T: Serialize>(x: &T) -> Value {
    normalize(serde_json::to_value(x).expect("report types serialize"))
}

fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) => {
            let s = n.to_string();
            if s.contains(['.', 'e', 'E']) {
                num(s.parse::<f64>().unwrap_or(f64::NAN))
            } else {
                Value::Number(n)
            }
        }
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

pub fn render_json(
    command: Command,
    manifest: &Manifest,
    results: Value,
    status: Status,
    wall_time: Option<f64>,
) -> String {
    let mut m = Map::new();
    m.insert("tool".into(), Value::String(env!("CARGO_PKG_NAME").into()));
    m.insert(
        "version".into(),
        Value::String(env!("CARGO_PKG_VERSION").into()),
    );
    m.insert("command".into(), Value::String(command.to_string()));
    m.insert("seed".into(), int(&manifest.seed()));
    m.insert("inputs".into(), to_json(&manifest.recorded()));
    m.insert("results".into(), results);
    m.insert("status".into(), Value::String(status.to_string()));
    if let Some(t) = wall_time {
        m.insert("wall_time_s".into(), num(t));
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("json");
    s.push('\n');
    s
}

pub fn render_csv(table: &Table) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Io(std::io::Error::other(e));
    w.write_record(&table.header).map_err(csv_err)?;
    for row in &table.rows {
        w.write_record(row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

/// Writes `text` to `out`, or to standard output.
pub fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Write {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}
