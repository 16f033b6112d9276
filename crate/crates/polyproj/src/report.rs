//! Deterministic JSON report documents.
//!
//! Every command emits one document with a fixed envelope: tool version,
//! command name, timestamp, the effective configuration, the results, and a
//! block of verdict strings. Envelope fields serialize in declaration order;
//! nested objects sort by key. Two runs with the same configuration and seed
//! therefore produce byte-identical output except for the `timestamp` line.

use serde::Serialize;
use serde_json::{Map, Number, Value};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

/// Envelope shared by all emitted documents.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub command: String,
    pub timestamp: String,
    pub config: Value,
    pub results: Value,
    pub verdicts: Value,
}

impl Report {
    /// Builds a report stamped with the crate version and the current time.
    pub fn new(command: &str, config: Value, results: Value, verdicts: Value) -> Report {
        Report {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            timestamp: now_utc(),
            config,
            results,
            verdicts,
        }
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn render(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}

/// Drops the `"timestamp"` line so two renderings can be compared for the
/// determinism guarantee.
pub fn strip_timestamp(text: &str) -> String {
    text.lines()
        .filter(|line| !line.trim_start().starts_with("\"timestamp\""))
        .collect::<Vec<_>>()
        .join("\n")
}

/// A float as a JSON number with 17 significant digits, enough to round-trip
/// any `f64`. JSON has no tokens for non-finite values, so those become the
/// strings `"inf"`, `"-inf"`, and `"nan"`.
pub fn float(x: f64) -> Value {
    if x.is_finite() {
        Number::from_str(&format!("{x:.16e}"))
            .map(Value::Number)
            .unwrap_or(Value::Null)
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

pub fn float_vec(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| float(x)).collect())
}

pub fn index_vec(xs: &[usize]) -> Value {
    Value::Array(xs.iter().map(|&i| Value::from(i as u64)).collect())
}

/// Builds a JSON object from key-value pairs. The underlying map sorts by
/// key, so entry order here does not affect the output.
pub fn object(entries: Vec<(&str, Value)>) -> Value {
    let mut map = Map::new();
    for (k, v) in entries {
        map.insert(k.to_string(), v);
    }
    Value::Object(map)
}

fn now_utc() -> String {
    let dur = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .unwrap_or_default();
    iso8601_utc(dur.as_secs())
}

/// Unix seconds to `YYYY-MM-DDTHH:MM:SSZ` in the proleptic Gregorian
/// calendar.
fn iso8601_utc(secs: u64) -> String {
    let days = (secs / 86_400) as i64;
    let rem = secs % 86_400;
    let (y, m, d) = civil_from_days(days);
    format!(
        "{y:04}-{m:02}-{d:02}T{:02}:{:02}:{:02}Z",
        rem / 3600,
        (rem % 3600) / 60,
        rem % 60
    )
}

/// Days since 1970-01-01 to a civil date, via 400-year eras.
fn civil_from_days(z: i64) -> (i64, u32, u32) {
    let z = z + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097);
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let m = if mp < 10 { mp + 3 } else { mp - 9 } as u32;
    let y = yoe + era * 400 + i64::from(m <= 2);
    (y, m, d)
}
