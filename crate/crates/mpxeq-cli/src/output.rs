//! Error objects and CSV rendering.

use std::path::Path;
use std::process::ExitCode;

use serde::Serialize;
use serde_json::Value;

use mpxeq::oracle::CurveSample;

/// Structured error written to stderr; nothing goes to the report sink.
#[derive(Debug, Serialize)]
pub struct Failure {
    pub code: String,
    pub message: String,
    pub location: Option<String>,
    #[serde(skip)]
    pub exit: u8,
}

impl Failure {
    pub fn usage(message: String, location: Option<&str>) -> Self {
        Failure {
            code: "UsageError".into(),
            message,
            location: location.map(str::to_string),
            exit: 1,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Failure {
            code: "IoError".into(),
            message: err.to_string(),
            location: Some(path.display().to_string()),
            exit: 1,
        }
    }

    pub fn emit(&self) -> ExitCode {
        eprint!("{}", mpxeq::json::to_string(self));
        ExitCode::from(self.exit)
    }
}

impl From<mpxeq::Error> for Failure {
    fn from(e: mpxeq::Error) -> Self {
        Failure {
            code: e.code().into(),
            message: e.to_string(),
            location: e.location(),
            exit: if e.is_input_error() { 1 } else { 2 },
        }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure {
            code: "IoError".into(),
            message: e.to_string(),
            location: None,
            exit: 2,
        }
    }
}

fn number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, Failure> {
    let bytes = w.into_inner().map_err(|e| Failure::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: "IoError".into(),
            message: e.to_string(),
            location: None,
            exit: 2,
        }
    }
}

pub fn curves_csv(sample: &CurveSample) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "y_equilibrium", "y_contract"])?;
    for k in 0..sample.x.len() {
        w.write_record([number(sample.x[k]), number(sample.y_equilibrium[k]), number(sample.y_contract[k])])?;
    }
    finish(w)
}

/// Any report as `path,value` rows, e.g. `result.prices[1],1.0e0`.
pub fn flat_csv<T: Serialize>(report: &T) -> Result<String, Failure> {
    let value = serde_json::to_value(report).map_err(|e| Failure {
        code: "SerializationError".into(),
        message: e.to_string(),
        location: None,
        exit: 2,
    })?;
    let mut rows = Vec::new();
    flatten(&value, String::new(), &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["path", "value"])?;
    for (path, v) in rows {
        w.write_record([path, v])?;
    }
    finish(w)
}

fn flatten(v: &Value, path: String, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                flatten(child, p, rows);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(child, format!("{path}[{i}]"), rows);
            }
        }
        Value::Number(n) => {
            let s = match (n.as_u64(), n.as_i64()) {
                (Some(u), _) => u.to_string(),
                (_, Some(i)) => i.to_string(),
                _ => number(n.as_f64().unwrap_or(f64::NAN)),
            };
            rows.push((path, s));
        }
        Value::String(s) => rows.push((path, s.clone())),
        Value::Bool(b) => rows.push((path, b.to_string())),
        Value::Null => rows.push((path, String::new())),
    }
}
