//! Residual reports and their canonical JSON form.
//!
//! Canonical JSON: object keys sorted, no insignificant whitespace, every
//! float written with 17 significant digits in exponent form.

use std::collections::BTreeMap;

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

/// Outcome of one identity over all sample points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Fail,
    Indeterminate,
    NotApplicable,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Indeterminate => "indeterminate",
            Status::NotApplicable => "not-applicable",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityResult {
    pub suite: String,
    pub tolerance: f64,
    /// Largest residual over applicable points.
    pub max_residual: Option<f64>,
    /// Number of points where the identity was evaluated.
    pub evaluated: usize,
    pub status: Status,
    pub note: Option<String>,
}

/// Informational quantity sampled at every point.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    pub min: f64,
    pub max: f64,
    pub samples: usize,
}

impl Measurement {
    pub fn new(v: f64) -> Self {
        Measurement { min: v, max: v, samples: 1 }
    }

    pub fn push(&mut self, v: f64) {
        self.min = self.min.min(v);
        self.max = self.max.max(v);
        self.samples += 1;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlagResult {
    /// Largest residual over the sample points.
    pub residual: f64,
    pub flag: &'static str,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub engine: String,
    pub model_kind: String,
    pub n: usize,
    pub model_hash: String,
    pub seed: u64,
    pub points: usize,
    pub region: f64,
    pub tolerance_scale: f64,
    pub suites: Vec<String>,
    pub identities: BTreeMap<String, IdentityResult>,
    pub measurements: BTreeMap<String, Measurement>,
    pub classification: BTreeMap<String, FlagResult>,
    /// Evaluation failures, one line per point and stage.
    pub errors: Vec<String>,
}

impl Report {
    pub fn count(&self, s: Status) -> usize {
        self.identities.values().filter(|r| r.status == s).count()
    }

    /// True when some identity failed.
    pub fn failed(&self) -> bool {
        self.count(Status::Fail) > 0
    }

    pub fn status_of(&self, id: &str) -> Option<Status> {
        self.identities.get(id).map(|r| r.status)
    }

    pub fn residual_of(&self, id: &str) -> Option<f64> {
        self.identities.get(id).and_then(|r| r.max_residual)
    }

    pub fn to_value(&self) -> Value {
        let mut ids = Map::new();
        for (k, r) in &self.identities {
            let mut o = Map::new();
            o.insert("suite".into(), Value::String(r.suite.clone()));
            o.insert("tolerance".into(), num(r.tolerance));
            o.insert("max_residual".into(), r.max_residual.map_or(Value::Null, num));
            o.insert("evaluated".into(), Value::from(r.evaluated));
            o.insert("status".into(), Value::String(r.status.as_str().into()));
            if let Some(n) = &r.note {
                o.insert("note".into(), Value::String(n.clone()));
            }
            ids.insert(k.clone(), Value::Object(o));
        }
        let mut meas = Map::new();
        for (k, m) in &self.measurements {
            let mut o = Map::new();
            o.insert("min".into(), num(m.min));
            o.insert("max".into(), num(m.max));
            o.insert("samples".into(), Value::from(m.samples));
            meas.insert(k.clone(), Value::Object(o));
        }
        let mut cls = Map::new();
        for (k, f) in &self.classification {
            let mut o = Map::new();
            o.insert("residual".into(), num(f.residual));
            o.insert("flag".into(), Value::String(f.flag.into()));
            cls.insert(k.clone(), Value::Object(o));
        }
        let mut summary = Map::new();
        for s in [Status::Pass, Status::Fail, Status::Indeterminate, Status::NotApplicable] {
            summary.insert(s.as_str().into(), Value::from(self.count(s)));
        }
        let mut model = Map::new();
        model.insert("kind".into(), Value::String(self.model_kind.clone()));
        model.insert("n".into(), Value::from(self.n));
        model.insert("sha256".into(), Value::String(self.model_hash.clone()));
        let mut sampling = Map::new();
        sampling.insert("seed".into(), Value::from(self.seed));
        sampling.insert("points".into(), Value::from(self.points));
        sampling.insert("region".into(), num(self.region));
        let mut top = Map::new();
        top.insert("engine".into(), Value::String(self.engine.clone()));
        top.insert("model".into(), Value::Object(model));
        top.insert("sampling".into(), Value::Object(sampling));
        top.insert("tolerance_scale".into(), num(self.tolerance_scale));
        top.insert("suites".into(), Value::Array(self.suites.iter().cloned().map(Value::String).collect()));
        top.insert("identities".into(), Value::Object(ids));
        top.insert("measurements".into(), Value::Object(meas));
        top.insert("classification".into(), Value::Object(cls));
        top.insert("summary".into(), Value::Object(summary));
        top.insert("errors".into(), Value::Array(self.errors.iter().cloned().map(Value::String).collect()));
        Value::Object(top)
    }

    pub fn to_canonical_json(&self) -> String {
        canonical_json(&self.to_value())
    }
}

/// Non-finite values are written as strings since JSON has no encoding for them.
fn num(x: f64) -> Value {
    if x.is_finite() {
        serde_json::Number::from_f64(x).map(Value::Number).expect("finite")
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

/// `x` with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write(v, &mut out);
    out
}

fn write(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_u64() {
                out.push_str(&i.to_string());
            } else if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else {
                out.push_str(&format_f64(n.as_f64().expect("number")));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write(x, out);
            }
            out.push(']');
        }
        Value::Object(o) => {
            let mut keys: Vec<&String> = o.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write(&o[k], out);
            }
            out.push('}');
        }
    }
}

/// Hex SHA-256 of a string.
pub fn sha256_hex(s: &str) -> String {
    Sha256::digest(s.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}
