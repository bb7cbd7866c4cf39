//! Run reports: every number carries the semantics under which it was computed.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Semantics {
    Exact,
    LowerBound,
    UpperBound,
    /// A sup located by a one-dimensional search; a lower bound that is usually sharp.
    LineSearch,
    /// Stopped iteration with this relative tolerance.
    Iterative(f64),
    /// Quadrature or truncation error of this relative size.
    Quadrature(f64),
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Semantics::Exact => f.write_str("exact"),
            Semantics::LowerBound => f.write_str("lower-bound"),
            Semantics::UpperBound => f.write_str("upper-bound"),
            Semantics::LineSearch => f.write_str("line-search"),
            Semantics::Iterative(t) => write!(f, "iterative({t:e})"),
            Semantics::Quadrature(e) => write!(f, "quadrature({e:e})"),
        }
    }
}

impl From<sublin_core::maximal::Semantics> for Semantics {
    fn from(s: sublin_core::maximal::Semantics) -> Self {
        use sublin_core::maximal::Semantics as S;
        match s {
            S::Exact => Semantics::Exact,
            S::LineSearch => Semantics::LineSearch,
            S::LowerBound => Semantics::LowerBound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tagged {
    pub value: Value,
    pub semantics: String,
}

/// JSON has no infinities; they are spelled as strings.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
    } else if v.is_nan() {
        Value::String("nan".into())
    } else if v > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

pub fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| num(*x)).collect())
}

pub fn points(p: &[Vec<f64>]) -> Value {
    Value::Array(p.iter().map(|x| nums(x)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs_digest: String,
    pub outputs: BTreeMap<String, Tagged>,
    pub constants: BTreeMap<String, Tagged>,
    pub warnings: Vec<String>,
    pub exit_code: i32,
}

impl RunReport {
    pub fn new(command: &str, inputs_digest: String) -> Self {
        RunReport {
            command: command.into(),
            inputs_digest,
            outputs: BTreeMap::new(),
            constants: BTreeMap::new(),
            warnings: Vec::new(),
            exit_code: 0,
        }
    }

    pub fn output(&mut self, name: &str, value: Value, semantics: Semantics) {
        self.outputs.insert(name.into(), Tagged { value, semantics: semantics.to_string() });
    }

    pub fn constant(&mut self, name: &str, value: f64, semantics: Semantics) {
        self.constants.insert(name.into(), Tagged { value: num(value), semantics: semantics.to_string() });
    }

    pub fn warn(&mut self, w: impl Into<String>) {
        self.warnings.push(w.into());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are plain JSON");
        s.push('\n');
        s
    }
}

/// SHA-256 over the command, its scalar arguments and the bytes of its input files.
pub struct InputDigest(Sha256);

impl InputDigest {
    pub fn new(command: &str) -> Self {
        let mut h = Sha256::new();
        h.update(b"command\0");
        h.update(command.as_bytes());
        InputDigest(h)
    }

    pub fn arg(&mut self, name: &str, value: impl fmt::Display) -> &mut Self {
        self.0.update(format!("\0arg\0{name}\0{value}").as_bytes());
        self
    }

    pub fn file(&mut self, name: &str, bytes: &[u8]) -> &mut Self {
        self.0.update(format!("\0file\0{name}\0{}\0", bytes.len()).as_bytes());
        self.0.update(bytes);
        self
    }

    pub fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}
