//! Serialization of results: provenance, 12-significant-digit numbers and
//! string encoding of non-finite values (`"inf"`, `"-inf"`, `"nan"`).

use serde::Serialize;
use serde_json::{Map, Number, Value as Json};
use serde_value::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Text form used in CSV cells.
pub fn fmt_num(x: f64) -> String {
    match x {
        x if x.is_nan() => "nan".into(),
        f64::INFINITY => "inf".into(),
        f64::NEG_INFINITY => "-inf".into(),
        x => format!("{:?}", round_sig(x)),
    }
}

fn float(x: f64) -> Json {
    if x.is_finite() {
        Number::from_f64(round_sig(x)).map_or(Json::Null, Json::Number)
    } else {
        Json::String(fmt_num(x))
    }
}

fn to_json(v: Value) -> Json {
    match v {
        Value::Bool(b) => Json::Bool(b),
        Value::U8(x) => x.into(),
        Value::U16(x) => x.into(),
        Value::U32(x) => x.into(),
        Value::U64(x) => x.into(),
        Value::I8(x) => x.into(),
        Value::I16(x) => x.into(),
        Value::I32(x) => x.into(),
        Value::I64(x) => x.into(),
        Value::F32(x) => float(x as f64),
        Value::F64(x) => float(x),
        Value::Char(c) => Json::String(c.to_string()),
        Value::String(s) => Json::String(s),
        Value::Unit | Value::Option(None) => Json::Null,
        Value::Option(Some(v)) | Value::Newtype(v) => to_json(*v),
        Value::Seq(items) => Json::Array(items.into_iter().map(to_json).collect()),
        Value::Map(m) => {
            let mut out = Map::new();
            for (k, v) in m {
                let key = match to_json(k) {
                    Json::String(s) => s,
                    other => other.to_string(),
                };
                out.insert(key, to_json(v));
            }
            Json::Object(out)
        }
        Value::Bytes(b) => Json::Array(b.into_iter().map(Json::from).collect()),
    }
}

/// Converts any serializable value with the number conventions above.
pub fn to_json_value<T: Serialize>(v: &T) -> Result<Json> {
    serde_value::to_value(v)
        .map(to_json)
        .map_err(|e| Error::InvalidArgument(format!("serialization failed: {e}")))
}

/// Who produced an artifact and from what.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
}

impl Provenance {
    /// `config_hash` is the first 16 hex digits of the SHA-256 of the
    /// configuration's JSON form.
    pub fn new<C: Serialize>(command: &str, seed: u64, config: &C) -> Result<Self> {
        let canonical = to_json_value(config)?.to_string();
        let digest = Sha256::digest(canonical.as_bytes());
        let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
        Ok(Provenance {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config_hash: hex,
        })
    }

    /// `# key: value` lines for CSV headers.
    pub fn comment_lines(&self) -> String {
        format!(
            "# command: {}\n# version: {}\n# seed: {}\n# config_hash: {}\n",
            self.command, self.version, self.seed, self.config_hash
        )
    }
}

/// `{"provenance": …, "result": …}`, pretty-printed with a trailing newline.
pub fn json_document<T: Serialize>(prov: &Provenance, result: &T) -> Result<String> {
    let mut doc = Map::new();
    doc.insert("provenance".into(), to_json_value(prov)?);
    doc.insert("result".into(), to_json_value(result)?);
    let mut s = serde_json::to_string_pretty(&Json::Object(doc))
        .map_err(|e| Error::InvalidArgument(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// CSV text with provenance comments; every row must match `header`.
pub fn csv_document(prov: &Provenance, header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Error::Io(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(prov.comment_lines() + &String::from_utf8_lossy(&body))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Sample {
        a: f64,
        b: Option<f64>,
        c: Vec<f64>,
        n: usize,
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn rounding() {
        assert_eq!(round_sig(std::f64::consts::PI), 3.14159265359);
        assert_eq!(round_sig(1.0 / 3.0e-20), 3.33333333333e19);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(fmt_num(2.0), "2.0");
        assert_eq!(fmt_num(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn json_numbers() {
        let v = to_json_value(&Sample {
            a: 2.0 / 3.0,
            b: Some(f64::INFINITY),
            c: vec![f64::NAN, 1e-300],
            n: 7,
        })
        .unwrap();
        assert_eq!(v.to_string(), r#"{"a":0.666666666667,"b":"inf","c":["nan",1e-300],"n":7}"#);
    }

    #[test]
    fn provenance_hash_is_stable() {
        let p = Provenance::new("estimate", 42, &[1.0, 2.0]).unwrap();
        let q = Provenance::new("estimate", 42, &[1.0, 2.0]).unwrap();
        assert_eq!(p, q);
        assert_eq!(p.config_hash.len(), 16);
        assert_ne!(p.config_hash, Provenance::new("estimate", 42, &[1.0, 2.5]).unwrap().config_hash);
        let doc = csv_document(&p, &["x"], &[vec!["1.0".into()]]).unwrap();
        assert!(doc.starts_with("# command: estimate\n"));
        assert!(doc.ends_with("x\n1.0\n"));
    }
}
