use std::io;

use indexmap::IndexMap;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use super::table::{Comparison, ComparisonRow};
use crate::error::{Error, Result};

/// Formats a float with 17 significant digits (`{:.16e}`), enough to round
/// trip any `f64`.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Pretty JSON formatter that writes every float with 17 significant digits.
struct FullPrecision<'a>(PrettyFormatter<'a>);

impl Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        if v.is_finite() {
            w.write_all(format_f64(v).as_bytes())
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(v))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value` as pretty JSON with full-precision floats.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|e| Error::Io(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

/// Everything a `run` produces: the comparison table plus run metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub seed: u64,
    pub trials: u64,
    pub config_hash: String,
    pub k_sigma: f64,
    pub pass: bool,
    pub config: serde_json::Value,
    pub metadata: IndexMap<String, f64>,
    pub outcomes: Vec<ComparisonRow>,
    #[serde(skip_serializing_if = "IndexMap::is_empty")]
    pub extras: IndexMap<String, serde_json::Value>,
}

impl RunReport {
    pub fn new(
        scenario: impl Into<String>,
        seed: u64,
        trials: u64,
        config_hash: impl Into<String>,
        config: serde_json::Value,
        comparison: Comparison,
    ) -> Self {
        RunReport {
            scenario: scenario.into(),
            seed,
            trials,
            config_hash: config_hash.into(),
            k_sigma: comparison.k_sigma,
            pass: comparison.pass,
            config,
            metadata: IndexMap::new(),
            outcomes: comparison.rows,
            extras: IndexMap::new(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }

    /// One row per outcome: `label,count,frequency,sigma,analytic_p,pass`.
    pub fn to_csv(&self) -> Result<String> {
        rows_to_csv(&self.outcomes)
    }
}

pub fn rows_to_csv(rows: &[ComparisonRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["label", "count", "frequency", "sigma", "analytic_p", "pass"])
        .map_err(io_err)?;
    for r in rows {
        w.write_record([
            r.label.clone(),
            r.count.to_string(),
            format_f64(r.frequency),
            format_f64(r.sigma),
            format_f64(r.analytic_p),
            r.pass.to_string(),
        ])
        .map_err(io_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(format_f64(0.1).parse::<f64>().unwrap(), 0.1);
        let v = 1.0 / 3.0;
        assert_eq!(format_f64(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn json_uses_full_precision() {
        #[derive(Serialize)]
        struct S {
            x: f64,
            n: u64,
        }
        let json = to_json_string(&S { x: 0.25, n: 3 }).unwrap();
        assert_eq!(json, "{\n  \"x\": 2.5000000000000000e-1,\n  \"n\": 3\n}\n");
        let back: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(back["x"], 0.25);
    }

    #[test]
    fn csv_layout() {
        let rows = vec![ComparisonRow {
            label: "eve=Psi+;1=+;4=-".into(),
            count: 3,
            frequency: 0.75,
            sigma: 0.25,
            analytic_p: 0.5,
            pass: true,
        }];
        let csv = rows_to_csv(&rows).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("label,count,frequency,sigma,analytic_p,pass"));
        assert_eq!(
            lines.next(),
            Some("eve=Psi+;1=+;4=-,3,7.5000000000000000e-1,2.5000000000000000e-1,5.0000000000000000e-1,true")
        );
    }
}
