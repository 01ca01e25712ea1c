//! Versioned check reports with byte-stable JSON and markdown emitters.

use std::io;

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};
use serde_json::Value;

use crate::hopf::{ConditionReport, Subspace};

pub const SCHEMA: &str = "hyperlab/1";

/// One row of a report. `pass` is `residual <= tolerance`; `expected`
/// appears only on negative controls, where the check is meant to fail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub check: String,
    pub subspace: Subspace,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

impl CheckRow {
    pub fn new(
        check: impl Into<String>,
        subspace: Subspace,
        residual: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            check: check.into(),
            subspace,
            residual,
            tolerance,
            // NaN never passes
            pass: residual <= tolerance,
            expected: None,
            mu: None,
        }
    }

    pub fn expect(mut self, expected: bool) -> Self {
        self.expected = Some(expected);
        self
    }

    /// The row's outcome matches what was expected of it.
    pub fn as_expected(&self) -> bool {
        self.pass == self.expected.unwrap_or(true)
    }
}

impl From<ConditionReport> for CheckRow {
    fn from(r: ConditionReport) -> Self {
        let mut row = CheckRow::new(r.name, r.subspace, r.residual, r.tolerance);
        row.mu = r.mu;
        row
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: Value,
    pub checks: Vec<CheckRow>,
    pub data: Value,
    pub all_pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl Report {
    /// Rows are ordered by `(check, subspace)` so output never depends on
    /// evaluation order.
    pub fn new(
        command: impl Into<String>,
        config: Value,
        mut checks: Vec<CheckRow>,
        data: Value,
    ) -> Self {
        checks.sort_by(|a, b| (&a.check, a.subspace).cmp(&(&b.check, b.subspace)));
        let all_pass = checks.iter().all(CheckRow::as_expected);
        Self {
            schema: SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            config,
            checks,
            data,
            all_pass,
            timestamp: None,
        }
    }

    pub fn stamped(mut self) -> Self {
        self.timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
        self
    }

    pub fn failures(&self) -> Vec<&CheckRow> {
        self.checks.iter().filter(|r| !r.as_expected()).collect()
    }

    pub fn to_json(&self) -> String {
        to_json_string(self, true)
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# hyperlab report: {}\n\n", self.command));
        out.push_str(&format!(
            "- schema: `{}`\n- version: `{}`\n",
            self.schema, self.version
        ));
        if let Some(ts) = self.timestamp {
            out.push_str(&format!("- timestamp: `{ts}`\n"));
        }
        out.push_str(&format!(
            "- result: **{}**\n\n",
            if self.all_pass { "pass" } else { "fail" }
        ));
        out.push_str("## Configuration\n\n```json\n");
        out.push_str(&to_json_string(&self.config, true));
        out.push_str("\n```\n\n");
        if !self.checks.is_empty() {
            out.push_str(
                "## Checks\n\n| check | subspace | residual | tolerance | pass | expected |\n",
            );
            out.push_str("|---|---|---|---|---|---|\n");
            for r in &self.checks {
                out.push_str(&format!(
                    "| {} | {} | {} | {} | {} | {} |\n",
                    r.check,
                    r.subspace,
                    fmt_f64(r.residual),
                    fmt_f64(r.tolerance),
                    if r.pass { "yes" } else { "no" },
                    match r.expected {
                        Some(true) => "pass",
                        Some(false) => "fail",
                        None => "pass",
                    }
                ));
            }
            out.push('\n');
        }
        if !self.data.is_null() {
            out.push_str("## Data\n\n```json\n");
            out.push_str(&to_json_string(&self.data, true));
            out.push_str("\n```\n");
        }
        out
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// serde_json formatter wrapper that prints floats with [`fmt_f64`].
struct ExactFloats<F>(F);

macro_rules! delegate {
    ($($name:ident),*) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
                self.0.$name(w)
            }
        )*
    };
}

impl<F: Formatter> Formatter for ExactFloats<F> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    delegate!(
        begin_array,
        end_array,
        begin_object,
        end_object,
        end_object_value
    );

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T, pretty: bool) -> String {
    let mut buf = Vec::new();
    let result = if pretty {
        let mut ser =
            serde_json::Serializer::with_formatter(&mut buf, ExactFloats(PrettyFormatter::new()));
        value.serialize(&mut ser)
    } else {
        let mut ser =
            serde_json::Serializer::with_formatter(&mut buf, ExactFloats(CompactFormatter));
        value.serialize(&mut ser)
    };
    result.expect("in-memory JSON serialization cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.0f64.sqrt(), 1e-300, 6.02214076e23, 0.0] {
            let s = to_json_string(&json!({ "v": v }), false);
            let back: Value = serde_json::from_str(&s).unwrap();
            assert_eq!(back["v"].as_f64().unwrap(), v, "{s}");
        }
        assert_eq!(
            to_json_string(&json!([0.5]), false),
            "[5.0000000000000000e-1]"
        );
        assert_eq!(to_json_string(&json!({ "n": 3 }), false), "{\"n\":3}");
    }

    #[test]
    fn rows_sorted_and_expectations_counted() {
        let rows = vec![
            CheckRow::new("phi-l-commute", Subspace::KerEta, 0.5, 1e-9).expect(false),
            CheckRow::new("hopf", Subspace::SpanXi, 0.0, 1e-9),
            CheckRow::new("l-A-commute", Subspace::SpanXi, 0.0, 1e-9),
            CheckRow::new("l-A-commute", Subspace::KerEta, 0.0, 1e-9),
        ];
        let rep = Report::new("verify", Value::Null, rows, Value::Null);
        let names: Vec<_> = rep
            .checks
            .iter()
            .map(|r| (r.check.as_str(), r.subspace))
            .collect();
        assert_eq!(
            names,
            vec![
                ("hopf", Subspace::SpanXi),
                ("l-A-commute", Subspace::KerEta),
                ("l-A-commute", Subspace::SpanXi),
                ("phi-l-commute", Subspace::KerEta),
            ]
        );
        assert!(rep.all_pass);
        assert!(rep.failures().is_empty());

        let bad = Report::new(
            "verify",
            Value::Null,
            vec![CheckRow::new("x", Subspace::All, f64::NAN, 1.0)],
            Value::Null,
        );
        assert!(!bad.all_pass);
    }

    #[test]
    fn json_shape() {
        let rep = Report::new(
            "oracle",
            json!({ "kappa": 1.0 }),
            vec![CheckRow::new(
                "riccati-closed-form",
                Subspace::All,
                1e-10,
                1e-6,
            )],
            json!({ "value": 1.0 }),
        );
        let v: Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(v["schema"], "hyperlab/1");
        assert!(v.get("timestamp").is_none());
        assert_eq!(v["checks"][0]["subspace"], "all");
        assert!(v["checks"][0].get("expected").is_none());
        assert!(rep.stamped().to_json().contains("\"timestamp\""));
        let md = Report::new("x", Value::Null, vec![], Value::Null).to_markdown();
        assert!(md.contains("result: **pass**"));
    }
}
