//! Verification report and table writers.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

/// Cap on per-suite diagnostic lines kept in a report.
pub const MAX_DIAGNOSTICS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "skip")]
    Skip,
    #[serde(rename = "skip-with-diagnostics")]
    SkipWithDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub status: Status,
    pub checks: usize,
    pub failures: usize,
    pub tolerance: f64,
    /// What residuals are divided by.
    pub scale: &'static str,
    pub max_residual: Option<f64>,
    pub median_residual: Option<f64>,
    pub diagnostics: Vec<String>,
    pub details: BTreeMap<String, serde_json::Value>,
}

impl SuiteReport {
    /// Status and statistics from per-check relative residuals.
    pub fn from_residuals(name: &'static str, tolerance: f64, scale: &'static str, residuals: &[f64]) -> Self {
        let failures = residuals.iter().filter(|r| !(**r <= tolerance)).count();
        Self {
            name,
            status: if failures == 0 { Status::Pass } else { Status::Fail },
            checks: residuals.len(),
            failures,
            tolerance,
            scale,
            max_residual: max(residuals),
            median_residual: median(residuals),
            diagnostics: Vec::new(),
            details: BTreeMap::new(),
        }
    }

    pub fn diagnose(&mut self, line: String) {
        if self.diagnostics.len() < MAX_DIAGNOSTICS {
            self.diagnostics.push(line);
        }
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.details.insert(key.to_owned(), v);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_sha256: String,
    pub rng: &'static str,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub provenance: Provenance,
    pub model: String,
    pub closure: String,
    pub status: Status,
    pub suites: Vec<SuiteReport>,
}

impl VerificationReport {
    pub fn new(provenance: Provenance, model: String, closure: String, suites: Vec<SuiteReport>) -> Self {
        let status = if suites.iter().any(|s| s.status == Status::Fail) {
            Status::Fail
        } else {
            Status::Pass
        };
        Self {
            provenance,
            model,
            closure,
            status,
            suites,
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.name == name)
    }

    /// Pretty JSON followed by a newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }
}

pub fn max(xs: &[f64]) -> Option<f64> {
    xs.iter().copied().reduce(|a, b| if b > a || b.is_nan() { b } else { a })
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Seventeen significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// A table with named columns, written as CSV or as a JSON array of objects.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| (*c).to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|c| match c {
                Cell::Num(x) => fmt17(*x),
                Cell::Text(s) => s.clone(),
                Cell::Empty => String::new(),
            }))?;
        }
        out.flush()?;
        Ok(())
    }

    /// JSON array of row objects; numbers keep 17 significant digits.
    pub fn to_json(&self) -> String {
        let mut s = String::from("[");
        for (i, row) in self.rows.iter().enumerate() {
            s.push_str(if i == 0 { "\n  {" } else { ",\n  {" });
            for (j, (col, cell)) in self.columns.iter().zip(row).enumerate() {
                if j > 0 {
                    s.push_str(", ");
                }
                s.push_str(&serde_json::to_string(col).expect("string"));
                s.push_str(": ");
                match cell {
                    Cell::Num(x) if x.is_finite() => s.push_str(&fmt17(*x)),
                    Cell::Text(t) => s.push_str(&serde_json::to_string(t).expect("string")),
                    _ => s.push_str("null"),
                }
            }
            s.push('}');
        }
        s.push_str(if self.rows.is_empty() { "]\n" } else { "\n]\n" });
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statistics() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(max(&[1.0, 5.0, 2.0]), Some(5.0));
        assert_eq!(max(&[]), None);
        let s = SuiteReport::from_residuals("x", 1e-9, "unit", &[1e-12, f64::NAN]);
        assert_eq!(s.failures, 1);
        assert_eq!(s.status, Status::Fail);
    }

    #[test]
    fn seventeen_digits_round_trip() {
        let x = 0.1 + 0.2;
        let s = fmt17(x);
        assert_eq!(s.split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
        assert_eq!(s.parse::<f64>().unwrap(), x);
    }

    #[test]
    fn table_outputs() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![Cell::Num(1.5), Cell::Text("x,y".into())]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1.5000000000000000e0,\"x,y\"\n");
        let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v[0]["a"], 1.5);
    }
}
