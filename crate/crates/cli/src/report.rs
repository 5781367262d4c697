//! Report envelope, plot-data CSV and output files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use finsum::measures::PointCloudMeasure;
use serde_json::{json, Value};

use crate::error::{CliError, Status};

/// `(n, value)` pairs written as CSV.
#[derive(Clone, Debug)]
pub struct Series {
    pub name: String,
    pub points: Vec<(u64, f64)>,
}

impl Series {
    pub fn new(name: &str, points: impl IntoIterator<Item = (u64, f64)>) -> Self {
        Series { name: name.to_string(), points: points.into_iter().collect() }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,value\n");
        for (n, v) in &self.points {
            let _ = writeln!(out, "{n},{v}");
        }
        out
    }
}

pub struct Outcome {
    pub pass: bool,
    pub report: Value,
    pub series: Vec<Series>,
    pub artifacts: Vec<(String, Value)>,
    pub clouds: Vec<(String, PointCloudMeasure)>,
}

impl Outcome {
    pub fn new(pass: bool, report: Value) -> Self {
        Outcome { pass, report, series: Vec::new(), artifacts: Vec::new(), clouds: Vec::new() }
    }

    pub fn with_series(mut self, s: Series) -> Self {
        self.series.push(s);
        self
    }

    pub fn with_artifact(mut self, name: &str, v: Value) -> Self {
        self.artifacts.push((name.to_string(), v));
        self
    }

    pub fn with_cloud(mut self, name: &str, c: PointCloudMeasure) -> Self {
        self.clouds.push((name.to_string(), c));
        self
    }
}

pub fn envelope(
    command: &str,
    status: Status,
    inputs: &BTreeMap<String, String>,
    report: Option<&Value>,
    error: Option<&CliError>,
) -> Value {
    let error = error.map(|e| {
        json!({
            "message": e.to_string(),
            "partial": e.partial(),
        })
    });
    json!({
        "schema_version": finsum::SCHEMA_VERSION,
        "command": command,
        "status": status.label(),
        "exit_code": status as i32,
        "inputs": inputs,
        "report": report,
        "error": error,
    })
}

pub fn render(v: &Value) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// Writes `<command>.json`, one CSV per series, named artifacts and cloud columns.
pub fn write_outputs(dir: &Path, command: &str, envelope_text: &str, outcome: Option<&Outcome>) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(format!("{command}.json")), envelope_text)?;
    let Some(o) = outcome else { return Ok(()) };
    for s in &o.series {
        fs::write(dir.join(format!("{command}_{}.csv", s.name)), s.to_csv())?;
    }
    for (name, v) in &o.artifacts {
        fs::write(dir.join(format!("{name}.json")), render(v)?)?;
    }
    for (name, c) in &o.clouds {
        let mut f = std::io::BufWriter::new(fs::File::create(dir.join(format!("{name}_cloud.txt")))?);
        c.write_columns(&mut f)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let s = Series::new("x", [(1, 0.5), (2, 1.0)]);
        assert_eq!(s.to_csv(), "n,value\n1,0.5\n2,1\n");
    }

    #[test]
    fn envelope_has_schema_version() {
        let v = envelope("density", Status::Ok, &BTreeMap::new(), Some(&json!({})), None);
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["status"], "ok");
    }
}
