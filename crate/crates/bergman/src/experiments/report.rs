//! Structured results and their deterministic JSON/CSV emission.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::config::{ExperimentConfig, PMargin};
use crate::error::Result;

/// A number that survives JSON round trips even when infinite or NaN
/// (those are written as the strings `"inf"`, `"-inf"`, `"nan"`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl From<f64> for Num {
    fn from(x: f64) -> Self {
        Num(x)
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let x = self.0;
        if x.is_finite() {
            s.serialize_f64(x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            F(f64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::F(x) => Ok(Num(x)),
            Raw::S(s) => match s.as_str() {
                "inf" => Ok(Num(f64::INFINITY)),
                "-inf" => Ok(Num(f64::NEG_INFINITY)),
                "nan" => Ok(Num(f64::NAN)),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

impl std::fmt::Display for Num {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_finite() {
            write!(f, "{}", self.0)
        } else if self.0.is_nan() {
            write!(f, "nan")
        } else if self.0 > 0.0 {
            write!(f, "inf")
        } else {
            write!(f, "-inf")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Num>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row.iter().map(|&x| Num(x)).collect());
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j].0).collect())
    }
}

/// One checked inequality. `margin ≥ 0` exactly when it passed, except for
/// purely logical checks, which use `±1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub margin: Num,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub cutoff: Num,
    pub margins: Vec<PMargin>,
    pub tables: Vec<Table>,
    pub constants: BTreeMap<String, Num>,
    pub assertions: Vec<Assertion>,
    /// Set when any region used was cut off at the tree depth.
    pub truncated: bool,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(experiment: &str, config: &ExperimentConfig) -> Self {
        Self {
            experiment: experiment.into(),
            config: config.clone(),
            cutoff: Num(config.cutoff()),
            margins: config.margins(),
            tables: Vec::new(),
            constants: BTreeMap::new(),
            assertions: Vec::new(),
            truncated: false,
            notes: Vec::new(),
        }
    }

    pub fn constant(&mut self, name: impl Into<String>, value: f64) {
        self.constants.insert(name.into(), Num(value));
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.constants.get(name).map(|n| n.0)
    }

    /// Records `value ≤ bound` (margin `bound − value`).
    pub fn check_le(&mut self, name: impl Into<String>, value: f64, bound: f64) -> bool {
        let passed = value <= bound;
        self.assertions.push(Assertion {
            name: name.into(),
            passed,
            margin: Num(bound - value),
            detail: format!("{} <= {}", Num(value), Num(bound)),
        });
        passed
    }

    /// Records `value ≥ bound` (margin `value − bound`).
    pub fn check_ge(&mut self, name: impl Into<String>, value: f64, bound: f64) -> bool {
        let passed = value >= bound;
        self.assertions.push(Assertion {
            name: name.into(),
            passed,
            margin: Num(value - bound),
            detail: format!("{} >= {}", Num(value), Num(bound)),
        });
        passed
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> bool {
        self.assertions.push(Assertion {
            name: name.into(),
            passed,
            margin: Num(if passed { 1.0 } else { -1.0 }),
            detail: detail.into(),
        });
        passed
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn failures(&self) -> Vec<&Assertion> {
        self.assertions.iter().filter(|a| !a.passed).collect()
    }

    /// Appends another report's tables, constants, assertions and notes,
    /// prefixing names with `prefix`.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut t in other.tables {
            t.name = format!("{prefix}.{}", t.name);
            self.tables.push(t);
        }
        for (k, v) in other.constants {
            self.constants.insert(format!("{prefix}.{k}"), v);
        }
        for mut a in other.assertions {
            a.name = format!("{prefix}.{}", a.name);
            self.assertions.push(a);
        }
        self.notes.extend(other.notes.into_iter().map(|n| format!("{prefix}: {n}")));
        self.truncated |= other.truncated;
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Writes `<dir>/<experiment>.json` and one `<dir>/<experiment>.<table>.csv`
    /// per table; returns the paths written.
    pub fn emit(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut paths = Vec::new();
        let json = dir.join(format!("{}.json", self.experiment));
        std::fs::write(&json, self.to_json()? + "\n")?;
        paths.push(json);
        for t in &self.tables {
            let path = dir.join(format!("{}.{}.csv", self.experiment, t.name));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(&t.columns)?;
            for row in &t.rows {
                w.write_record(row.iter().map(|x| x.to_string()))?;
            }
            w.flush()?;
            paths.push(path);
        }
        Ok(paths)
    }
}

/// Largest over smallest of positive values; infinite when any is zero.
pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if values.is_empty() {
        return 1.0;
    }
    if min <= 0.0 {
        return f64::INFINITY;
    }
    max / min
}

/// `max(a/b, b/a)`.
pub fn drift(a: f64, b: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        return if a == b { 1.0 } else { f64::INFINITY };
    }
    (a / b).max(b / a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_determinism() {
        let cfg = ExperimentConfig::default();
        let mut r = Report::new("demo", &cfg);
        let empty = r.to_json().unwrap();
        assert_eq!(Report::from_json(&empty).unwrap(), r);
        let mut t = Table::new("rows", &["a", "b"]);
        t.push(&[1.0, f64::INFINITY]);
        t.push(&[0.1 + 0.2, -3.5e-300]);
        r.tables.push(t);
        r.constant("c", 1.0 / 3.0);
        r.check_le("small", 1.0, 2.0);
        assert!(!r.check_ge("big", 1.0, 2.0));
        let text = r.to_json().unwrap();
        assert_eq!(Report::from_json(&text).unwrap(), r);
        let dir = tempfile::tempdir().unwrap();
        let a = r.emit(dir.path()).unwrap();
        let first: Vec<Vec<u8>> = a.iter().map(|p| std::fs::read(p).unwrap()).collect();
        let b = r.emit(dir.path()).unwrap();
        let second: Vec<Vec<u8>> = b.iter().map(|p| std::fs::read(p).unwrap()).collect();
        assert_eq!(first, second);
        assert!(!r.passed());
        assert_eq!(spread(&[2.0, 4.0]), 2.0);
    }
}
