use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// value ≤ bound
    AtMost,
    /// value ≥ bound
    AtLeast,
    /// value < bound
    Below,
    /// value is exactly the bound
    Equals,
}

/// One machine-readable assertion.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub statement: String,
    pub value: f64,
    pub relation: Relation,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, statement: impl Into<String>, value: f64, relation: Relation, bound: f64) -> Self {
        let pass = match relation {
            Relation::AtMost => value <= bound,
            Relation::AtLeast => value >= bound,
            Relation::Below => value < bound,
            Relation::Equals => value == bound,
        };
        Self { name: name.into(), statement: statement.into(), value, relation, bound, pass }
    }

    pub fn at_most(name: impl Into<String>, statement: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, statement, value, Relation::AtMost, bound)
    }

    pub fn flag(name: impl Into<String>, statement: impl Into<String>, ok: bool) -> Self {
        Self::new(name, statement, if ok { 1.0 } else { 0.0 }, Relation::Equals, 1.0)
    }
}

/// A CSV table; cells are preformatted so output is byte-stable.
#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn nums(xs: &[f64]) -> String {
    xs.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" ")
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub experiment: String,
    pub pass: bool,
    pub config: ExperimentConfig,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(experiment: &str, config: &ExperimentConfig) -> Self {
        Self { experiment: experiment.into(), pass: true, config: config.clone(), checks: Vec::new(), tables: Vec::new(), notes: Vec::new() }
    }

    pub fn check(&mut self, c: Check) {
        self.pass &= c.pass;
        self.checks.push(c);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Invalid(e.to_string()))
    }

    pub fn table_csv(table: &Table) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Invalid(e.to_string());
        w.write_record(&table.header).map_err(csv_err)?;
        for r in &table.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| Error::Invalid(e.to_string()))
    }

    /// Writes `<experiment>.json` and one `<experiment>_<table>.csv` per table.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        let json = dir.join(format!("{}.json", self.experiment));
        std::fs::write(&json, self.to_json()?)?;
        out.push(json);
        for t in &self.tables {
            let p = dir.join(format!("{}_{}.csv", self.experiment, t.name));
            std::fs::write(&p, Self::table_csv(t)?)?;
            out.push(p);
        }
        Ok(out)
    }

    /// One line per check.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let rel = match c.relation {
                Relation::AtMost => "<=",
                Relation::AtLeast => ">=",
                Relation::Below => "<",
                Relation::Equals => "==",
            };
            s.push_str(&format!("{} {}: {:.3e} {rel} {:.3e}\n", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.bound));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations() {
        assert!(Check::at_most("a", "", 1.0, 1.0).pass);
        assert!(!Check::new("b", "", 1.0, Relation::Below, 1.0).pass);
        assert!(Check::new("c", "", 2.0, Relation::AtLeast, 1.0).pass);
        assert!(!Check::flag("d", "", false).pass);
        assert!(!Check::at_most("nan", "", f64::NAN, 1.0).pass);
    }

    #[test]
    fn report_tracks_failures_and_writes() {
        let mut r = Report::new("demo", &ExperimentConfig::default());
        r.check(Check::at_most("ok", "", 0.0, 1.0));
        r.check(Check::at_most("bad", "", 2.0, 1.0));
        let mut t = Table::new("rows", &["x", "y"]);
        t.push(vec![num(1.0), num(0.5)]);
        r.tables.push(t);
        assert!(!r.pass);
        assert_eq!(r.failed().count(), 1);
        let dir = std::env::temp_dir().join(format!("quatrep-report-{}", std::process::id()));
        let files = r.write(&dir).unwrap();
        assert_eq!(files.len(), 2);
        let csv = std::fs::read_to_string(&files[1]).unwrap();
        assert!(csv.starts_with("x,y\n1.0000000000000000e0,5.0000000000000000e-1"));
        std::fs::remove_dir_all(dir).unwrap();
    }
}
