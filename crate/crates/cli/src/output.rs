//! CSV artifacts with `#` metadata lines, and the text summary.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::CliError;

pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Table {
        Table { name: name.to_string(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Everything a subcommand produces.
#[derive(Default)]
pub struct Report {
    pub tables: Vec<Table>,
    pub summary: Vec<String>,
    /// Violated invariants; a nonempty list makes the run fail.
    pub failures: Vec<String>,
}

impl Report {
    pub fn line(&mut self, s: impl Into<String>) {
        self.summary.push(s.into());
    }

    pub fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }
}

/// Metadata written above the header of every CSV file.
pub struct Meta {
    pub command: String,
    pub config: PathBuf,
    pub seed: Option<u64>,
}

fn write_table(dir: &Path, meta: &Meta, table: &Table) -> Result<PathBuf, CliError> {
    let path = dir.join(format!("{}.csv", table.name));
    let mut file = File::create(&path)?;
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    writeln!(file, "# generated-unix: {now}")?;
    writeln!(file, "# command: {}", meta.command)?;
    writeln!(file, "# config: {}", meta.config.display())?;
    if let Some(s) = meta.seed {
        writeln!(file, "# seed: {s}")?;
    }
    let mut w = csv::Writer::from_writer(file);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(path)
}

/// Writes every table and `summary.txt` into `dir`.
pub fn write_report(dir: &Path, meta: &Meta, report: &Report) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for t in &report.tables {
        paths.push(write_table(dir, meta, t)?);
    }
    let path = dir.join("summary.txt");
    let mut file = File::create(&path)?;
    writeln!(file, "twistlab {}", meta.command)?;
    for s in &report.summary {
        writeln!(file, "{s}")?;
    }
    for f in &report.failures {
        writeln!(file, "FAILED: {f}")?;
    }
    paths.push(path);
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoting_and_metadata() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new("x", &["a", "b"]);
        t.push(vec!["1,2".into(), "say \"hi\"".into()]);
        let report = Report { tables: vec![t], ..Default::default() };
        let meta = Meta { command: "lpoly".into(), config: "c.toml".into(), seed: Some(3) };
        write_report(dir.path(), &meta, &report).unwrap();
        let text = std::fs::read_to_string(dir.path().join("x.csv")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# generated-unix: "));
        assert_eq!(lines[3], "# seed: 3");
        assert_eq!(lines[4], "a,b");
        assert_eq!(lines[5], "\"1,2\",\"say \"\"hi\"\"\"");
    }
}
