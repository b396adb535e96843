//! CSV tables and JSON sidecars.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Column-labelled numeric table; `None` cells are written empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Renders with shortest round-trip decimals.
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.map(|v| format!("{v:?}")).unwrap_or_default()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// `out.csv` gets `out.json`; other names get `.json` appended.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    if csv.extension().is_some_and(|e| e == "csv") {
        csv.with_extension("json")
    } else {
        let mut s = csv.as_os_str().to_owned();
        s.push(".json");
        PathBuf::from(s)
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_stdout(contents: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    out.write_all(contents.as_bytes())?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_floats() {
        let mut t = Table::new(vec!["threshold", "value"]);
        t.push(vec![Some(0.1 + 0.2), None]);
        t.push(vec![Some(1e-300), Some(1.0)]);
        let csv = t.to_csv();
        assert_eq!(csv.lines().next(), Some("threshold,value"));
        let back: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
        assert_eq!(back, vec![0.1 + 0.2, 1e-300]);
        assert!(csv.contains("0.30000000000000004,\n"));
    }

    #[test]
    fn sidecar_names() {
        assert_eq!(sidecar_path(Path::new("a/out.csv")), PathBuf::from("a/out.json"));
        assert_eq!(sidecar_path(Path::new("out.dat")), PathBuf::from("out.dat.json"));
    }
}
