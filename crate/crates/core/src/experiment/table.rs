use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::write_atomic;

/// A rectangular table of optional reals with named columns. Missing values
/// are written as empty CSV cells.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    columns: Vec<String>,
    rows: Vec<Vec<Option<f64>>>,
}

impl ResultTable {
    pub fn new(columns: &[&str]) -> Self {
        ResultTable {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::LengthMismatch {
                left: self.columns.len(),
                right: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Option<f64>>] {
        &self.rows
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Fails unless the header is exactly `expected`.
    pub fn check_schema(&self, expected: &[&str]) -> Result<()> {
        if self.columns.iter().map(String::as_str).eq(expected.iter().copied()) {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "expected columns {}, found {}",
                expected.join(","),
                self.columns.join(",")
            )))
        }
    }

    /// CSV text; numbers use Rust's shortest round-trip formatting, so the
    /// output is byte-stable and locale-independent.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                if let Some(v) = v {
                    write!(out, "{v}").unwrap();
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_csv(text: &str, path: &Path) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| parse_err(1, "missing header".into()))?;
        let columns: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
        let mut table = ResultTable {
            columns,
            rows: Vec::new(),
        };
        for (lineno, line) in lines {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != table.columns.len() {
                return Err(parse_err(
                    lineno + 1,
                    format!("expected {} cells, found {}", table.columns.len(), cells.len()),
                ));
            }
            let row = cells
                .iter()
                .map(|c| {
                    let c = c.trim();
                    if c.is_empty() {
                        Ok(None)
                    } else {
                        c.parse::<f64>()
                            .map(Some)
                            .map_err(|_| parse_err(lineno + 1, format!("not a number: {c:?}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            table.rows.push(row);
        }
        Ok(table)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_csv(&text, path)
    }

    /// Atomic write.
    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv().as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_with_missing_cells() {
        let mut t = ResultTable::new(&["eps", "lstm_accuracy"]);
        t.push(vec![Some(1.0), None]).unwrap();
        t.push(vec![Some(1.25), Some(0.812_345_678_901_234_5)]).unwrap();
        let csv = t.to_csv();
        assert_eq!(csv, "eps,lstm_accuracy\n1,\n1.25,0.8123456789012345\n");
        let back = ResultTable::parse_csv(&csv, Path::new("x")).unwrap();
        assert_eq!(back, t);
        back.check_schema(&["eps", "lstm_accuracy"]).unwrap();
        assert!(back.check_schema(&["eps"]).is_err());
    }

    #[test]
    fn rejects_ragged_rows() {
        let mut t = ResultTable::new(&["a", "b"]);
        assert!(t.push(vec![Some(1.0)]).is_err());
        assert!(ResultTable::parse_csv("a,b\n1\n", Path::new("x")).is_err());
        assert!(ResultTable::parse_csv("a,b\n1,zz\n", Path::new("x")).is_err());
    }
}
