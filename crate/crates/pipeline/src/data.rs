//! CSV ingestion with schema checks, and input hashing.
//!
//! Files have a mandatory header row. Lines starting with `#` are comments
//! (fixtures record their generating parameters there).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{PipelineError, Result};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Numeric columns of one CSV file.
#[derive(Clone, Debug)]
pub struct Table {
    pub path: PathBuf,
    pub sha256: String,
    pub columns: BTreeMap<String, Vec<f64>>,
    pub rows: usize,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| PipelineError::io(path, e))?;
        Self::from_bytes(path, &bytes)
    }

    pub fn from_bytes(path: &Path, bytes: &[u8]) -> Result<Self> {
        let schema = |row: Option<usize>, column: Option<&str>, message: String| PipelineError::Schema {
            path: path.to_path_buf(),
            row,
            column: column.map(str::to_owned),
            message,
        };
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(bytes);
        let headers: Vec<String> = rdr
            .headers()
            .map_err(|e| schema(None, None, format!("unreadable header: {e}")))?
            .iter()
            .map(str::to_owned)
            .collect();
        if headers.iter().all(|h| h.is_empty()) {
            return Err(schema(None, None, "missing header row".into()));
        }
        let mut columns: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for h in &headers {
            if columns.insert(h.clone(), Vec::new()).is_some() {
                return Err(schema(None, Some(h), "duplicate column".into()));
            }
        }
        let mut rows = 0;
        for (k, rec) in rdr.records().enumerate() {
            let row = k + 1;
            let rec = rec.map_err(|e| schema(Some(row), None, e.to_string()))?;
            if rec.len() != headers.len() {
                return Err(schema(Some(row), None, format!("{} fields, header has {}", rec.len(), headers.len())));
            }
            for (h, field) in headers.iter().zip(rec.iter()) {
                let v: f64 =
                    field.parse().map_err(|_| schema(Some(row), Some(h), format!("`{field}` is not a number")))?;
                if !v.is_finite() {
                    return Err(schema(Some(row), Some(h), format!("`{field}` is not finite")));
                }
                columns.get_mut(h).expect("column exists").push(v);
            }
            rows += 1;
        }
        if rows == 0 {
            return Err(schema(None, None, "no data rows".into()));
        }
        Ok(Self { path: path.to_path_buf(), sha256: sha256_hex(bytes), columns, rows })
    }

    pub fn has(&self, name: &str) -> bool {
        self.columns.contains_key(name)
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.columns.get(name).map(Vec::as_slice).ok_or_else(|| PipelineError::Schema {
            path: self.path.clone(),
            row: None,
            column: Some(name.to_owned()),
            message: format!("missing required column (found: {})", self.header_list()),
        })
    }

    pub fn optional(&self, name: &str) -> Option<&[f64]> {
        self.columns.get(name).map(Vec::as_slice)
    }

    fn header_list(&self) -> String {
        self.columns.keys().cloned().collect::<Vec<_>>().join(", ")
    }

    /// Schema error for a value that parses but violates a domain rule.
    pub fn invalid(&self, row: usize, column: &str, message: impl Into<String>) -> PipelineError {
        PipelineError::Schema {
            path: self.path.clone(),
            row: Some(row),
            column: Some(column.to_owned()),
            message: message.into(),
        }
    }

    /// Requires every value in `column` to be strictly positive.
    pub fn positive(&self, column: &str) -> Result<&[f64]> {
        let v = self.column(column)?;
        if let Some(k) = v.iter().position(|&x| !(x > 0.0)) {
            return Err(self.invalid(k + 1, column, format!("value {} must be positive", v[k])));
        }
        Ok(v)
    }
}

/// Writes a plain CSV with a header and numeric rows.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let io = |e: csv::Error| PipelineError::io(path, std::io::Error::other(e));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r.iter().map(|v| format!("{v:e}"))).map_err(io)?;
    }
    w.flush().map_err(|e| PipelineError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(text: &str) -> Result<Table> {
        Table::from_bytes(Path::new("t.csv"), text.as_bytes())
    }

    #[test]
    fn comments_and_whitespace_are_ignored() {
        let t = table("# made by hand\ntime_s, population\n0, 1\n# mid comment\n1e-6, 0.5\n").unwrap();
        assert_eq!(t.rows, 2);
        assert_eq!(t.column("population").unwrap(), &[1.0, 0.5]);
    }

    #[test]
    fn missing_column_is_named() {
        let t = table("time_s,pop\n0,1\n").unwrap();
        let msg = t.column("population").unwrap_err().to_string();
        assert!(msg.contains("`population`"), "{msg}");
    }

    #[test]
    fn bad_cell_names_row_and_column() {
        let msg = table("a,b\n1,2\n3,x\n").unwrap_err().to_string();
        assert!(msg.contains("row 2") && msg.contains("`b`"), "{msg}");
    }

    #[test]
    fn ragged_row_is_rejected() {
        assert!(table("a,b\n1,2\n3\n").is_err());
    }

    #[test]
    fn hash_is_of_raw_bytes() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
        let a = table("a\n1\n").unwrap();
        let b = table("a\n1.0\n").unwrap();
        assert_ne!(a.sha256, b.sha256);
    }
}
