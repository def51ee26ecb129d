//! An immutable, named-column time series table.

use super::ScmError;
use chrono::NaiveDateTime;
use std::io::Write;
use std::path::Path;

/// A T x d aligned numeric table with named components and optional
/// timestamps. Immutable after construction; transforms return new values.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesDataset {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    timestamps: Option<Vec<NaiveDateTime>>,
}

impl TimeSeriesDataset {
    pub fn new(columns: Vec<(String, Vec<f64>)>) -> Result<Self, ScmError> {
        let mut names = Vec::with_capacity(columns.len());
        let mut data = Vec::with_capacity(columns.len());
        let mut len: Option<usize> = None;
        for (name, col) in columns {
            if names.contains(&name) {
                return Err(ScmError::DuplicateColumn(name));
            }
            match len {
                None => len = Some(col.len()),
                Some(l) if l != col.len() => return Err(ScmError::RaggedColumns),
                _ => {}
            }
            names.push(name);
            data.push(col);
        }
        Ok(Self { names, columns: data, timestamps: None })
    }

    pub fn with_timestamps(mut self, ts: Vec<NaiveDateTime>) -> Result<Self, ScmError> {
        if ts.len() != self.len() {
            return Err(ScmError::RaggedColumns);
        }
        self.timestamps = Some(ts);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.columns.first().map(|c| c.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    pub fn column(&self, name: &str) -> Result<&[f64], ScmError> {
        let idx = self
            .names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| ScmError::MissingColumn(name.to_string()))?;
        Ok(&self.columns[idx])
    }

    pub fn timestamps(&self) -> Option<&[NaiveDateTime]> {
        self.timestamps.as_deref()
    }

    /// A copy with one column added or replaced.
    pub fn with_column(&self, name: &str, values: Vec<f64>) -> Result<Self, ScmError> {
        if values.len() != self.len() && !self.names.is_empty() {
            return Err(ScmError::RaggedColumns);
        }
        let mut out = self.clone();
        match out.names.iter().position(|n| n == name) {
            Some(i) => out.columns[i] = values,
            None => {
                out.names.push(name.to_string());
                out.columns.push(values);
            }
        }
        Ok(out)
    }

    /// A copy restricted to the rows where `keep` is true.
    pub fn filter_rows(&self, keep: &[bool]) -> Result<Self, ScmError> {
        if keep.len() != self.len() {
            return Err(ScmError::RaggedColumns);
        }
        let columns = self
            .columns
            .iter()
            .map(|col| {
                col.iter()
                    .zip(keep)
                    .filter(|(_, &k)| k)
                    .map(|(&v, _)| v)
                    .collect::<Vec<f64>>()
            })
            .collect::<Vec<_>>();
        let timestamps = self.timestamps.as_ref().map(|ts| {
            ts.iter()
                .zip(keep)
                .filter(|(_, &k)| k)
                .map(|(&t, _)| t)
                .collect::<Vec<_>>()
        });
        Ok(Self { names: self.names.clone(), columns, timestamps })
    }

    pub fn require_finite(&self) -> Result<(), ScmError> {
        for (name, col) in self.names.iter().zip(&self.columns) {
            if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                return Err(ScmError::NonFinite { column: name.clone(), row });
            }
        }
        Ok(())
    }

    /// Write as CSV with a leading integer index column `t`.
    pub fn write_csv(&self, path: &Path) -> Result<(), ScmError> {
        let mut file = std::fs::File::create(path).map_err(|e| ScmError::Csv(e.to_string()))?;
        let mut header = vec!["t".to_string()];
        header.extend(self.names.iter().cloned());
        writeln!(file, "{}", header.join(",")).map_err(|e| ScmError::Csv(e.to_string()))?;
        for t in 0..self.len() {
            let mut row = vec![t.to_string()];
            for col in &self.columns {
                row.push(format!("{}", col[t]));
            }
            writeln!(file, "{}", row.join(",")).map_err(|e| ScmError::Csv(e.to_string()))?;
        }
        Ok(())
    }

    /// Read a headered numeric CSV. A `t` or `timestamp` column is skipped
    /// (this reader is for simulation-style files; market files with real
    /// timestamps go through the dataset layer).
    pub fn read_csv(path: &Path) -> Result<Self, ScmError> {
        let mut rdr = csv::Reader::from_path(path).map_err(|e| ScmError::Csv(e.to_string()))?;
        let headers: Vec<String> = rdr
            .headers()
            .map_err(|e| ScmError::Csv(e.to_string()))?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();
        let keep: Vec<bool> = headers
            .iter()
            .map(|h| h != "t" && h != "timestamp")
            .collect();
        let mut columns: Vec<Vec<f64>> = headers.iter().map(|_| Vec::new()).collect();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| ScmError::Csv(e.to_string()))?;
            for (i, field) in record.iter().enumerate() {
                if i >= headers.len() || !keep[i] {
                    continue;
                }
                let v: f64 = field.trim().parse().map_err(|_| {
                    ScmError::Csv(format!(
                        "row {}: cannot parse `{}` in column `{}`",
                        line + 2,
                        field,
                        headers[i]
                    ))
                })?;
                columns[i].push(v);
            }
        }
        let cols = headers
            .into_iter()
            .zip(columns)
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|((name, col), _)| (name, col))
            .collect();
        Self::new(cols)
    }
}
