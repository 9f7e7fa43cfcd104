//! Multivariate sample ingestion, validation, and standardization.
//!
//! A [`Dataset`] is an immutable n x p numeric matrix with named columns.
//! Columns are stored contiguously so downstream regressions can borrow
//! column views without copying.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// An n x p sample of p variables over n observations.
///
/// Invariants: n >= 2, p >= 2, every entry finite. A column flagged as
/// standardized has sample mean 0 and sample variance 1 (denominator n-1)
/// within 1e-10.
#[derive(Debug, Clone)]
pub struct Dataset {
    columns: Vec<Vec<f64>>,
    names: Vec<String>,
    standardized: Vec<bool>,
    n: usize,
}

impl Dataset {
    /// Builds a dataset from column vectors. All columns must share the same
    /// length, contain only finite values, and satisfy n >= 2, p >= 2.
    pub fn from_columns(columns: Vec<Vec<f64>>, names: Vec<String>) -> Result<Self> {
        let p = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        if n < 2 || p < 2 {
            return Err(Error::DatasetTooSmall { n, p });
        }
        if names.len() != p {
            return Err(Error::InvalidParameter(format!(
                "{} column names for {} columns",
                names.len(),
                p
            )));
        }
        for (j, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::RaggedRow {
                    row: 0,
                    expected: n,
                    found: col.len(),
                });
            }
            for (i, &x) in col.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::NonFiniteCell {
                        row: i + 1,
                        col: j + 1,
                        value: x.to_string(),
                    });
                }
            }
        }
        Ok(Self {
            columns,
            names,
            standardized: vec![false; p],
            n,
        })
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of variables.
    pub fn p(&self) -> usize {
        self.columns.len()
    }

    /// Column labels, in column order.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Per-column standardization flags.
    pub fn standardized(&self) -> &[bool] {
        &self.standardized
    }

    /// Borrowed view of column `v` (0-based), in dataset row order.
    pub fn column(&self, v: usize) -> Result<&[f64]> {
        self.check_index(v)?;
        Ok(&self.columns[v])
    }

    /// Dense n x |U| matrix of the requested columns. The requested set is
    /// iterated in ascending index order regardless of input order, so the
    /// result is deterministic. An empty set yields an n x 0 matrix.
    pub fn columns_matrix(&self, set: &[usize]) -> Result<DMatrix<f64>> {
        let sorted = self.validate_set(set)?;
        let mut m = DMatrix::zeros(self.n, sorted.len());
        for (k, &v) in sorted.iter().enumerate() {
            m.column_mut(k).copy_from_slice(&self.columns[v]);
        }
        Ok(m)
    }

    /// Validates a variable set: indices in range, no duplicates. Returns the
    /// set sorted ascending.
    pub fn validate_set(&self, set: &[usize]) -> Result<Vec<usize>> {
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateIndex { index: w[0] });
            }
        }
        if let Some(&last) = sorted.last() {
            self.check_index(last)?;
        }
        Ok(sorted)
    }

    fn check_index(&self, v: usize) -> Result<()> {
        if v >= self.p() {
            return Err(Error::IndexOutOfRange { index: v, p: self.p() });
        }
        Ok(())
    }

    /// Returns a copy in which every column has sample mean 0 and variance 1
    /// (denominator n-1). Errors on any zero-variance column.
    pub fn standardize(&self) -> Result<Self> {
        let n = self.n as f64;
        let mut columns = Vec::with_capacity(self.p());
        for (j, col) in self.columns.iter().enumerate() {
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            if var <= 0.0 {
                return Err(Error::ConstantColumn {
                    index: j,
                    name: self.names[j].clone(),
                });
            }
            let sd = var.sqrt();
            columns.push(col.iter().map(|x| (x - mean) / sd).collect());
        }
        Ok(Self {
            columns,
            names: self.names.clone(),
            standardized: vec![true; self.p()],
            n: self.n,
        })
    }

    /// Loads a comma-separated file of finite reals. With `has_header`, the
    /// first row supplies column names; otherwise names are "Y1".."Yp".
    pub fn load_csv<P: AsRef<Path>>(path: P, has_header: bool) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(BufReader::new(file), has_header)
    }

    /// Parses CSV content from any reader; see [`Dataset::load_csv`].
    pub fn read_csv<R: BufRead>(reader: R, has_header: bool) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut columns: Vec<Vec<f64>> = Vec::new();
        let mut data_row = 0usize;
        for (line_no, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if line_no == 0 {
                if has_header {
                    names = fields.iter().map(|s| s.trim().to_string()).collect();
                    columns = vec![Vec::new(); names.len()];
                    continue;
                }
                names = (1..=fields.len()).map(|j| format!("Y{j}")).collect();
                columns = vec![Vec::new(); names.len()];
            }
            data_row += 1;
            if fields.len() != columns.len() {
                return Err(Error::RaggedRow {
                    row: line_no + 1,
                    expected: columns.len(),
                    found: fields.len(),
                });
            }
            for (j, field) in fields.iter().enumerate() {
                let value: f64 = field.trim().parse().map_err(|e| Error::CsvCell {
                    row: line_no + 1,
                    col: j + 1,
                    msg: format!("`{}`: {}", field.trim(), e),
                })?;
                if !value.is_finite() {
                    return Err(Error::NonFiniteCell {
                        row: line_no + 1,
                        col: j + 1,
                        value: field.trim().to_string(),
                    });
                }
                columns[j].push(value);
            }
        }
        if data_row < 2 || columns.len() < 2 {
            return Err(Error::DatasetTooSmall {
                n: data_row,
                p: columns.len(),
            });
        }
        Self::from_columns(columns, names)
    }

    /// Writes the dataset as CSV with a header row. Values are emitted in
    /// shortest round-trip form, so `load_csv(write_csv(d))` reproduces the
    /// values exactly.
    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "{}", self.names.join(","))?;
        for i in 0..self.n {
            let row: Vec<String> = self.columns.iter().map(|c| c[i].to_string()).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}
