//! CSV ingestion and output.
//!
//! Files must have a header row and numeric cells only. Line numbers in errors
//! are 1-based and count the header as line 1.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{Dataset, Series};

/// Numeric columns of a CSV file, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    fn index(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        Ok(&self.columns[self.index(name)?])
    }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io.to_string()),
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => Error::Parse {
            line,
            column: "-".into(),
            message: format!("expected {expected_len} fields, found {len}"),
        },
        csv::ErrorKind::Utf8 { err, .. } => Error::Parse {
            line,
            column: "-".into(),
            message: err.to_string(),
        },
        other => Error::Parse {
            line,
            column: "-".into(),
            message: format!("{other:?}"),
        },
    }
}

pub fn read_table(path: &Path) -> Result<Table> {
    if !path.is_file() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let headers: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers.is_empty() || headers.iter().all(String::is_empty) {
        return Err(Error::EmptyInput(format!("{} has no header row", path.display())));
    }
    let mut columns = vec![Vec::new(); headers.len()];
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        for (j, cell) in record.iter().enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                line,
                column: headers[j].clone(),
                message: format!("'{cell}' is not a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::NonFiniteValue {
                    location: format!("line {line}, column {}", headers[j]),
                });
            }
            columns[j].push(value);
        }
    }
    Ok(Table { headers, columns })
}

/// `response` becomes `Y`; every other column is a covariate, in file order.
pub fn read_dataset(path: &Path, response: &str) -> Result<Dataset> {
    let table = read_table(path)?;
    let r = table.index(response)?;
    let covariates: Vec<usize> = (0..table.headers.len()).filter(|&j| j != r).collect();
    if covariates.is_empty() {
        return Err(Error::EmptyInput(format!(
            "{} has no covariate columns besides '{response}'",
            path.display()
        )));
    }
    let n = table.columns[r].len();
    let x = DMatrix::from_fn(n, covariates.len(), |i, k| table.columns[covariates[k]][i]);
    Dataset::new(table.columns[r].clone(), x)
}

pub fn read_series(path: &Path, column: &str) -> Result<Series> {
    let table = read_table(path)?;
    Series::new(table.column(column)?.to_vec())
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn write_rows(path: &Path, headers: &[String], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(headers).map_err(|e| io_error(path, e))?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string())).map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

/// Header `y,x1,..,xp`.
pub fn write_dataset(path: &Path, data: &Dataset) -> Result<()> {
    let headers: Vec<String> = std::iter::once("y".to_string())
        .chain((1..=data.p()).map(|j| format!("x{j}")))
        .collect();
    let rows = (0..data.n()).map(|i| {
        std::iter::once(data.y()[i])
            .chain(data.x().row(i).iter().copied())
            .collect()
    });
    write_rows(path, &headers, rows)
}

/// Single column `y`.
pub fn write_series(path: &Path, series: &Series) -> Result<()> {
    write_rows(path, &["y".to_string()], series.values().iter().map(|&v| vec![v]))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = File::create(path).map_err(|e| io_error(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| io_error(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file_with(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn dataset_by_response_name() {
        let f = file_with("x1,y,x2\n1,2,3\n4,5,7\n7,8,8\n1,1,2\n0,3,5\n");
        let d = read_dataset(f.path(), "y").unwrap();
        assert_eq!((d.n(), d.p()), (5, 2));
        assert_eq!(d.y()[1], 5.0);
        assert_eq!(d.x()[(1, 0)], 4.0);
        assert_eq!(d.x()[(1, 1)], 7.0);
    }

    #[test]
    fn header_only() {
        let f = file_with("y,x1,x2\n");
        assert_eq!(read_dataset(f.path(), "y").unwrap_err().code(), "TOO_FEW_ROWS");
    }

    #[test]
    fn bad_cell_reports_line_and_column() {
        let f = file_with("y,x1\n1,2\n3,4\nabc,5\n");
        assert_eq!(
            read_dataset(f.path(), "y").unwrap_err(),
            Error::Parse {
                line: 4,
                column: "y".into(),
                message: "'abc' is not a number".into()
            }
        );
    }

    #[test]
    fn missing_things() {
        let f = file_with("a,b\n1,2\n");
        assert_eq!(read_dataset(f.path(), "y").unwrap_err().code(), "MISSING_COLUMN");
        assert_eq!(
            read_series(Path::new("/nonexistent/file.csv"), "y").unwrap_err().code(),
            "FILE_NOT_FOUND"
        );
        let g = file_with("y,x\n1,inf\n");
        assert_eq!(read_dataset(g.path(), "y").unwrap_err().code(), "NON_FINITE_VALUE");
    }

    #[test]
    fn round_trip_series() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let s = Series::new(vec![0.1, -2.5, 3.0, 1e-17]).unwrap();
        write_series(&path, &s).unwrap();
        assert_eq!(read_series(&path, "y").unwrap(), s);
    }
}
