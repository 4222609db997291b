use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// One CSV field.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Real(f64),
    Text(String),
}

impl Cell {
    pub fn as_real(&self) -> Option<f64> {
        match self {
            Cell::Real(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }
}

impl fmt::Display for Cell {
    /// Reals use 17 significant digits, which round-trips every `f64`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Real(v) => write!(f, "{v:.16e}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

pub type SweepRow = Vec<Cell>;

/// Header plus rows of equal width.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Table { header, rows: Vec::new() }
    }

    /// Index of a named column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// All values of a real column; `None` if the column is missing or textual.
    pub fn reals(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.column(name)?;
        self.rows.iter().map(|r| r[j].as_real()).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        emit_csv(&self.rows, &self.header, out)
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let io = |source| Error::Io { path: path.to_path_buf(), source };
        let file = File::create(path).map_err(io)?;
        let mut w = BufWriter::new(file);
        self.write_csv(&mut w)?;
        w.flush().map_err(io)
    }
}

fn csv_error(e: csv::Error) -> Error {
    let path = std::path::PathBuf::from("<csv>");
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io { path, source },
        other => Error::Contract(format!("csv: {other:?}")),
    }
}

/// RFC 4180 CSV with LF line endings and the header first.
pub fn emit_csv<W: Write>(rows: &[SweepRow], header: &[String], destination: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(destination);
    w.write_record(header).map_err(csv_error)?;
    for (i, row) in rows.iter().enumerate() {
        if row.len() != header.len() {
            return Err(Error::contract(format!("row {i} has {} fields, header has {}", row.len(), header.len())));
        }
        w.write_record(row.iter().map(|c| c.to_string())).map_err(csv_error)?;
    }
    w.flush().map_err(|source| Error::Io { path: "<csv>".into(), source })
}

/// Reads back a CSV file produced by [`emit_csv`]; fields that parse as
/// numbers become reals.
pub fn read_csv<R: Read>(source: R) -> Result<Table> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header = r.headers().map_err(csv_error)?.iter().map(String::from).collect();
    let mut table = Table::new(header);
    for rec in r.records() {
        let rec = rec.map_err(csv_error)?;
        table.rows.push(
            rec.iter()
                .map(|f| match f.parse::<f64>() {
                    Ok(v) => Cell::Real(v),
                    Err(_) => Cell::Text(f.to_string()),
                })
                .collect(),
        );
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_only() {
        let mut buf = Vec::new();
        emit_csv(&[], &["p".into(), "i1".into()], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "p,i1\n");
    }

    #[test]
    fn one_row() {
        let mut buf = Vec::new();
        emit_csv(&[vec![0.5.into(), 0.25.into()]], &["p".into(), "i1".into()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "p,i1\n5.0000000000000000e-1,2.5000000000000000e-1\n");
        let back = read_csv(text.as_bytes()).unwrap();
        assert_eq!(back.rows, vec![vec![Cell::Real(0.5), Cell::Real(0.25)]]);
    }

    #[test]
    fn text_fields_are_quoted() {
        let mut buf = Vec::new();
        emit_csv(&[vec![Cell::Text("a,b".into())]], &["label".into()], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "label\n\"a,b\"\n");
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = emit_csv(&[vec![1.0.into()]], &["a".into(), "b".into()], Vec::new()).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn round_trip_is_bit_exact(
            rows in prop::collection::vec(prop::collection::vec(
                prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 3), 0..20)
        ) {
            let header: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
            let rows: Vec<SweepRow> = rows.into_iter().map(|r| r.into_iter().map(Cell::Real).collect()).collect();
            let mut buf = Vec::new();
            emit_csv(&rows, &header, &mut buf).unwrap();
            let back = read_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(&back.header, &header);
            prop_assert_eq!(back.rows.len(), rows.len());
            for (x, y) in back.rows.iter().flatten().zip(rows.iter().flatten()) {
                prop_assert_eq!(x.as_real().unwrap().to_bits(), y.as_real().unwrap().to_bits());
            }
        }
    }
}
